"""Dense statevector / density-operator engine for up to 12 qubits.

Basis convention: site 1 is the most significant bit of the basis index,
so |011> on three qubits is amplitude index 0b011 = 3.  All heavy loops
are numpy bit-twiddling; a Pauli string acts as an index permutation plus
a per-index phase, so no dense matrix is ever built for expectations.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import LIMITS, TOL
from .pauli import PauliError, PauliString, SignedPauliTerm


class StateError(ValueError):
    """Raised on malformed states or operators."""


@dataclass(frozen=True)
class StateVector:
    width: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.width,):
            raise StateError(f"expected {2**self.width} amplitudes, got {amps.shape}")
        if abs(np.linalg.norm(amps) - 1.0) > TOL.norm:
            raise StateError("state vector is not normalised")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def to_json(self) -> list:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]


@dataclass(frozen=True)
class DensityOperator:
    width: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dim = 2**self.width
        if m.shape != (dim, dim):
            raise StateError(f"expected {dim}x{dim} matrix")
        if np.abs(m - m.conj().T).max() > TOL.norm:
            raise StateError("density operator is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TOL.norm or abs(np.trace(m).imag) > TOL.norm:
            raise StateError("density operator trace is not 1")
        if np.linalg.eigvalsh(m).min() < -1e-9:
            raise StateError("density operator is not positive semidefinite")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


# ---------------------------------------------------------------------------
# constructors

def make_pair_superposition(a: str, b: str, amp_a: complex, amp_b: complex) -> StateVector:
    """State amp_a|a> + amp_b|b> for two distinct basis labels."""
    if len(a) != len(b):
        raise StateError("bitstring lengths differ")
    if a == b:
        raise StateError("bitstrings must differ")
    if abs(abs(amp_a) ** 2 + abs(amp_b) ** 2 - 1.0) > TOL.norm:
        raise StateError("|amp_a|^2 + |amp_b|^2 must be 1")
    n = len(a)
    amps = np.zeros(2**n, dtype=complex)
    amps[int(a, 2)] = amp_a
    amps[int(b, 2)] = amp_b
    return StateVector(n, amps)


def ghz_state(n: int, phase: complex = 1.0) -> StateVector:
    """(|0...0> + phase |1...1>)/sqrt(2)."""
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1 / np.sqrt(2)
    amps[-1] = phase / np.sqrt(2)
    return StateVector(n, amps)


def basis_state(bits: str) -> StateVector:
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[int(bits, 2)] = 1.0
    return StateVector(len(bits), amps)


def make_cq_state(
    probs: Sequence[float],
    kets: Sequence[np.ndarray],
    rhos: Sequence[DensityOperator],
) -> DensityOperator:
    """Classical-quantum two-qubit state sum_k p_k |phi_k><phi_k| (x) rho_k.

    The first-qubit kets must be mutually orthonormal; the reduced state
    of qubit 1 is then diagonal in that basis.
    """
    if not (len(probs) == len(kets) == len(rhos)):
        raise StateError("probs, kets, rhos must have equal length")
    p = np.asarray(probs, dtype=float)
    if (p < -TOL.norm).any() or abs(p.sum() - 1.0) > TOL.norm:
        raise StateError("probabilities must be nonnegative and sum to 1")
    kets = [np.asarray(k, dtype=complex) for k in kets]
    for k in kets:
        if k.shape != (2,) or abs(np.linalg.norm(k) - 1.0) > TOL.norm:
            raise StateError("kets must be normalised single-qubit states")
    for i in range(len(kets)):
        for j in range(i + 1, len(kets)):
            if abs(np.vdot(kets[i], kets[j])) > TOL.norm:
                raise StateError("kets must be mutually orthogonal")
    dim2 = rhos[0].matrix.shape[0]
    out = np.zeros((2 * dim2, 2 * dim2), dtype=complex)
    for pk, ket, rho in zip(p, kets, rhos):
        out += pk * np.kron(np.outer(ket, ket.conj()), rho.matrix)
    width = 1 + rhos[0].width
    return DensityOperator(width, out)


# ---------------------------------------------------------------------------
# pauli action and expectations

def _phase_vector(string: PauliString, n: int) -> np.ndarray:
    idx = np.arange(2**n)
    masked = idx & string.z_mask
    # parity of popcount via 12-bit folding (width cap keeps this exact)
    par = masked
    for shift in (8, 4, 2, 1):
        par ^= par >> shift
    sign = 1 - 2 * (par & 1)
    return string.phase * (1j ** string.y_count) * sign


def apply_pauli(string: PauliString, amps: np.ndarray) -> np.ndarray:
    """Return string @ amps using index permutation + per-index phases."""
    n = string.width
    ph = _phase_vector(string, n)
    out = np.zeros_like(amps)
    idx = np.arange(2**n)
    out[idx ^ string.x_mask] = ph * amps
    return out


def expectation(state: StateVector, term: SignedPauliTerm) -> float:
    """coefficient * <psi| string |psi>, guaranteed real for Hermitian terms."""
    if state.width != term.width:
        raise PauliError(f"width mismatch {state.width} != {term.width}")
    val = np.vdot(state.amplitudes, apply_pauli(term.string, state.amplitudes))
    val *= term.coefficient
    if abs(val.imag) > TOL.norm:
        raise StateError(f"non-real expectation {val}")
    return float(val.real)


def expectation_density(rho: DensityOperator, term: SignedPauliTerm) -> float:
    """coefficient * tr(rho * string)."""
    if rho.width != term.width:
        raise PauliError(f"width mismatch {rho.width} != {term.width}")
    n = rho.width
    ph = _phase_vector(term.string, n)
    idx = np.arange(2**n)
    val = term.coefficient * (rho.matrix[idx, idx ^ term.string.x_mask] * ph).sum()
    if abs(val.imag) > TOL.norm:
        raise StateError(f"non-real expectation {val}")
    return float(val.real)


def expectation_sum(state: StateVector, terms: Sequence[SignedPauliTerm]) -> float:
    return sum(expectation(state, t) for t in terms)


# ---------------------------------------------------------------------------
# eigen-extremes

def _check_hermitian(op: np.ndarray) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise StateError("operator must be square")
    if op.shape[0] > 2**LIMITS.max_width:
        raise StateError("operator dimension exceeds cap")
    if np.abs(op - op.conj().T).max() > TOL.norm * max(1.0, np.abs(op).max()):
        raise StateError("operator is not Hermitian")
    return op


def max_eigenvalue(op: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(_check_hermitian(op))[-1])


def max_eigenpair(op: np.ndarray) -> tuple[float, np.ndarray]:
    vals, vecs = np.linalg.eigh(_check_hermitian(op))
    return float(vals[-1]), vecs[:, -1]


def assemble_operator(terms: Sequence[SignedPauliTerm], width: int) -> np.ndarray:
    """Dense sum of signed Pauli terms (column-wise, no kron chains)."""
    dim = 2**width
    out = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim)
    for t in terms:
        ph = _phase_vector(t.string, width)
        out[idx ^ t.string.x_mask, idx] += t.coefficient * ph
    return out
