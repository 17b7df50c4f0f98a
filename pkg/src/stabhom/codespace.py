"""Logical encodings and their Pauli image sets.

A LogicalEncoding is an ordered orthonormal pair (|0_L>, |1_L>) of
N-qubit states.  Every N-qubit Pauli string either leaves the span
invariant or does not; when it does, its 2x2 restriction in the logical
basis is compared against +-I, +-X, +-Y, +-Z.  ``image_set`` enumerates
all 4^N strings brute-force, which keeps the classification auditable
against the dense-matrix oracle.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .config import LIMITS, TOL
from .pauli import PauliError, PauliString, SignedPauliTerm, multiply
from .states import StateVector, apply_pauli, ghz_state, make_pair_superposition

_SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class CodespaceError(ValueError):
    pass


@dataclass(frozen=True)
class LogicalEncoding:
    width: int
    zero_l: StateVector
    one_l: StateVector

    def __post_init__(self):
        if self.zero_l.width != self.width or self.one_l.width != self.width:
            raise CodespaceError("encoding states must match declared width")
        if abs(np.vdot(self.zero_l.amplitudes, self.one_l.amplitudes)) > TOL.norm:
            raise CodespaceError("logical basis states must be orthogonal")

    @classmethod
    def from_basis_pair(cls, zero: str, one: str) -> "LogicalEncoding":
        return cls(
            len(zero),
            make_pair_superposition(zero, one, 1.0, 0.0),
            make_pair_superposition(zero, one, 0.0, 1.0),
        )

    @classmethod
    def ghz(cls, n: int) -> "LogicalEncoding":
        """|0_L> = |0...0>, |1_L> = |1...1> on n qubits."""
        return cls.from_basis_pair("0" * n, "1" * n)

    @classmethod
    def cluster_pair(cls) -> "LogicalEncoding":
        """|0_L> = (|00>+|11>)/sqrt2, |1_L> = (|00>-|11>)/sqrt2."""
        r = 1 / np.sqrt(2)
        return cls(
            2,
            make_pair_superposition("00", "11", r, r),
            make_pair_superposition("00", "11", r, -r),
        )

    @classmethod
    def from_json(cls, spec: dict | str) -> "LogicalEncoding":
        """Load {"n": 3, "zero": "000", "one": "111"} or amplitude lists."""
        if isinstance(spec, str):
            spec = json.loads(spec)
        n = int(spec["n"])
        zero, one = spec["zero"], spec["one"]
        if isinstance(zero, str):
            return cls.from_basis_pair(zero, one)
        def vec(pairs):
            return StateVector(n, np.array([complex(re, im) for re, im in pairs]))
        return cls(n, vec(zero), vec(one))


# ---------------------------------------------------------------------------

def _restriction(term: SignedPauliTerm, enc: LogicalEncoding) -> Optional[np.ndarray]:
    """2x2 restriction of the term to span{|0_L>,|1_L>}, or None if it leaves it."""
    z, o = enc.zero_l.amplitudes, enc.one_l.amplitudes
    pz = term.coefficient * apply_pauli(term.string, z)
    po = term.coefficient * apply_pauli(term.string, o)
    r = np.array([[np.vdot(z, pz), np.vdot(z, po)], [np.vdot(o, pz), np.vdot(o, po)]])
    # unitary action: the restriction columns must carry the full norm
    scale = abs(term.coefficient)
    if abs(np.linalg.norm(r[:, 0]) - scale) > TOL.action:
        return None
    if abs(np.linalg.norm(r[:, 1]) - scale) > TOL.action:
        return None
    return r


def classify_action(
    term: SignedPauliTerm, enc: LogicalEncoding
) -> Optional[tuple[str, int]]:
    """Return (letter, sign) when the term acts as sign*letter on the code space."""
    if term.width != enc.width:
        raise PauliError(f"width mismatch {term.width} != {enc.width}")
    r = _restriction(term, enc)
    if r is None:
        return None
    for letter, sigma in _SIGMA.items():
        for sign in (1, -1):
            if np.abs(r - sign * sigma).max() < TOL.action:
                return letter, sign
    return None


@dataclass(frozen=True)
class ImageSet:
    logical_letter: str
    encoding: LogicalEncoding
    members: tuple[SignedPauliTerm, ...]

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def texts(self) -> list[str]:
        return [str(m) for m in self.members]


def _all_strings(width: int) -> Iterable[PauliString]:
    for letters in itertools.product("IXYZ", repeat=width):
        yield PauliString.from_letters("".join(letters))


def image_set(enc: LogicalEncoding, letter: str) -> ImageSet:
    """All signed strings acting exactly as +letter on the code space."""
    if letter not in _SIGMA:
        raise CodespaceError(f"unknown logical letter {letter!r}")
    if enc.width > LIMITS.max_image_width:
        raise CodespaceError(
            f"width {enc.width} exceeds image enumeration cap {LIMITS.max_image_width}"
        )
    members = []
    for string in _all_strings(enc.width):
        got = classify_action(SignedPauliTerm(1.0, string), enc)
        if got is not None and got[0] == letter:
            members.append(SignedPauliTerm(float(got[1]), string))
    members.sort(key=SignedPauliTerm.sort_key)
    return ImageSet(letter, enc, tuple(members))


def all_image_sets(enc: LogicalEncoding) -> dict[str, ImageSet]:
    return {letter: image_set(enc, letter) for letter in "IXYZ"}


_PAULI_TABLE = {  # single-qubit products sigma_a sigma_b = phase * sigma_c
    ("I", "I"): ("I", 1), ("I", "X"): ("X", 1), ("I", "Y"): ("Y", 1), ("I", "Z"): ("Z", 1),
    ("X", "I"): ("X", 1), ("X", "X"): ("I", 1), ("X", "Y"): ("Z", 1j), ("X", "Z"): ("Y", -1j),
    ("Y", "I"): ("Y", 1), ("Y", "X"): ("Z", -1j), ("Y", "Y"): ("I", 1), ("Y", "Z"): ("X", 1j),
    ("Z", "I"): ("Z", 1), ("Z", "X"): ("Y", 1j), ("Z", "Y"): ("X", -1j), ("Z", "Z"): ("I", 1),
}


def verify_homomorphism(enc: LogicalEncoding) -> tuple[bool, list]:
    """Check that image-set products classify as the product letters.

    For every P in image(sigma_a) and Q in image(sigma_b), the product PQ
    must stay on the code space and restrict to exactly the single-qubit
    product sigma_a sigma_b (including its i-phase).  Returns (ok, list of
    violating (P, Q) pairs).
    """
    if enc.width > LIMITS.max_homomorphism_width:
        raise CodespaceError(
            f"width {enc.width} exceeds verification cap {LIMITS.max_homomorphism_width}"
        )
    sets = all_image_sets(enc)
    violations = []
    for a in "IXYZ":
        for b in "IXYZ":
            expect_letter, expect_phase = _PAULI_TABLE[(a, b)]
            for p in sets[a]:
                for q in sets[b]:
                    prod = multiply(p.string, q.string)
                    coeff = p.coefficient * q.coefficient * prod.phase
                    flat = PauliString(prod.width, prod.x_mask, prod.z_mask, 0)
                    z, o = enc.zero_l.amplitudes, enc.one_l.amplitudes
                    pz = coeff * apply_pauli(flat, z)
                    po = coeff * apply_pauli(flat, o)
                    r = np.array(
                        [[np.vdot(z, pz), np.vdot(z, po)], [np.vdot(o, pz), np.vdot(o, po)]]
                    )
                    want = expect_phase * _SIGMA[expect_letter]
                    if np.abs(r - want).max() > TOL.action:
                        violations.append((p, q, a, b))
    return not violations, violations


def lift_state(state: StateVector, site: int, enc: LogicalEncoding) -> StateVector:
    """Replace qubit ``site`` (1-based) by the encoding: |0> -> |0_L>, |1> -> |1_L>."""
    n = state.width
    if not 1 <= site <= n:
        raise CodespaceError(f"site {site} outside 1..{n}")
    if n - 1 + enc.width > LIMITS.max_width:
        raise CodespaceError("lifted width exceeds cap")
    tensor = state.amplitudes.reshape([2] * n)
    code = np.stack([enc.zero_l.amplitudes, enc.one_l.amplitudes])  # (2, 2^m)
    lifted = np.tensordot(tensor, code, axes=([site - 1], [0]))
    # tensordot moved the logical block to the last axis; restore site order
    lifted = np.moveaxis(
        lifted.reshape([2] * (n - 1) + [2] * enc.width),
        list(range(n - 1, n - 1 + enc.width)),
        list(range(site - 1, site - 1 + enc.width)),
    )
    return StateVector(n - 1 + enc.width, lifted.reshape(-1))
