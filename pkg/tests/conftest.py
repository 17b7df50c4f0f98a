"""Shared fixtures and independent oracles for the test-suite.

The oracles here deliberately avoid the package's own fast paths: dense
matrices are built with plain ``np.kron`` chains, deterministic bounds
are enumerated with ``itertools.product`` term by term, and eigenvalues
can be cross-checked against the characteristic polynomial.  Expected
values asserted in the tests were computed with these oracles.
"""
from __future__ import annotations

import itertools

import numpy as np
import pytest

from stabhom.dsl import Inequality, InequalityAST

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA = {"I": I2, "X": SX, "Y": SY, "Z": SZ}


def kron_chain(letters: str) -> np.ndarray:
    out = np.array([[1]], dtype=complex)
    for ch in letters:
        out = np.kron(out, SIGMA[ch])
    return out


def naive_lhv(expr: Inequality | InequalityAST) -> float:
    """Term-by-term deterministic maximum, no bit tricks."""
    ast = expr.ast if isinstance(expr, Inequality) else expr
    settings = ast.settings
    best = -np.inf
    for values in itertools.product((1, -1), repeat=len(settings)):
        table = dict(zip(settings, values))
        total = 0.0
        for coeff, mono in ast.linear:
            v = float(coeff)
            for s in mono:
                v *= table[s]
            total += v
        for coeff, sub in ast.squares:
            m = 0.0
            for c2, mono in sub:
                v = float(c2)
                for s in mono:
                    v *= table[s]
                m += v
            total += float(coeff) * m * m
        best = max(best, total)
    return best


def char_poly_max_eig(op: np.ndarray) -> float:
    """Largest real root of det(op - x I), dimensions <= 4."""
    coeffs = np.poly(op)
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) < 1e-8].real
    return float(real.max())


def separable_grid_max(terms, steps: int = 60) -> float:
    """Dense Bloch-sphere grid over both qubits of a two-qubit operator."""
    thetas = np.linspace(0, np.pi, steps)
    phis = np.linspace(0, 2 * np.pi, 2 * steps, endpoint=False)

    def bloch_states():
        for t in thetas:
            for p in phis:
                yield np.array([np.cos(t / 2), np.exp(1j * p) * np.sin(t / 2)])

    states = list(bloch_states())
    mats = [(c.coefficient if hasattr(c, "coefficient") else c[0], m1, m2)
            for c, m1, m2 in terms]
    best = -np.inf
    lefts = np.array([[np.vdot(a, m1 @ a).real for _, m1, _ in mats] for a in states])
    rights = np.array([[np.vdot(b, m2 @ b).real for _, _, m2 in mats] for b in states])
    coeffs = np.array([c for c, _, _ in mats])
    vals = (lefts * coeffs) @ rights.T
    return float(vals.max())


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(12345)
