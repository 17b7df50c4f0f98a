"""Exact algebra of phased Pauli strings on up to 12 qubits.

A string is stored as two bitmasks (x-part, z-part) plus a power of i.
Site 1 is the most significant bit of both masks, matching the basis
ordering used by the state engine.  The single-site conventions are

    X = [[0, 1], [1, 0]]    Y = [[0, -i], [i, 0]]    Z = diag(1, -1)

and Y = i * X * Z, which fixes every sign produced by multiplication.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import LIMITS

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

# letter -> (x bit, z bit)
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_LETTER = {v: k for k, v in _BITS.items()}

_PHASES = {0: 1, 1: 1j, 2: -1, 3: -1j}
_PHASE_TEXT = {0: "+", 2: "-"}


class PauliError(ValueError):
    """Raised on width mismatches, capacity overflows, or bad text forms."""


@dataclass(frozen=True)
class PauliString:
    """Immutable phased tensor product of single-site Pauli letters."""

    width: int
    x_mask: int
    z_mask: int
    phase_exp: int  # operator = i**phase_exp * (tensor of letters)

    def __post_init__(self):
        if not 1 <= self.width <= LIMITS.max_width:
            raise PauliError(f"width {self.width} outside 1..{LIMITS.max_width}")
        if self.x_mask >> self.width or self.z_mask >> self.width:
            raise PauliError("mask wider than declared width")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    # -- constructors ---------------------------------------------------
    @classmethod
    def from_letters(cls, letters: str, phase_exp: int = 0) -> "PauliString":
        x = z = 0
        for ch in letters:
            bx, bz = _BITS[ch]
            x = (x << 1) | bx
            z = (z << 1) | bz
        return cls(len(letters), x, z, phase_exp)

    @classmethod
    def identity(cls, width: int) -> "PauliString":
        return cls(width, 0, 0, 0)

    # -- views ----------------------------------------------------------
    @property
    def letters(self) -> str:
        out = []
        for site in range(self.width):
            shift = self.width - 1 - site
            out.append(_LETTER[((self.x_mask >> shift) & 1, (self.z_mask >> shift) & 1)])
        return "".join(out)

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_exp]

    @property
    def weight(self) -> int:
        return bin(self.x_mask | self.z_mask).count("1")

    @property
    def y_count(self) -> int:
        return bin(self.x_mask & self.z_mask).count("1")

    def is_hermitian(self) -> bool:
        return self.phase_exp in (0, 2)

    def sort_key(self):
        sites = tuple(
            (s + 1, ch) for s, ch in enumerate(self.letters) if ch != "I"
        )
        return (self.weight, sites, self.phase_exp)

    def __str__(self) -> str:
        sign = _PHASE_TEXT.get(self.phase_exp)
        head = sign if sign is not None else ("+i" if self.phase_exp == 1 else "-i")
        body = "".join(
            f"{ch}{s + 1}" for s, ch in enumerate(self.letters) if ch != "I"
        )
        return head + (body or "I")


def parse_pauli(text: str, width: int) -> PauliString:
    """Parse the textual form ``-Y1Y2`` / ``+X1X2X3`` / ``I``.

    Omitted sites are identity; site indices are 1-based and must be
    strictly increasing.  An explicit width is required because trailing
    identities are not written.
    """
    s = text.strip()
    m = re.fullmatch(r"([+-]?)(i?)((?:[IXYZ]\d+)*|I)", s)
    if not m:
        raise PauliError(f"bad pauli text: {text!r}")
    sign, imag, body = m.groups()
    phase_exp = {( "", ""): 0, ("+", ""): 0, ("-", ""): 2,
                 ("", "i"): 1, ("+", "i"): 1, ("-", "i"): 3}[(sign, imag)]
    x = z = 0
    if body != "I" and body:
        last = 0
        for letter, idx in re.findall(r"([IXYZ])(\d+)", body):
            site = int(idx)
            if site <= last:
                raise PauliError(f"site indices must increase: {text!r}")
            if site > width:
                raise PauliError(f"site {site} exceeds width {width}")
            last = site
            bx, bz = _BITS[letter]
            shift = width - site
            x |= bx << shift
            z |= bz << shift
    return PauliString(width, x, z, phase_exp)


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Exact product p*q including the accumulated power of i."""
    if p.width != q.width:
        raise PauliError(f"width mismatch {p.width} != {q.width}")
    # internally  p = i**e  X^x Z^z  with  e = phase_exp + y_count
    e = p.phase_exp + p.y_count + q.phase_exp + q.y_count
    e += 2 * bin(p.z_mask & q.x_mask).count("1")  # Z past X picks up -1 per site
    x = p.x_mask ^ q.x_mask
    z = p.z_mask ^ q.z_mask
    y = bin(x & z).count("1")
    return PauliString(p.width, x, z, (e - y) % 4)


def commutes(p: PauliString, q: PauliString) -> bool:
    """True iff the dense matrices commute (symplectic-form parity test)."""
    if p.width != q.width:
        raise PauliError(f"width mismatch {p.width} != {q.width}")
    anti = bin(p.x_mask & q.z_mask).count("1") + bin(p.z_mask & q.x_mask).count("1")
    return anti % 2 == 0


def tensor(p: PauliString, q: PauliString) -> PauliString:
    """Kronecker product; p occupies the leading (most significant) sites."""
    width = p.width + q.width
    if width > LIMITS.max_width:
        raise PauliError(f"combined width {width} exceeds cap {LIMITS.max_width}")
    e = p.phase_exp + p.y_count + q.phase_exp + q.y_count
    x = (p.x_mask << q.width) | q.x_mask
    z = (p.z_mask << q.width) | q.z_mask
    y = bin(x & z).count("1")
    return PauliString(width, x, z, (e - y) % 4)


def to_matrix(p: PauliString) -> np.ndarray:
    """Dense 2^N x 2^N realisation."""
    m = np.array([[1]], dtype=complex)
    for ch in p.letters:
        m = np.kron(m, _SINGLE[ch])
    return p.phase * m


@dataclass(frozen=True)
class SignedPauliTerm:
    """Real multiple of a phase-free Pauli string (a Hermitian observable)."""

    coefficient: float
    string: PauliString

    def __post_init__(self):
        coeff = self.coefficient
        string = self.string
        if string.phase_exp == 2:  # fold a -1 phase into the coefficient
            coeff = -coeff
            string = PauliString(string.width, string.x_mask, string.z_mask, 0)
        elif string.phase_exp != 0:
            raise PauliError("term string must carry phase +-1")
        if isinstance(coeff, Fraction):
            coeff = float(coeff)
        if not np.isfinite(coeff) or coeff == 0:
            raise PauliError("coefficient must be finite and nonzero")
        object.__setattr__(self, "coefficient", float(coeff))
        object.__setattr__(self, "string", string)

    @property
    def width(self) -> int:
        return self.string.width

    def to_matrix(self) -> np.ndarray:
        return self.coefficient * to_matrix(self.string)

    def sort_key(self):
        return (*self.string.sort_key(), self.coefficient)

    def __str__(self) -> str:
        mag = abs(self.coefficient)
        body = str(self.string)[1:]  # drop the string's own '+'
        head = "+" if self.coefficient > 0 else "-"
        if abs(mag - 1.0) < 1e-15:
            return f"{head}{body}"
        return f"{head}{mag:g}*{body}"
