"""Pauli-string algebra against the dense-matrix oracle."""
import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import kron_chain
from stabhom.pauli import (
    PauliError,
    PauliString,
    SignedPauliTerm,
    commutes,
    multiply,
    parse_pauli,
    tensor,
    to_matrix,
)

LETTERS = "IXYZ"


def dense(p: PauliString) -> np.ndarray:
    return p.phase * kron_chain(p.letters)


strings2 = st.builds(
    PauliString.from_letters,
    st.text(alphabet=LETTERS, min_size=2, max_size=2),
    st.integers(min_value=0, max_value=3),
)
strings_any = st.integers(min_value=1, max_value=4).flatmap(
    lambda n: st.builds(
        PauliString.from_letters,
        st.text(alphabet=LETTERS, min_size=n, max_size=n),
        st.integers(min_value=0, max_value=3),
    )
)


class TestMultiply:
    def test_single_site_table(self):
        assert str(multiply(PauliString.from_letters("X"), PauliString.from_letters("Y"))) == "+iZ1"
        assert str(multiply(PauliString.from_letters("Y"), PauliString.from_letters("X"))) == "-iZ1"
        assert str(multiply(PauliString.from_letters("Z"), PauliString.from_letters("X"))) == "+iY1"

    def test_involution(self):
        zz = PauliString.from_letters("ZZ")
        assert str(multiply(zz, zz)) == "+I"

    def test_signed_product_matches_dense(self):
        # (X1X2) * (-Y1Y2) must equal the dense 4x4 product exactly
        xx = PauliString.from_letters("XX")
        myy = PauliString.from_letters("YY", phase_exp=2)
        prod = multiply(xx, myy)
        assert np.abs(dense(prod) - dense(xx) @ dense(myy)).max() < 1e-12
        assert str(prod) == "+Z1Z2"

    def test_exhaustive_width_2(self):
        for la, lb in itertools.product(itertools.product(LETTERS, repeat=2), repeat=2):
            a = PauliString.from_letters("".join(la))
            b = PauliString.from_letters("".join(lb))
            got = dense(multiply(a, b))
            want = dense(a) @ dense(b)
            assert np.abs(got - want).max() < 1e-12

    def test_random_width_3_4(self, rng):
        for _ in range(1000):
            n = int(rng.integers(3, 5))
            la = "".join(rng.choice(list(LETTERS), n))
            lb = "".join(rng.choice(list(LETTERS), n))
            a = PauliString.from_letters(la, int(rng.integers(0, 4)))
            b = PauliString.from_letters(lb, int(rng.integers(0, 4)))
            assert np.abs(dense(multiply(a, b)) - dense(a) @ dense(b)).max() < 1e-12

    def test_width_mismatch(self):
        with pytest.raises(PauliError):
            multiply(PauliString.from_letters("X"), PauliString.from_letters("XX"))

    @given(strings2, strings2, strings2)
    @settings(max_examples=200)
    def test_associative(self, a, b, c):
        left = multiply(multiply(a, b), c)
        right = multiply(a, multiply(b, c))
        assert left == right


class TestCommutes:
    def test_globally_commuting_pair(self):
        assert commutes(PauliString.from_letters("XX"), PauliString.from_letters("YY", 2))

    def test_single_site_anticommute(self):
        assert not commutes(PauliString.from_letters("X"), PauliString.from_letters("Y"))

    def test_mixed_width_3(self):
        a = PauliString.from_letters("XXX")
        b = PauliString.from_letters("ZZI")
        ma, mb = dense(a), dense(b)
        assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma)
        assert commutes(a, b)

    @given(strings_any, strings_any)
    @settings(max_examples=200)
    def test_matches_site_count_rule(self, a, b):
        if a.width != b.width:
            return
        differing = sum(
            1
            for x, y in zip(a.letters, b.letters)
            if x != "I" and y != "I" and x != y
        )
        assert commutes(a, b) == (differing % 2 == 0)

    @given(strings2, strings2)
    @settings(max_examples=100)
    def test_matches_dense(self, a, b):
        ma, mb = dense(a), dense(b)
        assert commutes(a, b) == np.allclose(ma @ mb, mb @ ma, atol=1e-12)


class TestTensor:
    def test_plain(self):
        assert str(tensor(PauliString.from_letters("X"), PauliString.from_letters("I"))) == "+X1"
        t = tensor(PauliString.from_letters("XX"), PauliString.from_letters("Y"))
        assert str(t) == "+X1X2Y3"

    def test_phase_composition(self):
        iz = PauliString.from_letters("Z", phase_exp=1)
        assert str(tensor(iz, iz)) == "-Z1Z2"
        assert np.abs(dense(tensor(iz, iz)) - np.kron(dense(iz), dense(iz))).max() < 1e-12

    def test_capacity(self):
        a = PauliString.identity(7)
        with pytest.raises(PauliError):
            tensor(a, PauliString.identity(6))

    @given(strings2, strings2)
    @settings(max_examples=100)
    def test_matches_kron(self, a, b):
        assert np.abs(dense(tensor(a, b)) - np.kron(dense(a), dense(b))).max() < 1e-12


class TestMatrix:
    def test_conventions(self):
        assert np.array_equal(to_matrix(PauliString.from_letters("I")), np.eye(2))
        assert np.allclose(to_matrix(PauliString.from_letters("Y")), [[0, -1j], [1j, 0]])
        assert np.allclose(to_matrix(PauliString.from_letters("ZZ")), np.diag([1, -1, -1, 1]))

    def test_hermitian_iff_real_phase(self):
        for e in range(4):
            p = PauliString.from_letters("XZ", e)
            m = to_matrix(p)
            assert np.allclose(m, m.conj().T) == (e in (0, 2))


class TestText:
    def test_examples(self):
        assert str(parse_pauli("-Y1Y2", 2)) == "-Y1Y2"
        assert str(parse_pauli("+X1X2X3", 3)) == "+X1X2X3"
        assert str(parse_pauli("X2", 3)) == "+X2"
        assert str(parse_pauli("I", 2)) == "+I"

    def test_rejects_bad_forms(self):
        with pytest.raises(PauliError):
            parse_pauli("X2X1", 2)  # sites must increase
        with pytest.raises(PauliError):
            parse_pauli("X3", 2)  # out of range
        with pytest.raises(PauliError):
            parse_pauli("Q1", 2)

    @given(strings_any)
    @settings(max_examples=200)
    def test_round_trip(self, p):
        assert parse_pauli(str(p), p.width) == p


class TestSignedTerm:
    def test_phase_folding(self):
        t = SignedPauliTerm(2.0, PauliString.from_letters("XY", phase_exp=2))
        assert t.coefficient == -2.0
        assert t.string.phase_exp == 0

    def test_rejects_imaginary_phase(self):
        with pytest.raises(PauliError):
            SignedPauliTerm(1.0, PauliString.from_letters("X", phase_exp=1))

    def test_rejects_zero_coefficient(self):
        with pytest.raises(PauliError):
            SignedPauliTerm(0.0, PauliString.from_letters("X"))

    def test_square_is_identity_times_phase_squared(self):
        # every string squared equals (phase^2) * identity
        for e in range(4):
            p = PauliString.from_letters("XYZ", e)
            sq = multiply(p, p)
            assert sq.letters == "III"
            assert sq.phase == pytest.approx(p.phase**2)
