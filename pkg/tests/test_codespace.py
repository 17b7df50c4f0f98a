"""Image sets, action classification, and the homomorphism check."""
import itertools

import numpy as np
import pytest

from conftest import kron_chain
from stabhom.codespace import (
    CodespaceError,
    LogicalEncoding,
    classify_action,
    image_set,
    lift_state,
    verify_homomorphism,
)
from stabhom.pauli import PauliString, SignedPauliTerm, multiply
from stabhom.states import StateVector, expectation, ghz_state, make_pair_superposition

R = 2**-0.5


def term(letters, coeff=1.0):
    return SignedPauliTerm(coeff, PauliString.from_letters(letters))


class TestClassify:
    def test_pair_code_actions(self):
        enc = LogicalEncoding.ghz(2)
        assert classify_action(term("ZZ"), enc) == ("I", 1)
        assert classify_action(term("YY", -1.0), enc) == ("X", 1)
        assert classify_action(term("XI"), enc) is None  # leaves the code space

    def test_width_mismatch(self):
        with pytest.raises(Exception):
            classify_action(term("X"), LogicalEncoding.ghz(2))


class TestImageSets:
    def test_pair_code(self):
        enc = LogicalEncoding.ghz(2)
        assert image_set(enc, "X").texts() == ["+X1X2", "-Y1Y2"]
        assert image_set(enc, "I").texts() == ["+I", "+Z1Z2"]
        assert image_set(enc, "Y").texts() == ["+X1Y2", "+Y1X2"]
        assert image_set(enc, "Z").texts() == ["+Z1", "+Z2"]

    def test_triple_code(self):
        enc = LogicalEncoding.ghz(3)
        assert image_set(enc, "I").texts() == ["+I", "+Z1Z2", "+Z1Z3", "+Z2Z3"]
        assert image_set(enc, "X").texts() == [
            "+X1X2X3", "-X1Y2Y3", "-Y1X2Y3", "-Y1Y2X3",
        ]
        assert image_set(enc, "Y").texts() == [
            "+X1X2Y3", "+X1Y2X3", "+Y1X2X3", "-Y1Y2Y3",
        ]

    def test_superposed_pair_code(self):
        # the Z images of the superposed code carry definite signs fixed by
        # the conventions of the single-site matrices
        enc = LogicalEncoding.cluster_pair()
        assert image_set(enc, "Z").texts() == ["+X1X2", "-Y1Y2"]
        assert image_set(enc, "X").texts() == ["+Z1", "+Z2"]
        assert image_set(enc, "Y").texts() == ["-X1Y2", "-Y1X2"]

    def test_capacity(self):
        with pytest.raises(CodespaceError):
            image_set(LogicalEncoding.ghz(9), "X")

    def test_members_act_identically(self, rng):
        # image members restricted to the code space equal the logical letter
        for enc in (LogicalEncoding.ghz(2), LogicalEncoding.ghz(3),
                    LogicalEncoding.cluster_pair()):
            sets = {letter: image_set(enc, letter) for letter in "XYZ"}
            for _ in range(20):
                a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
                norm = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
                a, b = a / norm, b / norm
                inside = StateVector(
                    enc.width,
                    a * enc.zero_l.amplitudes + b * enc.one_l.amplitudes,
                )
                logical = StateVector(1, np.array([a, b]))
                for letter, members in sets.items():
                    want = expectation(logical, term(letter))
                    for p in members:
                        assert expectation(inside, p) == pytest.approx(want, abs=1e-10)

    def test_x_y_counts_match(self):
        for enc in (LogicalEncoding.ghz(2), LogicalEncoding.ghz(3),
                    LogicalEncoding.ghz(4), LogicalEncoding.cluster_pair()):
            assert len(image_set(enc, "X")) == len(image_set(enc, "Y"))

    def test_multiplying_by_identity_image_permutes_x_images(self):
        enc = LogicalEncoding.ghz(3)
        x_imgs = image_set(enc, "X")
        keys = {(m.coefficient, m.string) for m in x_imgs}
        for stab in image_set(enc, "I"):
            mapped = set()
            for m in x_imgs:
                prod = multiply(m.string, stab.string)
                t = SignedPauliTerm(m.coefficient * stab.coefficient * prod.phase.real,
                                    PauliString(prod.width, prod.x_mask, prod.z_mask, 0))
                mapped.add((t.coefficient, t.string))
            assert mapped == keys

    def test_basis_pair_support_structure(self):
        # X images act exactly on the differing sites of the basis pair
        for n in (2, 3, 4):
            for bits in itertools.product("01", repeat=n):
                one = "".join("1" if b == "0" else "0" for b in bits)
                zero = "".join(bits)
                if zero >= one:
                    continue
                enc = LogicalEncoding.from_basis_pair(zero, one)
                differ = {i + 1 for i, (x, y) in enumerate(zip(zero, one)) if x != y}
                for m in image_set(enc, "X"):
                    support = {
                        i + 1 for i, ch in enumerate(m.string.letters) if ch in "XY"
                    }
                    assert support == differ

    def test_global_commute_local_noncommute(self):
        for enc in (LogicalEncoding.ghz(2), LogicalEncoding.ghz(3)):
            members = list(image_set(enc, "I")) + list(image_set(enc, "X"))
            from stabhom.pauli import commutes

            assert all(
                commutes(p.string, q.string) for p in members for q in members
            )
            locally_noncommuting = any(
                pa != "I" and qa != "I" and pa != qa
                for p in members
                for q in members
                for pa, qa in zip(p.string.letters, q.string.letters)
            )
            assert locally_noncommuting


class TestHomomorphism:
    @pytest.mark.parametrize("enc_name", ["ghz2", "ghz3", "ghz4", "cluster"])
    def test_verify(self, enc_name):
        enc = {
            "ghz2": LogicalEncoding.ghz(2),
            "ghz3": LogicalEncoding.ghz(3),
            "ghz4": LogicalEncoding.ghz(4),
            "cluster": LogicalEncoding.cluster_pair(),
        }[enc_name]
        ok, violations = verify_homomorphism(enc)
        assert ok, violations

    def test_rejects_non_orthogonal_pair(self):
        with pytest.raises(CodespaceError):
            LogicalEncoding(
                1,
                StateVector(1, np.array([1.0, 0.0])),
                StateVector(1, np.array([R, R])),
            )

    def test_capacity(self):
        with pytest.raises(CodespaceError):
            verify_homomorphism(LogicalEncoding.ghz(7))


class TestJsonAndLift:
    def test_from_json_basis(self):
        enc = LogicalEncoding.from_json({"n": 3, "zero": "000", "one": "111"})
        assert image_set(enc, "X").texts() == image_set(LogicalEncoding.ghz(3), "X").texts()

    def test_from_json_amplitudes(self):
        spec = {
            "n": 2,
            "zero": [[R, 0], [0, 0], [0, 0], [R, 0]],
            "one": [[R, 0], [0, 0], [0, 0], [-R, 0]],
        }
        enc = LogicalEncoding.from_json(spec)
        assert image_set(enc, "Z").texts() == ["+X1X2", "-Y1Y2"]

    def test_lift_bell_to_ghz(self):
        bell = make_pair_superposition("00", "11", R, R)
        lifted = lift_state(bell, 2, LogicalEncoding.ghz(2))
        assert np.allclose(lifted.amplitudes, ghz_state(3).amplitudes)

    def test_lift_middle_site(self):
        s = make_pair_superposition("01", "10", R, -R)
        lifted = lift_state(s, 1, LogicalEncoding.ghz(2))
        want = make_pair_superposition("001", "110", R, -R)
        assert np.allclose(lifted.amplitudes, want.amplitudes)
