"""2-adic matrix logarithm, exponential, and the determinant obstruction."""

from fractions import Fraction

import numpy as np
import pytest

from minimal2.lie2adic import (
    D_RESIDUE_BITS,
    DEFAULT_PRECISION,
    PrecisionError,
    PrecisionMatrix,
    d_determinant,
    gl2_mod4_elements,
    lie_bracket,
    log_exp_round_trip,
    mat_exp,
    mat_log,
)


def PM(a, b, c, d):
    return PrecisionMatrix.from_entries((a, b, c, d))


class TestPrecisionMatrix:
    def test_identity_and_zero(self):
        I = PrecisionMatrix.identity()
        Z = PrecisionMatrix.zero()
        assert (I @ I).congruent_to(I, DEFAULT_PRECISION)
        assert (I + Z).congruent_to(I, DEFAULT_PRECISION)
        assert I.effective_precision == DEFAULT_PRECISION

    def test_effective_precision_bounds(self):
        with pytest.raises(ValueError):
            PrecisionMatrix.from_entries((1, 0, 0, 1), effective=DEFAULT_PRECISION + 1)

    def test_shift_tracks_precision(self):
        X = PM(4, 0, 0, 4)
        down = X.shift_right(2)
        assert down.congruent_to(PM(1, 0, 0, 1), DEFAULT_PRECISION - 2)
        assert down.effective_precision == DEFAULT_PRECISION - 2

    def test_shift_below_tracked_bits_raises(self):
        X = PrecisionMatrix.from_entries((32, 0, 0, 32), effective=4)
        with pytest.raises(PrecisionError):
            X.shift_right(5)
        with pytest.raises(ValueError):
            PrecisionMatrix.from_entries((8, 0, 0, 8)).shift_right(5)

    def test_congruence_window(self):
        X = PM(1, 0, 0, 1)
        Y = PM(1 + (1 << 40), 0, 0, 1)
        assert X.congruent_to(Y, 40)
        assert not X.congruent_to(Y, 41)


class TestLogExp:
    def test_log_of_identity_is_zero(self):
        L = mat_log(PrecisionMatrix.identity())
        assert L.is_zero_mod(D_RESIDUE_BITS)

    def test_exp_of_zero_is_identity(self):
        E = mat_exp(PrecisionMatrix.zero())
        assert E.congruent_to(PrecisionMatrix.identity(), D_RESIDUE_BITS)

    def test_log_diag5(self):
        L = mat_log(PM(5, 0, 0, 1))
        assert L.congruent_to(PM(60, 0, 0, 0), 6)
        assert L.effective_precision >= D_RESIDUE_BITS

    def test_exp_diag_minus4(self):
        E = mat_exp(PM(-4, 0, 0, 0))
        assert E.congruent_to(PM(5, 0, 0, 1), 5)

    def test_log_rejects_bad_congruence(self):
        with pytest.raises(ValueError):
            mat_log(PM(2, 0, 0, 1))
        with pytest.raises(ValueError):
            mat_log(PM(3, 0, 0, 3))

    def test_exp_rejects_bad_congruence(self):
        with pytest.raises(ValueError):
            mat_exp(PM(1, 0, 0, 1))

    def test_log_of_square_is_twice_log(self):
        rng = np.random.default_rng(4)
        for _ in range(25):
            vals = [int(v) * 4 for v in rng.integers(0, 1 << 50, size=4)]
            M = PM(1 + vals[0], vals[1], vals[2], 1 + vals[3])
            L = mat_log(M)
            L2 = mat_log(M @ M)
            assert L2.congruent_to(L + L, D_RESIDUE_BITS)

    def test_round_trips_both_ways(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            vals = [int(v) * 4 for v in rng.integers(0, 1 << 50, size=4)]
            M = PM(1 + vals[0], vals[1], vals[2], 1 + vals[3])
            assert mat_exp(mat_log(M)).congruent_to(M, D_RESIDUE_BITS)
            X = PM(vals[0], vals[1], vals[2], vals[3])
            assert mat_log(mat_exp(X)).congruent_to(X, D_RESIDUE_BITS)

    def test_scalar_case_matches_exact_rational_series(self):
        # for M = (1+4t)I the matrix log is the scalar series; compare the
        # tracked residue against an exact Fraction computation
        for t in list(range(1, 51)) + [12345, 1 << 20]:
            x = Fraction(4 * t)
            M = PM(1 + 4 * t, 0, 0, 1 + 4 * t)
            L = mat_log(M)
            # enough terms that every further term is 0 mod 2^54
            acc = Fraction(0)
            term = Fraction(1)
            for n in range(1, 80):
                term *= -x
                acc -= term / n
            num, den = acc.numerator, acc.denominator
            want = (num * pow(den, -1, 1 << 54)) % (1 << 54)
            got = L.entries[0] % (1 << D_RESIDUE_BITS)
            assert got == want % (1 << D_RESIDUE_BITS)
            assert L.entries[1] % (1 << D_RESIDUE_BITS) == 0

    def test_bulk_round_trip_small(self):
        assert log_exp_round_trip(seed=123, count=50) == 0


class TestBracketAndObstruction:
    def test_bracket_antisymmetry_and_self(self):
        X = PM(4, 8, 12, 16)
        Y = PM(20, 4, 8, 12)
        Z = lie_bracket(X, X)
        assert Z.is_zero_mod(D_RESIDUE_BITS)
        XY = lie_bracket(X, Y)
        YX = lie_bracket(Y, X)
        assert (XY + YX).is_zero_mod(D_RESIDUE_BITS)

    def test_bracket_of_matrix_units(self):
        E12 = PM(0, 1, 0, 0)
        E21 = PM(0, 0, 1, 0)
        got = lie_bracket(E12, E21)
        assert got.congruent_to(PM(1, 0, 0, -1), DEFAULT_PRECISION)

    def test_bracket_bilinear(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            a, b, c = (PM(*(int(v) for v in rng.integers(0, 1 << 30, size=4)))
                       for _ in range(3))
            lhs = lie_bracket(a + b, c)
            rhs = lie_bracket(a, c) + lie_bracket(b, c)
            assert lhs.congruent_to(rhs, DEFAULT_PRECISION)

    def test_d_vanishes_on_equal_arguments(self):
        A = PM(5, 4, 8, 13)
        assert d_determinant(A, A) == 0

    def test_d_vanishes_for_commuting_diagonals(self):
        A = PM(5, 0, 0, 13)
        B = PM(9, 0, 0, 1)
        assert d_determinant(A, B) == 0

    def test_d_requires_certified_bits(self):
        A = PrecisionMatrix.from_entries((5, 4, 8, 13), effective=40)
        B = PM(9, 4, 4, 1)
        with pytest.raises(PrecisionError):
            d_determinant(A, B)

    def test_d_nonzero_example(self):
        A = PM(5, 4, 0, 1)
        B = PM(5, 4, 4, 1)
        r = d_determinant(A, B)
        assert 0 < r < (1 << D_RESIDUE_BITS)
        assert (r & -r).bit_length() - 1 == 29


class TestClassSweep:
    def test_mod4_class_count(self):
        assert len(gl2_mod4_elements()) == 96

    def test_exponent_of_gl2_mod4(self):
        from math import lcm

        from minimal2.modmat import ResidueMatrix

        e = lcm(*(ResidueMatrix(4, *m).order() for m in gl2_mod4_elements()))
        assert e == 12

    def test_full_sweep_results(self, lie_records):
        assert len(lie_records) == 96 * 96
        assert all(r.d_residue % 2 == 0 or r.d_residue for r in lie_records)
        assert all(r.d_residue != 0 for r in lie_records)
        assert all(0 <= r.retries <= 8 for r in lie_records)
        vals = [r.d_valuation for r in lie_records]
        assert min(vals) == 17
        assert max(vals) == 49

    def test_sweep_retry_histogram(self, lie_records):
        hist = {}
        for r in lie_records:
            hist[r.retries] = hist.get(r.retries, 0) + 1
        assert hist == {0: 9113, 1: 96, 2: 6, 3: 1}

    def test_sweep_is_deterministic(self, lie_records):
        from minimal2.lie2adic import lie_check_all_classes

        again = lie_check_all_classes(seed=0)
        assert again == lie_records

    def test_record_shape(self, lie_records):
        r = lie_records[0]
        assert len(r.a_digits) == 4 and len(r.b_digits) == 4
        assert r.d_valuation < D_RESIDUE_BITS
        assert (r.d_residue >> r.d_valuation) & 1 == 1
