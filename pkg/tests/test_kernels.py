"""Packed 2x2 matrix kernels: closure, bulk arithmetic, budgets."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minimal2 import kernels
from minimal2.modmat import ResidueMatrix, gl2_order


class TestPacking:
    @settings(max_examples=100, deadline=None)
    @given(st.tuples(*[st.integers(0, 255)] * 4))
    def test_pack_unpack_roundtrip(self, entries):
        assert kernels.unpack(kernels.pack(*entries)) == entries

    def test_identity_constant(self):
        assert kernels.unpack(kernels.IDENTITY) == (1, 0, 0, 1)

    def test_array_pack_matches_scalar(self):
        rng = np.random.default_rng(0)
        cols = [rng.integers(0, 16, size=200) for _ in range(4)]
        packed = kernels.pack_array(*cols)
        for i in (0, 17, 199):
            expect = kernels.pack(*(int(c[i]) for c in cols))
            assert int(packed[i]) == expect


class TestScalarOps:
    def test_mul_matches_residue_matrix(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            xe = [int(v) for v in rng.integers(0, 8, size=4)]
            ye = [int(v) for v in rng.integers(0, 8, size=4)]
            got = kernels.mul(kernels.pack(*xe), kernels.pack(*ye), 8)
            want = (ResidueMatrix(8, *xe) * ResidueMatrix(8, *ye)).packed()
            assert got == want

    def test_inv_and_det(self):
        rng = np.random.default_rng(2)
        found = 0
        while found < 100:
            xe = [int(v) for v in rng.integers(0, 16, size=4)]
            x = kernels.pack(*xe)
            if kernels.det(x, 16) % 2 == 0:
                continue
            found += 1
            assert kernels.mul(x, kernels.inv(x, 16), 16) == kernels.IDENTITY
        with pytest.raises(ValueError):
            kernels.inv(kernels.pack(2, 0, 0, 1), 16)

    def test_reduce_and_neg(self):
        x = kernels.pack(5, 6, 7, 1)
        assert kernels.unpack(kernels.reduce_packed(x, 2)) == (1, 0, 1, 1)
        assert kernels.unpack(kernels.neg(x, 8)) == (3, 2, 1, 7)


class TestClosure:
    def test_closure_of_nothing_is_identity(self):
        got = kernels.closure([], 8)
        assert list(got) == [kernels.IDENTITY]

    def test_gl2_f2_from_two_generators(self):
        gens = [kernels.pack(0, 1, 1, 0), kernels.pack(1, 1, 0, 1)]
        got = kernels.closure(gens, 2)
        assert len(got) == 6
        assert len(got) == gl2_order(2)

    def test_closure_is_sorted_unique(self):
        gens = [kernels.pack(1, 1, 0, 1), kernels.pack(3, 0, 0, 1)]
        got = kernels.closure(gens, 8)
        assert (np.diff(got) > 0).all()

    def test_closure_idempotent(self):
        gens = [kernels.pack(3, 0, 0, 1), kernels.pack(5, 0, 0, 1)]
        once = kernels.closure(gens, 8)
        assert len(once) == 4
        twice = kernels.closure([int(x) for x in once], 8)
        assert (once == twice).all()

    def test_closure_contains_inverses_and_products(self):
        gens = [kernels.pack(1, 1, 0, 1), kernels.pack(1, 0, 1, 1)]
        got = kernels.closure(gens, 4)
        for x in got[:50]:
            assert kernels.contains(got, kernels.inv(int(x), 4))
        prods = kernels.mul_arrays(np.repeat(got, len(got)),
                                   np.tile(got, len(got)), 4)
        assert kernels.is_subset(kernels.sorted_unique(prods), got)

    def test_budget_enforced(self):
        from minimal2.subgroups import ambient_generators

        with pytest.raises(kernels.BudgetExceeded):
            kernels.closure(ambient_generators(2, 16), 16, cap=100)

    def test_closure_extend_matches_fresh_closure(self):
        g1 = kernels.pack(3, 0, 0, 1)
        g2 = kernels.pack(1, 1, 0, 1)
        base = kernels.closure([g1], 8)
        grown = kernels.closure_extend(base, [g1], g2, 8)
        fresh = kernels.closure([g1, g2], 8)
        assert (grown == fresh).all()


class TestBulkOps:
    def test_conjugate_set_is_permutation(self):
        from minimal2.subgroups import ambient_generators

        group = kernels.closure(ambient_generators(2, 8), 8)
        g = kernels.pack(1, 1, 0, 1)
        conj = kernels.conjugate_set(group, g, 8)
        assert len(conj) == len(group)
        assert (conj == group).all()  # whole group is conjugation-stable

    def test_conj_array_fixes_commuting_elements(self):
        xs = np.array([kernels.pack(3, 0, 0, 3), kernels.IDENTITY],
                      dtype=np.uint32)
        got = kernels.conj_array(xs, kernels.pack(1, 1, 0, 1), 8)
        assert (np.sort(got) == np.sort(xs)).all()

    def test_lift_array_sizes(self):
        xs = np.array([kernels.IDENTITY], dtype=np.uint32)
        lifted = kernels.lift_array(xs, 2, 4)
        assert len(lifted) == 16  # 4x4 kernel of reduction
        dets = kernels.det_array(lifted, 4) % 2
        assert (dets == 1).all()

    def test_unit_inverse_table(self):
        tbl = kernels.unit_inverse_table(16)
        for u in range(1, 16, 2):
            assert (u * int(tbl[u])) % 16 == 1

    def test_square_array(self):
        rng = np.random.default_rng(3)
        xs = kernels.pack_array(*[rng.integers(0, 8, size=64)
                                  for _ in range(4)])
        sq = kernels.square_array(xs, 8)
        ref = kernels.mul_arrays(xs, xs, 8)
        assert (sq == ref).all()
