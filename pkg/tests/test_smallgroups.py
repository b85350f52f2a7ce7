"""Cayley-table engine for small matrix groups."""

import numpy as np
import pytest

from minimal2 import kernels
from minimal2.smallgroups import FiniteGroupTable
from minimal2.subgroups import ambient_generators


@pytest.fixture(scope="module")
def gl2_f3():
    return FiniteGroupTable.from_generators(ambient_generators(3, 3), 3)


class TestTableBasics:
    def test_order_and_identity(self, gl2_f3):
        assert gl2_f3.n == 48
        assert int(gl2_f3.elements[gl2_f3.identity]) == kernels.IDENTITY

    def test_rejects_non_closed_sets(self):
        elems = kernels.sorted_unique(np.array(
            [kernels.IDENTITY, kernels.pack(1, 1, 0, 1)], dtype=np.uint32))
        with pytest.raises(ValueError):
            FiniteGroupTable(elems, 3)

    def test_inverse_column(self, gl2_f3):
        t = gl2_f3
        for i in range(t.n):
            assert t.table[i, t.inverse[i]] == t.identity

    def test_orders_divide_group_order(self, gl2_f3):
        orders = gl2_f3.orders()
        assert int(orders[gl2_f3.identity]) == 1
        assert all(48 % int(o) == 0 for o in orders)

    def test_prime_power_order_indices(self, gl2_f3):
        idx = gl2_f3.prime_power_order_indices()
        orders = gl2_f3.orders()[idx]
        for o in orders:
            o = int(o)
            while o % 2 == 0:
                o //= 2
            while o % 3 == 0:
                o //= 3
            assert o == 1 or int(orders[0]) == 1
        # elements of order 6 = 2*3 are excluded
        assert not (gl2_f3.orders()[idx] == 6).any()


class TestSubgroupMachinery:
    def test_closure_indices_identity(self, gl2_f3):
        got = gl2_f3.closure_indices([])
        assert list(got) == [gl2_f3.identity]

    def test_closure_indices_full_group(self, gl2_f3):
        got = gl2_f3.closure_indices(gl2_f3.generator_indices)
        assert len(got) == 48

    def test_det_image_of_sl2(self, gl2_f3):
        dets = gl2_f3.det_residues()
        sl2 = np.nonzero(dets == 1)[0].astype(np.int32)
        assert len(sl2) == 24
        assert gl2_f3.subgroup_det_image(sl2) == frozenset({1})
        assert gl2_f3.subgroup_det_image(np.arange(48, dtype=np.int32)) == \
            frozenset({1, 2})

    def test_canonical_key_invariant_under_conjugation(self, gl2_f3):
        t = gl2_f3
        some = t.closure_indices([t.generator_indices[0]])
        key = t.canonical_subgroup_key(some)
        for perm in t.conj_permutations():
            conj = np.sort(perm[some]).astype(np.int32)
            assert t.canonical_subgroup_key(conj) == key

    def test_subgroup_classes_of_gl2_f3(self, gl2_f3):
        classes = gl2_f3.subgroup_classes()
        assert len(classes) == 16
        sizes = sorted(len(idx) for idx, _ in classes)
        assert sizes[0] == 1 and sizes[-1] == 48
        for idx, gens in classes:
            assert np.array_equal(gl2_f3.closure_indices(gens), idx)
            assert 48 % len(idx) == 0

    def test_sylow_indices(self, gl2_f3):
        allidx = np.arange(48, dtype=np.int32)
        syl2 = gl2_f3.sylow_indices(allidx, 2)
        assert len(syl2) == 16
        syl3 = gl2_f3.sylow_indices(allidx, 3)
        assert len(syl3) == 3

    def test_budget_cap(self):
        with pytest.raises(kernels.BudgetExceeded):
            FiniteGroupTable.from_generators(ambient_generators(2, 16), 16)
