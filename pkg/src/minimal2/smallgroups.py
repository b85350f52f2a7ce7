"""Dense Cayley-table engine for small matrix groups.

Where whole-subgroup-lattice questions are asked (the odd-prime falsifier,
the non-2-group witness sweep) the groups have a few hundred to a few
thousand elements, and an n x n index table beats packed-set closures: every
subgroup is a sorted array of element indices and products are table
gathers.

Subgroup enumeration walks single-element extensions S -> <S, x> with x of
prime-power order, deduplicating by a conjugacy canonical key.  Extensions by
prime-power elements reach every subgroup (each element is a product of its
prime-power components), and running them on class representatives reaches
every class: a chain for T conjugates, step by step, onto a chain through the
stored representatives.
"""

from __future__ import annotations

import numpy as np

from . import kernels


class FiniteGroupTable:
    """Multiplication table of a group of packed matrices mod m."""

    def __init__(self, elements: np.ndarray, modulus: int, generator_indices=None):
        n = len(elements)
        if n > 8192:
            raise kernels.BudgetExceeded(f"table for {n} elements refused")
        self.elements = elements
        self.modulus = modulus
        self.n = n
        table = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            row = kernels.mul_array_scalar(elements, int(elements[i]), modulus,
                                           right=False)
            pos = np.searchsorted(elements, row)
            if pos.max(initial=0) >= n or not np.array_equal(elements[pos], row):
                raise ValueError("element set is not closed under multiplication")
            table[i] = pos
        self.table = table
        self.identity = int(np.searchsorted(elements, kernels.IDENTITY))
        inv = np.empty(n, dtype=np.int32)
        rows, cols = np.nonzero(table == self.identity)
        inv[rows] = cols
        self.inverse = inv
        self.generator_indices = list(generator_indices or [])
        self._orders: np.ndarray | None = None
        self._conj_perms: list[np.ndarray] | None = None

    @classmethod
    def from_generators(cls, gens_packed, modulus: int) -> "FiniteGroupTable":
        elems = kernels.closure(list(gens_packed), modulus, cap=8192)
        gen_idx = [int(np.searchsorted(elems, g)) for g in gens_packed]
        return cls(elems, modulus, generator_indices=gen_idx)

    # -- per-element data ----------------------------------------------------

    def det_residues(self) -> np.ndarray:
        return kernels.det_array(self.elements, self.modulus)

    def orders(self) -> np.ndarray:
        if self._orders is None:
            n = self.n
            orders = np.zeros(n, dtype=np.int64)
            acc = np.arange(n, dtype=np.int64)
            k = 1
            while True:
                done = (orders == 0) & (acc == self.identity)
                orders[done] = k
                if not (orders == 0).any():
                    break
                rem = orders == 0
                acc[rem] = self.table[acc[rem], np.nonzero(rem)[0]]
                k += 1
                if k > self.n + 1:
                    raise AssertionError("order runaway")
            self._orders = orders
        return self._orders

    def prime_power_order_indices(self) -> np.ndarray:
        """Indices of elements of prime-power order (identity excluded)."""
        orders = self.orders()
        keep = np.zeros(self.n, dtype=bool)
        for i, o in enumerate(orders):
            o = int(o)
            if o == 1:
                continue
            p = 2
            while o % p:
                p += 1
            while o % p == 0:
                o //= p
            keep[i] = o == 1
        return np.nonzero(keep)[0]

    # -- subgroups -------------------------------------------------------------

    def closure_indices(self, gen_idx) -> np.ndarray:
        """Sorted indices of the subgroup generated by the given indices."""
        gen_idx = sorted(set(int(g) for g in gen_idx) | {self.identity})
        known = np.zeros(self.n, dtype=bool)
        known[gen_idx] = True
        frontier = np.array(gen_idx, dtype=np.int64)
        while len(frontier):
            prods = self.table[np.ix_(frontier, gen_idx)].ravel()
            prods = np.unique(prods)
            fresh = prods[~known[prods]]
            known[fresh] = True
            frontier = fresh
        return np.nonzero(known)[0].astype(np.int32)

    def subgroup_det_image(self, idx: np.ndarray, m: int | None = None) -> frozenset[int]:
        m = m or self.modulus
        return frozenset(int(v) % m for v in
                         np.unique(self.det_residues()[idx]))

    def conj_permutations(self) -> list[np.ndarray]:
        """Conjugation permutations x -> g x g^-1 for the table's generators."""
        if self._conj_perms is None:
            if not self.generator_indices:
                raise ValueError("table was built without generator indices")
            perms = []
            for g in self.generator_indices:
                gi = int(self.inverse[g])
                perms.append(self.table[self.table[g, :], gi])
            self._conj_perms = perms
        return self._conj_perms

    def canonical_subgroup_key(self, idx: np.ndarray,
                               orbit_budget: int = 8192) -> bytes:
        """Minimal sorted index tuple over the full conjugation orbit."""
        perms = self.conj_permutations()
        start = np.sort(np.asarray(idx, dtype=np.int32))
        best = start.tobytes()
        seen = {best}
        frontier = [start]
        while frontier:
            s = frontier.pop()
            for perm in perms:
                t = np.sort(perm[s]).astype(np.int32)
                kb = t.tobytes()
                if kb not in seen:
                    if len(seen) >= orbit_budget:
                        raise kernels.BudgetExceeded("subgroup orbit too large")
                    seen.add(kb)
                    frontier.append(t)
                    if kb < best:
                        best = kb
        return best

    def subgroup_classes(self, base_idx=None, verbose=False):
        """Conjugacy-class representatives of all subgroups containing
        <base_idx> (all subgroups when base_idx is None).

        Returns a list of (sorted index array, generator index list) pairs.
        """
        base_gens = [int(v) for v in (base_idx or [])]
        base = self.closure_indices(base_gens)
        candidates = self.prime_power_order_indices()
        out = [(base, base_gens)]
        seen_sets = {np.sort(base).astype(np.int32).tobytes()}
        seen_keys = {self.canonical_subgroup_key(base)}
        head = 0
        while head < len(out):
            sub, gens = out[head]
            head += 1
            in_sub = np.zeros(self.n, dtype=bool)
            in_sub[sub] = True
            for x in candidates:
                if in_sub[x]:
                    continue
                ext = self.closure_indices(gens + [int(x)])
                kb = ext.astype(np.int32).tobytes()
                if kb in seen_sets:
                    continue
                seen_sets.add(kb)
                key = self.canonical_subgroup_key(ext)
                if key in seen_keys:
                    continue
                seen_keys.add(key)
                out.append((ext, gens + [int(x)]))
            if verbose and head % 50 == 0:
                print(f"  subgroup scan: {head}/{len(out)} classes expanded")
        return out

    def sylow_indices(self, sub_idx: np.ndarray, q: int) -> np.ndarray:
        """A Sylow q-subgroup of the subgroup with the given indices."""
        orders = self.orders()[sub_idx]
        target = 1
        total = len(sub_idx)
        while total % q == 0:
            total //= q
            target *= q
        if target == 1:
            return np.array([self.identity], dtype=np.int32)
        v = orders.copy()
        while True:
            mask = v % q == 0
            if not mask.any():
                break
            v[mask] //= q
        q_elems = [int(e) for e in sub_idx[v == 1]]
        gens: list[int] = []
        current = self.closure_indices([])
        while len(current) < target:
            for x in q_elems:
                if x in current:
                    continue
                cand = self.closure_indices(gens + [x])
                sz = len(cand)
                while sz % q == 0:
                    sz //= q
                if sz == 1:
                    gens.append(x)
                    current = cand
                    break
            else:
                raise AssertionError("Sylow growth stalled")
        return current
