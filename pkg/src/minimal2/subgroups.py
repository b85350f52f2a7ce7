"""Open subgroups of GL_2(Z_p) represented at a finite prime-power modulus.

An OpenSubgroup stores generators mod p^k and stands for the full preimage of
the generated group in GL_2(Z_p).  Element sets are frozen sorted arrays of
packed matrices; membership is binary search.  Level, index, determinant
image, Frattini quotient, index-2 subgroups, nilpotency and a conjugacy
canonical key are all computed from the element set.

The Frattini machinery applies to 2-group images, the only case the search
needs.  Rather than materializing Phi(H) and then working with cosets, the
quotient H/Phi(H) is computed directly: a breadth-first sweep labels each
element with the exponent vector mod 2 of some generator word reaching it,
and every revisit contributes its label discrepancy as a relation.  For a
finite 2-group the F_2-span of the word relations cuts exactly the mod-2
abelianization, which equals H/Phi(H) by the Burnside basis theorem, so the
labeling is exact rather than heuristic.  An optional sweep re-checks every
Cayley edge plus all element squares and generator commutators.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import kernels
from .modmat import ResidueMatrix, _prime_power, gl2_order

DEFAULT_ELEMENT_BUDGET = 1 << 25
DEFAULT_ORBIT_BUDGET = 4096

UNIT_RESIDUES_MOD_8 = frozenset((1, 3, 5, 7))


def _parity(v: np.ndarray) -> np.ndarray:
    """Bitwise parity (popcount mod 2) of each entry, vectorized."""
    v = v.copy()
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return v & 1


def _parity_int(v: int) -> int:
    return bin(v).count("1") & 1


class _Echelon:
    """Row space over F_2, rows as int bitmasks with distinct leading bits."""

    def __init__(self):
        self.rows: list[int] = []  # sorted by leading bit, descending

    def reduce(self, v: int) -> int:
        for row in self.rows:
            if (v >> (row.bit_length() - 1)) & 1:
                v ^= row
        return v

    def insert(self, v: int) -> bool:
        """Reduce v and insert when independent; True when the rank grew."""
        v = self.reduce(v)
        if v == 0:
            return False
        self.rows.append(v)
        self.rows.sort(key=lambda r: -r)
        return True

    @property
    def dim(self) -> int:
        return len(self.rows)

    def pivots(self) -> list[int]:
        return [r.bit_length() - 1 for r in self.rows]


@dataclass
class FrattiniQuotient:
    """The quotient H/Phi(H) of a finite 2-group, with explicit coordinates.

    basis holds rank coset representatives whose coordinate vectors are the
    unit vectors; coordinates are additive: coords(xy) = coords(x) + coords(y)
    over F_2.
    """

    rank: int
    basis: list[ResidueMatrix]
    _modulus: int
    _elements: np.ndarray
    _coords: np.ndarray  # uint32, parallel to _elements, basis-adapted

    def coords(self, x: "ResidueMatrix | int") -> tuple[int, ...]:
        packed = x.packed() if isinstance(x, ResidueMatrix) else int(x)
        i = int(np.searchsorted(self._elements, packed))
        if i >= len(self._elements) or self._elements[i] != packed:
            raise ValueError("element not in the subgroup")
        v = int(self._coords[i])
        return tuple((v >> j) & 1 for j in range(self.rank))

    def coords_array(self) -> np.ndarray:
        return self._coords

    def phi_elements(self) -> np.ndarray:
        """Element set of Phi(H) itself (the zero-coordinate fiber)."""
        return self._elements[self._coords == 0]

    def hyperplane_mask(self, mu: int) -> np.ndarray:
        """Boolean mask of the index-2 subgroup killed by the functional mu."""
        if not 0 < mu < (1 << self.rank):
            raise ValueError(f"mu must be a nonzero {self.rank}-bit mask")
        return _parity(self._coords & np.uint32(mu)) == 0


def _label_elements(elements: np.ndarray, gens: list[int], modulus: int):
    """BFS labeling of a group's elements by exponent vectors mod 2.

    Returns (raw labels in F_2^s as uint32, relation echelon).  Every Cayley
    edge (x, g) is scanned, so the relation space is the full image of the
    word relations (spanning-tree homology argument), not a sample.
    """
    n = len(elements)
    s = len(gens)
    if s > 31:
        raise ValueError("too many generators to label")
    fast = kernels.label_edges(elements, gens, modulus)
    if fast is not None:
        labels, row_list = fast
        rels = _Echelon()
        for r in row_list:
            rels.insert(r)
        return labels, rels
    labels = np.full(n, -1, dtype=np.int64)
    i0 = int(np.searchsorted(elements, kernels.IDENTITY))
    labels[i0] = 0
    frontier = np.array([i0], dtype=np.int64)
    rels = _Echelon()
    while len(frontier):
        nxt = []
        for gi, g in enumerate(gens):
            ys = kernels.mul_array_scalar(elements[frontier], g, modulus)
            pos = np.searchsorted(elements, ys)
            fresh = labels[pos] < 0
            if fresh.any():
                upos, first = np.unique(pos[fresh], return_index=True)
                labels[upos] = labels[frontier[fresh][first]] ^ (1 << gi)
                nxt.append(upos)
            # re-scan the whole batch: duplicate targets and revisits yield
            # relations, freshly assigned ones yield zero
            conflicts = np.unique(labels[pos] ^ labels[frontier] ^ (1 << gi))
            for row in rels.rows:
                pivot = row.bit_length() - 1
                hit = ((conflicts >> pivot) & 1).astype(bool)
                conflicts[hit] ^= row
            for v in np.unique(conflicts):
                if v:
                    rels.insert(int(v))
        frontier = np.concatenate(nxt) if nxt else np.array([], dtype=np.int64)
    if (labels < 0).any():
        raise AssertionError("generators do not generate the element set")
    return labels.astype(np.uint32), rels


def _adapt_basis(elements, labels, rels, s):
    """Pick basis representatives and rebase coordinates to unit vectors.

    Returns (rank, packed basis elements, uint32 coordinate array).
    """
    red = labels.copy()
    for row in rels.rows:
        pivot = row.bit_length() - 1
        mask = ((red >> np.uint32(pivot)) & 1).astype(bool)
        red[mask] ^= np.uint32(row)
    pivots = set(rels.pivots())
    free = [j for j in range(s) if j not in pivots]
    rank = len(free)
    coords = np.zeros(len(elements), dtype=np.uint32)
    for newbit, j in enumerate(free):
        coords |= ((red >> np.uint32(j)) & 1).astype(np.uint32) << np.uint32(newbit)
    # greedy independent representatives, earliest element first
    chosen: list[int] = []
    work = coords.copy()
    for _ in range(rank):
        idx = int(np.argmax(work != 0))
        if work[idx] == 0:
            raise AssertionError("rank bookkeeping out of sync")
        chosen.append(idx)
        row = int(work[idx])
        pivot = row.bit_length() - 1
        mask = ((work >> np.uint32(pivot)) & 1).astype(bool)
        work[mask] ^= np.uint32(row)
    # change of basis sending the chosen representatives to unit vectors
    cols = [int(coords[i]) for i in chosen]
    inv_rows = _invert_f2(cols, rank)
    out = np.zeros(len(elements), dtype=np.uint32)
    for i, row in enumerate(inv_rows):
        out |= _parity(coords & np.uint32(row)).astype(np.uint32) << np.uint32(i)
    return rank, [int(elements[i]) for i in chosen], out


def _invert_f2(cols: list[int], r: int) -> list[int]:
    """Rows of B^{-1} for the F_2 matrix B whose columns are cols."""
    rows = [sum(((cols[j] >> i) & 1) << j for j in range(r)) for i in range(r)]
    aug = [(rows[i], 1 << i) for i in range(r)]
    for col in range(r):
        piv = next(i for i in range(col, r) if (aug[i][0] >> col) & 1)
        aug[col], aug[piv] = aug[piv], aug[col]
        for i in range(r):
            if i != col and (aug[i][0] >> col) & 1:
                aug[i] = (aug[i][0] ^ aug[col][0], aug[i][1] ^ aug[col][1])
    return [inv for _, inv in aug]


class OpenSubgroup:
    """Finite-modulus model of an open subgroup of GL_2(Z_p).

    The object denotes the full preimage of <generators> under reduction
    from GL_2(Z_p); models at different moduli denote the same open group
    when one is the lift of the other.  Immutable after construction.
    """

    def __init__(self, prime: int, modulus: int, generators, _elements=None,
                 element_budget: int = DEFAULT_ELEMENT_BUDGET):
        p, _ = _prime_power(modulus)
        if p != prime:
            raise ValueError(f"modulus {modulus} is not a power of {prime}")
        gens = []
        for g in generators:
            if not isinstance(g, ResidueMatrix):
                g = ResidueMatrix(modulus, *g)
            if g.modulus != modulus:
                raise ValueError("generator modulus mismatch")
            if not g.is_invertible():
                raise ValueError(f"generator {g} is not invertible")
            gens.append(g)
        self.prime = prime
        self.modulus = modulus
        self.generators: tuple[ResidueMatrix, ...] = tuple(gens)
        self.element_budget = element_budget
        self._elements = _elements
        self._level: int | None = None
        self._fq: FrattiniQuotient | None = None
        self._fq_verified = False

    # -- element set ---------------------------------------------------------

    @property
    def elements(self) -> np.ndarray:
        if self._elements is None:
            self._elements = kernels.closure(
                [g.packed() for g in self.generators],
                self.modulus,
                cap=self.element_budget,
            )
        return self._elements

    def order(self) -> int:
        return len(self.elements)

    def contains(self, x: "ResidueMatrix | int") -> bool:
        packed = x.packed() if isinstance(x, ResidueMatrix) else int(x)
        return kernels.contains(self.elements, packed)

    def contains_minus_identity(self) -> bool:
        return self.contains(kernels.neg(kernels.IDENTITY, self.modulus))

    def index_in_ambient(self) -> int:
        total = gl2_order(self.modulus)
        n = self.order()
        if total % n:
            raise AssertionError("element count does not divide the ambient order")
        return total // n

    def is_two_group(self) -> bool:
        n = self.order()
        return n & (n - 1) == 0

    # -- level, reduction, lift ------------------------------------------------

    def level(self) -> int:
        """Smallest p^j such that the group is the preimage of its mod-p^j image."""
        if self._level is not None:
            return self._level
        p = self.prime
        _, k = _prime_power(self.modulus)
        n = self.order()
        for j in range(0, k + 1):
            nj = p ** j
            if nj == 1:
                determined = n == gl2_order(self.modulus)
            else:
                reduced = kernels.sorted_unique(
                    kernels.reduce_array(self.elements, nj))
                determined = len(reduced) * p ** (4 * (k - j)) == n
            if determined:
                self._level = nj
                return nj
        raise AssertionError("unreachable: the level divides the modulus")

    def reduce(self, m2: int) -> "OpenSubgroup":
        """Image mod m2.  Denotes the same open group only when level | m2."""
        if m2 < 2 or self.modulus % m2 != 0:
            raise ValueError(f"{m2} does not divide modulus {self.modulus}")
        elems = None
        if self._elements is not None:
            elems = kernels.sorted_unique(kernels.reduce_array(self._elements, m2))
        return OpenSubgroup(
            self.prime, m2, [g.reduce(m2) for g in self.generators],
            _elements=elems, element_budget=self.element_budget)

    def lift(self, m2: int) -> "OpenSubgroup":
        """Full preimage at the larger modulus m2: the same open group."""
        if m2 % self.modulus != 0:
            raise ValueError(f"{self.modulus} does not divide {m2}")
        if m2 == self.modulus:
            return self
        m = self.modulus
        kernel_gens = []
        for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)):
            e = [[0, 0], [0, 0]]
            e[i][j] = m
            kernel_gens.append(
                ResidueMatrix(m2, 1 + e[0][0], e[0][1], e[1][0], 1 + e[1][1]))
        gens = [ResidueMatrix(m2, *g.entries()) for g in self.generators]
        elems = None
        if self._elements is not None:
            ratio4 = (m2 // m) ** 4
            if len(self._elements) * ratio4 > self.element_budget:
                raise kernels.BudgetExceeded(
                    f"lift to modulus {m2} exceeds the element budget")
            elems = kernels.lift_array(self._elements, m, m2)
        return OpenSubgroup(self.prime, m2, gens + kernel_gens,
                            _elements=elems, element_budget=self.element_budget)

    # -- determinant image ------------------------------------------------------

    def det_image(self, m: int) -> list[int]:
        if self.modulus % m != 0:
            raise ValueError(f"{m} does not divide modulus {self.modulus}")
        dets = kernels.det_array(self.elements, self.modulus) % m
        return sorted(int(d) for d in np.unique(dets))

    def det_image_from_generators(self, m: int) -> frozenset[int]:
        """Subgroup of (Z/m)^x generated by generator determinants; cheap."""
        if self.modulus % m != 0:
            raise ValueError(f"{m} does not divide modulus {self.modulus}")
        gen_dets = {g.det() % m for g in self.generators}
        seen = {1}
        frontier = [1]
        while frontier:
            x = frontier.pop()
            for d in gen_dets:
                y = x * d % m
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return frozenset(seen)

    def det_surjective_2adic(self) -> bool:
        """True iff det of the full preimage is all of Z_2^x.

        A closed subgroup of Z_2^x with full image mod 8 contains the square
        of a residue-3 unit, which generates 1 + 8Z_2 topologically, so
        fullness mod 8 already certifies 2-adic fullness.  The minimality
        module re-derives this lemma by brute force before relying on it.
        """
        if self.prime != 2:
            raise ValueError("the 2-adic determinant test needs p = 2")
        if self.modulus < 8:
            raise ValueError("modulus must be at least 8")
        return self.det_image_from_generators(8) == UNIT_RESIDUES_MOD_8

    # -- Frattini quotient and maximal subgroups ---------------------------------

    def frattini_quotient(self, verify: bool | None = None) -> FrattiniQuotient:
        """Quotient by Phi(H) = <squares> . [H,H]; input must be a 2-group."""
        if self._fq is None:
            if not self.is_two_group():
                raise ValueError("Frattini quotient implemented for 2-groups only")
            elements = self.elements
            gens = [g.packed() for g in self.generators]
            labels, rels = _label_elements(elements, gens, self.modulus)
            rank, basis_packed, coords = _adapt_basis(elements, labels, rels,
                                                      len(gens))
            if 2 ** rank > len(elements):
                raise AssertionError("rank exceeds the group order")
            self._fq = FrattiniQuotient(
                rank=rank,
                basis=[ResidueMatrix.from_packed(x, self.modulus)
                       for x in basis_packed],
                _modulus=self.modulus,
                _elements=elements,
                _coords=coords)
        if verify is None:
            verify = len(self.elements) <= 1 << 20
        if verify and not self._fq_verified:
            self._verify_frattini(self._fq)
            self._fq_verified = True
        return self._fq

    def _verify_frattini(self, fq: FrattiniQuotient):
        """Exhaustive sweep: all squares and all generator commutators have
        zero coordinates, and coordinates are multiplicative on every edge."""
        elements, coords, m = self.elements, fq._coords, self.modulus
        pos = np.searchsorted(elements, kernels.square_array(elements, m))
        if not (coords[pos] == 0).all():
            raise AssertionError("a square has nonzero Frattini coordinates")
        xinv = kernels.inv_array(elements, m)
        for g in self.generators:
            gp = g.packed()
            gc = coords[int(np.searchsorted(elements, gp))]
            xg = kernels.mul_array_scalar(elements, gp, m)
            if not (coords[np.searchsorted(elements, xg)] == (coords ^ gc)).all():
                raise AssertionError("coordinates are not multiplicative")
            left = kernels.mul_array_scalar(xinv, kernels.inv(gp, m), m)
            comm = kernels.mul_arrays(left, xg, m)
            if not (coords[np.searchsorted(elements, comm)] == 0).all():
                raise AssertionError("a commutator has nonzero Frattini coordinates")
        n_phi = int((coords == 0).sum())
        if n_phi << fq.rank != len(elements):
            raise AssertionError("Phi index does not match the rank")

    def index2_subgroups(self, verify: bool | None = None) -> list["OpenSubgroup"]:
        """All maximal (index-2) subgroups, one per Frattini hyperplane."""
        fq = self.frattini_quotient(verify=verify)
        out = []
        for mu in range(1, 1 << fq.rank):
            mask = fq.hyperplane_mask(mu)
            elems = self.elements[mask]
            ti = next(i for i in range(fq.rank) if (mu >> i) & 1)
            t = fq.basis[ti]
            t_inv = t.inverse()
            # Schreier generators for the transversal {I, t}
            gens: list[ResidueMatrix] = []
            seen: set[int] = set()
            for g in self.generators:
                gv = sum(c << i for i, c in enumerate(fq.coords(g)))
                if _parity_int(gv & mu) == 0:
                    cand = (g, t * g * t_inv)
                else:
                    cand = (g * t_inv, t * g)
                for w in cand:
                    wp = w.packed()
                    if wp != kernels.IDENTITY and wp not in seen:
                        seen.add(wp)
                        gens.append(w)
            if not gens:
                gens = [ResidueMatrix.identity(self.modulus)]
            out.append(OpenSubgroup(self.prime, self.modulus, gens,
                                    _elements=elems,
                                    element_budget=self.element_budget))
        return out

    # -- nilpotency ---------------------------------------------------------------

    def _normal_closure(self, seeds: list[int]) -> np.ndarray:
        """Element set of the normal closure in H of <seeds>."""
        m = self.modulus
        gens = [g.packed() for g in self.generators]
        ncl_gens = sorted(set(seeds))
        current = kernels.closure(ncl_gens, m, cap=self.element_budget)
        stable = False
        while not stable:
            stable = True
            for g in gens:
                conj = kernels.conjugate_set(current, g, m)
                if not kernels.is_subset(conj, current):
                    ncl_gens = sorted(set(ncl_gens) | {int(v) for v in conj})
                    current = kernels.closure(ncl_gens, m,
                                              cap=self.element_budget)
                    stable = False
        return current

    def is_nilpotent(self) -> bool:
        """Lower central series termination test."""
        m = self.modulus
        gens = [g.packed() for g in self.generators]
        layer = self.elements
        layer_gens: list[int] = gens
        while True:
            comms = set()
            for g in gens:
                gi = kernels.inv(g, m)
                for x in layer_gens:
                    xi = kernels.inv(int(x), m)
                    comms.add(kernels.mul(kernels.mul(xi, gi, m),
                                          kernels.mul(int(x), g, m), m))
            nxt = self._normal_closure(sorted(comms))
            if len(nxt) == 1:
                return True
            if len(nxt) == len(layer):
                return False
            layer = nxt
            layer_gens = ([int(v) for v in nxt] if len(nxt) <= 128 else
                          _greedy_generators(nxt, m, self.element_budget))

    def sylow_decomposition_nilpotent(self) -> bool:
        """Cross-check criterion: nilpotent iff every Sylow subgroup is normal."""
        m = self.modulus
        n = self.order()
        gens = [g.packed() for g in self.generators]
        nn = n
        q = 2
        while nn > 1:
            while nn % q:
                q += 1
            qpart = 1
            while nn % q == 0:
                nn //= q
                qpart *= q
            syl = _grow_q_subgroup(self.elements, m, q, qpart,
                                   self.element_budget)
            for g in gens:
                if not np.array_equal(kernels.conjugate_set(syl, g, m), syl):
                    return False
            q += 1
        return True

    # -- conjugacy -------------------------------------------------------------------

    def canonical_key(self, orbit_budget: int = DEFAULT_ORBIT_BUDGET) -> bytes:
        """Lexicographically minimal packed-element list over the ambient
        conjugation orbit, as big-endian uint32 bytes."""
        return min(self._conjugation_orbit(orbit_budget))

    def own_digest(self) -> bytes:
        """sha256 of (level | index | element bytes); conjugates of this
        subgroup produce digests inside conjugacy_digests()."""
        prefix = f"{self.level()}|{self.index_in_ambient()}|".encode()
        return hashlib.sha256(prefix + self.elements.astype(">u4").tobytes()).digest()

    def conjugacy_digests(self, orbit_budget: int = DEFAULT_ORBIT_BUDGET) -> set[bytes]:
        """own_digest of every member of the conjugation orbit."""
        prefix = f"{self.level()}|{self.index_in_ambient()}|".encode()
        return {hashlib.sha256(prefix + kb).digest()
                for kb in self._conjugation_orbit(orbit_budget)}

    def _conjugation_orbit(self, orbit_budget: int) -> set[bytes]:
        m = self.modulus
        amb = ambient_generators(self.prime, m)
        start = self.elements
        orbit = {start.astype(">u4").tobytes()}
        frontier = [start]
        while frontier:
            xs = frontier.pop()
            for g in amb:
                conj = kernels.conjugate_set(xs, g, m)
                kb = conj.astype(">u4").tobytes()
                if kb not in orbit:
                    if len(orbit) >= orbit_budget:
                        raise kernels.BudgetExceeded(
                            f"conjugation orbit exceeds {orbit_budget}")
                    orbit.add(kb)
                    frontier.append(conj)
        return orbit

    # -- serialization ------------------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "prime": self.prime,
            "modulus": self.modulus,
            "generators": [list(g.entries()) for g in self.generators],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "OpenSubgroup":
        return cls(d["prime"], d["modulus"],
                   [ResidueMatrix(d["modulus"], *e) for e in d["generators"]])

    def __repr__(self):
        return (f"OpenSubgroup(p={self.prime}, mod {self.modulus}, "
                f"{len(self.generators)} gens)")


def closure(gens, modulus: int, prime: int | None = None,
            element_budget: int = DEFAULT_ELEMENT_BUDGET) -> OpenSubgroup:
    """Subgroup generated by gens at the given prime-power modulus."""
    p, _ = _prime_power(modulus)
    if prime is not None and prime != p:
        raise ValueError("prime/modulus mismatch")
    H = OpenSubgroup(p, modulus, gens, element_budget=element_budget)
    H.elements  # force now so budget errors surface eagerly
    return H


def ambient_generators(prime: int, modulus: int) -> list[int]:
    """Packed generators of GL_2(Z/modulus): the two elementary transvections
    plus diagonal unit generators."""
    if prime == 2:
        units = [u % modulus for u in (3, 5) if u % modulus != 1]
        if not units:
            units = []
    else:
        units = [_primitive_root(prime, modulus)]
    gens = [kernels.pack(1, 1, 0, 1), kernels.pack(1, 0, 1, 1)]
    gens += [kernels.pack(u, 0, 0, 1) for u in units]
    return gens


def _primitive_root(p: int, modulus: int) -> int:
    """A generator of (Z/p^k)^x for odd p."""
    from .modmat import _prime_factors

    phi = modulus // p * (p - 1)
    for g in range(2, modulus):
        if g % p == 0:
            continue
        if all(pow(g, phi // q, modulus) != 1 for q in _prime_factors(phi)):
            return g
    raise AssertionError("no primitive root found")


def _greedy_generators(elements: np.ndarray, m: int, budget: int) -> list[int]:
    """Small generating set for an element set known to be a group."""
    gens: list[int] = []
    current = kernels.closure([], m)
    while len(current) < len(elements):
        missing = elements[~np.isin(elements, current, assume_unique=True)]
        gens.append(int(missing[0]))
        current = kernels.closure(gens, m, cap=budget)
    return gens


def _element_orders(elements: np.ndarray, m: int) -> np.ndarray:
    """Multiplicative order of every element, by iterated multiplication."""
    n = len(elements)
    orders = np.zeros(n, dtype=np.int64)
    acc = elements.copy()
    k = 1
    while True:
        remaining = orders == 0
        done = remaining & (acc == kernels.IDENTITY)
        orders[done] = k
        remaining &= ~done
        if not remaining.any():
            return orders
        acc[remaining] = kernels.mul_arrays(acc[remaining], elements[remaining], m)
        k += 1
        if k > 8 * m * m:
            raise AssertionError("order computation runaway")


def _grow_q_subgroup(elements: np.ndarray, m: int, q: int, target: int,
                     budget: int) -> np.ndarray:
    """A Sylow q-subgroup of the group with the given element set.

    Greedy growth is complete: a q-subgroup that is not Sylow admits a
    normalizer element of q-power order whose adjunction stays a q-group.
    """
    if target == 1:
        return kernels.closure([], m)
    v = _element_orders(elements, m).copy()
    while True:
        mask = v % q == 0
        if not mask.any():
            break
        v[mask] //= q
    q_elems = elements[v == 1]
    gens: list[int] = []
    current = kernels.closure([], m)
    while len(current) < target:
        for x in q_elems:
            xi = int(x)
            if kernels.contains(current, xi):
                continue
            cand = kernels.closure(gens + [xi], m, cap=budget)
            if _is_q_power(len(cand), q):
                gens.append(xi)
                current = cand
                break
        else:
            raise AssertionError("Sylow growth stalled before the full q-part")
    return current


def _is_q_power(n: int, q: int) -> bool:
    while n % q == 0:
        n //= q
    return n == 1
