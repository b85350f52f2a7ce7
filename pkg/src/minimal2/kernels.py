"""Low-level kernels for 2x2 matrices over Z/m packed into single integers.

A matrix [[a, b], [c, d]] with entries reduced mod m (m <= 256) is stored as
``a | b<<8 | c<<16 | d<<24``.  Element sets are kept as sorted int64 numpy
arrays of packed values, which makes membership a binary search and lets the
breadth-first closure run over flat arrays.

The closure / conjugation loops are JIT-compiled with numba when available;
set MINIMAL2_NO_NUMBA=1 to force the (slower) numpy fallback.
"""

from __future__ import annotations

import os

import numpy as np

_USE_NUMBA = os.environ.get("MINIMAL2_NO_NUMBA", "") not in ("1", "true", "yes")
if _USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _USE_NUMBA = False

MAX_PACK_MODULUS = 256

IDENTITY = 1 | (1 << 24)


class BudgetExceeded(RuntimeError):
    """A closure or orbit grew past the configured element budget."""


def pack(a: int, b: int, c: int, d: int) -> int:
    return a | (b << 8) | (c << 16) | (d << 24)


def unpack(x: int) -> tuple[int, int, int, int]:
    return (x & 255, (x >> 8) & 255, (x >> 16) & 255, (x >> 24) & 255)


def mul(x: int, y: int, m: int) -> int:
    """Packed product of two packed matrices mod m."""
    ax, bx, cx, dx = unpack(x)
    ay, by, cy, dy = unpack(y)
    return pack(
        (ax * ay + bx * cy) % m,
        (ax * by + bx * dy) % m,
        (cx * ay + dx * cy) % m,
        (cx * by + dx * dy) % m,
    )


def det(x: int, m: int) -> int:
    a, b, c, d = unpack(x)
    return (a * d - b * c) % m


def inv(x: int, m: int) -> int:
    """Packed inverse; raises ValueError when det is not a unit mod m."""
    a, b, c, d = unpack(x)
    dt = (a * d - b * c) % m
    try:
        di = pow(dt, -1, m)
    except ValueError:
        raise ValueError(f"matrix {unpack(x)} is not invertible mod {m}") from None
    return pack((d * di) % m, (-b * di) % m, (-c * di) % m, (a * di) % m)


def reduce_packed(x: int, m2: int) -> int:
    a, b, c, d = unpack(x)
    return pack(a % m2, b % m2, c % m2, d % m2)


def neg(x: int, m: int) -> int:
    a, b, c, d = unpack(x)
    return pack((-a) % m, (-b) % m, (-c) % m, (-d) % m)


# ---------------------------------------------------------------------------
# vectorized (numpy) operations on packed arrays
# ---------------------------------------------------------------------------


def unpack_array(xs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    return xs & 255, (xs >> 8) & 255, (xs >> 16) & 255, (xs >> 24) & 255


def pack_array(a, b, c, d) -> np.ndarray:
    return a | (b << 8) | (c << 16) | (d << 24)


def mul_array_scalar(xs: np.ndarray, y: int, m: int, right: bool = True) -> np.ndarray:
    """Elementwise xs @ y (right=True) or y @ xs (right=False), packed."""
    ax, bx, cx, dx = unpack_array(xs)
    ay, by, cy, dy = unpack(y)
    if right:
        return pack_array(
            (ax * ay + bx * cy) % m,
            (ax * by + bx * dy) % m,
            (cx * ay + dx * cy) % m,
            (cx * by + dx * dy) % m,
        )
    return pack_array(
        (ay * ax + by * cx) % m,
        (ay * bx + by * dx) % m,
        (cy * ax + dy * cx) % m,
        (cy * bx + dy * dx) % m,
    )


def mul_arrays(xs: np.ndarray, ys: np.ndarray, m: int) -> np.ndarray:
    """Elementwise packed products xs[i] @ ys[i]."""
    ax, bx, cx, dx = unpack_array(xs)
    ay, by, cy, dy = unpack_array(ys)
    return pack_array(
        (ax * ay + bx * cy) % m,
        (ax * by + bx * dy) % m,
        (cx * ay + dx * cy) % m,
        (cx * by + dx * dy) % m,
    )


def det_array(xs: np.ndarray, m: int) -> np.ndarray:
    a, b, c, d = unpack_array(xs)
    return (a * d - b * c) % m


def reduce_array(xs: np.ndarray, m2: int) -> np.ndarray:
    a, b, c, d = unpack_array(xs)
    return pack_array(a % m2, b % m2, c % m2, d % m2)


def neg_array(xs: np.ndarray, m: int) -> np.ndarray:
    a, b, c, d = unpack_array(xs)
    return pack_array((-a) % m, (-b) % m, (-c) % m, (-d) % m)


def square_array(xs: np.ndarray, m: int) -> np.ndarray:
    a, b, c, d = unpack_array(xs)
    return pack_array(
        (a * a + b * c) % m,
        (a * b + b * d) % m,
        (c * a + d * c) % m,
        (c * b + d * d) % m,
    )


def inv_array(xs: np.ndarray, m: int) -> np.ndarray:
    """Packed inverses of an array of invertible packed matrices."""
    table = unit_inverse_table(m)
    a, b, c, d = unpack_array(xs)
    dt = (a * d - b * c) % m
    di = table[dt]
    if np.any(di < 0):
        raise ValueError(f"array contains a matrix not invertible mod {m}")
    return pack_array((d * di) % m, (-b * di) % m, (-c * di) % m, (a * di) % m)


def conj_array(xs: np.ndarray, g: int, m: int) -> np.ndarray:
    """g @ x @ g^-1 for every packed x; result is not sorted."""
    gi = inv(g, m)
    return mul_array_scalar(mul_array_scalar(xs, gi, m, right=True), g, m, right=False)


_INV_TABLES: dict[int, np.ndarray] = {}


def unit_inverse_table(m: int) -> np.ndarray:
    """table[u] = u^-1 mod m for units, -1 for non-units."""
    tab = _INV_TABLES.get(m)
    if tab is None:
        tab = np.full(m, -1, dtype=np.int64)
        for u in range(m):
            try:
                tab[u] = pow(u, -1, m)
            except ValueError:
                pass
        _INV_TABLES[m] = tab
    return tab


def lift_array(xs: np.ndarray, m: int, m2: int) -> np.ndarray:
    """All packed lifts mod m2 of packed matrices given mod m (m | m2).

    Entry lifts a -> a + m*t never carry across 8-bit fields because m2 <= 256,
    so lifting is a packed addition of offset patterns.
    """
    if m2 % m != 0 or m2 > MAX_PACK_MODULUS:
        raise ValueError(f"bad lift {m} -> {m2}")
    r = m2 // m
    t = np.arange(r, dtype=np.int64)
    offs = (
        t[:, None, None, None]
        | (t[None, :, None, None] << 8)
        | (t[None, None, :, None] << 16)
        | (t[None, None, None, :] << 24)
    ).ravel() * m
    out = (xs[:, None] + offs[None, :]).ravel()
    out.sort()
    return out


def sorted_unique(xs: np.ndarray) -> np.ndarray:
    out = np.unique(xs)
    return out


def contains(sorted_set: np.ndarray, x: int) -> bool:
    i = np.searchsorted(sorted_set, x)
    return bool(i < sorted_set.shape[0] and sorted_set[i] == x)


def is_subset(candidates: np.ndarray, sorted_set: np.ndarray) -> bool:
    if candidates.size == 0:
        return True
    idx = np.searchsorted(sorted_set, candidates)
    idx[idx >= sorted_set.shape[0]] = sorted_set.shape[0] - 1
    return bool(np.all(sorted_set[idx] == candidates))


# ---------------------------------------------------------------------------
# breadth-first closure
# ---------------------------------------------------------------------------

if _USE_NUMBA:

    @njit(cache=True, inline="always")
    def _nb_mul(x, y, m):
        ax = x & 255
        bx = (x >> 8) & 255
        cx = (x >> 16) & 255
        dx = (x >> 24) & 255
        ay = y & 255
        by = (y >> 8) & 255
        cy = (y >> 16) & 255
        dy = (y >> 24) & 255
        a = (ax * ay + bx * cy) % m
        b = (ax * by + bx * dy) % m
        c = (cx * ay + dx * cy) % m
        d = (cx * by + dx * dy) % m
        return a | (b << 8) | (c << 16) | (d << 24)

    @njit(cache=True, inline="always")
    def _nb_hash(x, mask):
        h = (x * np.int64(-7046029254386353131)) & np.int64(0x7FFFFFFFFFFFFFFF)
        return (h >> 13) & mask

    @njit(cache=True)
    def _nb_rehash(elems, n, nslots):
        table = np.full(nslots, np.int64(-1), dtype=np.int64)
        mask = nslots - 1
        for k in range(n):
            x = elems[k]
            i = _nb_hash(x, mask)
            while table[i] != -1:
                i = (i + 1) & mask
            table[i] = x
        return table

    @njit(cache=True)
    def _nb_closure(seeds, gens, m, cap):
        """BFS closure of <gens> applied on the right of every seed.

        seeds must contain the identity and be closed under right
        multiplication by gens *or* be an arbitrary start set: the result is
        seeds * <gens>-monoid, which is the generated subgroup whenever
        seeds is {I} or already a subgroup containing the gens' span.
        Returns (elements, count, ok); ok = False on cap overflow.
        """
        nslots = 1024
        while nslots < 4 * (seeds.shape[0] + 16):
            nslots *= 2
        table = np.full(nslots, np.int64(-1), dtype=np.int64)
        mask = nslots - 1
        elems = np.empty(max(1024, seeds.shape[0] * 2), dtype=np.int64)
        n = 0
        for k in range(seeds.shape[0]):
            x = seeds[k]
            i = _nb_hash(x, mask)
            new = True
            while table[i] != -1:
                if table[i] == x:
                    new = False
                    break
                i = (i + 1) & mask
            if new:
                table[i] = x
                elems[n] = x
                n += 1
        head = 0
        ng = gens.shape[0]
        while head < n:
            x = elems[head]
            head += 1
            for j in range(ng):
                y = _nb_mul(x, gens[j], m)
                i = _nb_hash(y, mask)
                new = True
                while table[i] != -1:
                    if table[i] == y:
                        new = False
                        break
                    i = (i + 1) & mask
                if new:
                    if n >= cap:
                        return elems[:n], n, False
                    table[i] = y
                    if n == elems.shape[0]:
                        bigger = np.empty(elems.shape[0] * 2, dtype=np.int64)
                        bigger[:n] = elems
                        elems = bigger
                    elems[n] = y
                    n += 1
                    if 2 * n > nslots:
                        nslots *= 2
                        table = _nb_rehash(elems, n, nslots)
                        mask = nslots - 1
        return elems[:n], n, True

    @njit(cache=True)
    def _nb_conj_set(xs, g, gi, m):
        out = np.empty(xs.shape[0], dtype=np.int64)
        for k in range(xs.shape[0]):
            out[k] = _nb_mul(_nb_mul(g, xs[k], m), gi, m)
        return out

    @njit(cache=True)
    def _nb_label(elements, gens, m, identity):
        """Spanning-tree labels in F_2^s plus the echelon of edge relations.

        Scans every Cayley edge (x, g) exactly once; revisit edges reduce
        into the relation rows (indexed by pivot bit).  Returns
        (labels, rows, reached); reached < n means the gens do not generate,
        reached = -1 means the element set is not closed.
        """
        n = elements.shape[0]
        s = gens.shape[0]
        nslots = 1024
        while nslots < 4 * n:
            nslots *= 2
        mask = nslots - 1
        table = np.full(nslots, np.int64(-1), dtype=np.int64)
        for k in range(n):
            i = _nb_hash(elements[k], mask)
            while table[i] != -1:
                i = (i + 1) & mask
            table[i] = k
        labels = np.full(n, np.int64(-1), dtype=np.int64)
        rows = np.zeros(s, dtype=np.int64)
        i = _nb_hash(identity, mask)
        while table[i] != -1 and elements[table[i]] != identity:
            i = (i + 1) & mask
        if table[i] == -1:
            return labels, rows, np.int64(-1)
        queue = np.empty(n, dtype=np.int64)
        queue[0] = table[i]
        labels[table[i]] = 0
        head = np.int64(0)
        tail = np.int64(1)
        while head < tail:
            xi = queue[head]
            head += 1
            x = elements[xi]
            lx = labels[xi]
            for gi in range(s):
                y = _nb_mul(x, gens[gi], m)
                i = _nb_hash(y, mask)
                while table[i] != -1 and elements[table[i]] != y:
                    i = (i + 1) & mask
                if table[i] == -1:
                    return labels, rows, np.int64(-1)
                yi = table[i]
                v = lx ^ (np.int64(1) << gi)
                if labels[yi] < 0:
                    labels[yi] = v
                    queue[tail] = yi
                    tail += 1
                else:
                    r = labels[yi] ^ v
                    while r != 0:
                        p = 0
                        t = r >> 1
                        while t != 0:
                            p += 1
                            t >>= 1
                        if rows[p] != 0:
                            r ^= rows[p]
                        else:
                            rows[p] = r
                            r = 0
        return labels, rows, tail

else:  # numpy fallback

    def _nb_closure(seeds, gens, m, cap):
        known = np.unique(seeds)
        frontier = known
        while frontier.size:
            prods = [mul_array_scalar(frontier, int(g), m) for g in gens]
            cand = np.unique(np.concatenate(prods))
            idx = np.searchsorted(known, cand)
            idx[idx >= known.shape[0]] = known.shape[0] - 1
            fresh = cand[known[idx] != cand]
            if fresh.size == 0:
                break
            if known.size + fresh.size > cap:
                return known, known.size, False
            known = np.union1d(known, fresh)
            frontier = fresh
        return known, known.size, True

    def _nb_conj_set(xs, g, gi, m):
        return mul_array_scalar(mul_array_scalar(xs, gi, m, right=True), int(g), m, right=False)


def closure(gens, m: int, cap: int = 1 << 27, seeds=None) -> np.ndarray:
    """Sorted packed element array of the subgroup generated by gens mod m.

    When seeds is given it must be a subset of the target group; the BFS
    starts from seeds united with the identity.  Raises BudgetExceeded when
    the closure would pass cap elements.
    """
    gens = np.asarray(
        sorted({int(g) for g in gens} | {IDENTITY}), dtype=np.int64
    )
    if seeds is None:
        seed_arr = np.array([IDENTITY], dtype=np.int64)
    else:
        seed_arr = np.union1d(np.asarray(seeds, dtype=np.int64), np.int64(IDENTITY))
    elems, n, ok = _nb_closure(seed_arr, gens, m, cap)
    if not ok:
        raise BudgetExceeded(f"closure exceeded budget of {cap} elements (mod {m})")
    out = np.array(elems[:n], dtype=np.int64)
    out.sort()
    return out


def closure_extend(current: np.ndarray, gens_so_far: list[int], new_gen: int, m: int, cap: int = 1 << 27) -> np.ndarray:
    """Extend a closed set by one more generator.

    current must already be closed under gens_so_far.  Seeds the BFS with
    current * new_gen so the old elements are not reprocessed against the old
    generators from scratch.
    """
    allgens = np.asarray(sorted(set(gens_so_far) | {int(new_gen), IDENTITY}), dtype=np.int64)
    seeds = np.union1d(current, mul_array_scalar(current, int(new_gen), m))
    elems, n, ok = _nb_closure(seeds, allgens, m, cap)
    if not ok:
        raise BudgetExceeded(f"closure exceeded budget of {cap} elements (mod {m})")
    out = np.array(elems[:n], dtype=np.int64)
    out.sort()
    return out


def conjugate_set(xs: np.ndarray, g: int, m: int) -> np.ndarray:
    """Sorted packed set {g x g^-1}."""
    gi = inv(g, m)
    out = np.array(_nb_conj_set(xs, np.int64(g), np.int64(gi), m), dtype=np.int64)
    out.sort()
    return out


def label_edges(elements: np.ndarray, gens, m: int):
    """Fast path for the F_2 exponent labeling of a group's Cayley graph.

    Returns (uint32 labels, list of relation row bitmasks), or None when the
    JIT path is disabled and the caller should fall back to numpy.
    """
    if not _USE_NUMBA:
        return None
    garr = np.asarray([int(g) for g in gens], dtype=np.int64)
    labels, rows, reached = _nb_label(elements, garr, m, np.int64(IDENTITY))
    if reached == -1:
        raise ValueError("element set is not closed under the generators")
    if reached != len(elements):
        raise AssertionError("generators do not generate the element set")
    return labels.astype(np.uint32), [int(r) for r in rows if r]


def warmup() -> None:
    """Trigger JIT compilation of the hot kernels on a tiny example."""
    g = np.array([pack(1, 1, 0, 1), pack(0, 1, 1, 0)], dtype=np.int64)
    closure(g, 2, cap=64)
    conjugate_set(g, pack(0, 1, 1, 0), 2)
    label_edges(closure(g, 2, cap=64), [int(v) for v in g], 2)
