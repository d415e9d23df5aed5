"""Border-pair algebra for generalized polymatroids.

A border pair is two integer set functions (p below, b above) over a common
ground set; the polyhedron it describes is the set of vectors x with
p(Y) <= x(Y) <= b(Y) for every subset Y.  Pairs are kept as full tables over
all 2**k subsets, stored as numpy integer arrays with explicit finiteness
masks (None stands for an absent bound and is never encoded as a sentinel in
the public API).  The desk-scale cap on the ground-set size makes the full
tables cheap, and every derived pair (deletion, vector shift, box
intersection) is produced by a vectorized pass over the tables.

Supported operations: construction with a paramodularity check, membership
tests, deletion of elements, contraction of an integer vector, intersection
with an integer box, and the graphic border pair whose integer points are
the degree-sum-constrained connected edge multisets of a complete graph
with self-loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _bits

ENUM_CAP = 16

# finite table entries must leave headroom for the box-intersection DP
_VALUE_CAP = 1 << 32
_INF = 1 << 50


class GpolyError(Exception):
    pass


class NotParamodular(GpolyError):
    def __init__(self, reason, X, Y):
        super().__init__(f"{reason} violated for subsets {X} and {Y}")
        self.X = X
        self.Y = Y


class GroundSetTooLarge(GpolyError):
    pass


class ElementNotInPolyhedron(GpolyError):
    pass


class EmptyIntersection(GpolyError):
    pass


@dataclass(frozen=True)
class GroundSet:
    """Ordered finite set of element identifiers; subsets are bitmasks over
    the construction order."""

    elements: tuple
    _index: dict = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        if len(set(self.elements)) != len(self.elements):
            raise GpolyError("duplicate ground-set elements")
        object.__setattr__(self, "_index",
                           {e: i for i, e in enumerate(self.elements)})

    @property
    def size(self):
        return len(self.elements)

    @property
    def full_mask(self):
        return (1 << self.size) - 1

    def index(self, element):
        return self._index[element]

    def mask_of(self, subset) -> int:
        m = 0
        for e in subset:
            m |= 1 << self._index[e]
        return m

    def members(self, mask: int) -> tuple:
        return tuple(self.elements[j] for j in _bits.bits_of(mask))


def _as_tables(ground, table, kind):
    """Normalize a set-function table (mapping or sequence, values int or
    None) into a (values, finite) numpy array pair."""
    k = ground.size
    n = 1 << k
    vals = np.zeros(n, dtype=np.int64)
    fin = np.ones(n, dtype=bool)
    if hasattr(table, "keys"):
        items = ((int(m), table[m]) for m in table.keys())
        seen = set()
        for m, v in items:
            seen.add(m)
            if v is None:
                fin[m] = False
            else:
                vals[m] = int(v)
        if len(seen) != n:
            raise GpolyError(f"{kind} table must cover all {n} subsets")
    else:
        if len(table) != n:
            raise GpolyError(f"{kind} table must cover all {n} subsets")
        for m, v in enumerate(table):
            if v is None:
                fin[m] = False
            else:
                vals[m] = int(v)
    if fin.any() and int(np.abs(vals[fin]).max()) >= _VALUE_CAP:
        raise GpolyError(f"{kind} values exceed the supported magnitude")
    return vals, fin


@dataclass(frozen=True, eq=False)
class BorderPair:
    """Integer border pair over a ground set, as full subset tables.

    p_vals/b_vals are int64 arrays indexed by subset mask; p_fin/b_fin flag
    the finite entries (p is -inf where not finite, b is +inf).
    """

    ground: GroundSet
    p_vals: np.ndarray = field(repr=False)
    p_fin: np.ndarray = field(repr=False)
    b_vals: np.ndarray = field(repr=False)
    b_fin: np.ndarray = field(repr=False)

    def p_of(self, mask: int):
        return int(self.p_vals[mask]) if self.p_fin[mask] else None

    def b_of(self, mask: int):
        return int(self.b_vals[mask]) if self.b_fin[mask] else None

    @property
    def size(self):
        return self.ground.size


def _check_cap(k):
    if k > ENUM_CAP:
        raise GroundSetTooLarge(
            f"ground set of size {k} exceeds the enumeration cap {ENUM_CAP}")


def make_explicit(ground: GroundSet, p_table, b_table) -> BorderPair:
    """Build a border pair from explicit tables, rejecting non-paramodular
    input (the error names one violating subset pair)."""
    _check_cap(ground.size)
    p_vals, p_fin = _as_tables(ground, p_table, "p")
    b_vals, b_fin = _as_tables(ground, b_table, "b")
    if not p_fin[0] or not b_fin[0] or p_vals[0] != 0 or b_vals[0] != 0:
        raise GpolyError("p(empty) and b(empty) must both be 0")
    pair = BorderPair(ground, p_vals, p_fin, b_vals, b_fin)
    bad = _paramodular_violation(pair)
    if bad is not None:
        raise NotParamodular(*bad)
    return pair


def _ext_p(pair, m):
    # p with -inf represented as None
    return int(pair.p_vals[m]) if pair.p_fin[m] else None


def _ext_b(pair, m):
    return int(pair.b_vals[m]) if pair.b_fin[m] else None


def _paramodular_violation(pair):
    """First violation of supermodularity of p, submodularity of b, or the
    cross-inequality b(X) - p(Y) >= b(X-Y) - p(Y-X); None when paramodular."""
    k = pair.size
    n = 1 << k
    names = pair.ground.members
    for X in range(n):
        bX = _ext_b(pair, X)
        pX = _ext_p(pair, X)
        for Y in range(n):
            u, i = X | Y, X & Y
            # b submodular: b(X) + b(Y) >= b(X|Y) + b(X&Y)
            bY = _ext_b(pair, Y)
            if bX is not None and bY is not None:
                bu, bi = _ext_b(pair, u), _ext_b(pair, i)
                if bu is None or bi is None or bX + bY < bu + bi:
                    return ("submodularity of b", names(X), names(Y))
            # p supermodular: p(X) + p(Y) <= p(X|Y) + p(X&Y)
            pY = _ext_p(pair, Y)
            if pX is not None and pY is not None:
                pu, pi = _ext_p(pair, u), _ext_p(pair, i)
                if pu is None or pi is None or pX + pY > pu + pi:
                    return ("supermodularity of p", names(X), names(Y))
            # cross-inequality (extended arithmetic: LHS infinite passes)
            if bX is not None and pY is not None:
                bd = _ext_b(pair, X & ~Y)
                pd = _ext_p(pair, Y & ~X)
                if bd is None or pd is None or bX - pY < bd - pd:
                    return ("cross-inequality", names(X), names(Y))
    return None


def is_paramodular(pair: BorderPair) -> bool:
    """Exhaustive check of the three inequality families over all subset
    pairs; quadratic in the number of subsets."""
    _check_cap(pair.size)
    return _paramodular_violation(pair) is None


def contains(pair: BorderPair, x) -> bool:
    """True iff p(Y) <= x(Y) <= b(Y) for every subset Y."""
    _check_cap(pair.size)
    if len(x) != pair.size:
        raise GpolyError("vector dimension does not match the ground set")
    sums = _bits.subset_sums_py([int(v) for v in x])
    for m in range(1 << pair.size):
        s = sums[m]
        if pair.p_fin[m] and s < pair.p_vals[m]:
            return False
        if pair.b_fin[m] and s > pair.b_vals[m]:
            return False
    return True


def delete(pair: BorderPair, subset) -> BorderPair:
    """Restrict the pair to the complement of subset (projection of the
    polyhedron onto the remaining coordinates)."""
    drop = pair.ground.mask_of(subset)
    keep = [j for j in range(pair.size) if not drop >> j & 1]
    new_ground = GroundSet(tuple(pair.ground.elements[j] for j in keep))
    gather = _bits.compress_masks(pair.size, keep)
    return BorderPair(new_ground,
                      pair.p_vals[gather], pair.p_fin[gather],
                      pair.b_vals[gather], pair.b_fin[gather])


def shift(pair: BorderPair, z) -> BorderPair:
    """Subtract the modular function of an integer vector from both borders.

    This is the raw table update behind contraction; it preserves
    paramodularity for any integer vector and translates the polyhedron so
    that x is in the result iff x + z is in the original.
    """
    if len(z) != pair.size:
        raise GpolyError("vector dimension does not match the ground set")
    sums = np.asarray(_bits.subset_sums_py([int(v) for v in z]), dtype=np.int64)
    return BorderPair(pair.ground,
                      np.where(pair.p_fin, pair.p_vals - sums, pair.p_vals),
                      pair.p_fin,
                      np.where(pair.b_fin, pair.b_vals - sums, pair.b_vals),
                      pair.b_fin)


def contract(pair: BorderPair, z) -> BorderPair:
    """Contract a contained integer vector: both borders drop by z(X)."""
    if not contains(pair, z):
        raise ElementNotInPolyhedron(
            "cannot contract a vector outside the polyhedron")
    return shift(pair, z)


def _box_vec(ground, v, what):
    if v is None:
        return [None] * ground.size
    if len(v) != ground.size:
        raise GpolyError(f"{what} dimension does not match the ground set")
    return [None if e is None else int(e) for e in v]


def intersect_box(pair: BorderPair, lower, upper) -> BorderPair:
    """Intersect with the box lower <= x <= upper (entries may be None for
    an absent bound; lower/upper may be None entirely).

    Raises EmptyIntersection when some subset has lower(Y) > b(Y) or
    p(Y) > upper(Y); otherwise returns the pair of the intersection:

        p'(Z) = max over Z' of p(Z') - upper(Z' - Z) + lower(Z - Z')
        b'(Z) = min over Z' of b(Z') - lower(Z' - Z) + upper(Z - Z')

    evaluated for all Z at once by a per-element min/max-plus sweep.
    """
    k = pair.size
    lo = _box_vec(pair.ground, lower, "lower")
    hi = _box_vec(pair.ground, upper, "upper")
    for s, (l, u) in enumerate(zip(lo, hi)):
        if l is not None and u is not None and l > u:
            raise EmptyIntersection(
                f"box is empty at element {pair.ground.elements[s]}")

    # nonemptiness: lower(Y) <= b(Y) and p(Y) <= upper(Y) for every Y
    lo_sum = _bits.subset_sums_py([0 if v is None else v for v in lo])
    lo_inf = _bits.subset_sums_py([1 if v is None else 0 for v in lo])
    hi_sum = _bits.subset_sums_py([0 if v is None else v for v in hi])
    hi_inf = _bits.subset_sums_py([1 if v is None else 0 for v in hi])
    for m in range(1 << k):
        if pair.b_fin[m] and lo_inf[m] == 0 and lo_sum[m] > pair.b_vals[m]:
            raise EmptyIntersection(
                f"lower bounds exceed b on {pair.ground.members(m)}")
        if pair.p_fin[m] and hi_inf[m] == 0 and hi_sum[m] < pair.p_vals[m]:
            raise EmptyIntersection(
                f"p exceeds upper bounds on {pair.ground.members(m)}")

    b_arr = np.where(pair.b_fin, pair.b_vals, _INF).astype(np.int64)
    p_arr = np.where(pair.p_fin, pair.p_vals, -_INF).astype(np.int64)
    for s in range(k):
        step = 1 << s
        neg_l = _INF if lo[s] is None else -lo[s]
        add_u = _INF if hi[s] is None else hi[s]
        bv = b_arr.reshape(-1, 2, step)
        # bit of Z is 0: Z' may keep s (pay -lower) or not (pay 0)
        low_half = np.minimum(bv[:, 0, :], np.minimum(bv[:, 1, :] + neg_l, _INF))
        # bit of Z is 1: Z' drops s (pay +upper) or keeps it (pay 0)
        high_half = np.minimum(bv[:, 1, :], np.minimum(bv[:, 0, :] + add_u, _INF))
        bv[:, 0, :] = low_half
        bv[:, 1, :] = high_half
        neg_u = -_INF if hi[s] is None else -hi[s]
        add_l = -_INF if lo[s] is None else lo[s]
        pv = p_arr.reshape(-1, 2, step)
        low_half = np.maximum(pv[:, 0, :], np.maximum(pv[:, 1, :] + neg_u, -_INF))
        high_half = np.maximum(pv[:, 1, :], np.maximum(pv[:, 0, :] + add_l, -_INF))
        pv[:, 0, :] = low_half
        pv[:, 1, :] = high_half

    b_fin = b_arr < _INF // 2
    p_fin = p_arr > -(_INF // 2)
    b_vals = np.where(b_fin, b_arr, 0)
    p_vals = np.where(p_fin, p_arr, 0)
    return BorderPair(pair.ground, p_vals, p_fin, b_vals, b_fin)


def canonical_edges(n: int) -> tuple:
    """Edge order of the complete graph on vertices 0..n-1 with one
    self-loop per vertex: (0,0), (0,1), ..., (0,n-1), (1,1), ..."""
    return tuple((u, v) for u in range(n) for v in range(u, n))


@lru_cache(maxsize=None)
def _graph_shape_tables(n: int):
    """Per-mask covered-vertex and component counts for the edge masks of
    the complete-plus-loops graph on n vertices (instance independent)."""
    edges = canonical_edges(n)
    k = len(edges)
    vc = np.zeros(1 << k, dtype=np.int64)
    comp = np.zeros(1 << k, dtype=np.int64)
    for m in range(1, 1 << k):
        parent = {}

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        covered = set()
        for j in _bits.bits_of(m):
            u, v = edges[j]
            for w in (u, v):
                if w not in parent:
                    parent[w] = w
                    covered.add(w)
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        vc[m] = len(covered)
        comp[m] = len({find(w) for w in covered})
    return vc, comp


def graphic_mvtsp_border(n: int, r) -> BorderPair:
    """Border pair whose integer points are exactly the nonnegative edge
    multiplicity vectors z with z(E) = sum(r) and connected support.

    Upper border on a nonempty edge set F: (covered vertices of F) minus
    (components of F) plus sum(r) - n + 1; the lower border is the
    complementary function p(X) = b(S) - b(S - X).
    """
    if n < 1:
        raise GpolyError("need at least one vertex")
    if len(r) != n or any(v < 1 for v in r):
        raise GpolyError("requests must list one positive integer per vertex")
    edges = canonical_edges(n)
    _check_cap(len(edges))
    ground = GroundSet(edges)
    vc, comp = _graph_shape_tables(n)
    r_hat = sum(int(v) for v in r) - n + 1
    b_vals = vc - comp + r_hat
    b_vals[0] = 0
    # complementary lower border; mask complement is index reversal
    p_vals = int(b_vals[-1]) - b_vals[::-1]
    fin = np.ones(1 << len(edges), dtype=bool)
    return BorderPair(ground, p_vals, fin.copy(), b_vals, fin)


def coordinate_ranges(pair: BorderPair):
    """Per-element integer bounds [p({s}), b({s})]; raises when a singleton
    border is absent (the point set is then not box-bounded)."""
    lo, hi = [], []
    for j in range(pair.size):
        m = 1 << j
        if not pair.p_fin[m] or not pair.b_fin[m]:
            raise GpolyError(
                "cannot enumerate: missing finite singleton border at "
                f"{pair.ground.elements[j]}")
        lo.append(int(pair.p_vals[m]))
        hi.append(int(pair.b_vals[m]))
    return lo, hi


def integer_points(pair: BorderPair) -> list:
    """All integer points of the pair, by filtering the singleton-border
    box through the subset inequalities (desk-scale ground sets only)."""
    k = pair.size
    _check_cap(k)
    lo, hi = coordinate_ranges(pair)
    grids = np.meshgrid(*[np.arange(l, h + 1, dtype=np.int64)
                          for l, h in zip(lo, hi)], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1) if k else np.zeros((1, 0))
    if pts.shape[0] == 0:
        return []
    masks = np.arange(1 << k, dtype=np.int64)
    ind = (masks[:, None] >> np.arange(k)[None, :] & 1).astype(np.int64)
    sums = pts @ ind.T  # points x masks
    ok = np.ones(pts.shape[0], dtype=bool)
    pf, bf = pair.p_fin, pair.b_fin
    ok &= (sums[:, pf] >= pair.p_vals[pf][None, :]).all(axis=1)
    ok &= (sums[:, bf] <= pair.b_vals[bf][None, :]).all(axis=1)
    return [tuple(int(v) for v in row) for row in pts[ok]]
