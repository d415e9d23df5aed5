import random
from itertools import product

import numpy as np
import pytest

from manyvisits import gpoly
from manyvisits._bits import bits_of
from helpers import coverage_pair, ground


def pair_checker(pair):
    """Independent paramodularity test written directly from the three
    inequality families (finite tables only)."""
    k = pair.size
    b = [pair.b_of(m) for m in range(1 << k)]
    p = [pair.p_of(m) for m in range(1 << k)]
    for X in range(1 << k):
        for Y in range(1 << k):
            if b[X] + b[Y] < b[X | Y] + b[X & Y]:
                return False
            if p[X] + p[Y] > p[X | Y] + p[X & Y]:
                return False
            if b[X] - p[Y] < b[X & ~Y] - p[Y & ~X]:
                return False
    return True


def test_box_pair_is_paramodular():
    g = ground(1)
    pair = gpoly.make_explicit(g, [0, 0], [0, 2])
    assert gpoly.is_paramodular(pair)
    assert gpoly.contains(pair, (0,))
    assert gpoly.contains(pair, (2,))
    assert not gpoly.contains(pair, (3,))


def test_free_matroid_base_pair():
    g = ground(2)
    rank = [0, 1, 1, 2]
    pair = gpoly.make_explicit(g, rank, rank)
    assert gpoly.is_paramodular(pair)
    assert gpoly.integer_points(pair) == [(1, 1)]
    assert gpoly.contains(pair, (1, 1))
    assert not gpoly.contains(pair, (2, 0))


def test_zero_vector_in_any_pair_with_zero_between_borders():
    rng = random.Random(3)
    for _ in range(10):
        pair = coverage_pair(3, rng, translate=False)
        # base polymatroids of coverage functions have p <= 0 only if b(S)
        # equals b(S - X); instead check the stated property directly
        if all((pair.p_of(m) or 0) <= 0 <= (pair.b_of(m) or 0)
               for m in range(1, 1 << 3)):
            assert gpoly.contains(pair, (0, 0, 0))


def test_make_explicit_rejects_broken_submodularity():
    g = ground(2)
    # b(S) pushed above b({1}) + b({2}) - b({}) breaks submodularity
    b = [0, 2, 2, 5]
    with pytest.raises(gpoly.NotParamodular):
        gpoly.make_explicit(g, [0, 0, 0, 0], b)


def test_random_search_finds_cross_inequality_violation():
    rng = random.Random(11)
    found = False
    for _ in range(400):
        k = 3
        b = [0] + [rng.randint(0, 4) for _ in range((1 << k) - 1)]
        p = [0] + [rng.randint(-2, 2) for _ in range((1 << k) - 1)]
        try:
            gpoly.make_explicit(ground(k), p, b)
        except gpoly.NotParamodular:
            found = True
            break
    assert found


def test_make_explicit_agrees_with_independent_checker():
    rng = random.Random(17)
    agree = 0
    for _ in range(300):
        k = rng.randint(2, 3)
        b = [0] + [rng.randint(0, 5) for _ in range((1 << k) - 1)]
        p = [0] + [rng.randint(-3, 3) for _ in range((1 << k) - 1)]
        ok_oracle = pair_checker(
            gpoly.BorderPair(ground(k),
                             np.array(p, dtype=np.int64),
                             np.ones(1 << k, dtype=bool),
                             np.array(b, dtype=np.int64),
                             np.ones(1 << k, dtype=bool)))
        try:
            gpoly.make_explicit(ground(k), p, b)
            ok_lib = True
        except gpoly.NotParamodular:
            ok_lib = False
        assert ok_lib == ok_oracle
        agree += 1
    assert agree == 300


def test_delete_identity_and_everything():
    rng = random.Random(5)
    pair = coverage_pair(3, rng)
    same = gpoly.delete(pair, [])
    assert same.ground.elements == pair.ground.elements
    assert np.array_equal(same.p_vals, pair.p_vals)
    gone = gpoly.delete(pair, list(pair.ground.elements))
    assert gone.ground.size == 0
    assert gone.p_of(0) == 0 and gone.b_of(0) == 0


def test_delete_projects_integer_points():
    rng = random.Random(6)
    for _ in range(20):
        pair = coverage_pair(3, rng)
        dropped = pair.ground.elements[2]
        sub = gpoly.delete(pair, [dropped])
        pts = gpoly.integer_points(pair)
        projected = sorted({(x[0], x[1]) for x in pts})
        assert sorted(gpoly.integer_points(sub)) == projected


def test_contract_zero_vector_is_identity():
    g = ground(2)
    # the box [0,2]^2 as modular tables; it contains the zero vector
    pair = gpoly.make_explicit(g, [0, 0, 0, 0],
                               [2 * len(bits_of(m)) for m in range(4)])
    out = gpoly.contract(pair, (0, 0))
    assert np.array_equal(out.p_vals, pair.p_vals)
    assert np.array_equal(out.b_vals, pair.b_vals)


def test_shift_free_matroid_by_unit_vector():
    # (1,0) is outside the base pair (its only point is (1,1)), so the
    # checked contract refuses it; the raw border shift applies the formula
    g = ground(2)
    rank = [0, 1, 1, 2]
    pair = gpoly.make_explicit(g, rank, rank)
    with pytest.raises(gpoly.ElementNotInPolyhedron):
        gpoly.contract(pair, (1, 0))
    out = gpoly.shift(pair, (1, 0))
    S = 3
    assert out.p_of(S) == out.b_of(S) == 1
    assert out.p_of(1) == out.b_of(1) == 0
    assert gpoly.is_paramodular(out)


def test_contract_requires_containment():
    g = ground(2)
    rank = [0, 1, 1, 2]
    pair = gpoly.make_explicit(g, rank, rank)
    with pytest.raises(gpoly.ElementNotInPolyhedron):
        gpoly.contract(pair, (2, 2))


def test_contract_addback_property():
    # every point of the contracted pair, shifted back, lands in the original
    rng = random.Random(8)
    for _ in range(30):
        pair = coverage_pair(3, rng)
        pts = gpoly.integer_points(pair)
        if not pts:
            continue
        z = pts[rng.randrange(len(pts))]
        inner = gpoly.contract(pair, z)
        assert gpoly.is_paramodular(inner)
        for x in gpoly.integer_points(inner):
            back = tuple(a + b for a, b in zip(x, z))
            assert gpoly.contains(pair, back)


def test_intersect_with_unbounded_box_is_identity():
    rng = random.Random(9)
    pair = coverage_pair(3, rng)
    out = gpoly.intersect_box(pair, None, None)
    assert np.array_equal(out.p_vals, pair.p_vals)
    assert np.array_equal(out.b_vals, pair.b_vals)
    assert np.array_equal(out.p_fin, pair.p_fin)


def test_unit_cube_formula_values():
    # after meeting the unit cube, borders match the direct enumeration of
    # max/min over all inner subsets with cardinality penalties
    rng = random.Random(10)
    for _ in range(20):
        pair = coverage_pair(3, rng)
        k = pair.size
        try:
            cube = gpoly.intersect_box(pair, (0,) * k, (1,) * k)
        except gpoly.EmptyIntersection:
            continue
        for Z in range(1 << k):
            want_b = min(pair.b_of(Zp) + len(bits_of(Z & ~Zp))
                         for Zp in range(1 << k))
            want_p = max(pair.p_of(Zp) - len(bits_of(Zp & ~Z))
                         for Zp in range(1 << k))
            assert cube.b_of(Z) == want_b
            assert cube.p_of(Z) == want_p


def test_box_intersection_matches_point_filtering():
    rng = random.Random(12)
    done = 0
    for _ in range(60):
        pair = coverage_pair(3, rng)
        pts = gpoly.integer_points(pair)
        if not pts:
            continue
        anchor = pts[rng.randrange(len(pts))]
        lo = tuple(a - rng.randint(0, 2) for a in anchor)
        hi = tuple(a + rng.randint(0, 2) for a in anchor)
        boxed = gpoly.intersect_box(pair, lo, hi)
        assert gpoly.is_paramodular(boxed)
        want = sorted(x for x in pts
                      if all(l <= v <= h for l, v, h in zip(lo, x, hi)))
        assert sorted(gpoly.integer_points(boxed)) == want
        done += 1
    assert done >= 30


def test_monotone_composition_of_contains():
    rng = random.Random(13)
    for _ in range(20):
        pair = coverage_pair(3, rng)
        pts = gpoly.integer_points(pair)
        if not pts:
            continue
        anchor = pts[0]
        lo = tuple(a - 1 for a in anchor)
        hi = tuple(a + 1 for a in anchor)
        boxed = gpoly.intersect_box(pair, lo, hi)
        for x in product(*[range(l - 1, h + 2) for l, h in zip(lo, hi)]):
            inside_box = all(l <= v <= h for l, v, h in zip(lo, x, hi))
            assert gpoly.contains(boxed, x) == (
                gpoly.contains(pair, x) and inside_box)


def test_empty_intersection_raises():
    g = ground(1)
    pair = gpoly.make_explicit(g, [0, 2], [0, 4])
    with pytest.raises(gpoly.EmptyIntersection):
        gpoly.intersect_box(pair, None, (1,))


def test_paramodularity_preserved_by_all_ops():
    rng = random.Random(14)
    for _ in range(15):
        pair = coverage_pair(3, rng)
        assert gpoly.is_paramodular(gpoly.delete(pair, [pair.ground.elements[0]]))
        pts = gpoly.integer_points(pair)
        if pts:
            z = pts[rng.randrange(len(pts))]
            assert gpoly.is_paramodular(gpoly.contract(pair, z))
            lo = tuple(v - 1 for v in z)
            hi = tuple(v + 1 for v in z)
            assert gpoly.is_paramodular(gpoly.intersect_box(pair, lo, hi))


# ---- graphic border pair ----------------------------------------------------


def connected_spanning(n, edges, z):
    """Support of z connects all n vertices (single vertex: always)."""
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    seen = set()
    for (u, v), mult in zip(edges, z):
        if mult > 0:
            seen.update((u, v))
            parent[find(u)] = find(v)
    if n == 1:
        return True
    if len(seen) != n:
        return False
    roots = {find(v) for v in range(n)}
    return len(roots) == 1


def brute_degree_sum_points(n, r):
    edges = gpoly.canonical_edges(n)
    total = sum(r)
    pts = []
    for z in product(*[range(total + 1)] * len(edges)):
        if sum(z) != total:
            continue
        if connected_spanning(n, edges, z):
            pts.append(z)
    return sorted(pts)


def test_graphic_border_two_vertices_values():
    pair = gpoly.graphic_mvtsp_border(2, (2, 3))
    g = pair.ground
    assert pair.b_of(g.mask_of([(0, 1)])) == 5
    assert pair.b_of(g.mask_of([(0, 0)])) == 4
    assert pair.b_of(g.full_mask) == 5


def test_graphic_border_single_vertex():
    pair = gpoly.graphic_mvtsp_border(1, (4,))
    assert pair.ground.elements == ((0, 0),)
    assert pair.b_of(1) == 4
    assert gpoly.integer_points(pair) == [(4,)]


def test_graphic_border_is_paramodular_k3():
    pair = gpoly.graphic_mvtsp_border(3, (1, 1, 1))
    assert gpoly.is_paramodular(pair)


def test_graphic_border_point_set_matches_definition():
    for n in (1, 2, 3):
        for r in product(*[range(1, 4)] * n):
            pair = gpoly.graphic_mvtsp_border(n, r)
            assert sorted(gpoly.integer_points(pair)) == \
                brute_degree_sum_points(n, r)


def test_graphic_border_too_many_vertices():
    with pytest.raises(gpoly.GroundSetTooLarge):
        gpoly.graphic_mvtsp_border(6, (1,) * 6)
