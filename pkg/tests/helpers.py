"""Shared test utilities: brute-force reference computations and small
random-object builders, kept independent of the library code they check."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from manyvisits import gpoly, lp, rounding
from manyvisits._bits import bits_of


def ground(k):
    return gpoly.GroundSet(tuple(f"s{j}" for j in range(k)))


def coverage_pair(k, rng, translate=True):
    """Random base-polymatroid pair from a weighted coverage function,
    optionally translated by a small integer vector."""
    nsets = rng.randint(1, 3)
    sets = [(rng.randint(1, (1 << k) - 1), rng.randint(1, 4))
            for _ in range(nsets)]
    shift = [rng.randint(-2, 2) if translate else 0 for _ in range(k)]

    def b_of(mask):
        cov = sum(w for sm, w in sets if sm & mask)
        return cov - sum(shift[j] for j in bits_of(mask))

    full = (1 << k) - 1
    b_table = [b_of(m) for m in range(1 << k)]
    p_table = [b_table[full] - b_table[full ^ m] for m in range(1 << k)]
    return gpoly.make_explicit(ground(k), p_table, b_table)


def random_bdgpe(rng, k, regime):
    """Random feasible instance: bounds bracket a sampled integer point."""
    pair = coverage_pair(k, rng)
    pts = gpoly.integer_points(pair)
    anchor = list(pts[rng.randrange(len(pts))])
    if rng.random() < 0.6:
        lo = tuple(a - rng.randint(0, 2) for a in anchor)
        hi = tuple(a + rng.randint(0, 2) for a in anchor)
        pair = gpoly.intersect_box(pair, lo, hi)
    costs = tuple(Fraction(rng.randint(-4, 6), rng.choice((1, 1, 1, 2)))
                  for _ in range(k))
    edges = []
    for _ in range(rng.randint(1, 3)):
        # bounds are nonnegative, so resample until the anchor sum is too
        # (otherwise the window could not contain the witness point)
        for _ in range(30):
            size = rng.randint(1, k)
            members = tuple(sorted(rng.sample(range(k), size)))
            mult = tuple(rng.randint(1, 3) for _ in members)
            at = sum(m * anchor[j] for j, m in zip(members, mult))
            if at >= 0:
                break
        else:
            continue
        f = max(0, at - rng.randint(0, 2))
        g = max(f, at + rng.randint(0, 2))
        names = tuple(pair.ground.elements[j] for j in members)
        if regime == "lower_only":
            edges.append(rounding.Hyperedge(names, mult, lower=f))
        elif regime == "upper_only":
            edges.append(rounding.Hyperedge(names, mult, upper=g))
        else:
            edges.append(rounding.Hyperedge(names, mult, lower=f, upper=g))
    return rounding.BdgpeInstance(pair=pair, costs=costs,
                                  constraints=rounding.HypergraphConstraints(edges),
                                  regime=regime)


def brute_bdgpe_optimum(instance):
    """Exact optimum over integer points meeting the borders and every
    hyperedge bound exactly; None when that set is empty."""
    index = instance.pair.ground._index
    best = None
    for x in gpoly.integer_points(instance.pair):
        ok = True
        for e in instance.constraints.edges:
            s = sum(m * x[index[el]]
                    for el, m in zip(e.members, e.multiplicity))
            if e.lower is not None and s < e.lower:
                ok = False
                break
            if e.upper is not None and s > e.upper:
                ok = False
                break
        if not ok:
            continue
        cost = sum((c * v for c, v in zip(instance.costs, x)), Fraction(0))
        if best is None or cost < best:
            best = cost
    return best


def violations_within(result, instance):
    """Check the per-regime additive guarantee on every input hyperedge."""
    d = result.delta
    if instance.regime == "both":
        lo_slack, hi_slack = 2 * d - 1, 2 * d - 1
    elif instance.regime == "lower_only":
        lo_slack, hi_slack = d - 1, None
    else:
        lo_slack, hi_slack = None, d - 1
    for out in result.report:
        if out.violation < 0:
            if lo_slack is None or -out.violation > lo_slack:
                return False
        if out.violation > 0:
            if hi_slack is None or out.violation > hi_slack:
                return False
    return True


def solve_square(rows, rhs):
    """Solve a square rational system by Gaussian elimination; None if singular."""
    d = len(rhs)
    mat = [[Fraction(v) for v in row] + [Fraction(b)]
           for row, b in zip(rows, rhs)]
    for col in range(d):
        piv = None
        for i in range(col, d):
            if mat[i][col] != 0:
                piv = i
                break
        if piv is None:
            return None
        mat[col], mat[piv] = mat[piv], mat[col]
        prow = mat[col]
        inv = Fraction(1) / prow[col]
        mat[col] = [v * inv for v in prow]
        for i in range(d):
            if i != col and mat[i][col] != 0:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[col])]
    return [mat[i][d] for i in range(d)]


def enumerate_vertices(linprog: lp.LinearProgram):
    """All vertices of the feasible region, by solving every full-rank
    square subsystem of tight row sides and filtering for feasibility."""
    d = len(linprog.objective)
    sides = []
    for coeffs, lo, hi in linprog.rows:
        if lo is not None:
            sides.append((coeffs, lo))
        if hi is not None:
            sides.append((coeffs, hi))
    verts = []
    for combo in combinations(range(len(sides)), d):
        rows = [sides[i][0] for i in combo]
        rhs = [sides[i][1] for i in combo]
        x = solve_square(rows, rhs)
        if x is None:
            continue
        if feasible(linprog, x) and x not in verts:
            verts.append(x)
    return verts


def feasible(linprog: lp.LinearProgram, x) -> bool:
    for coeffs, lo, hi in linprog.rows:
        ax = sum((Fraction(c) * Fraction(v) for c, v in zip(coeffs, x)),
                 Fraction(0))
        if lo is not None and ax < lo:
            return False
        if hi is not None and ax > hi:
            return False
    return True


def brute_lp_optimum(linprog: lp.LinearProgram):
    """Optimal objective over enumerated vertices; None when no vertex is
    feasible (infeasible or vertex-free region)."""
    best = None
    for x in enumerate_vertices(linprog):
        val = sum((Fraction(c) * v for c, v in zip(linprog.objective, x)),
                  Fraction(0))
        if best is None or val < best:
            best = val
    return best
