import random
from fractions import Fraction

import pytest

from manyvisits import gpoly, lp, rounding
from helpers import (brute_bdgpe_optimum, coverage_pair, ground,
                     random_bdgpe, violations_within)

F = Fraction


def box_pair(k, lo, hi):
    from manyvisits._bits import bits_of
    g = ground(k)
    p = [lo * len(bits_of(m)) for m in range(1 << k)]
    b = [hi * len(bits_of(m)) for m in range(1 << k)]
    return gpoly.make_explicit(g, p, b)


def mvtsp_reduction(n, r, costs_by_edge):
    """Lower-only degree instance over the graphic border pair: one
    hyperedge per vertex covering its incident edges, weight 2 on the
    self-loop and 1 elsewhere, bound twice the request."""
    pair = gpoly.graphic_mvtsp_border(n, r)
    edges = []
    for v in range(n):
        members = tuple(e for e in pair.ground.elements if v in e)
        mult = tuple(2 if e == (v, v) else 1 for e in members)
        edges.append(rounding.Hyperedge(members, mult, lower=2 * r[v]))
    costs = tuple(F(costs_by_edge[e]) for e in pair.ground.elements)
    return rounding.BdgpeInstance(pair=pair, costs=costs,
                                  constraints=rounding.HypergraphConstraints(edges),
                                  regime="lower_only")


def triangle_instance(r=(1, 1, 1)):
    costs = {(0, 0): 2, (1, 1): 2, (2, 2): 2,
             (0, 1): 1, (0, 2): 1, (1, 2): 1}
    return mvtsp_reduction(3, r, costs)


# ---- delta -------------------------------------------------------------------


def test_delta_empty_hypergraph():
    assert rounding.delta(rounding.HypergraphConstraints(())) == 0


def test_delta_direct_sum():
    edges = (rounding.Hyperedge(("a", "b"), (3, 1), lower=0),
             rounding.Hyperedge(("a",), (2,), lower=0))
    assert rounding.delta(rounding.HypergraphConstraints(edges)) == 5


def test_delta_for_degree_reduction_is_two():
    inst = triangle_instance()
    assert rounding.delta(inst.constraints) == 2


# ---- build_lp ----------------------------------------------------------------


def test_build_lp_single_element_box():
    inst = rounding.BdgpeInstance(pair=box_pair(1, 0, 2), costs=(F(1),),
                                  constraints=rounding.HypergraphConstraints(()),
                                  regime="both")
    prog = rounding.build_lp(inst)
    assert prog.rows == (((1,), F(0), F(2)),)
    assert lp.solve(prog).objective_value == 0


def test_build_lp_forced_point():
    g = ground(2)
    rank = [0, 1, 1, 2]
    pair = gpoly.make_explicit(g, rank, rank)
    edge = rounding.Hyperedge(g.elements, (1, 1), lower=2, upper=2)
    inst = rounding.BdgpeInstance(pair=pair, costs=(F(1), F(1)),
                                  constraints=rounding.HypergraphConstraints((edge,)),
                                  regime="both")
    sol = lp.solve(rounding.build_lp(inst))
    assert sol.values == (F(1), F(1))


def test_build_lp_row_count_for_two_vertex_reduction():
    inst = mvtsp_reduction(2, (2, 3), {(0, 0): 2, (0, 1): 1, (1, 1): 2})
    prog = rounding.build_lp(inst)
    assert len(prog.rows) == (2 ** 3 - 1) + 2
    # optimum agrees with the structured solver used by the rounding loop
    sol = lp.solve(prog)
    res = rounding.solve_bdgpe(inst)
    assert sol.objective_value == res.lp_optimum


# ---- solve_bdgpe -------------------------------------------------------------


def test_no_hyperedges_returns_integral_lp_optimum():
    rng = random.Random(21)
    for _ in range(20):
        pair = coverage_pair(3, rng)
        costs = tuple(F(rng.randint(-3, 5)) for _ in range(3))
        inst = rounding.BdgpeInstance(pair=pair, costs=costs,
                                      constraints=rounding.HypergraphConstraints(()),
                                      regime="both")
        res = rounding.solve_bdgpe(inst)
        cost = sum(c * v for c, v in zip(costs, res.z))
        assert cost == res.lp_optimum
        assert gpoly.contains(pair, res.z)


def test_infeasible_instance_raises():
    pair = box_pair(1, 0, 1)
    edge = rounding.Hyperedge(pair.ground.elements, (1,), lower=5, upper=5)
    inst = rounding.BdgpeInstance(pair=pair, costs=(F(1),),
                                  constraints=rounding.HypergraphConstraints((edge,)),
                                  regime="both")
    with pytest.raises(rounding.Infeasible):
        rounding.solve_bdgpe(inst)


def test_degree_reduction_lower_only_guarantee():
    for r in ((1, 1, 1), (2, 1, 3), (3, 3, 3)):
        inst = triangle_instance(r)
        res = rounding.solve_bdgpe(inst)
        assert res.delta == 2
        z = dict(zip(inst.pair.ground.elements, res.z))
        for v in range(3):
            deg = sum(mult * z[e]
                      for e, mult in [((min(u, v), max(u, v)), 1) for u in range(3) if u != v]
                      ) + 2 * z[(v, v)]
            assert deg >= 2 * r[v] - 1
        # violations in {-1, 0} for the lower-only degree reduction
        assert all(out.violation in (-1, 0) for out in res.report)
        assert sum(res.z) == sum(r)


def test_regime_sweeps_against_enumeration():
    rng = random.Random(31)
    stats = {"both": 0, "lower_only": 0, "upper_only": 0}
    for trial in range(60):
        regime = ("both", "lower_only", "upper_only")[trial % 3]
        k = rng.randint(2, 4)
        inst = random_bdgpe(rng, k, regime)
        res = rounding.solve_bdgpe(inst)
        assert gpoly.contains(inst.pair, res.z)
        cost = sum(c * v for c, v in zip(inst.costs, res.z))
        assert cost <= res.lp_optimum
        assert violations_within(res, inst)
        exact = brute_bdgpe_optimum(inst)
        if exact is not None:
            assert cost <= exact
            assert res.lp_optimum <= exact
        stats[regime] += 1
    assert all(v >= 15 for v in stats.values())


def test_potential_invariant_and_iteration_bound():
    rng = random.Random(41)
    for trial in range(30):
        regime = ("both", "lower_only", "upper_only")[trial % 3]
        inst = random_bdgpe(rng, rng.randint(2, 4), regime)
        res = rounding.solve_bdgpe(inst)
        bound = 2 * inst.pair.size + len(inst.constraints.edges) + 1
        assert res.iterations <= bound
        # cost moved out plus the next LP value never exceeds the previous
        for i in range(len(res.lp_values) - 1):
            assert res.step_costs[i] + res.lp_values[i + 1] <= res.lp_values[i]


def test_violation_report_zero_when_bounds_met():
    g = ground(2)
    rank = [0, 1, 1, 2]
    pair = gpoly.make_explicit(g, rank, rank)
    edge = rounding.Hyperedge(g.elements, (1, 1), lower=2, upper=2)
    inst = rounding.BdgpeInstance(pair=pair, costs=(F(1), F(2)),
                                  constraints=rounding.HypergraphConstraints((edge,)),
                                  regime="both")
    res = rounding.solve_bdgpe(inst)
    assert res.z == (1, 1)
    assert [out.violation for out in res.report] == [0]
    report = rounding.violation_report(inst, res.z)
    assert report[0].achieved == 2


def test_solution_stays_in_original_pair_after_contractions():
    rng = random.Random(55)
    for _ in range(20):
        inst = random_bdgpe(rng, 3, "both")
        res = rounding.solve_bdgpe(inst)
        assert gpoly.contains(inst.pair, res.z)
