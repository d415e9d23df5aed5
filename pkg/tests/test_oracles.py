import random
from fractions import Fraction

import pytest

from manyvisits import gpoly, mvtsp, oracles, rounding
from helpers import brute_bdgpe_optimum, random_bdgpe
from test_approx import hamiltonian_optimum, random_metric

F = Fraction


def test_single_vertex():
    inst = mvtsp.MvtspInstance(1, [[3]], (4,))
    z, cost = oracles.exact_mvtsp(inst)
    assert z == {(0, 0): 4}
    assert cost == 12


def test_unit_triangle_doubled():
    inst = mvtsp.MvtspInstance(3, [[2, 1, 1], [1, 2, 1], [1, 1, 2]],
                               (2, 2, 2))
    z, cost = oracles.exact_mvtsp(inst)
    assert cost == 6
    assert mvtsp.check_feasible(inst, z)


def test_single_visit_matches_hamiltonian_enumeration():
    rng = random.Random(3)
    for _ in range(10):
        costs = random_metric(rng, 4)
        inst = mvtsp.MvtspInstance(4, costs, (1, 1, 1, 1))
        _z, cost = oracles.exact_mvtsp(inst)
        assert cost == hamiltonian_optimum(inst)


def test_relabeling_preserves_cost():
    rng = random.Random(4)
    for _ in range(10):
        n = 4
        costs = random_metric(rng, n)
        r = tuple(rng.randint(1, 3) for _ in range(n))
        inst = mvtsp.MvtspInstance(n, costs, r)
        _z, cost = oracles.exact_mvtsp(inst)
        perm = list(range(n))
        rng.shuffle(perm)
        costs2 = [[costs[perm[u]][perm[v]] for v in range(n)] for u in range(n)]
        r2 = tuple(r[perm[v]] for v in range(n))
        _z2, cost2 = oracles.exact_mvtsp(mvtsp.MvtspInstance(n, costs2, r2))
        assert cost2 == cost


def test_oracle_result_is_feasible_and_not_beaten():
    rng = random.Random(5)
    for _ in range(8):
        n = rng.randint(2, 4)
        costs = random_metric(rng, n)
        r = tuple(rng.randint(1, 3) for _ in range(n))
        inst = mvtsp.MvtspInstance(n, costs, r)
        z, cost = oracles.exact_mvtsp(inst)
        assert mvtsp.check_feasible(inst, z)
        assert mvtsp.tour_cost(inst, z) == cost


def test_budget_vertices():
    inst = mvtsp.MvtspInstance(2, [[2, 1], [1, 2]], (1, 1))
    tight = oracles.OracleBudget(max_vertices=1)
    with pytest.raises(oracles.BudgetExceeded):
        oracles.exact_mvtsp(inst, tight)


def test_budget_nodes():
    rng = random.Random(6)
    inst = mvtsp.MvtspInstance(4, random_metric(rng, 4), (3, 3, 3, 3))
    tiny = oracles.OracleBudget(max_nodes=10)
    with pytest.raises(oracles.BudgetExceeded):
        oracles.exact_mvtsp(inst, tiny)


def test_exact_bdgpe_no_hyperedges_equals_rounding():
    rng = random.Random(7)
    for _ in range(10):
        inst = random_bdgpe(rng, 3, "both")
        bare = rounding.BdgpeInstance(pair=inst.pair, costs=inst.costs,
                                      constraints=rounding.HypergraphConstraints(()),
                                      regime="both")
        got = oracles.exact_bdgpe(bare)
        assert got is not None
        res = rounding.solve_bdgpe(bare)
        cost = sum(c * v for c, v in zip(bare.costs, res.z))
        assert cost == got[1] == res.lp_optimum


def test_exact_bdgpe_forced_point():
    from helpers import ground
    rank = [0, 1, 1, 2]
    pair = gpoly.make_explicit(ground(2), rank, rank)
    edge = rounding.Hyperedge(pair.ground.elements, (1, 1), lower=2, upper=2)
    inst = rounding.BdgpeInstance(pair=pair, costs=(F(1), F(1)),
                                  constraints=rounding.HypergraphConstraints((edge,)),
                                  regime="both")
    got = oracles.exact_bdgpe(inst)
    assert got == ((1, 1), F(2))


def test_exact_bdgpe_matches_independent_enumeration():
    rng = random.Random(8)
    for trial in range(30):
        regime = ("both", "lower_only", "upper_only")[trial % 3]
        inst = random_bdgpe(rng, rng.randint(2, 4), regime)
        got = oracles.exact_bdgpe(inst)
        want = brute_bdgpe_optimum(inst)
        if want is None:
            assert got is None
        else:
            assert got is not None and got[1] == want


def test_exact_bdgpe_infeasible_returns_none():
    from helpers import ground
    rank = [0, 1, 1, 2]
    pair = gpoly.make_explicit(ground(2), rank, rank)
    edge = rounding.Hyperedge(pair.ground.elements, (1, 1), lower=0, upper=1)
    inst = rounding.BdgpeInstance(pair=pair, costs=(F(1), F(1)),
                                  constraints=rounding.HypergraphConstraints((edge,)),
                                  regime="both")
    assert oracles.exact_bdgpe(inst) is None


def test_lp_lower_bound_matches_rounding_and_oracle_chain():
    rng = random.Random(9)
    for trial in range(30):
        regime = ("both", "lower_only", "upper_only")[trial % 3]
        inst = random_bdgpe(rng, rng.randint(2, 4), regime)
        res = rounding.solve_bdgpe(inst)
        lb = oracles.lp_lower_bound(inst)
        assert lb == res.lp_optimum
        cost = sum(c * v for c, v in zip(inst.costs, res.z))
        assert cost <= lb
        got = oracles.exact_bdgpe(inst)
        if got is not None:
            assert lb <= got[1]
