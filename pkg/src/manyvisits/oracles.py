"""Brute-force reference solvers, budget-guarded.

These certify the approximation pipelines at desk scale: an exhaustive
branch-and-bound tour solver, an exhaustive bounded-degree element solver,
and the exact LP lower bound shared with the rounding loop.  Budgets refuse
oversized inputs cleanly; there is no approximate fallback.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import gpoly, mvtsp, rounding


class BudgetExceeded(Exception):
    pass


@dataclass(frozen=True)
class OracleBudget:
    """Hard limits for the exhaustive solvers."""

    max_ground: int = 10
    max_vertices: int = 6
    max_total_visits: int = 24
    max_nodes: int = 5_000_000


DEFAULT_BUDGET = OracleBudget()


def _fallback_tour(inst: mvtsp.MvtspInstance) -> dict:
    """Any feasible tour: a closed walk through all vertices plus loops."""
    n = inst.n
    z: dict = {}
    if n == 1:
        z[(0, 0)] = inst.requests[0]
        return z
    if n == 2:
        z[(0, 1)] = 2
    else:
        for v in range(n):
            k = mvtsp.edge_key(v, (v + 1) % n)
            z[k] = z.get(k, 0) + 1
    for v in range(n):
        if inst.requests[v] > 1:
            z[(v, v)] = z.get((v, v), 0) + inst.requests[v] - 1
    return z


def exact_mvtsp(inst: mvtsp.MvtspInstance,
                budget: OracleBudget = DEFAULT_BUDGET):
    """Globally minimum-cost feasible tour by exhaustive enumeration of
    edge multiplicities in lexicographic edge order, pruned by exact degree
    accounting and a half-degree cost bound, with the incumbent cost as a
    branch-and-bound cutoff.  Returns (multiplicities, cost)."""
    n = inst.n
    total_visits = sum(inst.requests)
    if n > budget.max_vertices:
        raise BudgetExceeded(
            f"{n} vertices exceed the oracle budget {budget.max_vertices}")
    if total_visits > budget.max_total_visits:
        raise BudgetExceeded(
            f"{total_visits} total visits exceed the oracle budget "
            f"{budget.max_total_visits}")
    edges = gpoly.canonical_edges(n)
    cmin = []
    for v in range(n):
        vals = [inst.cost(u, v) for u in range(n) if u != v]
        vals.append(inst.cost(v, v))
        cmin.append(min(vals) if vals else Fraction(0))
    half_min = [c / 2 for c in cmin]

    incumbent = _fallback_tour(inst)
    best_cost = mvtsp.tour_cost(inst, incumbent)
    best_z = dict(incumbent)
    rem = [2 * r for r in inst.requests]
    assign = [0] * len(edges)
    nodes = 0

    # vertex u is fully decided once its lexicographically last incident
    # edge has a value
    last_edge_of = {}
    for idx, (u, v) in enumerate(edges):
        last_edge_of[u] = max(last_edge_of.get(u, 0), idx)
        last_edge_of[v] = max(last_edge_of.get(v, 0), idx)
    finish_at = {}
    for v, idx in last_edge_of.items():
        finish_at.setdefault(idx, []).append(v)

    def lower_bound():
        return sum((rem[v] * half_min[v] for v in range(n)), Fraction(0))

    def rec(idx, acc):
        nonlocal nodes, best_cost, best_z
        nodes += 1
        if nodes > budget.max_nodes:
            raise BudgetExceeded(
                f"enumeration exceeded {budget.max_nodes} nodes")
        if acc + lower_bound() >= best_cost:
            return
        if idx == len(edges):
            z = {e: m for e, m in zip(edges, assign) if m}
            if mvtsp.support_connects(n, z):
                best_cost = acc
                best_z = z
            return
        u, v = edges[idx]
        if u == v:
            cap = rem[u] // 2
            unit_deg = 2
        else:
            cap = min(rem[u], rem[v])
            unit_deg = 1
        price = inst.cost(u, v)
        for m in range(cap + 1):
            assign[idx] = m
            rem[u] -= unit_deg * m
            if u != v:
                rem[v] -= m
            if all(rem[w] == 0 for w in finish_at.get(idx, [])):
                rec(idx + 1, acc + price * m)
            assign[idx] = 0
            rem[u] += unit_deg * m
            if u != v:
                rem[v] += m

    rec(0, Fraction(0))
    return best_z, best_cost


def exact_bdgpe(instance: rounding.BdgpeInstance,
                budget: OracleBudget = DEFAULT_BUDGET):
    """Exact optimum over integer points meeting the borders and every
    hyperedge window exactly; None when that set is empty.  Returns
    (point, cost) otherwise."""
    k = instance.pair.size
    if k > budget.max_ground:
        raise BudgetExceeded(
            f"ground set of {k} exceeds the oracle budget {budget.max_ground}")
    lo, hi = gpoly.coordinate_ranges(instance.pair)
    cells = 1
    for l, h in zip(lo, hi):
        cells *= max(0, h - l + 1)
    if cells > budget.max_nodes:
        raise BudgetExceeded(
            f"coordinate box of {cells} points exceeds the oracle budget")
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
        if best is None or cost < best[1]:
            best = (x, cost)
    return best


def lp_lower_bound(instance: rounding.BdgpeInstance) -> Fraction:
    """Optimum of the relaxation, computed through the same path the
    rounding loop uses for its first round (bit-identical results)."""
    edges = [rounding._EdgeState(i, e)
             for i, e in enumerate(instance.constraints.edges)]
    sol = rounding._solve_current(instance.pair, instance.costs, edges)
    return sol.objective_value
