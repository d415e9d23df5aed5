"""Approximation pipelines for the metric many-visits TSP.

Two constructions are provided.  The simple one glues a single-visit tour
from the Christofides recipe onto an optimal transportation plan with one
visit less per vertex; its cost is at most (alpha + 1) times the optimum
where alpha is the single-visit guarantee (1.5 here), and the degrees add
up exactly.  The stronger 1.5-approximation first finds a connected
degree-sum-constrained edge multiset through the lower-bounded rounding
solver (each degree misses twice its request by at most one), then adds a
minimum-cost perfect matching on the odd-degree vertices and removes the
surplus visits by metric shortcutting.

Everything below works in exact rational arithmetic; matchings are exact
via bitmask dynamic programming over the (small, capped) odd vertex set,
and the transportation plan comes from successive shortest paths with
potentials, augmenting whole bottlenecks so large requests stay cheap.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from . import gpoly, mvtsp, rounding

MATCHING_CAP = 20


class ApproxError(Exception):
    pass


class OddCardinality(ApproxError):
    pass


class SubsetTooLarge(ApproxError):
    pass


class Unbalanced(ApproxError):
    pass


@dataclass(frozen=True)
class MatchingProblem:
    """Even-cardinality vertex subset with the instance costs restricted
    to it (loops never participate)."""

    vertices: tuple
    costs: tuple  # full symmetric matrix of the host instance

    def cost(self, u, v):
        return self.costs[u][v]


def minimum_spanning_tree(inst: mvtsp.MvtspInstance) -> dict:
    """Deterministic Kruskal over the non-loop edges, ordered by (cost, u, v)."""
    n = inst.n
    order = sorted(((inst.cost(u, v), u, v)
                    for u in range(n) for v in range(u + 1, n)))
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tree = {}
    for _c, u, v in order:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            tree[(u, v)] = 1
            if len(tree) == n - 1:
                break
    return tree


def min_cost_perfect_matching(prob: MatchingProblem) -> tuple:
    """Exact minimum-cost perfect matching on the subset via O(2^k k^2)
    bitmask dynamic programming; k is capped."""
    verts = tuple(prob.vertices)
    k = len(verts)
    if k % 2:
        raise OddCardinality(f"cannot perfectly match {k} vertices")
    if k > MATCHING_CAP:
        raise SubsetTooLarge(
            f"{k} odd-degree vertices exceed the matching cap {MATCHING_CAP}")
    if k == 0:
        return ()
    full = (1 << k) - 1
    dp = [None] * (full + 1)
    choice = [None] * (full + 1)
    dp[0] = Fraction(0)
    for mask in range(1, full + 1):
        i = (mask & -mask).bit_length() - 1
        if not mask >> i & 1:
            continue
        rest = mask ^ (1 << i)
        j = i  # scan partners of the lowest set vertex
        m = rest
        while m:
            j = (m & -m).bit_length() - 1
            m ^= 1 << j
            prev = dp[rest ^ (1 << j)]
            if prev is None:
                continue
            cand = prev + prob.cost(verts[i], verts[j])
            if dp[mask] is None or cand < dp[mask]:
                dp[mask] = cand
                choice[mask] = (i, j)
    pairs = []
    mask = full
    while mask:
        i, j = choice[mask]
        pairs.append((verts[i], verts[j]))
        mask ^= (1 << i) | (1 << j)
    return tuple(pairs)


def transportation(costs, supply, demand) -> dict:
    """Minimum-cost integral plan moving supply(u) units from each source
    to cover demand(v) at each sink over the complete bipartite cost
    matrix (u == v allowed); successive shortest paths with potentials,
    each augmentation pushing the full bottleneck."""
    n = len(supply)
    supply = [int(s) for s in supply]
    demand = [int(d) for d in demand]
    if any(s < 0 for s in supply) or any(d < 0 for d in demand):
        raise Unbalanced("supplies and demands must be nonnegative")
    if sum(supply) != sum(demand):
        raise Unbalanced(
            f"total supply {sum(supply)} != total demand {sum(demand)}")
    cost = [[Fraction(costs[u][v]) for v in range(n)] for u in range(n)]
    if any(cost[u][v] < 0 for u in range(n) for v in range(n)):
        raise Unbalanced("costs must be nonnegative")
    flow: dict = {}
    pot_u = [Fraction(0)] * n
    pot_v = [Fraction(0)] * n
    left = supply[:]
    need = demand[:]
    remaining = sum(left)
    while remaining > 0:
        # Dijkstra on the residual bipartite graph with reduced costs
        INF = None
        dist_u = [None] * n
        dist_v = [None] * n
        origin_u = [None] * n  # back pointers: u reached from sink v
        origin_v = [None] * n  # v reached from source u
        heap = []
        for u in range(n):
            if left[u] > 0:
                dist_u[u] = Fraction(0)
                heapq.heappush(heap, (Fraction(0), 0, u))
        while heap:
            d, side, node = heapq.heappop(heap)
            if side == 0:
                if dist_u[node] is not None and d > dist_u[node]:
                    continue
                for v in range(n):
                    rc = cost[node][v] - pot_u[node] + pot_v[v]
                    nd = d + rc
                    if dist_v[v] is None or nd < dist_v[v]:
                        dist_v[v] = nd
                        origin_v[v] = node
                        heapq.heappush(heap, (nd, 1, v))
            else:
                if dist_v[node] is not None and d > dist_v[node]:
                    continue
                for u in range(n):
                    if flow.get((u, node), 0) > 0:
                        rc = -(cost[u][node] - pot_u[u] + pot_v[node])
                        nd = d + rc
                        if dist_u[u] is None or nd < dist_u[u]:
                            dist_u[u] = nd
                            origin_u[u] = node
                            heapq.heappush(heap, (nd, 0, u))
        best = None
        for v in range(n):
            if need[v] > 0 and dist_v[v] is not None:
                if best is None or dist_v[v] < dist_v[best]:
                    best = v
        if best is None:
            raise Unbalanced("no augmenting path; problem is infeasible")
        # walk back, collecting the path and its bottleneck
        path = []  # (u, v, forward?)
        v = best
        bottleneck = need[v]
        while True:
            u = origin_v[v]
            path.append((u, v, True))
            if dist_u[u] == 0 and left[u] > 0 and origin_u[u] is None:
                bottleneck = min(bottleneck, left[u])
                break
            v2 = origin_u[u]
            path.append((u, v2, False))
            bottleneck = min(bottleneck, flow[(u, v2)])
            v = v2
        for u, vv, fwd in path:
            if fwd:
                flow[(u, vv)] = flow.get((u, vv), 0) + bottleneck
            else:
                flow[(u, vv)] -= bottleneck
                if flow[(u, vv)] == 0:
                    del flow[(u, vv)]
        left_u = path[-1][0]
        left[left_u] -= bottleneck
        need[best] -= bottleneck
        remaining -= bottleneck
        # potential update capped at the chosen sink's distance keeps all
        # residual reduced costs nonnegative for the next round
        cap = dist_v[best]
        for u in range(n):
            d = cap if dist_u[u] is None else min(dist_u[u], cap)
            pot_u[u] -= d
        for v in range(n):
            d = cap if dist_v[v] is None else min(dist_v[v], cap)
            pot_v[v] -= d
    return flow


def fold_plan(plan: dict) -> dict:
    """Collapse an ordered-pair plan onto undirected edge multiplicities;
    the pair (u,v) and (v,u) land on the same edge, (v,v) on the loop."""
    z: dict = {}
    for (u, v), m in plan.items():
        k = mvtsp.edge_key(u, v)
        z[k] = z.get(k, 0) + m
    return {e: m for e, m in z.items() if m}


def christofides(inst: mvtsp.MvtspInstance) -> dict:
    """Single-visit tour: spanning tree, matching on its odd-degree
    vertices, Eulerian circuit, first-visit shortcut.  Cost at most 1.5
    times the optimal single-visit tour on metric costs."""
    n = inst.n
    if n == 1:
        return {(0, 0): 1}
    tree = minimum_spanning_tree(inst)
    deg = mvtsp.degrees(n, tree)
    odd = tuple(v for v in range(n) if deg[v] % 2)
    pairs = min_cost_perfect_matching(MatchingProblem(odd, inst.costs))
    multi = dict(tree)
    for u, v in pairs:
        k = mvtsp.edge_key(u, v)
        multi[k] = multi.get(k, 0) + 1
    circuit = mvtsp.eulerian_circuit(multi)
    seen = set()
    order = []
    for v in circuit[:-1]:
        if v not in seen:
            seen.add(v)
            order.append(v)
    z: dict = {}
    for i, u in enumerate(order):
        k = mvtsp.edge_key(u, order[(i + 1) % len(order)])
        z[k] = z.get(k, 0) + 1
    return z


def apx25(inst: mvtsp.MvtspInstance) -> dict:
    """Single-visit tour plus an optimal transportation plan for the
    remaining r - 1 visits; feasible with cost at most 2.5 times optimal."""
    z = christofides(inst)
    supply = [r - 1 for r in inst.requests]
    plan = transportation(inst.costs, supply, supply)
    for e, m in fold_plan(plan).items():
        z[e] = z.get(e, 0) + m
    if not mvtsp.check_feasible(inst, z):
        raise ApproxError("combined tour is infeasible; this is a bug")
    return z


def degree_reduction_instance(inst: mvtsp.MvtspInstance) -> rounding.BdgpeInstance:
    """Lower-bounded degree instance over the graphic border pair: one
    hyperedge per vertex over its incident edges (loops weighted twice),
    bound twice the request."""
    pair = gpoly.graphic_mvtsp_border(inst.n, inst.requests)
    edges = []
    for v in range(inst.n):
        members = tuple(e for e in pair.ground.elements if v in e)
        mult = tuple(2 if u == w else 1 for (u, w) in members)
        edges.append(rounding.Hyperedge(members, mult, lower=2 * inst.requests[v]))
    costs = tuple(inst.cost(u, v) for (u, v) in pair.ground.elements)
    return rounding.BdgpeInstance(
        pair=pair, costs=costs,
        constraints=rounding.HypergraphConstraints(tuple(edges)),
        regime="lower_only")


@dataclass(frozen=True)
class Apx15Report:
    """Audit data of one run of the stronger pipeline."""

    tour: dict
    base: dict          # connected degree-sum vector before matching
    matching: tuple
    rounding_result: rounding.RoundingResult
    cost: Fraction
    base_cost: Fraction


def apx15_report(inst: mvtsp.MvtspInstance) -> Apx15Report:
    red = degree_reduction_instance(inst)
    res = rounding.solve_bdgpe(red)
    if res.delta != 2:
        raise ApproxError("degree reduction must have frequency 2; bug")
    edges = red.pair.ground.elements
    z = {e: m for e, m in zip(edges, res.z) if m}
    deg = mvtsp.degrees(inst.n, z)
    for v in range(inst.n):
        if deg[v] < 2 * inst.requests[v] - 1:
            raise ApproxError("degree guarantee violated; this is a bug")
    if not mvtsp.support_connects(inst.n, z):
        raise ApproxError("rounded vector is disconnected; this is a bug")
    odd = tuple(v for v in range(inst.n) if deg[v] % 2)
    if len(odd) % 2:
        raise ApproxError("odd-degree set has odd size; handshake violated")
    pairs = min_cost_perfect_matching(MatchingProblem(odd, inst.costs))
    total = dict(z)
    for u, v in pairs:
        k = mvtsp.edge_key(u, v)
        total[k] = total.get(k, 0) + 1
    cover = mvtsp.cycle_decompose(inst.n, total)
    tour = mvtsp.implicit_order(cover)
    out = mvtsp.shortcut(inst, tour, inst.requests)
    if not mvtsp.check_feasible(inst, out):
        raise ApproxError("final tour is infeasible; this is a bug")
    return Apx15Report(tour=out, base=z, matching=pairs,
                       rounding_result=res,
                       cost=mvtsp.tour_cost(inst, out),
                       base_cost=mvtsp.tour_cost(inst, z))


def apx15(inst: mvtsp.MvtspInstance) -> dict:
    """Feasible tour of cost at most 1.5 times the optimum."""
    return apx15_report(inst).tour
