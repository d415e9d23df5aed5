"""Many-visits tour machinery on compact edge-multiplicity representations.

A tour that visits vertex v exactly r(v) times is stored as a nonnegative
integer multiplicity per undirected edge (self-loops allowed; a loop counts
twice in a degree).  The vector is feasible when every degree equals twice
the request and the support graph connects all vertices.

The pieces here turn such a vector into an actually traversable order and
back without ever expanding the full visit sequence (whose length is the
total number of visits and may be exponential in the input encoding):

* cycle_decompose splits an even-degree connected multiset into simple
  cycles with repetition counts,
* eulerian_circuit walks a small multigraph (each cycle's edges once),
* implicit_order combines both into a circuit plus per-cycle repeat rules,
* shortcut removes surplus visits from the back of that implicit order by
  replacing the two edges around a dropped visit with one edge, which never
  increases cost under the triangle inequality.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class MvtspError(Exception):
    pass


class OddDegree(MvtspError):
    pass


class Disconnected(MvtspError):
    pass


class NotEulerian(MvtspError):
    pass


class DeficitVisit(MvtspError):
    """The tour visits some vertex fewer times than requested."""


def edge_key(u: int, v: int) -> tuple:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class MvtspInstance:
    """Symmetric nonnegative rational costs (diagonal = self-loop costs)
    and one positive visit request per vertex.  Metric validity is checked
    by the instance generators, not here."""

    n: int
    costs: tuple
    requests: tuple

    def __post_init__(self):
        if self.n < 1:
            raise MvtspError("need at least one vertex")
        costs = tuple(tuple(Fraction(c) for c in row) for row in self.costs)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "requests", tuple(int(v) for v in self.requests))
        if len(costs) != self.n or any(len(row) != self.n for row in costs):
            raise MvtspError("cost matrix must be n x n including the diagonal")
        if len(self.requests) != self.n:
            raise MvtspError("one request per vertex required")
        if any(r < 1 for r in self.requests):
            raise MvtspError("requests must be positive")
        for u in range(self.n):
            for v in range(u, self.n):
                if costs[u][v] != costs[v][u]:
                    raise MvtspError("cost matrix must be symmetric")
                if costs[u][v] < 0:
                    raise MvtspError("costs must be nonnegative")

    def cost(self, u: int, v: int) -> Fraction:
        return self.costs[u][v]


def degrees(n: int, z: dict) -> list:
    """Degree of each vertex under the multiplicity vector; loops add two."""
    deg = [0] * n
    for (u, v), m in z.items():
        if m < 0:
            raise MvtspError("negative edge multiplicity")
        if u == v:
            deg[u] += 2 * m
        else:
            deg[u] += m
            deg[v] += m
    return deg


def support_connects(n: int, z: dict) -> bool:
    """True iff the support edges link all n vertices (n = 1: always)."""
    if n == 1:
        return True
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    touched = set()
    for (u, v), m in z.items():
        if m > 0:
            touched.update((u, v))
            parent[find(u)] = find(v)
    if len(touched) < n:
        return False
    return len({find(v) for v in range(n)}) == 1


def check_feasible(inst: MvtspInstance, z: dict) -> bool:
    """Feasible tour: every degree is exactly twice the request and the
    support connects all vertices."""
    deg = degrees(inst.n, z)
    if any(deg[v] != 2 * inst.requests[v] for v in range(inst.n)):
        return False
    return support_connects(inst.n, z)


def tour_cost(inst: MvtspInstance, z: dict) -> Fraction:
    return sum((inst.cost(u, v) * m for (u, v), m in z.items()), Fraction(0))


@dataclass(frozen=True)
class CycleCover:
    """Simple closed walks with positive repetition counts; the weighted
    edge multisets sum back to the source multiplicity vector exactly."""

    cycles: tuple  # ((vertex, ...), count) pairs


def cycle_edges(cycle: tuple) -> dict:
    """Edge multiset of one traversal of a cycle given as a vertex tuple.

    A single vertex means its self-loop; two vertices mean the connecting
    edge walked out and back (multiplicity two)."""
    out: dict = {}
    if len(cycle) == 1:
        out[(cycle[0], cycle[0])] = 1
        return out
    for i, u in enumerate(cycle):
        v = cycle[(i + 1) % len(cycle)]
        k = edge_key(u, v)
        out[k] = out.get(k, 0) + 1
    return out


def recompose(cover: CycleCover) -> dict:
    total: dict = {}
    for cycle, count in cover.cycles:
        for e, m in cycle_edges(cycle).items():
            total[e] = total.get(e, 0) + count * m
    return {e: m for e, m in total.items() if m}


def cycle_decompose(n: int, z: dict) -> CycleCover:
    """Split an even-degree, connected multiplicity vector into simple
    cycles with counts.

    Self-loops come out first as single-vertex cycles.  Then walks start at
    the lowest-indexed supported vertex and always take the lowest-indexed
    neighbor with multiplicity left, preferring not to double straight back
    over the arrival edge, stopping at the first repeated vertex; the
    enclosed cycle is subtracted as many times as its edges allow.  Each
    extraction exhausts at least one edge, so the number of distinct cycles
    is at most the number of edges."""
    work = {e: m for e, m in z.items() if m}
    deg = degrees(n, work)
    if any(d % 2 for d in deg):
        raise OddDegree("all degrees must be even")
    if not support_connects(n, work):
        raise Disconnected("support must connect all vertices")
    cycles = []
    for (u, v), m in sorted(work.items()):
        if u == v:
            cycles.append(((u,), m))
    work = {e: m for e, m in work.items() if e[0] != e[1]}

    def neighbors(v):
        out = []
        for (a, b), m in work.items():
            if m > 0:
                if a == v:
                    out.append(b)
                elif b == v:
                    out.append(a)
        return sorted(out)

    while work:
        start = min(u for e, m in work.items() if m > 0 for u in e)
        walk = [start]
        seen = {start: 0}
        used: dict = {}
        came_by = None
        while True:
            cur = walk[-1]
            nxt = None
            fallback = None
            for w in neighbors(cur):
                k = edge_key(cur, w)
                if work[k] - used.get(k, 0) > 0:
                    if k == came_by:
                        fallback = fallback if fallback is not None else w
                        continue
                    nxt = w
                    break
            if nxt is None:
                nxt = fallback
            if nxt is None:
                raise MvtspError("walk got stuck; degrees were not even")
            k = edge_key(cur, nxt)
            used[k] = used.get(k, 0) + 1
            came_by = k
            if nxt in seen:
                cycle = tuple(walk[seen[nxt]:])
                break
            seen[nxt] = len(walk)
            walk.append(nxt)
        ce = cycle_edges(cycle)
        count = min(work[e] // m for e, m in ce.items())
        cycles.append((cycle, count))
        for e, m in ce.items():
            work[e] -= count * m
            if work[e] == 0:
                del work[e]
    return CycleCover(cycles=tuple(cycles))


def eulerian_circuit(edges: dict) -> tuple:
    """Closed walk using every edge of the multigraph exactly once
    (multiplicities respected, loops allowed); deterministic lowest-index
    traversal.  The returned sequence starts and ends at the same vertex."""
    work = {e: m for e, m in edges.items() if m}
    if not work:
        raise NotEulerian("no edges")
    verts = sorted({u for e in work for u in e})
    adj: dict = {v: {} for v in verts}
    for (u, v), m in work.items():
        adj[u][v] = adj[u].get(v, 0) + m
        if u != v:
            adj[v][u] = adj[v].get(u, 0) + m
    deg = {v: sum(m for w, m in adj[v].items()) + adj[v].get(v, 0)
           for v in verts}
    if any(d % 2 for d in deg.values()):
        raise NotEulerian("odd degree vertex")
    remap = {v: i for i, v in enumerate(verts)}
    if not support_connects(len(verts),
                            {(remap[u], remap[v]): 1 for (u, v) in work}):
        raise NotEulerian("edge set is disconnected")
    order = {v: sorted(adj[v]) for v in verts}
    stack = [verts[0]]
    out = []
    while stack:
        v = stack[-1]
        nxt = None
        for w in order[v]:
            if adj[v].get(w, 0) > 0:
                nxt = w
                break
        if nxt is None:
            out.append(stack.pop())
        else:
            adj[v][nxt] -= 1
            if v != nxt:
                adj[nxt][v] -= 1
            stack.append(nxt)
    out.reverse()
    return tuple(out)


@dataclass(frozen=True)
class ImplicitTour:
    """A circuit over the union of the cycles (each cycle's edges once)
    plus expansion rules: after position pos of the circuit, insert the
    cycle rotated to start just past the anchor vertex, repeated count
    times.  The represented order is never materialized."""

    circuit: tuple
    expansions: tuple  # (pos, cycle_index, count) with count >= 1
    cover: CycleCover


def implicit_order(cover: CycleCover) -> ImplicitTour:
    """Build the traversable order: an Eulerian circuit of the one-copy
    union, with each cycle repeated (count - 1) more times at the first
    circuit position touching it."""
    union: dict = {}
    for cycle, _count in cover.cycles:
        for e, m in cycle_edges(cycle).items():
            union[e] = union.get(e, 0) + m
    eta = eulerian_circuit(union)
    pending = {i: set(cycle) for i, (cycle, count) in enumerate(cover.cycles)}
    expansions = []
    assigned = set()
    for pos in range(len(eta) - 1):
        v = eta[pos]
        for i, (cycle, count) in enumerate(cover.cycles):
            if i in assigned or count <= 1 or v not in pending[i]:
                continue
            assigned.add(i)
            expansions.append((pos, i, count - 1))
    return ImplicitTour(circuit=eta, expansions=tuple(expansions), cover=cover)


def rotated(cycle: tuple, anchor) -> tuple:
    """The cycle as a block to insert after a visit of anchor: starts just
    past the anchor and ends on it."""
    if len(cycle) == 1:
        return cycle
    i = cycle.index(anchor)
    return cycle[i + 1:] + cycle[:i + 1]


def visit_counts(tour: ImplicitTour, n: int) -> list:
    """Number of visits of each vertex in the represented order, computed
    from the counts alone."""
    counts = [0] * n
    for v in tour.circuit[:-1]:
        counts[v] += 1
    for _pos, ci, reps in tour.expansions:
        cycle = tour.cover.cycles[ci][0]
        for v in cycle:
            counts[v] += reps
    return counts


def shortcut(inst: MvtspInstance, tour: ImplicitTour, r) -> dict:
    """Remove the last (visits - r(v)) occurrences of every over-visited
    vertex from the represented order, reconnecting each gap with a single
    edge, and return the resulting multiplicity vector (degree exactly
    2 r(v) everywhere).

    Only the repetitions that actually lose a visit are walked explicitly;
    untouched repetitions contribute their cycle's edge multiset in bulk,
    which keeps the work polynomial in the number of cycles regardless of
    the repeat counts."""
    n = inst.n
    counts = visit_counts(tour, n)
    quota = [counts[v] - int(r[v]) for v in range(n)]
    if any(q < 0 for q in quota):
        v = min(i for i in range(n) if quota[i] < 0)
        raise DeficitVisit(f"vertex {v} is visited {counts[v]} < {r[v]} times")

    eta = tour.circuit
    m = len(eta) - 1
    by_pos: dict = {}
    for pos, ci, reps in tour.expansions:
        by_pos.setdefault(pos, []).append((ci, reps))

    # Reverse sweep marking removals.  For each expansion block, copies are
    # inspected from the last one backwards; once no quota touches the
    # cycle, the remaining lead copies are left for bulk accounting.
    eta_removed = [False] * m
    touched: dict = {}  # (pos, ci) -> list of per-copy removal masks, back to front
    bulk: dict = {}     # (pos, ci) -> untouched lead copy count
    for pos in range(m - 1, -1, -1):
        for ci, reps in reversed(by_pos.get(pos, [])):
            cycle = tour.cover.cycles[ci][0]
            block = rotated(cycle, eta[pos])
            masks = []
            copies_left = reps
            while copies_left > 0 and any(quota[v] > 0 for v in set(block)):
                mask = [False] * len(block)
                for j in range(len(block) - 1, -1, -1):
                    if quota[block[j]] > 0:
                        mask[j] = True
                        quota[block[j]] -= 1
                masks.append(mask)
                copies_left -= 1
            if masks:
                touched[(pos, ci)] = masks
            if copies_left:
                bulk[(pos, ci)] = copies_left
        if quota[eta[pos]] > 0:
            eta_removed[pos] = True
            quota[eta[pos]] -= 1

    # Forward pass: explicit spliced walk plus bulk edges.
    out: dict = {}

    def add_edge(u, v, mult=1):
        k = edge_key(u, v)
        out[k] = out.get(k, 0) + mult

    explicit = []
    for pos in range(m):
        if not eta_removed[pos]:
            explicit.append(eta[pos])
        for ci, reps in by_pos.get(pos, []):
            cycle, _count = tour.cover.cycles[ci]
            block = rotated(cycle, eta[pos])
            lead = bulk.get((pos, ci), 0)
            if lead:
                if explicit and explicit[-1] == block[-1]:
                    # the walk is already standing on the anchor: the whole
                    # repetitions pass through unchanged
                    for e, mult in cycle_edges(cycle).items():
                        add_edge(*e, mult=mult * lead)
                else:
                    # anchor visit was spliced away: walk the first copy
                    # explicitly, bulk the rest
                    explicit.extend(block)
                    for e, mult in cycle_edges(cycle).items():
                        add_edge(*e, mult=mult * (lead - 1))
            for mask in reversed(touched.get((pos, ci), [])):
                explicit.extend(v for v, gone in zip(block, mask) if not gone)
    if not explicit:
        raise MvtspError("entire order was removed; requests were not positive")
    for i, u in enumerate(explicit):
        add_edge(u, explicit[(i + 1) % len(explicit)])
    return {e: mult for e, mult in out.items() if mult}
