"""Iterative LP rounding for degree-bounded g-polymatroid elements.

Input: a border pair, element costs, and a hypergraph whose hyperedges carry
positive per-element multiplicities together with a lower bound, an upper
bound, or both on the weighted sum over their members.  The solver finds an
integer element of the polyhedron whose cost is at most the LP optimum and
whose hyperedge sums miss their bounds by a bounded additive amount that
depends only on the weighted maximum element frequency of the input
hypergraph (delta):

* both bounds present: each sum lands within 2*delta - 1 of its window,
* lower bounds only: each sum is at least its bound minus (delta - 1),
* upper bounds only: each sum is at most its bound plus (delta - 1).

The loop solves the subset-row LP exactly, then simplifies: elements whose
LP value is exactly zero are deleted, integer parts are moved into the
output and contracted out of the borders, hyperedges that can no longer be
violated badly are dropped, and after the first round the borders are
intersected with the unit cube so every later LP solution lives in [0, 1].
All accounting is exact; the zero test on LP values is an exact rational
comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import gpoly, lp


class RoundingError(Exception):
    pass


class Infeasible(RoundingError):
    """The initial LP has no solution: the instance is inconsistent."""


class NonTermination(RoundingError):
    """The iteration bound was exceeded; indicates an implementation bug."""


REGIMES = ("both", "lower_only", "upper_only")


@dataclass(frozen=True)
class Hyperedge:
    """Member elements with positive multiplicities and optional bounds on
    the weighted member sum."""

    members: tuple
    multiplicity: tuple
    lower: int | None = None
    upper: int | None = None

    def __post_init__(self):
        if not self.members:
            raise RoundingError("hyperedge needs at least one member")
        if len(set(self.members)) != len(self.members):
            raise RoundingError("duplicate hyperedge member")
        if len(self.multiplicity) != len(self.members):
            raise RoundingError("one multiplicity per member required")
        if any(m <= 0 for m in self.multiplicity):
            raise RoundingError("multiplicities must be positive")
        if self.lower is None and self.upper is None:
            raise RoundingError("hyperedge needs at least one bound")
        if (self.lower is not None and self.upper is not None
                and self.lower > self.upper):
            raise RoundingError("hyperedge lower bound exceeds upper bound")
        if (self.lower is not None and self.lower < 0) or \
           (self.upper is not None and self.upper < 0):
            raise RoundingError("hyperedge bounds must be nonnegative")

    def weight(self, element):
        try:
            return self.multiplicity[self.members.index(element)]
        except ValueError:
            return 0


@dataclass(frozen=True)
class HypergraphConstraints:
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(self.edges))


@dataclass(frozen=True)
class BdgpeInstance:
    """Border pair + costs + hypergraph + bound regime."""

    pair: gpoly.BorderPair
    costs: tuple
    constraints: HypergraphConstraints
    regime: str = "both"

    def __post_init__(self):
        object.__setattr__(self, "costs",
                           tuple(Fraction(c) for c in self.costs))
        if len(self.costs) != self.pair.size:
            raise RoundingError("one cost per ground-set element required")
        if self.regime not in REGIMES:
            raise RoundingError(f"unknown regime {self.regime!r}")
        index = self.pair.ground._index
        for e in self.constraints.edges:
            for s in e.members:
                if s not in index:
                    raise RoundingError(f"hyperedge member {s!r} not in ground set")
            if self.regime == "lower_only" and (e.upper is not None
                                                or e.lower is None):
                raise RoundingError("lower_only regime requires lower bounds only")
            if self.regime == "upper_only" and (e.lower is not None
                                                or e.upper is None):
                raise RoundingError("upper_only regime requires upper bounds only")


@dataclass(frozen=True)
class HyperedgeOutcome:
    """Achieved weighted sum of one input hyperedge against its bounds.

    violation is 0 inside the window, negative (achieved - lower) below it,
    positive (achieved - upper) above it.
    """

    achieved: int
    lower: int | None
    upper: int | None
    violation: int


@dataclass(frozen=True)
class RoundingResult:
    """Output element with its audit trail.

    lp_values holds the optimum of each round's LP; step_costs the cost
    moved into z by each round.  delta is the frozen weighted maximum
    element frequency of the input hypergraph.
    """

    z: tuple
    lp_optimum: Fraction
    iterations: int
    delta: int
    lp_values: tuple
    step_costs: tuple
    report: tuple


def delta(constraints: HypergraphConstraints) -> int:
    """Weighted maximum element frequency: the largest total multiplicity
    any single element carries across all hyperedges.  Computed on the
    input hypergraph and frozen for a whole rounding run."""
    totals: dict = {}
    for e in constraints.edges:
        for s, m in zip(e.members, e.multiplicity):
            totals[s] = totals.get(s, 0) + m
    return max(totals.values(), default=0)


def build_lp(instance: BdgpeInstance) -> lp.LinearProgram:
    """Materialize the relaxation as an explicit LP: one two-sided row per
    nonempty ground subset (absent border sides omitted) plus one row per
    hyperedge bound window."""
    pair = instance.pair
    k = pair.size
    if k > gpoly.ENUM_CAP:
        raise gpoly.GroundSetTooLarge(
            f"ground set of size {k} exceeds the enumeration cap {gpoly.ENUM_CAP}")
    rows = []
    for mask in range(1, 1 << k):
        lo = pair.p_of(mask)
        hi = pair.b_of(mask)
        if lo is None and hi is None:
            continue
        coeffs = tuple(1 if mask >> j & 1 else 0 for j in range(k))
        rows.append((coeffs,
                     None if lo is None else Fraction(lo),
                     None if hi is None else Fraction(hi)))
    for e in instance.constraints.edges:
        coeffs = [0] * k
        for s, m in zip(e.members, e.multiplicity):
            coeffs[pair.ground.index(s)] = m
        rows.append((tuple(coeffs),
                     None if e.lower is None else Fraction(e.lower),
                     None if e.upper is None else Fraction(e.upper)))
    return lp.LinearProgram(objective=instance.costs, rows=tuple(rows))


def violation_report(instance: BdgpeInstance, z) -> tuple:
    """Per input hyperedge: achieved weighted sum and its signed violation
    against the original bounds."""
    index = instance.pair.ground._index
    out = []
    for e in instance.constraints.edges:
        achieved = sum(m * int(z[index[s]])
                       for s, m in zip(e.members, e.multiplicity))
        if e.lower is not None and achieved < e.lower:
            v = achieved - e.lower
        elif e.upper is not None and achieved > e.upper:
            v = achieved - e.upper
        else:
            v = 0
        out.append(HyperedgeOutcome(achieved=achieved, lower=e.lower,
                                    upper=e.upper, violation=v))
    return tuple(out)


class _EdgeState:
    """Mutable working copy of one hyperedge during the rounding loop."""

    __slots__ = ("orig", "weights", "lower", "upper")

    def __init__(self, orig, edge: Hyperedge):
        self.orig = orig
        self.weights = dict(zip(edge.members, edge.multiplicity))
        self.lower = edge.lower
        self.upper = edge.upper

    def total_weight(self):
        return sum(self.weights.values())

    def removable(self, regime, dlt):
        if regime == "both":
            return self.total_weight() <= 2 * dlt - 1
        if regime == "lower_only":
            return self.lower <= dlt - 1
        return self.upper + dlt - 1 >= self.total_weight()


def _solve_current(pair: gpoly.BorderPair, costs, edges):
    extra = []
    elements = pair.ground.elements
    for st in edges:
        coeffs = tuple(st.weights.get(s, 0) for s in elements)
        extra.append((coeffs, st.lower, st.upper))
    return lp.solve_subset_lp(pair.size, costs, pair.p_vals, pair.p_fin,
                              pair.b_vals, pair.b_fin, extra)


def solve_bdgpe(instance: BdgpeInstance) -> RoundingResult:
    """Run the iterative rounding loop; see the module docstring for the
    cost and violation guarantees.

    Raises Infeasible when the initial LP is empty and NonTermination when
    the proven iteration bound is exceeded (a bug, surfaced not looped).
    """
    ground0 = instance.pair.ground
    k0 = ground0.size
    if k0 > gpoly.ENUM_CAP:
        raise gpoly.GroundSetTooLarge(
            f"ground set of size {k0} exceeds the enumeration cap {gpoly.ENUM_CAP}")
    dlt = delta(instance.constraints)
    edges = [_EdgeState(i, e) for i, e in enumerate(instance.constraints.edges)]
    pair = instance.pair
    z = {s: 0 for s in ground0.elements}
    max_iter = 2 * k0 + len(edges) + 1
    lp_values = []
    step_costs = []
    iterations = 0

    while pair.size > 0:
        iterations += 1
        if iterations > max_iter:
            raise NonTermination(
                f"exceeded {max_iter} LP solves on a ground set of {k0} "
                f"elements and {len(instance.constraints.edges)} hyperedges")
        costs = tuple(instance.costs[ground0.index(s)]
                      for s in pair.ground.elements)
        try:
            sol = _solve_current(pair, costs, edges)
        except lp.Infeasible as exc:
            if iterations == 1:
                raise Infeasible(str(exc)) from exc
            raise RoundingError(
                "reduced LP became infeasible mid-run; this should be "
                "impossible") from exc
        lp_values.append(sol.objective_value)
        x = dict(zip(pair.ground.elements, sol.values))
        if iterations >= 2 and any(v < 0 or v > 1 for v in x.values()):
            raise RoundingError(
                "LP solution escaped the unit cube after the first round")

        # Delete elements at exactly zero, dropping them from hyperedges.
        # Deletion pins the coordinate to zero before projecting: a plain
        # restriction of the borders would keep slack that is only
        # reachable with nonzero values on the deleted coordinates, and a
        # later round could spend that slack, pushing the accumulated
        # output outside the input polyhedron.  After pinning, the border
        # tables are flat across the dead coordinates, so the projection
        # is exact.
        dead = [s for s, v in x.items() if v == 0]
        if dead:
            dead_set = set(dead)
            pin = tuple(0 if s in dead_set else None
                        for s in pair.ground.elements)
            try:
                pair = gpoly.intersect_box(pair, pin, pin)
            except gpoly.EmptyIntersection as exc:
                raise RoundingError(
                    "pinning zero-valued elements emptied the polyhedron; "
                    "this should be impossible") from exc
            pair = gpoly.delete(pair, dead)
            for st in edges:
                for s in dead:
                    st.weights.pop(s, None)

        # move integer parts into the output and shift the borders
        remaining = pair.ground.elements
        floors = {s: math.floor(x[s]) for s in remaining}
        step_costs.append(sum((instance.costs[ground0.index(s)] * f
                               for s, f in floors.items()), Fraction(0)))
        if any(floors.values()):
            for s, f in floors.items():
                z[s] += f
            pair = gpoly.shift(pair, tuple(floors[s] for s in remaining))
            for st in edges:
                drop = sum(m * floors.get(s, 0) for s, m in st.weights.items())
                if drop:
                    if st.lower is not None:
                        st.lower -= drop
                    if st.upper is not None:
                        st.upper -= drop

        # drop hyperedges that can no longer be violated beyond the bound,
        # and ones emptied by deletions (their sums are frozen)
        edges = [st for st in edges
                 if st.weights and not st.removable(instance.regime, dlt)]

        # restrict to the unit cube once, at the end of the first round
        if iterations == 1 and pair.size > 0:
            try:
                pair = gpoly.intersect_box(pair, (0,) * pair.size,
                                           (1,) * pair.size)
            except gpoly.EmptyIntersection as exc:
                raise RoundingError(
                    "unit-cube restriction emptied the polyhedron; this "
                    "should be impossible") from exc

    z_vec = tuple(z[s] for s in ground0.elements)
    if not gpoly.contains(instance.pair, z_vec):
        raise RoundingError("output left the input polyhedron; this is a bug")
    cost = sum((c * v for c, v in zip(instance.costs, z_vec)), Fraction(0))
    lp_optimum = lp_values[0] if lp_values else Fraction(0)
    if lp_values and cost > lp_optimum:
        raise RoundingError("output cost exceeds the LP optimum; this is a bug")
    return RoundingResult(z=z_vec,
                          lp_optimum=lp_optimum,
                          iterations=iterations,
                          delta=dlt,
                          lp_values=tuple(lp_values),
                          step_costs=tuple(step_costs),
                          report=violation_report(instance, z_vec))
