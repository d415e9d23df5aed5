"""Exact rational LP solver returning basic (vertex) optimal solutions.

Problems have the row form

    minimize c.x   subject to   lo_i <= a_i . x <= hi_i,

where either bound may be absent.  The solver runs the simplex method with
Bland's smallest-index anti-cycling rule on the dual in standard equality
form: each finite row side becomes a dual column, so the basis stays d x d
(d = number of variables) no matter how many rows there are.  That matters
here because callers routinely pass one row per nonempty subset of a ground
set.

All arithmetic is exact.  The basis inverse is maintained as an integer
matrix over a positive integer determinant; pivot updates are integer
multiply-subtract-divide steps where the division is exact, so no rational
normalization (gcd) cost is paid inside the hot loop.  Two useful identities
fall out of the dual formulation:

* the dual reduced cost of a column equals the primal slack of its row at
  the candidate point, so the pricing pass is simultaneously an exact
  feasibility check of the reconstructed primal point, and
* at optimality the negated dual multiplier vector *is* the optimal primal
  vertex, whose tight rows are exactly the basis columns.

There is no floating-point fallback or tolerance anywhere; every comparison
is an integer sign test.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from . import _bits

import numpy as np


class LpError(Exception):
    """Malformed input or a geometry the solver cannot certify."""


class Infeasible(LpError):
    """The feasible region is empty."""


class Unbounded(LpError):
    """The objective is unbounded below on the feasible region."""


Bound = Optional[Fraction]


@dataclass(frozen=True)
class LinearProgram:
    """Minimization LP over row constraints lo <= a.x <= hi.

    objective: one cost per variable.
    rows: (coefficients, lower bound or None, upper bound or None); every
    row must carry at least one finite bound and match the variable count.
    """

    objective: tuple
    rows: tuple

    def __post_init__(self):
        d = len(self.objective)
        if d == 0:
            raise LpError("LP needs at least one variable")
        for i, (coeffs, lo, hi) in enumerate(self.rows):
            if len(coeffs) != d:
                raise LpError(f"row {i} has {len(coeffs)} coefficients, expected {d}")
            if lo is None and hi is None:
                raise LpError(f"row {i} has no finite bound")
            if lo is not None and hi is not None and lo > hi:
                raise Infeasible(f"row {i} has lo > hi")


@dataclass(frozen=True)
class BasicSolution:
    """A vertex of the feasible region attaining the optimum.

    tight_rows lists every row index satisfied with equality at values; the
    coefficient vectors of those rows span the full variable space.
    """

    values: tuple
    objective_value: Fraction
    tight_rows: tuple


def _scale_to_int(nums) -> tuple[list[int], int]:
    """Common-denominator scaling of a rational vector; returns (ints, den)."""
    fracs = [Fraction(v) for v in nums]
    den = lcm(*[f.denominator for f in fracs]) if fracs else 1
    return [int(f * den) for f in fracs], den


class _ExplicitFamily:
    """Dual-column view of an explicit row list.

    Column 2*i is the lower side of row i (a_i . x >= lo_i), column 2*i + 1
    the upper side (-a_i . x >= -hi_i); absent sides are skipped in pricing.
    """

    def __init__(self, lp: LinearProgram):
        self.d = len(lp.objective)
        self.cols: list[Optional[tuple[tuple[int, ...], int]]] = []
        self.descr: list[tuple] = []
        for i, (coeffs, lo, hi) in enumerate(lp.rows):
            items = [Fraction(c) for c in coeffs]
            dens = [c.denominator for c in items]
            if lo is not None:
                dens.append(Fraction(lo).denominator)
            if hi is not None:
                dens.append(Fraction(hi).denominator)
            L = lcm(*dens)
            a = tuple(int(c * L) for c in items)
            if lo is not None:
                self.cols.append((a, int(Fraction(lo) * L)))
            else:
                self.cols.append(None)
            self.descr.append((i, "lo"))
            if hi is not None:
                self.cols.append((tuple(-c for c in a), -int(Fraction(hi) * L)))
            else:
                self.cols.append(None)
            self.descr.append((i, "hi"))
        self.ncols = len(self.cols)

    def column(self, j):
        return self.cols[j]

    def describe(self, j):
        return self.descr[j]

    def price(self, zN, zD, phase1: bool) -> Optional[int]:
        for j, col in enumerate(self.cols):
            if col is None:
                continue
            g, h = col
            s = sum(zN[t] * g[t] for t in range(self.d))
            if not phase1:
                s += h * zD
            if s > 0:
                return j
        return None

    def find_nonorth(self, row) -> Optional[int]:
        for j, col in enumerate(self.cols):
            if col is None:
                continue
            g, _ = col
            if sum(row[t] * g[t] for t in range(self.d)) != 0:
                return j
        return None


class _SubsetFamily:
    """Dual columns for an LP whose rows are all nonempty subsets of a
    ground set (bounds from two integer set-function tables) plus a short
    list of extra integer rows.

    Masks m = 1 .. 2**k - 1 give columns 2m (lower table) and 2m + 1 (upper
    table); extra row i gives columns base + 2i / base + 2i + 1.  Pricing
    evaluates every subset column at once through a subset-sum transform.
    """

    def __init__(self, k, p_vals, p_fin, b_vals, b_fin, extra_rows):
        self.d = k
        self.nmasks = 1 << k
        self.p_vals = p_vals
        self.p_fin = p_fin
        self.b_vals = b_vals
        self.b_fin = b_fin
        self.extra = []  # (coeffs, lo, hi) with integer entries
        for coeffs, lo, hi in extra_rows:
            self.extra.append((tuple(int(c) for c in coeffs),
                               None if lo is None else int(lo),
                               None if hi is None else int(hi)))
        self.base = 2 * self.nmasks
        self.ncols = self.base + 2 * len(self.extra)
        self._use_np = k >= _bits.NUMPY_MIN_BITS
        if self._use_np:
            self._p_ok = np.asarray(p_fin, dtype=bool).copy()
            self._b_ok = np.asarray(b_fin, dtype=bool).copy()
            self._p_ok[0] = False
            self._b_ok[0] = False
            self._pv = np.where(self._p_ok,
                                np.asarray([int(v) for v in p_vals], dtype=np.int64), 0)
            self._bv = np.where(self._b_ok,
                                np.asarray([int(v) for v in b_vals], dtype=np.int64), 0)
            self._vmax = max(int(np.abs(self._pv).max(initial=0)),
                             int(np.abs(self._bv).max(initial=0)), 1)

    def column(self, j):
        if j < self.base:
            m, side = j >> 1, j & 1
            g = tuple(1 if m >> t & 1 else 0 for t in range(self.d))
            if side == 0:
                return g, int(self.p_vals[m])
            return tuple(-c for c in g), -int(self.b_vals[m])
        i, side = (j - self.base) >> 1, j & 1
        coeffs, lo, hi = self.extra[i]
        if side == 0:
            return coeffs, lo
        return tuple(-c for c in coeffs), -hi

    def describe(self, j):
        if j < self.base:
            return ("set", j >> 1, "lo" if j & 1 == 0 else "hi")
        return ("extra", (j - self.base) >> 1, "lo" if j & 1 == 0 else "hi")

    def _price_masks_py(self, zN, zD, phase1):
        sums = _bits.subset_sums_py(zN)
        for m in range(1, self.nmasks):
            if self.p_fin[m]:
                s = sums[m] if phase1 else sums[m] + int(self.p_vals[m]) * zD
                if s > 0:
                    return 2 * m
            if self.b_fin[m]:
                s = -sums[m] if phase1 else -sums[m] - int(self.b_vals[m]) * zD
                if s > 0:
                    return 2 * m + 1
        return None

    def _price_masks_np(self, zN, zD, phase1):
        sums = _bits.subset_sums_np(zN)
        if phase1:
            low = self._p_ok & (sums > 0)
            up = self._b_ok & (sums < 0)
        else:
            # keep exactness: escape to Python ints if the bound term or the
            # accumulated sums could leave int64
            if sums.dtype == np.int64 and self._vmax * abs(zD) >= _bits._INT64_SAFE:
                sums = sums.astype(object)
            if sums.dtype == np.int64:
                low = self._p_ok & (sums + self._pv * zD > 0)
                up = self._b_ok & (-sums - self._bv * zD > 0)
            else:
                pv = self._pv.astype(object)
                bv = self._bv.astype(object)
                low = self._p_ok & ((sums + pv * int(zD)) > 0)
                up = self._b_ok & ((-sums - bv * int(zD)) > 0)
        either = low | up
        if not either.any():
            return None
        m = int(np.argmax(either))
        return 2 * m if low[m] else 2 * m + 1

    def price(self, zN, zD, phase1):
        if self._use_np:
            best = self._price_masks_np(list(zN), zD, phase1)
        else:
            best = self._price_masks_py(zN, zD, phase1)
        if best is not None:
            return best
        for i, (coeffs, lo, hi) in enumerate(self.extra):
            s = sum(zN[t] * coeffs[t] for t in range(self.d))
            if lo is not None and (s if phase1 else s + lo * zD) > 0:
                return self.base + 2 * i
            if hi is not None and (-s if phase1 else -s - hi * zD) > 0:
                return self.base + 2 * i + 1
        return None

    def find_nonorth(self, row):
        sums = (_bits.subset_sums_np(list(row)) if self._use_np
                else _bits.subset_sums_py(row))
        for m in range(1, self.nmasks):
            if int(sums[m]) != 0:
                if self.p_fin[m]:
                    return 2 * m
                if self.b_fin[m]:
                    return 2 * m + 1
        for i, (coeffs, lo, hi) in enumerate(self.extra):
            if sum(row[t] * coeffs[t] for t in range(self.d)) != 0:
                if lo is not None:
                    return self.base + 2 * i
                if hi is not None:
                    return self.base + 2 * i + 1
        return None


_MAX_PIVOTS = 200_000


class _Core:
    """Revised simplex over one dual-column family.

    State: basis column ids (artificials get ids >= family.ncols), the
    integer basis-inverse numerator M with positive denominator D, and the
    scaled dual right-hand side (the primal objective vector).
    """

    def __init__(self, fam, b_int):
        self.fam = fam
        self.d = fam.d
        self.b = list(b_int)
        signs = [1 if v >= 0 else -1 for v in self.b]
        self.basis = [fam.ncols + i for i in range(self.d)]
        self.basis_g = [tuple(signs[i] if t == i else 0 for t in range(self.d))
                        for i in range(self.d)]
        self.basis_h = [0] * self.d
        self.M = [[signs[i] if t == i else 0 for t in range(self.d)]
                  for i in range(self.d)]
        self.D = 1
        self.pivots = 0

    def _is_art(self, j):
        return j >= self.fam.ncols

    def _ynum(self):
        return [sum(self.M[i][t] * self.b[t] for t in range(self.d))
                for i in range(self.d)]

    def _znum(self, costs):
        return [sum(costs[i] * self.M[i][t] for i in range(self.d))
                for t in range(self.d)]

    def _pivot(self, r, j, g, h):
        tN = [sum(self.M[i][t] * g[t] for t in range(self.d))
              for i in range(self.d)]
        tr = tN[r]
        if tr == 0:
            raise LpError("zero pivot")
        Mr = self.M[r]
        for i in range(self.d):
            if i == r:
                continue
            ti = tN[i]
            self.M[i] = [(self.M[i][t] * tr - ti * Mr[t]) // self.D
                         for t in range(self.d)]
        self.D = tr
        if self.D < 0:
            self.D = -self.D
            self.M = [[-v for v in row] for row in self.M]
        self.basis[r] = j
        self.basis_g[r] = g
        self.basis_h[r] = h
        self.pivots += 1
        if self.pivots > _MAX_PIVOTS:
            raise LpError("pivot limit exceeded; solver is cycling")

    def _step(self, phase1, art_cost0=False):
        """One simplex iteration; returns 'optimal', 'unbounded' or 'pivoted'."""
        if phase1:
            costs = [1 if self._is_art(j) else 0 for j in self.basis]
        else:
            costs = [0 if (art_cost0 and self._is_art(j)) else -h
                     for j, h in zip(self.basis, self.basis_h)]
            if not art_cost0 and any(self._is_art(j) for j in self.basis):
                raise LpError("artificial column left in basis")
        zN = self._znum(costs)
        j = self.fam.price(zN, self.D, phase1)
        if j is None:
            return "optimal"
        g, h = self.fam.column(j)
        tN = [sum(self.M[i][t] * g[t] for t in range(self.d))
              for i in range(self.d)]
        yN = self._ynum()
        r = None
        for i in range(self.d):
            if tN[i] > 0:
                if r is None:
                    r = i
                else:
                    lhs = yN[i] * tN[r]
                    rhs = yN[r] * tN[i]
                    if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[r]):
                        r = i
        if r is None:
            return "unbounded"
        self._pivot(r, j, g, h)
        return "pivoted"

    def run_phase(self, phase1, art_cost0=False):
        while True:
            res = self._step(phase1, art_cost0)
            if res != "pivoted":
                return res

    def phase1_value_positive(self):
        yN = self._ynum()
        return any(yN[i] != 0 for i in range(self.d) if self._is_art(self.basis[i]))

    def drive_out_artificials(self, strict):
        for i in range(self.d):
            if not self._is_art(self.basis[i]):
                continue
            j = self.fam.find_nonorth(self.M[i])
            if j is None:
                if strict:
                    raise LpError(
                        "constraint rows do not span the variable space; "
                        "the feasible region has no vertex")
                continue
            g, h = self.fam.column(j)
            self._pivot(i, j, g, h)


def _solve_family(fam, objective: Sequence[Fraction]):
    """Optimize over a column family; returns (values, objective, basis ids)."""
    c_int, c_den = _scale_to_int(objective)
    core = _Core(fam, c_int)
    if any(v != 0 for v in c_int):
        status = core.run_phase(phase1=True)
        if status != "optimal":
            raise LpError("phase 1 cannot be unbounded")
    if core.phase1_value_positive():
        # Dual infeasible: the primal is unbounded or infeasible.  Probe
        # primal feasibility with a zero objective (dual rhs 0): if that
        # dual is unbounded the primal is infeasible, otherwise unbounded.
        probe = _Core(fam, [0] * fam.d)
        if probe.run_phase(phase1=False, art_cost0=True) == "unbounded":
            raise Infeasible("the constraint system has no solution")
        raise Unbounded("objective unbounded below on the feasible region")
    core.drive_out_artificials(strict=True)
    status = core.run_phase(phase1=False)
    if status == "unbounded":
        raise Infeasible("the constraint system has no solution")
    # x = -z: the negated multiplier vector built from the basis row sides.
    # The objective scale c_den lives in the dual rhs (and hence in y), not
    # in z, so the primal point needs no unscaling here.
    zN = core._znum([-h for h in core.basis_h])
    values = tuple(Fraction(-zN[t], core.D) for t in range(fam.d))
    obj = sum((Fraction(objective[t]) * values[t] for t in range(fam.d)),
              Fraction(0))
    # cross-check strong duality exactly
    yN = core._ynum()
    dual = sum((Fraction(core.basis_h[i] * yN[i], core.D * c_den)
                for i in range(fam.d)), Fraction(0))
    if dual != obj:
        raise LpError("internal error: primal/dual objective mismatch")
    return values, obj, tuple(core.basis)


def solve(lp: LinearProgram) -> BasicSolution:
    """Minimize lp.objective over lp.rows; returns an optimal vertex.

    Deterministic for a fixed input ordering.  Raises Infeasible when the
    rows are contradictory and Unbounded when no finite optimum exists.
    """
    fam = _ExplicitFamily(lp)
    values, obj, _basis = _solve_family(fam, lp.objective)
    tight = []
    for i, (coeffs, lo, hi) in enumerate(lp.rows):
        ax = sum((Fraction(c) * values[t] for t, c in enumerate(coeffs)),
                 Fraction(0))
        if (lo is not None and ax == lo) or (hi is not None and ax == hi):
            tight.append(i)
    return BasicSolution(values=values, objective_value=obj,
                         tight_rows=tuple(tight))


def _rank(rows) -> int:
    """Rank over the rationals of a list of coefficient vectors."""
    mat = [[Fraction(v) for v in row] for row in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(mat)):
            if mat[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        prow = mat[rank]
        for i in range(len(mat)):
            if i != rank and mat[i][col] != 0:
                f = mat[i][col] / prow[col]
                mat[i] = [a - f * b for a, b in zip(mat[i], prow)]
        rank += 1
        if rank == len(mat):
            break
    return rank


def verify_basic(lp: LinearProgram, sol: BasicSolution) -> bool:
    """True iff sol.values is feasible and the rows tight at it have full
    rank, i.e. the point is a vertex of the feasible region."""
    d = len(lp.objective)
    values = [Fraction(v) for v in sol.values]
    if len(values) != d:
        return False
    tight = []
    for coeffs, lo, hi in lp.rows:
        ax = sum((Fraction(c) * values[t] for t, c in enumerate(coeffs)),
                 Fraction(0))
        if lo is not None and ax < lo:
            return False
        if hi is not None and ax > hi:
            return False
        if (lo is not None and ax == lo) or (hi is not None and ax == hi):
            tight.append(coeffs)
    if not tight:
        return d == 0
    return _rank(tight) == d


@dataclass(frozen=True)
class SubsetLpSolution:
    """Vertex optimum of a subset-row LP, with the defining tight columns."""

    values: tuple
    objective_value: Fraction
    basis: tuple  # descriptors ("set", mask, side) / ("extra", i, side)


def solve_subset_lp(k, objective, p_vals, p_fin, b_vals, b_fin,
                    extra_rows) -> SubsetLpSolution:
    """Minimize objective over {x : p(Z) <= x(Z) <= b(Z) for all nonempty
    masks Z} intersected with the extra integer rows.

    p_vals/b_vals are integer tables indexed by mask with finiteness flags;
    non-finite sides are simply absent from the constraint system.
    """
    fam = _SubsetFamily(k, p_vals, p_fin, b_vals, b_fin, extra_rows)
    values, obj, basis = _solve_family(fam, objective)
    return SubsetLpSolution(values=values, objective_value=obj,
                            basis=tuple(fam.describe(j) for j in basis))
