"""Seeded instance generation and validation.

Randomness comes from SplitMix64, a tiny fixed-constant 64-bit generator
(state advances by 0x9E3779B97F4A7C15; the output mix xors and multiplies
by 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB).  Bounded draws use rejection
sampling, so a given seed produces the same instance on any platform and
any Python version; instance files are byte-identical across runs.

Metric tours: a random symmetric integer matrix is closed under shortest
paths, which yields an exact rational metric without irrational point
distances; self-loop costs are then set to the largest legal value (twice
the cheapest incident edge) or drawn uniformly below it.

Border pairs: a weighted-coverage upper function (monotone and submodular
by construction) is paired with its complementary lower function, giving a
base pair; a random integer translation and a random box intersection
around a sampled integer point then vary the shape while staying closed
under paramodularity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import gpoly, mvtsp, rounding

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator; see the module docstring for the
    exact constants."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] via rejection sampling."""
        if lo > hi:
            raise ValueError("empty range")
        span = hi - lo + 1
        limit = (_MASK64 + 1) - (_MASK64 + 1) % span
        while True:
            v = self.next_u64()
            if v < limit:
                return lo + v % span

    def choice(self, seq):
        return seq[self.randint(0, len(seq) - 1)]

    def sample(self, n: int, k: int) -> list:
        """k distinct indices out of range(n), by partial Fisher-Yates."""
        pool = list(range(n))
        for i in range(k):
            j = self.randint(i, n - 1)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:k])


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for the metric tour generator."""

    seed: int
    n: int
    r_lo: int = 1
    r_hi: int = 4
    cost_lo: int = 1
    cost_hi: int = 9
    loop_rule: str = "max"  # "max" or "uniform"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.r_lo < 1 or self.r_lo > self.r_hi:
            raise ValueError("request range must be nonempty and positive")
        if self.cost_lo < 0 or self.cost_lo > self.cost_hi:
            raise ValueError("cost range must be nonempty and nonnegative")
        if self.loop_rule not in ("max", "uniform"):
            raise ValueError("loop_rule must be 'max' or 'uniform'")


def gen_metric_mvtsp(cfg: GeneratorConfig) -> mvtsp.MvtspInstance:
    """Random metric instance; always passes validate_metric."""
    rng = SplitMix64(cfg.seed)
    n = cfg.n
    c = [[0] * n for _ in range(n)]
    for u in range(n):
        for v in range(u + 1, n):
            c[u][v] = c[v][u] = rng.randint(cfg.cost_lo, cfg.cost_hi)
    for w in range(n):
        for u in range(n):
            row_u = c[u]
            cuw = row_u[w]
            row_w = c[w]
            for v in range(n):
                alt = cuw + row_w[v]
                if alt < row_u[v]:
                    row_u[v] = alt
    for v in range(n):
        if n == 1:
            c[v][v] = rng.randint(cfg.cost_lo, cfg.cost_hi)
            continue
        cmin = min(c[v][u] for u in range(n) if u != v)
        if cfg.loop_rule == "max":
            c[v][v] = 2 * cmin
        else:
            c[v][v] = rng.randint(0, 2 * cmin)
    requests = tuple(rng.randint(cfg.r_lo, cfg.r_hi) for _ in range(n))
    inst = mvtsp.MvtspInstance(n=n, costs=c, requests=requests)
    ok, why = validate_metric(inst)
    if not ok:
        raise AssertionError(f"generator produced a non-metric instance: {why}")
    return inst


def validate_metric(inst: mvtsp.MvtspInstance):
    """(True, None) when all ordered triples satisfy the triangle
    inequality (loops included); otherwise (False, first violation).

    The loop rule (a self-loop costs at most twice the cheapest incident
    edge) is reported first by name; it is the u == w case of the triple
    check."""
    n = inst.n
    for v in range(n):
        cmin = min(inst.cost(v, u) for u in range(n))
        if inst.cost(v, v) > 2 * cmin:
            return False, (f"loop c({v},{v}) = {inst.cost(v, v)} exceeds "
                           f"twice the cheapest incident cost {cmin}")
    for u in range(n):
        for v in range(n):
            for w in range(n):
                if inst.cost(u, w) > inst.cost(u, v) + inst.cost(v, w):
                    return False, (f"c({u},{w}) > c({u},{v}) + c({v},{w}): "
                                   f"{inst.cost(u, w)} > "
                                   f"{inst.cost(u, v) + inst.cost(v, w)}")
    return True, None


PARAMODULAR_SIZE_CAP = 6


def _pair_with_anchor(rng: SplitMix64, size: int):
    """Random paramodular pair plus an integer point inside it."""
    k = size
    nsets = rng.randint(1, 3)
    sets = [(rng.randint(1, (1 << k) - 1), rng.randint(1, 4))
            for _ in range(nsets)]
    shift = [rng.randint(-2, 2) for _ in range(k)]

    def b_of(mask):
        cov = sum(w for sm, w in sets if sm & mask)
        return cov - sum(shift[j] for j in range(k) if mask >> j & 1)

    full = (1 << k) - 1
    b_table = [b_of(m) for m in range(1 << k)]
    p_table = [b_table[full] - b_table[full ^ m] for m in range(1 << k)]
    ground = gpoly.GroundSet(tuple(f"s{j}" for j in range(k)))
    pair = gpoly.make_explicit(ground, p_table, b_table)

    # greedy vertex of the base polytope along a random element order
    perm = list(range(k))
    for i in range(k - 1, 0, -1):
        j = rng.randint(0, i)
        perm[i], perm[j] = perm[j], perm[i]
    anchor = [0] * k
    mask = 0
    for j in perm:
        prev = b_table[mask]
        mask |= 1 << j
        anchor[j] = b_table[mask] - prev

    if rng.randint(0, 3) > 0:
        lo = tuple(a - rng.randint(0, 2) for a in anchor)
        hi = tuple(a + rng.randint(0, 2) for a in anchor)
        pair = gpoly.intersect_box(pair, lo, hi)
    return pair, anchor


def gen_paramodular(seed: int, size: int) -> gpoly.BorderPair:
    """Random explicit paramodular pair on `size` elements."""
    if size < 1 or size > PARAMODULAR_SIZE_CAP:
        raise gpoly.GpolyError(
            f"paramodular generator supports sizes 1..{PARAMODULAR_SIZE_CAP}")
    pair, _anchor = _pair_with_anchor(SplitMix64(seed), size)
    if not gpoly.is_paramodular(pair):
        raise AssertionError("generator produced a non-paramodular pair")
    return pair


def gen_bdgpe(seed: int, size: int, regime: str = "both",
              max_edges: int = 3) -> rounding.BdgpeInstance:
    """Random feasible bounded-degree instance: hyperedge windows bracket
    the weighted sums of a witness integer point of the pair."""
    if regime not in rounding.REGIMES:
        raise ValueError(f"unknown regime {regime!r}")
    if size < 1 or size > PARAMODULAR_SIZE_CAP:
        raise gpoly.GpolyError(
            f"bounded-degree generator supports sizes 1..{PARAMODULAR_SIZE_CAP}")
    rng = SplitMix64(seed)
    pair, anchor = _pair_with_anchor(rng, size)
    costs = tuple(Fraction(rng.randint(-4, 6),
                           rng.choice((1, 1, 1, 2))) for _ in range(size))
    edges = []
    for _ in range(rng.randint(1, max_edges)):
        # bounds must be nonnegative, so resample members until the witness
        # sum is too
        for _ in range(40):
            width = rng.randint(1, size)
            members = rng.sample(size, width)
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
    return rounding.BdgpeInstance(
        pair=pair, costs=costs,
        constraints=rounding.HypergraphConstraints(tuple(edges)),
        regime=regime)
