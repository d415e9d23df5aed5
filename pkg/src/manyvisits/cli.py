"""Command-line interface: generate, solve, verify, and benchmark.

Machine-readable JSON goes to stdout on every exit path; human-readable
tables go to stderr and can be silenced with --quiet.  Exit codes:
0 success, 1 verification failed, 2 usage or malformed input, 3 infeasible
instance, 4 budget or size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import approx, files, gpoly, instances, lp, mvtsp, oracles, rounding

CODE_OK = 0
CODE_VERIFY_FAIL = 1
CODE_USAGE = 2
CODE_INFEASIBLE = 3
CODE_BUDGET = 4

RATIO_BOUNDS = {"apx15": Fraction(3, 2), "apx25": Fraction(5, 2)}


class _Parser(argparse.ArgumentParser):
    """argparse that keeps the JSON-on-stdout contract on usage errors."""

    def error(self, message):
        print(json.dumps({"error": message}))
        self.exit(CODE_USAGE, f"error: {message}\n")


def _emit(obj, quiet, lines=()):
    sys.stdout.write(files.canonical_dumps(obj))
    if not quiet:
        for line in lines:
            print(line, file=sys.stderr)


def _ratio_fields(cost, optimum):
    ratio = Fraction(cost) / optimum if optimum > 0 else None
    if ratio is None:
        return {"oracle_cost": files.format_rational(optimum)}
    return {
        "oracle_cost": files.format_rational(optimum),
        "ratio": files.format_rational(ratio),
        "ratio_decimal": float(ratio),
    }


def _budget_from(args) -> oracles.OracleBudget:
    return oracles.OracleBudget(
        max_ground=args.budget_ground,
        max_vertices=args.budget_vertices,
        max_total_visits=args.budget_visits,
        max_nodes=args.budget_nodes)


def _add_budget_flags(sub):
    d = oracles.DEFAULT_BUDGET
    sub.add_argument("--budget-ground", type=int, default=d.max_ground)
    sub.add_argument("--budget-vertices", type=int, default=d.max_vertices)
    sub.add_argument("--budget-visits", type=int, default=d.max_total_visits)
    sub.add_argument("--budget-nodes", type=int, default=d.max_nodes)


def cmd_gen(args) -> int:
    if args.kind == "mvtsp":
        cfg = instances.GeneratorConfig(
            seed=args.seed, n=args.n, r_lo=args.r_min, r_hi=args.r_max,
            cost_lo=args.cost_min, cost_hi=args.cost_max,
            loop_rule=args.loop_rule)
        obj = files.mvtsp_to_obj(instances.gen_metric_mvtsp(cfg))
    else:
        inst = instances.gen_bdgpe(args.seed, args.size,
                                   files.REGIME_NAMES[args.regime])
        obj = files.bdgpe_to_obj(inst)
    digest = files.digest_of(obj)
    if args.output:
        files.save_obj(args.output, obj)
        _emit({"written": args.output, "digest": digest}, args.quiet,
              [f"wrote {args.kind} instance to {args.output} ({digest[:12]})"])
    else:
        _emit(obj, True)
    return CODE_OK


def _violation_rows(report):
    return [{"achieved": out.achieved, "f": out.lower, "g": out.upper,
             "violation": out.violation} for out in report]


def _solve_mvtsp(args, inst, obj) -> int:
    digest = files.digest_of(obj)
    budget = _budget_from(args)
    t0 = time.perf_counter()
    extra = {}
    if args.alg == "apx15":
        rep = approx.apx15_report(inst)
        z, cost = rep.tour, rep.cost
        extra = {
            "lp_optimum": files.format_rational(rep.rounding_result.lp_optimum),
            "iterations": rep.rounding_result.iterations,
            "violations": _violation_rows(rep.rounding_result.report),
        }
    elif args.alg == "apx25":
        z = approx.apx25(inst)
        cost = mvtsp.tour_cost(inst, z)
    elif args.alg == "exact":
        z, cost = oracles.exact_mvtsp(inst, budget)
    else:
        print(json.dumps({"error": f"algorithm {args.alg} needs a "
                                   "bounded-degree instance"}))
        return CODE_USAGE
    elapsed = time.perf_counter() - t0
    feasible = mvtsp.check_feasible(inst, z)
    report = {
        "instance_digest": digest,
        "algorithm": args.alg,
        "cost": files.format_rational(cost),
        "cost_decimal": float(cost),
        "feasible": feasible,
        "wall_time_s": elapsed,
        **extra,
    }
    if args.oracle and args.alg != "exact":
        _zopt, opt = oracles.exact_mvtsp(inst, budget)
        report.update(_ratio_fields(cost, opt))
    if args.output:
        files.save_obj(args.output, files.tour_to_obj(digest, z))
    lines = [f"{args.alg} on {inst.n} vertices: cost {report['cost']} "
             f"feasible={feasible} ({elapsed:.3f}s)"]
    if "ratio" in report:
        lines.append(f"oracle ratio {report['ratio']} "
                     f"(= {report['ratio_decimal']:.4f})")
    _emit(report, args.quiet, lines)
    return CODE_OK if feasible else CODE_VERIFY_FAIL


def _solve_bdgpe(args, inst, obj) -> int:
    if args.output:
        print(json.dumps({"error": "solution files hold tours; bounded-degree "
                                   "runs report on stdout only"}))
        return CODE_USAGE
    digest = files.digest_of(obj)
    if args.regime:
        inst = rounding.BdgpeInstance(
            pair=inst.pair, costs=inst.costs, constraints=inst.constraints,
            regime=files.REGIME_NAMES[args.regime])
    t0 = time.perf_counter()
    if args.alg == "exact":
        got = oracles.exact_bdgpe(inst, _budget_from(args))
        elapsed = time.perf_counter() - t0
        report = {
            "instance_digest": digest,
            "algorithm": "exact",
            "feasible_point": None if got is None else list(got[0]),
            "cost": None if got is None else files.format_rational(got[1]),
            "wall_time_s": elapsed,
        }
        _emit(report, args.quiet,
              ["no integer point meets every bound" if got is None else
               f"exact optimum {report['cost']}"])
        return CODE_OK
    if args.alg != "bdgpe":
        print(json.dumps({"error": f"algorithm {args.alg} needs a tour "
                                   "instance"}))
        return CODE_USAGE
    res = rounding.solve_bdgpe(inst)
    elapsed = time.perf_counter() - t0
    cost = sum((c * v for c, v in zip(inst.costs, res.z)), Fraction(0))
    report = {
        "instance_digest": digest,
        "algorithm": "bdgpe",
        "regime": files.REGIME_FLAGS[inst.regime],
        "z": list(res.z),
        "cost": files.format_rational(cost),
        "cost_decimal": float(cost),
        "lp_optimum": files.format_rational(res.lp_optimum),
        "delta": res.delta,
        "iterations": res.iterations,
        "violations": _violation_rows(res.report),
        "wall_time_s": elapsed,
    }
    worst = max((abs(r["violation"]) for r in report["violations"]), default=0)
    _emit(report, args.quiet,
          [f"bounded-degree element: cost {report['cost']} = LP {report['lp_optimum']} + slack, "
           f"worst |violation| {worst}, {res.iterations} rounds ({elapsed:.3f}s)"])
    return CODE_OK


def cmd_solve(args) -> int:
    inst, obj = files.load_instance(args.instance)
    if isinstance(inst, mvtsp.MvtspInstance):
        return _solve_mvtsp(args, inst, obj)
    return _solve_bdgpe(args, inst, obj)


def cmd_verify(args) -> int:
    inst, obj = files.load_instance(args.instance)
    digest = files.digest_of(obj)
    claimed_digest, z = files.obj_to_tour(files.load_obj(args.solution))
    if claimed_digest != digest:
        _emit({"verified": False, "reason": "digest mismatch",
               "instance_digest": digest, "solution_digest": claimed_digest},
              args.quiet, ["solution was produced for a different instance"])
        return CODE_USAGE
    if not isinstance(inst, mvtsp.MvtspInstance):
        _emit({"verified": False, "reason": "solutions are tours; instance is "
                                            "bounded-degree"}, args.quiet)
        return CODE_USAGE
    deg = mvtsp.degrees(inst.n, z)
    for v in range(inst.n):
        if deg[v] != 2 * inst.requests[v]:
            _emit({"verified": False, "reason": "degree mismatch", "vertex": v,
                   "degree": deg[v], "expected": 2 * inst.requests[v]},
                  args.quiet,
                  [f"vertex {v} has degree {deg[v]}, needs {2 * inst.requests[v]}"])
            return CODE_VERIFY_FAIL
    if not mvtsp.support_connects(inst.n, z):
        _emit({"verified": False, "reason": "support disconnected"}, args.quiet,
              ["tour support does not connect all vertices"])
        return CODE_VERIFY_FAIL
    cost = mvtsp.tour_cost(inst, z)
    report = {"verified": True, "instance_digest": digest,
              "cost": files.format_rational(cost), "cost_decimal": float(cost)}
    lines = [f"feasible tour of cost {report['cost']}"]
    if args.alg:
        bound = RATIO_BOUNDS[args.alg]
        try:
            _zopt, opt = oracles.exact_mvtsp(inst, _budget_from(args))
        except oracles.BudgetExceeded:
            report["ratio"] = None
            lines.append("oracle beyond budget; ratio not checked")
        else:
            report.update(_ratio_fields(cost, opt))
            report["bound"] = files.format_rational(bound)
            ok = opt == 0 or Fraction(cost) / opt <= bound
            lines.append(f"ratio {report.get('ratio')} vs bound {report['bound']}")
            if not ok:
                report["verified"] = False
                _emit(report, args.quiet, lines + ["ratio bound violated"])
                return CODE_VERIFY_FAIL
    _emit(report, args.quiet, lines)
    return CODE_OK


def cmd_bench(args) -> int:
    ns = [int(x) for x in args.n_list.split(",") if x]
    budget = _budget_from(args)
    rows = []
    for n in ns:
        for seed in range(args.seeds):
            cfg = instances.GeneratorConfig(seed=seed, n=n, r_hi=args.r_max)
            inst = instances.gen_metric_mvtsp(cfg)
            t0 = time.perf_counter()
            if args.alg == "apx15":
                rep = approx.apx15_report(inst)
                z, cost = rep.tour, rep.cost
                iters = rep.rounding_result.iterations
                worst_violation = max(
                    (abs(o.violation) for o in rep.rounding_result.report),
                    default=0)
            else:
                z = approx.apx25(inst)
                cost = mvtsp.tour_cost(inst, z)
                iters = 0
                worst_violation = 0
            elapsed = time.perf_counter() - t0
            row = {"n": n, "seed": seed,
                   "cost": files.format_rational(cost),
                   "feasible": mvtsp.check_feasible(inst, z),
                   "iterations": iters,
                   "max_violation": worst_violation,
                   "wall_time_s": elapsed}
            try:
                _zo, opt = oracles.exact_mvtsp(inst, budget)
                row.update(_ratio_fields(cost, opt))
            except oracles.BudgetExceeded:
                pass
            rows.append(row)
    summary = {}
    for n in ns:
        ratios = [Fraction(r["ratio"]) for r in rows
                  if r["n"] == n and "ratio" in r]
        cell = {"cells": sum(1 for r in rows if r["n"] == n),
                "all_feasible": all(r["feasible"] for r in rows if r["n"] == n)}
        if ratios:
            cell["worst_ratio"] = files.format_rational(max(ratios))
            cell["mean_ratio"] = files.format_rational(
                sum(ratios, Fraction(0)) / len(ratios))
            cell["worst_ratio_decimal"] = float(max(ratios))
        summary[str(n)] = cell
    out = {"algorithm": args.alg, "rows": rows, "summary": summary}
    lines = [f"{args.alg} sweep: n in {ns}, {args.seeds} seeds each"]
    for n in ns:
        cell = summary[str(n)]
        lines.append(f"  n={n}: {cell['cells']} cells, feasible={cell['all_feasible']}"
                     + (f", worst ratio {cell.get('worst_ratio')}"
                        if "worst_ratio" in cell else ""))
    _emit(out, args.quiet, lines)
    return CODE_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="manyvisits",
                     description="exact-arithmetic many-visits tour toolkit")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress the human-readable channel")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a seeded instance file")
    gensub = gen.add_subparsers(dest="kind", required=True)
    gm = gensub.add_parser("mvtsp")
    gm.add_argument("--n", type=int, required=True)
    gm.add_argument("--seed", type=int, default=0)
    gm.add_argument("--r-min", type=int, default=1)
    gm.add_argument("--r-max", type=int, default=4)
    gm.add_argument("--cost-min", type=int, default=1)
    gm.add_argument("--cost-max", type=int, default=9)
    gm.add_argument("--loop-rule", choices=("max", "uniform"), default="max")
    gm.add_argument("-o", "--output")
    gb = gensub.add_parser("bdgpe")
    gb.add_argument("--size", type=int, required=True)
    gb.add_argument("--seed", type=int, default=0)
    gb.add_argument("--regime", choices=("both", "lower", "upper"),
                    default="both")
    gb.add_argument("-o", "--output")

    so = sub.add_parser("solve", help="run an algorithm on an instance file")
    so.add_argument("instance")
    so.add_argument("--alg", choices=("apx15", "apx25", "bdgpe", "exact"),
                    default="apx15")
    so.add_argument("--regime", choices=("both", "lower", "upper"))
    so.add_argument("--oracle", action="store_true",
                    help="also compute the exact optimum and the ratio")
    so.add_argument("-o", "--output", help="write the tour solution file")
    _add_budget_flags(so)

    ve = sub.add_parser("verify", help="recheck a solution file")
    ve.add_argument("instance")
    ve.add_argument("solution")
    ve.add_argument("--alg", choices=("apx15", "apx25"),
                    help="also enforce this algorithm's ratio bound")
    _add_budget_flags(ve)

    be = sub.add_parser("bench", help="seeded sweep with oracle ratios")
    be.add_argument("--alg", choices=("apx15", "apx25"), default="apx15")
    be.add_argument("--n-list", default="3,4,5")
    be.add_argument("--seeds", type=int, default=30)
    be.add_argument("--r-max", type=int, default=4)
    _add_budget_flags(be)

    return parser


_HANDLERS = {"gen": cmd_gen, "solve": cmd_solve, "verify": cmd_verify,
             "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (rounding.Infeasible, lp.Infeasible) as exc:
        print(json.dumps({"error": str(exc)}))
        print(f"infeasible: {exc}", file=sys.stderr)
        return CODE_INFEASIBLE
    except (oracles.BudgetExceeded, gpoly.GroundSetTooLarge,
            approx.SubsetTooLarge) as exc:
        print(json.dumps({"error": str(exc)}))
        print(f"budget: {exc}", file=sys.stderr)
        return CODE_BUDGET
    except (files.FormatError, ValueError, gpoly.GpolyError,
            rounding.RoundingError, mvtsp.MvtspError, lp.LpError) as exc:
        print(json.dumps({"error": str(exc)}))
        print(f"error: {exc}", file=sys.stderr)
        return CODE_USAGE


if __name__ == "__main__":
    sys.exit(main())
