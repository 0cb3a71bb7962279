"""Command-line entry point: bpb-market <command> ...

Exit codes: 0 success / pass, 1 a check or criterion failed, 2 bad usage or input.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import experiments
from .equilibrium import (additive_equilibrium, approx_ratio, construct_eq_unweighted,
                          construct_eq_weighted, opt_with_costs, verify_eps_equilibrium)
from .generate import FAMILIES, GeneratorSpec, generate_instance
from .learning import BACKEND, run_dynamics
from .model import InstanceError, as_scalar, fmt, load_instance, load_prices, save_instance
from .selection import BY_COST_RATIO, BY_INDEX, Explicit, get_rule

RULES = ("bpb", "knapsack", "skip", "opt")


class UsageError(Exception):
    pass


def _frac(s):
    try:
        return as_scalar(s)
    except (ValueError, TypeError, InstanceError) as e:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from e


def _read(path):
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")


def _instance(path):
    return load_instance(_read(path))


def _prices(path, n):
    return load_prices(_read(path), n)


def _tiebreak(spec, n=None):
    if spec in (None, "cost-ratio"):
        return BY_COST_RATIO
    if spec == "index":
        return BY_INDEX
    try:
        perm = [int(x) - 1 for x in spec.split(",")]
    except ValueError:
        raise UsageError(f"bad --tiebreak {spec!r}: use cost-ratio, index or a comma list of ids")
    return Explicit(perm)


def _emit(doc, out=None):
    text = json.dumps(doc, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---- commands

def cmd_generate(a):
    spec = GeneratorSpec(n=a.n, lam=a.lam, m=a.m, budget=a.budget, vmin=a.vmin, vmax=a.vmax,
                         family=a.family, k=a.k, cost_den=a.cost_den,
                         integer_values=not a.fractional_values)
    data = save_instance(generate_instance(spec, a.seed))
    if a.out:
        Path(a.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode())
    return 0


def cmd_select(a):
    inst = _instance(a.instance)
    p = _prices(a.prices, inst.n)
    res = get_rule(a.rule)(inst, p, _tiebreak(a.tiebreak))
    doc = res.to_json()
    doc["value"] = fmt(inst.value_of(res.selected))
    _emit(doc, a.out)
    return 0


def cmd_construct(a):
    inst = _instance(a.instance)
    tb = _tiebreak(a.tiebreak)
    if a.algo == "additive":
        eq = additive_equilibrium(inst, a.eps, tb)
    elif a.algo == "unweighted":
        eq = construct_eq_unweighted(inst, tb)
    else:
        eq = construct_eq_weighted(inst, tb)
    _emit(eq.to_json(with_trace=a.trace), a.out)
    return 0


def cmd_verify(a):
    inst = _instance(a.instance)
    p = _prices(a.prices, inst.n)
    rep = verify_eps_equilibrium(inst, p, a.eps, a.rule, _tiebreak(a.tiebreak))
    _emit(rep.to_json(), a.out)
    return 0 if rep.passed else 1


def cmd_approx(a):
    inst = _instance(a.instance)
    p = _prices(a.prices, inst.n)
    S, opt = opt_with_costs(inst)
    r = approx_ratio(inst, p, a.rule, _tiebreak(a.tiebreak), opt=opt)
    _emit({"rule": a.rule, "ratio": fmt(r), "decimal": float(r), "opt": fmt(opt),
           "opt_set": sorted(i + 1 for i in S)}, a.out)
    return 0


def _run(inst, a, delta, seed, target):
    tr = run_dynamics(inst, delta, a.rounds, a.t0, a.c0, seed, tb=_tiebreak(a.tiebreak),
                      strict=a.strict_assumptions, gross=a.gross, use_theory_t0=a.theory_t0)
    return tr, tr.summary(target, a.window)


def cmd_simulate(a):
    inst = _instance(a.instance)
    target = _prices(a.target, inst.n) if a.target else None
    out = Path(a.out) if a.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    runs = []
    for s in range(a.seed, a.seed + a.seeds):
        tr, summ = _run(inst, a, a.delta, s, target)
        if out:
            with open(out / f"trace_seed{s}.csv", "w", newline="") as fh:
                tr.write_csv(fh)
        runs.append(summ)
    doc = {"instance": str(a.instance), "runs": runs}
    if target is not None:
        doc["converged"] = sum(r["converged"] for r in runs)
    _emit(doc, out / "summary.json" if out else None)
    if target is not None and doc["converged"] < len(runs):
        return 1
    return 0


def cmd_sweep(a):
    inst = _instance(a.instance)
    target = _prices(a.target, inst.n) if a.target else None
    fh = open(a.out, "w", newline="") if a.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["delta", "seed", "rounds", "t0", "c0", "modal_prices", "selection_rate",
                    "max_regret", "converged"])
        for d in a.deltas:
            for s in range(a.seed, a.seed + a.seeds):
                _, summ = _run(inst, a, d, s, target)
                w.writerow([fmt(d), s, summ["rounds"], summ["t0"], summ["c0"],
                            " ".join(summ["modal_prices"]),
                            " ".join(f"{x:.6f}" for x in summ["selection_rate"]),
                            f"{max(summ['regret']):.6g}",
                            "" if target is None else int(summ["converged"])])
    finally:
        if a.out:
            fh.close()
    return 0


def cmd_suite(a):
    only = a.only.split(",") if a.only else None
    if only:
        bad = [k for k in only if k not in experiments.KEYS]
        if bad:
            raise UsageError(f"unknown criteria {bad}; choose from {list(experiments.KEYS)}")
    summary = experiments.paper_suite(a.out, a.quick, a.seed, a.workers, a.inject_fault, only)
    for k, c in summary["criteria"].items():
        print(f"{k} {'PASS' if c['passed'] else 'FAIL'}  {c['title']}: {c['detail'].get('headline', '')}")
    if summary["failed"]:
        print(f"failed: {', '.join(summary['failed'])}")
        return 1
    return 0


# ---- parser

def _deltas(s):
    try:
        return [as_scalar(x) for x in s.split(",") if x]
    except (ValueError, InstanceError) as e:
        raise argparse.ArgumentTypeError(f"bad delta list {s!r}") from e


def build_parser():
    ap = argparse.ArgumentParser(prog="bpb-market",
                                 description="Budgeted module markets: greedy selection, "
                                             "equilibrium prices and learning dynamics.")
    ap.add_argument("--version", action="version", version=f"%(prog)s (kernel: {BACKEND})")
    sub = ap.add_subparsers(dest="command", required=True)

    def tiebreak(p):
        p.add_argument("--tiebreak", default="cost-ratio",
                       help="cost-ratio (default), index, or a comma list of module ids")

    g = sub.add_parser("generate", help="write a seeded random instance as JSON")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--lam", type=_frac, default=Fraction(1, 5), help="max cost / budget")
    g.add_argument("--m", type=_frac, default=Fraction(1, 100), help="cost floor")
    g.add_argument("--budget", type=_frac, default=Fraction(1))
    g.add_argument("--vmin", type=_frac, default=Fraction(1))
    g.add_argument("--vmax", type=_frac, default=Fraction(10))
    g.add_argument("--family", choices=FAMILIES, default="free")
    g.add_argument("--k", type=int, help="rank of a uniform matroid")
    g.add_argument("--cost-den", type=int, default=10_000)
    g.add_argument("--fractional-values", action="store_true")
    g.add_argument("--seed", required=True)
    g.add_argument("--out")
    g.set_defaults(fn=cmd_generate)

    s = sub.add_parser("select", help="run a selection rule at given prices")
    s.add_argument("--rule", choices=RULES, default="bpb")
    s.add_argument("--instance", required=True)
    s.add_argument("--prices", required=True)
    s.add_argument("--out")
    tiebreak(s)
    s.set_defaults(fn=cmd_select)

    c = sub.add_parser("construct-eq", help="compute equilibrium prices")
    c.add_argument("--algo", choices=("additive", "unweighted", "weighted"), required=True)
    c.add_argument("--instance", required=True)
    c.add_argument("--eps", type=_frac, default=Fraction(0), help="slack for the additive construction")
    c.add_argument("--trace", action="store_true")
    c.add_argument("--out")
    tiebreak(c)
    c.set_defaults(fn=cmd_construct)

    v = sub.add_parser("verify-eq", help="check a price vector is an eps-equilibrium")
    v.add_argument("--instance", required=True)
    v.add_argument("--prices", required=True)
    v.add_argument("--eps", type=_frac, default=Fraction(0))
    v.add_argument("--rule", choices=RULES, default="bpb")
    v.add_argument("--out")
    tiebreak(v)
    v.set_defaults(fn=cmd_verify)

    r = sub.add_parser("approx", help="value of a rule at given prices relative to OPT at cost")
    r.add_argument("--instance", required=True)
    r.add_argument("--prices", required=True)
    r.add_argument("--rule", choices=RULES, default="bpb")
    r.add_argument("--out")
    tiebreak(r)
    r.set_defaults(fn=cmd_approx)

    def dynamics(p):
        p.add_argument("--instance", required=True)
        p.add_argument("--rounds", type=int, required=True)
        p.add_argument("--t0", type=int, help="last round of phase 1 (default rounds // 3)")
        p.add_argument("--theory-t0", action="store_true", help="use ceil(n^2 / delta^22) as t0")
        p.add_argument("--c0", type=float, default=1.0, help="learning-rate scale")
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--seeds", type=int, default=1)
        p.add_argument("--strict-assumptions", action="store_true")
        p.add_argument("--gross", action="store_true", help="pay the price instead of the margin")
        p.add_argument("--target", help="prices file for the convergence verdict")
        p.add_argument("--window", type=int, help="trailing window (default rounds // 10)")
        p.add_argument("--out")
        tiebreak(p)

    m = sub.add_parser("simulate", help="run the learning dynamics")
    m.add_argument("--delta", type=_frac, required=True)
    dynamics(m)
    m.set_defaults(fn=cmd_simulate)

    w = sub.add_parser("sweep", help="one summary row per (delta, seed)")
    w.add_argument("--deltas", type=_deltas, required=True, help="comma list, e.g. 1/10,1/20")
    dynamics(w)
    w.set_defaults(fn=cmd_sweep)

    ps = sub.add_parser("paper-suite", help="run acceptance criteria A1-A8")
    ps.add_argument("--out", required=True)
    ps.add_argument("--quick", action="store_true", help="reduced sizes (marked smoke)")
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--workers", type=int, help="default: $BPB_MARKET_WORKERS or 1")
    ps.add_argument("--only", help="comma list of criteria, e.g. A1,A3")
    ps.add_argument("--inject-fault", choices=experiments.FAULTS)
    ps.set_defaults(fn=cmd_suite)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    a = ap.parse_args(argv)
    try:
        return a.fn(a)
    except (UsageError, InstanceError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
