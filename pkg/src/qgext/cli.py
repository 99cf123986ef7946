"""Command line entry point: ``qgext {rmatrix,verify,reps,classical,report}``."""

from __future__ import annotations

import argparse
import cmath
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

from . import __version__

RANK_CEILING = {"A": 4, "B": 5, "C": 6, "D": 6}
USAGE_ERROR = 2


class UsageError(Exception):
    pass


def load_schema() -> dict:
    return json.loads(resources.files("qgext").joinpath("report.schema.json").read_text())


def _envelope(command: str, config: dict, checks: list, extra: dict | None = None) -> dict:
    doc = {
        "tool": "qgext",
        "version": __version__,
        "command": command,
        "config": config,
        "checks": sorted(checks, key=lambda c: (c.get("series", ""), c.get("N", 0), c.get("variant", ""), c["name"])),
        "all_passed": all(c["passed"] for c in checks),
    }
    if extra:
        doc.update(extra)
    return doc


def _numeric(name: str, value: float, tol: float, **kw) -> dict:
    ok = bool(value <= tol)
    out = {"name": name, "verdict": "pass" if ok else "fail", "passed": ok, "value": float(value), "tol": tol}
    out.update(kw)
    return out


def _flag(name: str, ok: bool, **kw) -> dict:
    out = {"name": name, "verdict": "pass" if ok else "fail", "passed": bool(ok)}
    out.update(kw)
    return out


def _check_grid(series: str, N: int, unsafe: bool):
    from .rmatrix import Series
    try:
        S = Series(series, N)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not unsafe and N > RANK_CEILING[S.tag]:
        raise UsageError(f"{S.tag} with N = {N} is above the supported ceiling "
                         f"{RANK_CEILING[S.tag]} (use --unsafe-large)")
    return S


# rmatrix ----------------------------------------------------------------------

def run_rmatrix(args) -> dict:
    from .rmatrix import braid_check, build_R, k_polynomial_fit, ktensor_explicit, ktensor_from_rhat, rhat
    S = _check_grid(args.series, args.n, args.unsafe_large)
    t0 = time.perf_counter()
    R = build_R(S)
    Rh = rhat(R)
    checks = [_flag("braid", braid_check(Rh), series=S.tag, N=S.N, nnz=R.nnz())]
    if S.tag != "A":
        Kr = ktensor_from_rhat(Rh)
        checks.append(_flag("k-consistency", Kr == ktensor_explicit(S), series=S.tag, N=S.N))
        fit = k_polynomial_fit(Rh, Kr, S)
        checks.append(_flag("k-fit", fit.in_span, series=S.tag, N=S.N,
                            coefficients=[str(c) for c in (fit.a, fit.b, fit.c)] if fit.in_span else None,
                            unique=fit.unique, matches_displayed_prefactor=fit.matches_displayed))
    cfg = {"series": S.tag, "N": S.N}
    out = _envelope("rmatrix", cfg, checks, {"elapsed_ms": (time.perf_counter() - t0) * 1000})
    if args.dump:
        out["R"] = R.dump()
    return out


# verify -----------------------------------------------------------------------

def _battery_job(job):
    from .frtfamily import build_presentation
    from .idealcheck import DEFAULT_MAX_COLUMNS, battery
    tag, N, variant, bound, letters, unsafe = job
    P = build_presentation(tag, N, variant)
    mc = DEFAULT_MAX_COLUMNS * (8 if unsafe else 1)
    results = battery(P, bound, checks=letters, max_columns=mc)
    return [r.to_json() for r in results]


def _grid(max_n: int):
    from .frtfamily import VARIANTS, variant_allowed
    from .rmatrix import Series
    out = []
    for tag, sizes in (("A", range(2, max_n + 1)), ("C", range(2, max_n + 1, 2)),
                       ("D", range(2, max_n + 1, 2)), ("B", range(3, max_n + 1, 2))):
        for N in sizes:
            if N > RANK_CEILING[tag]:
                continue
            for v in VARIANTS:
                if variant_allowed(Series(tag, N), v):
                    out.append((tag, N, v))
    return out


def run_verify(args) -> dict:
    from .frtfamily import UnsupportedVariant, variant_allowed
    letters = args.checks or "abcdefghi"
    if args.all:
        targets = _grid(args.max_n)
    else:
        if not args.series or not args.n:
            raise UsageError("verify needs --series and --n (or --all)")
        S = _check_grid(args.series, args.n, args.unsafe_large)
        if not variant_allowed(S, args.variant):
            raise UsageError(f"variant {args.variant!r} is not defined for series {S.tag}")
        targets = [(S.tag, S.N, args.variant)]
    jobs = [(t, N, v, args.bound, c, args.unsafe_large) for t, N, v in targets for c in letters]
    checks = []
    try:
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(args.jobs) as ex:
                for res in ex.map(_battery_job, jobs):
                    checks.extend(res)
        else:
            for j in jobs:
                checks.extend(_battery_job(j))
    except UnsupportedVariant as exc:
        raise UsageError(str(exc)) from None
    cfg = {"bound": args.bound, "checks": letters,
           "targets": [{"series": t, "N": N, "variant": v} for t, N, v in targets]}
    return _envelope("verify", cfg, checks)


# reps -------------------------------------------------------------------------

def run_reps(args) -> dict:
    from . import repthm
    from .frtfamily import build_presentation
    tol = args.tol
    checks = []
    cfg = {"model": args.model, "q": args.q}
    if args.model == "shift-usp2":
        P = build_presentation("C", 2, "plain")
        sys_ = repthm.from_presentation(P)
        rep = repthm.shift_rep_usp2(args.trunc, args.q)
        checks.append(_numeric("shift.interior-residual", repthm.relation_residual(rep, sys_), 1e-12,
                               trunc=args.trunc))
        lam = cmath.exp(1j * math.pi / 3)
        tw = repthm.twist(rep, lam, sys_.k)
        checks.append(_numeric("shift.twisted-residual", repthm.relation_residual(tw, sys_), 1e-11))
        checks.append(_numeric("shift.norm-bound", repthm.norm_bound(tw) - 1, 1e-10))
        cfg["trunc"] = args.trunc
        return _envelope("reps", cfg, checks)
    S = _check_grid(args.series or "c", args.n or 2, args.unsafe_large)
    variant = args.variant or ("special" if S.tag == "A" else "plain")
    P = build_presentation(S, variant=variant)
    sys_ = repthm.from_presentation(P)
    N = S.N
    if S.tag == "A":
        ang = [cmath.exp(1j * args.theta * (k + 1)) for k in range(N - 1)]
        prod = 1
        for z in ang:
            prod *= z
        ang.append(1 / prod)
    else:
        ang = [1] * N
        for j in range(N // 2):
            ang[j] = cmath.exp(1j * args.theta * (j + 1))
            ang[N - 1 - j] = 1 / ang[j]
    base = repthm.torus_rep(S, angles=ang, qval=args.q, variant=variant)
    cfg.update(series=S.tag, N=N, variant=variant, theta=args.theta, lambda_grid=args.lambda_grid)
    checks.append(_numeric("torus.residual", repthm.relation_residual(base, sys_), tol))
    trace = []
    worst = 0.0
    for g in range(args.lambda_grid):
        lam = cmath.exp(2j * math.pi * g / args.lambda_grid)
        tw = repthm.twist(base, lam, sys_.k)
        err = repthm.roundtrip_error(base, lam, sys_.k)
        res = repthm.relation_residual(tw, sys_)
        worst = max(worst, err)
        lam2, _ = repthm.untwist(tw, sys_.k)
        trace.append({"lambda": [lam.real, lam.imag], "recovered": [lam2.real, lam2.imag],
                      "roundtrip": err, "twisted_residual": res})
        checks.append(_numeric(f"twist.residual[{g:02d}]", res, tol))
    checks.append(_numeric("twist.roundtrip", worst, 1e-10))
    checks.append(_flag("schur.commutant-irreducible", repthm.commutant_dim(base) == 1))
    doubled = repthm.direct_sum(base, base)
    checks.append(_flag("schur.commutant-doubled", repthm.commutant_dim(doubled) == 4))
    bad = repthm.direct_sum(repthm.twist(base, 1, sys_.k), repthm.twist(base, 1j, sys_.k))
    try:
        repthm.untwist(bad, sys_.k)
        rejected = False
    except ValueError:
        rejected = True
    checks.append(_flag("schur.nonscalar-detected", rejected))
    return _envelope("reps", cfg, checks, {"trace": trace if args.demo else trace[:0]})


# classical --------------------------------------------------------------------

def run_classical(args) -> dict:
    from . import classical
    g = args.group
    if g not in classical.GROUPS:
        raise UsageError(f"unknown group {g!r}; choose from {', '.join(classical.GROUPS)}")
    tol = args.tol
    checks = []
    cfg = {"group": g, "n": args.n, "trials": args.trials, "seed": args.seed, "size": args.size}
    sw = classical.display_sweep(g, args.n, args.trials, args.seed, tol, size=args.size)
    checks.append(_flag("display", sw["passed"], **{k: v for k, v in sw.items() if k.startswith("max")}))
    if args.branch:
        if g != "sot":
            raise UsageError("--branch applies to the sot group")
        pos = 0
        for k in range(args.trials):
            s = classical.sample(g, args.n, seed=(args.seed, k))
            lam, _ = classical.characterize(s.matrix, "C")
            pos += classical.branch_check(s.matrix, lam) == "positive"
        checks.append(_flag("branch.positive", pos == args.trials, positive=pos, trials=args.trials))
    if args.closure:
        cl = classical.closure_check(g, args.n, args.trials, args.seed, 1e-8, size=args.size)
        checks.append(_flag("closure", cl["passed"], **{k: v for k, v in cl.items() if k.startswith("max")}))
    return _envelope("classical", cfg, checks)


# report -----------------------------------------------------------------------

def run_report(args) -> dict:
    import jsonschema
    schema = load_schema()
    checks = []
    for path in args.files:
        with open(path) as fh:
            doc = json.load(fh)
        try:
            jsonschema.validate(doc, schema)
            ok = True
            msg = ""
        except jsonschema.ValidationError as exc:
            ok = False
            msg = exc.message
        checks.append(_flag(f"schema:{path}", ok, detail=msg))
        if ok:
            checks.append(_flag(f"passed:{path}", doc["all_passed"], command=doc["command"],
                                total=len(doc["checks"]),
                                failing=[c["name"] for c in doc["checks"] if not c["passed"]][:20]))
    return _envelope("report", {"files": list(args.files)}, checks)


# plumbing ---------------------------------------------------------------------

def _text(doc: dict) -> str:
    lines = [f"{doc['command']}: {'PASS' if doc['all_passed'] else 'FAIL'}"]
    for c in doc["checks"]:
        where = f"{c.get('series', '')}{c.get('N', '')} {c.get('variant', '')}".strip()
        extra = ""
        if "value" in c:
            extra = f" value={c['value']:.3e} tol={c['tol']:.0e}"
        elif c.get("dimensions"):
            extra = f" bound={c.get('bound')} dims={c['dimensions'][0]}x{c['dimensions'][1]}"
        wit = f" witness: {c['witness']}" if c.get("witness") else ""
        lines.append(f"  {c['verdict']:<28} {c['name']:<28} {where}{extra}{wit}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of text")
    common.add_argument("--out", help="also write the JSON report to this path")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent checks")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--unsafe-large", action="store_true",
                        help="allow sizes above the rank ceiling and widen memory budgets")

    p = argparse.ArgumentParser(prog="qgext", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("rmatrix", parents=[common], help="build R, check the braid relation and K")
    r.add_argument("--series", required=True)
    r.add_argument("--n", type=int, required=True, help="matrix size N")
    r.add_argument("--dump", action="store_true", help="include the R entries")

    v = sub.add_parser("verify", parents=[common], help="run the verification battery")
    v.add_argument("--series")
    v.add_argument("--n", type=int, help="matrix size N")
    v.add_argument("--variant", default="plain")
    v.add_argument("--bound", type=int, default=3)
    v.add_argument("--checks", help="subset of the letters abcdefghi")
    v.add_argument("--all", action="store_true", help="every allowed (series, N, variant) up to --max-n")
    v.add_argument("--max-n", type=int, default=4)

    rp = sub.add_parser("reps", parents=[common], help="twisted representations and residuals")
    rp.add_argument("--model", choices=["torus", "shift-usp2"], default="torus")
    rp.add_argument("--series")
    rp.add_argument("--n", type=int)
    rp.add_argument("--variant")
    rp.add_argument("--theta", type=float, default=0.3)
    rp.add_argument("--lambda-grid", type=int, default=16)
    rp.add_argument("--trunc", type=int, default=10)
    rp.add_argument("--q", type=float, default=0.5)
    rp.add_argument("--demo", action="store_true", help="include the roundtrip trace")

    c = sub.add_parser("classical", parents=[common], help="classical group sweeps")
    c.add_argument("--group", required=True)
    c.add_argument("--n", type=int, required=True, help="rank n")
    c.add_argument("--size", type=int, help="matrix size for o, ot, so (default 2n)")
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--branch", action="store_true")
    c.add_argument("--closure", action="store_true")

    rep = sub.add_parser("report", parents=[common], help="validate and summarise saved reports")
    rep.add_argument("files", nargs="+")
    return p


RUNNERS = {"rmatrix": run_rmatrix, "verify": run_verify, "reps": run_reps,
           "classical": run_classical, "report": run_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = RUNNERS[args.command](args)
    except UsageError as exc:
        print(f"qgext {args.command}: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2, default=str)
    print(json.dumps(doc, indent=2, default=str) if args.json else _text(doc))
    return 0 if doc["all_passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
