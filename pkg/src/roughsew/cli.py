"""Command line interface: ``roughsew {sew,extend,verify,demo,gen-path,gen-germ}``.

Exit codes: 0 when every check passes, 1 when an invariant fails, 2 on usage
or I/O errors.  JSON reports list checks sorted by id and echo the effective
tolerance.  ``ROUGHSEW_TOL`` overrides the default tolerance.
"""
import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .grid import DyadicGrid, delta2, norm_c1_holder, norm_c2, norm_c3
from .paths import (
    Coboundary,
    LogGerm,
    MidpointDisplacement,
    PowerGerm,
    PowerPath,
    SmoothPoly,
    Weierstrass,
    YoungProduct,
    generate_path,
)
from .roughpath import (
    AlphaReciprocalInteger,
    HolderFamily,
    chen_sup,
    extend,
    extend_above_n,
    holder_report,
    levels_for,
)
from .sewing import (
    ControlFn,
    NotConverging,
    SewingError,
    _vbar_series,
    constant_c,
    log_weighted_norm,
    riemann_refinements,
    sew_high,
    sew_low,
    sewing_report,
    vbar,
)
from .shuffle import ShuffleAlgebra, TruncationExceeded, necklace_count, parse_word, word_str

DEFAULT_TOL = 1e-9
CONSTANT_GAMMAS = (0.3, 0.5, 0.8, 1.0, 1.3, 2.0)


class UsageError(Exception):
    pass


def default_tol() -> float:
    raw = os.environ.get("ROUGHSEW_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"ROUGHSEW_TOL={raw!r} is not a number")
    if not tol > 0:
        raise UsageError("ROUGHSEW_TOL must be positive")
    return tol


def check(cid, measured, bound, passed=None, **detail):
    """One report entry; an infinite bound (finiteness checks) is written as null."""
    measured = float(measured)
    ok = measured <= bound if passed is None else passed
    shown = float(bound) if math.isfinite(bound) else None
    entry = {"id": cid, "measured": measured if math.isfinite(measured) else None, "bound": shown, "pass": bool(ok)}
    entry.update(detail)
    return entry


def finish(command, checks, tol, args, **extra):
    checks = sorted(checks, key=lambda c: c["id"])
    report = {"command": command, "tolerance": tol, "checks": checks, "pass": all(c["pass"] for c in checks)}
    report.update(extra)
    if getattr(args, "report", None):
        io.dump_json(report, args.report)
    else:
        sys.stdout.write(io.dump_json(report))
    for c in checks:
        if not c["pass"]:
            print(f"FAIL {c['id']}: measured {c['measured']} exceeds bound {c['bound']}", file=sys.stderr)
    return 0 if report["pass"] else 1


# --------------------------------------------------------------------------
# sew


def cmd_sew(args, tol):
    A = io.read_grid2(args.germ)
    if args.level is not None:
        if args.level > A.grid.level:
            raise UsageError(f"germ is on level {A.grid.level}, cannot refine to {args.level}")
        A = A.restrict(A.grid.at_level(args.level))
    gamma = args.gamma
    if args.method == "low" or (args.method == "auto" and gamma <= 1):
        result = sew_low(A, gamma)
    else:
        if gamma <= 1:
            raise UsageError("--method high needs gamma > 1")
        result = sew_high(A, gamma)
    io.write_grid1(result.I, args.output)
    if args.remainder:
        io.write_grid2(result.R, args.remainder)
    rep = sewing_report(A, gamma, R=result.R)
    scale = max(1.0, float(np.abs(A.values).max()))
    # delta R must reproduce delta A, i.e. A - R must be a coboundary
    identity = norm_c3(delta2(A - result.R), 1.0)
    checks = [
        check("sewing.identity", identity, tol * scale),
        check(
            "sewing.bound",
            rep.output_c2_norm,
            rep.bound_constant * rep.input_c3_norm + tol * scale,
        ),
    ]
    return finish("sew", checks, tol, args, sewing=rep.to_dict())


# --------------------------------------------------------------------------
# extend


def _parse_perturb(text):
    if "=" not in text:
        raise UsageError(f"--perturb expects WORD=FILE, got {text!r}")
    word, path = text.split("=", 1)
    try:
        return parse_word(word), path
    except ValueError:
        raise UsageError(f"bad word {word!r} in --perturb")


def _on_level(fn, level):
    if fn.grid.level < level:
        raise UsageError(f"input on level {fn.grid.level} is coarser than --level {level}")
    return fn.restrict(fn.grid.at_level(level))


def cmd_extend(args, tol):
    try:
        N = levels_for(args.alpha)
    except AlphaReciprocalInteger as exc:
        raise UsageError(str(exc))
    d = args.d if args.d is not None else len(args.path)
    if len(args.path) != d:
        raise UsageError(f"--d {d} needs exactly {d} --path files, got {len(args.path)}")
    paths = [io.read_grid1(p) for p in args.path]
    level = args.level if args.level is not None else min(p.grid.level for p in paths)
    paths = [_on_level(p, level).rebased() for p in paths]
    stored = max(N, args.stored_level or N)
    algebra = ShuffleAlgebra(d, max(stored, 2))
    comps = {(i + 1,): p for i, p in enumerate(paths)}
    for text in args.perturb:
        h, file = _parse_perturb(text)
        if h not in algebra.lyndon_basis(N) or len(h) < 2:
            raise UsageError(f"--perturb word {word_str(h)} is not a Lyndon word of degree 2..{N}")
        comps[h] = _on_level(io.read_grid1(file), level).rebased()
    f = HolderFamily(algebra, paths[0].grid, args.alpha, comps)
    X = extend(f)
    if stored > N:
        X = extend_above_n(X, stored)
    io.write_roughpath(X, args.output)
    return _roughpath_checks("extend", X, tol, args)


def _roughpath_checks(command, X, tol, args):
    report = holder_report(X)
    scale = report["scale"]
    checks = []
    t = X.grid.points
    for w in X.words():
        value, (s, u, v) = chen_sup(X, w)
        name = word_str(w)
        detail = {}
        if value > tol * scale:
            detail = {"triple": {"s": float(t[s]), "u": float(t[u]), "t": float(t[v])}}
        checks.append(check(f"chen.{name}", value, tol * scale, **detail))
        norm = report["norms"][name]
        checks.append(check(f"holder.{name}", norm, math.inf, passed=math.isfinite(norm)))
    checks.append(check("shuffle", report["shuffle_max"], tol * scale))
    checks.append(check("diagonal", report["diagonal_max"], tol * scale))
    return finish(command, checks, tol, args, holder=report)


# --------------------------------------------------------------------------
# verify


def cmd_verify(args, tol):
    if args.suite == "roughpath":
        if not args.rp or args.alpha is None:
            raise UsageError("--suite roughpath needs --rp and --alpha")
        try:
            levels_for(args.alpha)
        except AlphaReciprocalInteger as exc:
            raise UsageError(str(exc))
        X = io.read_roughpath(args.rp, args.alpha)
        return _roughpath_checks("verify", X, tol, args)
    if args.suite == "sewing-constants":
        return finish("verify", sewing_constant_checks(tol, args.level), tol, args, suite=args.suite)
    return finish("verify", algebra_checks(args.d, args.max_level), tol, args, suite=args.suite)


def sewing_constant_checks(tol, level=6):
    checks = []
    exact = {2.0: 0.5, 0.5: 96 + 72 * math.sqrt(2), 1.0: 96 / math.log(2)}
    for gamma in CONSTANT_GAMMAS:
        C = constant_c(gamma)
        checks.append(check(f"constant.{gamma:g}", C, math.inf, passed=math.isfinite(C) and C > 0))
        if gamma in exact:
            rel = abs(C - exact[gamma]) / exact[gamma]
            checks.append(check(f"constant.{gamma:g}.closed_form", rel, 1e-12))
    grid = DyadicGrid(1.0, level)
    noise = Coboundary(MidpointDisplacement(0.5, seed=7))
    for gamma in CONSTANT_GAMMAS:
        A = (PowerGerm(gamma) + noise).on(grid)
        rep = sewing_report(A, gamma)
        scale = max(1.0, float(np.abs(A.values).max()))
        checks.append(
            check(
                f"bound.{gamma:g}",
                rep.output_c2_norm,
                rep.bound_constant * rep.input_c3_norm + tol * scale,
            )
        )
    for gamma in (0.3, 0.8, 1.0, 1.3):
        V = ControlFn.power_law(gamma)
        for r in (0, 3):
            closed, series = vbar(V, r), _vbar_series(V, r)
            checks.append(check(f"vbar.{gamma:g}.r{r}", abs(closed - series) / series, 1e-9))
    return checks


def algebra_checks(d=3, max_level=4):
    alg = ShuffleAlgebra(d, max_level)
    words = [()] + alg.all_words()
    bad = {"commutativity": 0, "associativity": 0, "coassociativity": 0, "compatibility": 0, "radford": 0}
    for u in words:
        for v in words:
            if len(u) + len(v) > max_level:
                continue
            if alg.shuffle_product(u, v) != alg.shuffle_product(v, u):
                bad["commutativity"] += 1
            if alg.compatibility_defect(u, v):
                bad["compatibility"] += 1
            for w in words:
                if len(u) + len(v) + len(w) > max_level:
                    continue
                left = _shuffle_lin(alg, alg.shuffle_product(u, v), w, left=True)
                right = _shuffle_lin(alg, alg.shuffle_product(v, w), u, left=False)
                if left != right:
                    bad["associativity"] += 1
    for w in alg.all_words():
        if alg.coassociativity_defect(w):
            bad["coassociativity"] += 1
        if alg.radford_decompose(w).expand() != {w: 1}:
            bad["radford"] += 1
    for n in range(1, max_level + 1):
        if len(alg.lyndon_words(n)) != necklace_count(d, n):
            bad.setdefault("lyndon_count", 0)
            bad["lyndon_count"] += 1
    bad.setdefault("lyndon_count", 0)
    return [check(f"algebra.{k}", v, 0) for k, v in bad.items()]


def _shuffle_lin(alg, combo, w, left):
    out = {}
    for x, c in combo.items():
        prod = alg.shuffle_product(x, w) if left else alg.shuffle_product(w, x)
        for y, k in prod.items():
            out[y] = out.get(y, 0) + c * k
    return {y: c for y, c in out.items() if c}


# --------------------------------------------------------------------------
# demo


def demo_log_optimality(out_dir, tol, levels=range(4, 13)):
    rows, checks = [], []
    C1 = constant_c(1.0)
    for M in levels:
        A = LogGerm().on(DyadicGrid(1.0, M))
        R = sew_low(A).R
        rows.append((M, norm_c2(R, 1.0), log_weighted_norm(R)))
        checks.append(check(f"log_weighted.M{M:02d}", rows[-1][2], C1 * math.log(2)))
    for (M0, p0, _), (M1, p1, _) in zip(rows, rows[1:]):
        checks.append(check(f"plain_monotone.M{M1:02d}", p0 - p1, 0.0))
        if M1 >= 8:
            ratio = (p1 - p0) / math.log(2)
            checks.append(check(f"plain_increment.M{M1:02d}", abs(ratio - 1), 0.2, ratio=ratio))
    lines = ["M,plain_norm,log_weighted_norm"] + [f"{M},{p!r},{w!r}" for M, p, w in rows]
    (out_dir / "log_optimality.csv").write_text("\n".join(lines) + "\n")
    return checks


def young_case(M, extra=4):
    """Sewn Young integral of ``Y dX`` with ``X = Y = t**0.6`` against fine Riemann sums."""
    grid = DyadicGrid(1.0, M)
    germ = YoungProduct(PowerPath(0.6), PowerPath(0.6))
    A = germ.on(grid)
    I = sew_high(A, 1.2).I
    oracle = riemann_refinements(A, M + extra, germ=germ)[-1]
    return float(np.abs(I.values - oracle).max())


def demo_young(out_dir, tol, levels=range(4, 9)):
    rows, checks = [], []
    for M in levels:
        err = young_case(M)
        rows.append((M, err))
        checks.append(check(f"young.M{M:02d}", err, 5 * 2.0 ** (-0.2 * M)))
    lines = ["M,error,bound"] + [f"{M},{e!r},{5 * 2.0 ** (-0.2 * M)!r}" for M, e in rows]
    (out_dir / "young.csv").write_text("\n".join(lines) + "\n")
    return checks


def lyons_victoir_lift(M=8, alpha=0.45, seed=7, d=2, stored_level=3):
    grid = DyadicGrid(1.0, M)
    algebra = ShuffleAlgebra(d, max(stored_level, 2))
    spec = MidpointDisplacement(alpha, seed)
    comps = {(i + 1,): spec.component(i).sample(grid) for i in range(d)}
    X = extend(HolderFamily(algebra, grid, alpha, comps))
    return X, extend_above_n(X, stored_level)


def demo_lyons_victoir(out_dir, tol, level=8):
    X, X3 = lyons_victoir_lift(level)
    checks = []
    for name, Y, bound in (("level2", X, tol), ("level3", X3, max(tol, 1e-8))):
        rep = holder_report(Y)
        scale = rep["scale"]
        checks.append(check(f"{name}.chen", rep["chen_max"], bound * scale))
        checks.append(check(f"{name}.shuffle", rep["shuffle_max"], bound * scale))
        (out_dir / f"lyons_victoir_{name}.json").write_text(io.dump_json(rep))
    norms = holder_report(X3)["norms"]
    lines = ["word,holder_norm"] + [f"{w},{v!r}" for w, v in norms.items()]
    (out_dir / "lyons_victoir_norms.csv").write_text("\n".join(lines) + "\n")
    return checks


DEMOS = {"log-optimality": demo_log_optimality, "young": demo_young, "lyons-victoir": demo_lyons_victoir}


def cmd_demo(args, tol):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    checks = DEMOS[args.name](out_dir, tol)
    if args.report is None:
        args.report = str(out_dir / f"{args.name}.json")
    return finish("demo", checks, tol, args, demo=args.name)


# --------------------------------------------------------------------------
# generators


def cmd_gen_path(args, tol):
    grid = DyadicGrid(args.horizon, args.level)
    if args.kind == "power":
        spec = PowerPath(args.alpha)
    elif args.kind == "weierstrass":
        spec = Weierstrass(args.a, args.b, alpha=args.alpha)
    elif args.kind == "midpoint":
        spec = MidpointDisplacement(args.alpha, args.seed)
    else:
        if not args.coeffs:
            raise UsageError("--kind poly needs --coeffs")
        spec = SmoothPoly(tuple(args.coeffs))
    alpha = args.alpha if args.alpha is not None else getattr(spec, "alpha", None) or spec.exponent
    path = generate_path(spec, grid, alpha)
    io.write_grid1(path, args.out)
    norm = norm_c1_holder(path, min(alpha, 1.0))
    checks = [check("holder", norm, math.inf, passed=math.isfinite(norm))]
    return finish("gen-path", checks, tol, args, kind=args.kind, level=args.level, alpha=alpha)


def cmd_gen_germ(args, tol):
    grid = DyadicGrid(args.horizon, args.level)
    if args.kind == "log":
        germ = LogGerm()
    elif args.kind == "power":
        if args.gamma is None:
            raise UsageError("--kind power needs --gamma")
        germ = PowerGerm(args.gamma)
    elif args.kind == "coboundary":
        if not args.path:
            raise UsageError("--kind coboundary needs --path")
        germ = Coboundary(io.read_grid1(args.path[0]))
    else:
        if len(args.path) != 2:
            raise UsageError("--kind young needs --path X.csv --path Y.csv")
        germ = YoungProduct(io.read_grid1(args.path[0]), io.read_grid1(args.path[1]))
    try:
        A = germ.on(grid)
    except ValueError as exc:
        raise UsageError(str(exc))
    io.write_grid2(A, args.out)
    checks = [check("finite", 0.0 if np.isfinite(A.values).all() else 1.0, 0.0)]
    return finish("gen-germ", checks, tol, args, kind=args.kind, level=args.level)


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="roughsew", description="Sewing maps and rough path lifts on dyadic grids.")
    p.add_argument("--tol", type=float, default=None, help="tolerance (default $ROUGHSEW_TOL or 1e-9)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sew", help="sew a germ given as s,t,value CSV")
    s.add_argument("--input", "--germ", dest="germ", required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--level", type=int, help="restrict the germ to this coarser level first")
    s.add_argument("--method", choices=["auto", "low", "high"], default="auto")
    s.add_argument("--output", required=True, help="integral I as t,value CSV")
    s.add_argument("--remainder", help="remainder R as s,t,value CSV")
    s.add_argument("--report")

    e = sub.add_parser("extend", help="lift paths to a rough path")
    e.add_argument("--path", action="append", required=True, help="one t,value CSV per component")
    e.add_argument("--alpha", type=float, required=True)
    e.add_argument("--level", type=int)
    e.add_argument("--d", type=int)
    e.add_argument("--perturb", action="append", default=[], metavar="WORD=FILE")
    e.add_argument("--stored-level", type=int)
    e.add_argument("--output", required=True)
    e.add_argument("--report")

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("--suite", choices=["roughpath", "sewing-constants", "algebra"], default="roughpath")
    v.add_argument("--rp")
    v.add_argument("--alpha", type=float)
    v.add_argument("--d", type=int, default=3)
    v.add_argument("--max-level", type=int, default=4)
    v.add_argument("--level", type=int, default=6)
    v.add_argument("--report")

    dm = sub.add_parser("demo", help="reproduce an experiment and write its tables")
    dm.add_argument("name", choices=sorted(DEMOS))
    dm.add_argument("--out-dir", default=".")
    dm.add_argument("--report")

    g = sub.add_parser("gen-path", help="write a synthetic path")
    g.add_argument("--kind", choices=["power", "weierstrass", "midpoint", "poly"], required=True)
    g.add_argument("--alpha", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--a", type=float, default=0.5)
    g.add_argument("--b", type=float, default=3.0)
    g.add_argument("--coeffs", type=float, nargs="+")
    g.add_argument("--level", type=int, required=True)
    g.add_argument("--horizon", type=float, default=1.0)
    g.add_argument("--out", required=True)
    g.add_argument("--report")

    gg = sub.add_parser("gen-germ", help="write a two-parameter germ")
    gg.add_argument("--kind", choices=["log", "power", "coboundary", "young"], required=True)
    gg.add_argument("--gamma", type=float)
    gg.add_argument("--path", action="append", default=[])
    gg.add_argument("--level", type=int, required=True)
    gg.add_argument("--horizon", type=float, default=1.0)
    gg.add_argument("--out", required=True)
    gg.add_argument("--report")
    return p


COMMANDS = {
    "sew": cmd_sew,
    "extend": cmd_extend,
    "verify": cmd_verify,
    "demo": cmd_demo,
    "gen-path": cmd_gen_path,
    "gen-germ": cmd_gen_germ,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = args.tol if args.tol is not None else default_tol()
        if not tol > 0:
            raise UsageError("--tol must be positive")
        return COMMANDS[args.command](args, tol)
    except (UsageError, io.FormatError, OSError, AlphaReciprocalInteger, TruncationExceeded) as exc:
        print(f"roughsew: error: {exc}", file=sys.stderr)
        return 2
    except (NotConverging, SewingError) as exc:
        print(f"roughsew: sewing failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"roughsew: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
