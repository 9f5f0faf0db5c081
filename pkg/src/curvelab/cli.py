"""Command-line front end.

Exit codes::

    0   every assertion holds
    1   a theorem-backed assertion fails or its hypothesis is violated
    2   usage or parse error
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .comparison import DimensionFunction, compare, model_space, nonneg_p_check
from .curvature import CD_TOL, curvature_profile, find_cd_violation
from .errors import CurvelabError, HypothesisFailed, UnsupportedSupport, MeasureKindUnsupported
from .global_analysis import (
    build_from_concave,
    classify_volume_growth,
    exp_family,
    intrinsic_sigma,
    sc_from_curvature_decay,
    series_tests,
)
from .graph_core import as_dimension, graph_to_dict, load_graph, restrict
from .inequalities import (
    cheeger,
    doubling_constants,
    doubling_table,
    ellipticity,
    poincare_best_constant,
    sd_product_check,
    spectral_gap,
)
from .symmetric import (
    cartesian_product,
    check_weak_symmetry,
    load_rooted,
    project,
    symmetric_tree,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_TOL = 1e-9
POINCARE_BOUND = 16.0


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# Output helpers
# --------------------------------------------------------------------------


def _clean(obj):
    """Make ``obj`` JSON-safe: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in rows:
        writer.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# Argument parsing helpers
# --------------------------------------------------------------------------


def parse_range(text: str):
    """``"a..b"`` to an inclusive integer pair."""
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a..b, got {text!r}") from None
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def parse_dimension(text: str):
    try:
        return as_dimension(text)
    except (ValueError, CurvelabError):
        raise argparse.ArgumentTypeError(f"bad dimension {text!r}") from None


def parse_floats(text: str):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def parse_ints(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("CURVELAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"CURVELAB_THREADS must be an integer, got {env!r}") from None
    return 1


def _window(G, rng):
    if rng is not None:
        return G.support.clip(*rng)
    return G.default_range()


def _cd_window_ok(G, D, lo, hi):
    """Whether CD(0, D) holds on ``[lo, hi]``, plus the first failing vertex."""
    bad = find_cd_violation(G, 0.0, D, lo, hi)
    return bad is None, (None if bad is None else bad[0])


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def cmd_curvature(args) -> int:
    G = load_graph(args.spec)
    lo, hi = _window(G, args.range)
    prof = curvature_profile(G, lo, hi, args.dimension, threads=_threads(args))
    _emit(prof.to_csv(), args.out)
    return EXIT_OK


def cmd_check_cd(args) -> int:
    G = load_graph(args.spec)
    lo, hi = _window(G, args.range)
    bad = find_cd_violation(G, args.k, args.dimension, lo, hi)
    report = {
        "check": "cd",
        "K": args.k,
        "dimension": str(args.dimension),
        "range": [lo, hi],
        "tolerance": CD_TOL,
        "pass": bad is None,
        "counterexample": None if bad is None else {"n": bad[0], "slack": bad[1]},
    }
    _emit(dumps(report), args.out)
    return EXIT_OK if bad is None else EXIT_FAIL


def _doubling_check(args, kind) -> int:
    G = load_graph(args.spec)
    lo, hi = args.centers if args.centers else (G.default_range()[0],) * 2
    centers = list(range(lo, hi + 1))
    bound = math.inf
    hyp = False
    if args.dimension is not None:
        D = args.dimension.value
        exp = D - 2 if kind == "sd" else D - 1
        bound = 2.0**exp
        top = max(hi + 2 * args.rmax + 2, G.default_range()[0])
        w_lo, w_hi = G.support.clip(min(centers) - 2 * args.rmax - 1, top)
        hyp, _ = _cd_window_ok(G, args.dimension, w_lo, w_hi)
    rows, ok = [], True
    for x0 in centers:
        for R, sd, vd in doubling_table(G, x0, args.rmax):
            value = sd if kind == "sd" else vd
            passed = bool(math.isnan(value) or value <= bound + args.tolerance)
            ok &= passed or not hyp
            rows.append((x0, R, value, bound, passed))
    _emit(rows_to_csv(("x0", "R", "value", "bound", "pass"), rows), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_vd(args) -> int:
    return _doubling_check(args, "vd")


def cmd_check_sd(args) -> int:
    return _doubling_check(args, "sd")


def cmd_check_poincare(args) -> int:
    G = load_graph(args.spec)
    c_lo, c_hi = args.centers if args.centers else (G.default_range()[0],) * 2
    r_lo, r_hi = args.radii
    hyp = False
    if args.dimension is not None:
        w_lo, w_hi = G.support.clip(c_lo - 2 * r_hi - 1, c_hi + 2 * r_hi + 1)
        hyp, _ = _cd_window_ok(G, args.dimension, w_lo, w_hi)
        hyp = hyp and G.is_normalized
    rows, ok = [], True
    for x0 in range(c_lo, c_hi + 1):
        for R in range(max(r_lo, 1), r_hi + 1):
            value = poincare_best_constant(G, x0, R)
            passed = value <= POINCARE_BOUND + args.tolerance
            ok &= passed or not hyp
            rows.append((x0, R, value, POINCARE_BOUND, passed))
    _emit(rows_to_csv(("x0", "R", "value", "bound", "pass"), rows), args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_cheeger(args) -> int:
    G = load_graph(args.spec)
    A, B = args.range if args.range else G.default_range()
    Gr = restrict(G, A, B)
    h = cheeger(Gr)
    lam = spectral_gap(Gr)
    bound = 1.0 / (2.0 * (B - A))
    # the interval bound needs a normalized graph with p >= 0 on the window
    hyp = G.is_normalized and nonneg_p_check(G, A, B)
    interval_ok = h >= bound - args.tolerance
    spectral_ok = lam >= 0.5 * h * h - args.tolerance
    rows = [
        (A, B, "cheeger", h, bound, interval_ok),
        (A, B, "lambda1", lam, 0.5 * h * h, spectral_ok),
    ]
    _emit(rows_to_csv(("A", "B", "quantity", "value", "bound", "pass"), rows), args.out)
    ok = spectral_ok and (interval_ok or not hyp)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_ellipticity(args) -> int:
    G = load_graph(args.spec)
    lo, hi = _window(G, args.range)
    alpha = ellipticity(G, lo, hi)
    bound = args.dimension.inv if args.dimension is not None else 0.0
    passed = alpha >= bound - args.tolerance
    hyp = args.dimension is not None and _cd_window_ok(G, args.dimension, lo, hi)[0]
    _emit(rows_to_csv(("lo", "hi", "value", "bound", "pass"), [(lo, hi, alpha, bound, passed)]), args.out)
    return EXIT_OK if passed or not hyp else EXIT_FAIL


def cmd_check_series(args) -> int:
    G = load_graph(args.spec)
    props = args.properties.split(",") if args.properties else None
    verdicts = series_tests(G, props)
    _emit(dumps({"series": [v.to_dict() for v in verdicts]}), args.out)
    return EXIT_OK


def cmd_compare(args) -> int:
    G0 = load_graph(args.model)
    G = load_graph(args.spec)
    hi = args.hi if args.hi is not None else min(G.default_range()[1], G0.default_range()[1])
    rep = compare(G0, G, args.dimension_fn, hi)
    _emit(rep.to_json() + "\n", args.out)
    for row in rep.counterexamples:
        sys.stderr.write(f"counterexample: {row}\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_analyze(args) -> int:
    G = load_graph(args.spec)
    lo, hi = _window(G, args.range)
    D = args.dimension
    ok = True
    report = {
        "version": __version__,
        "graph": graph_to_dict(G),
        "dimension": str(D),
        "range": [lo, hi],
        "tolerances": {"cd": CD_TOL, "assertions": args.tolerance},
    }
    prof = curvature_profile(G, lo, hi, D, threads=_threads(args))
    k = prof.column("k_star")
    report["curvature"] = {
        "min_k_star": float(np.min(k)),
        "max_k_star": float(np.max(k)),
        "csv": "curvature.csv" if args.out else None,
    }
    try:
        report["series"] = [v.to_dict() for v in series_tests(G)]
    except (UnsupportedSupport, MeasureKindUnsupported) as exc:
        report["series"] = {"skipped": str(exc)}
    try:
        gc = classify_volume_growth(G)
        report["growth_class"] = gc.label
        report["A_G"] = gc.A_G
        report["A_G_exact"] = gc.A_G_exact
    except (UnsupportedSupport, MeasureKindUnsupported, HypothesisFailed) as exc:
        report["growth_class"] = {"skipped": str(exc)}
    try:
        metric = intrinsic_sigma(G, hi - lo + 1, lo)
        decay = sc_from_curvature_decay(G, metric, lo, hi)
        report["curvature_decay"] = decay.to_dict()
        ok &= decay.assertion_ok
    except CurvelabError as exc:
        report["curvature_decay"] = {"skipped": str(exc)}

    ineq = {}
    rmax = max(1, min(16, (hi - lo) // 4))
    try:
        ineq["doubling"] = doubling_constants(G, [lo], rmax).to_dict()
    except CurvelabError as exc:
        ineq["doubling"] = {"skipped": str(exc)}
    try:
        Gr = restrict(G, lo, hi)
        ineq["cheeger"] = cheeger(Gr)
        ineq["lambda1"] = spectral_gap(Gr)
        ok &= ineq["lambda1"] >= 0.5 * ineq["cheeger"] ** 2 - args.tolerance
    except CurvelabError as exc:
        ineq["cheeger"] = {"skipped": str(exc)}
    if G.is_normalized:
        ineq["ellipticity"] = ellipticity(G, lo, hi)
    report["inequalities"] = ineq
    report["pass"] = bool(ok)

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(dumps(report))
        (out / "curvature.csv").write_text(prof.to_csv())
    else:
        sys.stdout.write(dumps(report))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_generate(args) -> int:
    kind = args.kind
    if kind == "model-space":
        G = model_space(args.D, length=args.len)
        text = dumps(graph_to_dict(G))
    elif kind == "exp":
        G = exp_family(args.omega, args.mu, length=args.len)
        text = dumps(graph_to_dict(G))
    elif kind == "concave":
        xs, ys, slope = _read_samples(args.samples, args.tail_slope)
        text = dumps(graph_to_dict(build_from_concave(xs, ys, slope)))
    elif kind == "tree":
        RG = symmetric_tree(args.branching, args.weights, args.measures)
        text = RG.to_json() + "\n"
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(kind)
    _emit(text, args.out)
    return EXIT_OK


def _read_samples(path, tail_slope):
    """Samples as JSON ``{"xs", "ys", "tail_slope"}`` or CSV lines ``x,y``."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = None
    if isinstance(data, dict):
        try:
            xs, ys = data["xs"], data["ys"]
        except KeyError as exc:
            raise CurvelabError(f"samples file lacks {exc}") from None
        slope = data.get("tail_slope", tail_slope)
    else:
        xs, ys = [], []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#") or line[0].isalpha():
                continue
            try:
                x, y = (float(t) for t in line.split(","))
            except ValueError:
                raise CurvelabError(f"bad sample line {line!r}") from None
            xs.append(x)
            ys.append(y)
        slope = tail_slope
    if slope is None:
        raise UsageError("a tail slope is required (--tail-slope or 'tail_slope' in the file)")
    return xs, ys, float(slope)


def cmd_project(args) -> int:
    RG = load_rooted(args.spec)
    rep = check_weak_symmetry(RG)
    if not rep.ok:
        _emit(dumps({"weakly_symmetric": False, "witness": rep.witness}), args.out)
        return EXIT_FAIL
    _emit(dumps(graph_to_dict(project(RG))), args.out)
    return EXIT_OK


def cmd_product(args) -> int:
    A = load_rooted(args.a)
    B = load_rooted(args.b)
    if args.check_sd is not None:
        rep = sd_product_check(A, B, A.root, B.root, args.check_sd)
        _emit(dumps(rep.__dict__), args.out)
        return EXIT_OK if rep.ok else EXIT_FAIL
    _emit(cartesian_product(A, B).to_json() + "\n", args.out)
    return EXIT_OK


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curvelab", description="Curvature analysis of weighted linear graphs.")
    p.add_argument("--version", action="version", version=f"curvelab {__version__}")
    p.add_argument("--tolerance", type=float, default=DEFAULT_TOL, help="slack for bound assertions")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: $CURVELAB_THREADS or 1)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, spec=True):
        if spec:
            sp.add_argument("spec", help="graph spec JSON file")
        sp.add_argument("--out", "-o", default=None, help="output file (stdout by default)")

    sp = sub.add_parser("analyze", help="full report")
    sp.add_argument("spec")
    sp.add_argument("--out", default=None, help="output directory")
    sp.add_argument("--dimension", type=parse_dimension, default=as_dimension("inf"))
    sp.add_argument("--range", type=parse_range, default=None)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("curvature", help="curvature profile CSV")
    common(sp)
    sp.add_argument("--dimension", type=parse_dimension, required=True)
    sp.add_argument("--range", type=parse_range, default=None)
    sp.set_defaults(func=cmd_curvature)

    check = sub.add_parser("check", help="single criterion checks").add_subparsers(dest="check", required=True)

    sp = check.add_parser("cd")
    common(sp)
    sp.add_argument("--k", type=float, default=0.0)
    sp.add_argument("--dimension", type=parse_dimension, required=True)
    sp.add_argument("--range", type=parse_range, default=None)
    sp.set_defaults(func=cmd_check_cd)

    for name, fn in (("vd", cmd_check_vd), ("sd", cmd_check_sd)):
        sp = check.add_parser(name)
        common(sp)
        sp.add_argument("--centers", type=parse_range, default=None)
        sp.add_argument("--rmax", type=int, default=16)
        sp.add_argument("--dimension", type=parse_dimension, default=None, help="enables the CD(0, D) bound")
        sp.set_defaults(func=fn)

    sp = check.add_parser("poincare")
    common(sp)
    sp.add_argument("--centers", type=parse_range, default=None)
    sp.add_argument("--radii", type=parse_range, default=(1, 8))
    sp.add_argument("--dimension", type=parse_dimension, default=None, help="enables the CD(0, D) bound")
    sp.set_defaults(func=cmd_check_poincare)

    sp = check.add_parser("cheeger")
    common(sp)
    sp.add_argument("--range", type=parse_range, default=None)
    sp.set_defaults(func=cmd_check_cheeger)

    sp = check.add_parser("ellipticity")
    common(sp)
    sp.add_argument("--range", type=parse_range, default=None)
    sp.add_argument("--dimension", type=parse_dimension, default=None)
    sp.set_defaults(func=cmd_check_ellipticity)

    sp = check.add_parser("series")
    common(sp)
    sp.add_argument("--properties", default=None, help="comma-separated subset")
    sp.set_defaults(func=cmd_check_series)

    sp = sub.add_parser("compare", help="compare against a model space")
    sp.add_argument("model")
    sp.add_argument("spec")
    sp.add_argument("--dimension-fn", type=_parse_dimension_fn, required=True)
    sp.add_argument("--hi", type=int, default=None)
    sp.add_argument("--out", "-o", default=None)
    sp.set_defaults(func=cmd_compare)

    gen = sub.add_parser("generate", help="emit example specs").add_subparsers(dest="kind", required=True)
    sp = gen.add_parser("model-space")
    sp.add_argument("--D", type=float, required=True)
    sp.add_argument("--len", type=int, default=200)
    common(sp, spec=False)
    sp = gen.add_parser("exp")
    sp.add_argument("--omega", type=float, required=True)
    sp.add_argument("--mu", type=float, required=True)
    sp.add_argument("--len", type=int, default=None)
    common(sp, spec=False)
    sp = gen.add_parser("concave")
    sp.add_argument("samples", help="JSON {xs, ys, tail_slope} or CSV x,y")
    sp.add_argument("--tail-slope", type=float, default=None)
    common(sp, spec=False)
    sp = gen.add_parser("tree")
    sp.add_argument("--branching", type=parse_ints, required=True)
    sp.add_argument("--weights", type=parse_floats, required=True)
    sp.add_argument("--measures", type=parse_floats, required=True)
    common(sp, spec=False)
    for sp in gen.choices.values():
        sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("project", help="project a weakly symmetric rooted graph")
    common(sp)
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("product", help="Cartesian product of rooted graphs")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--check-sd", type=int, default=None, metavar="RMAX")
    sp.add_argument("--out", "-o", default=None)
    sp.set_defaults(func=cmd_product)
    return p


def _parse_dimension_fn(text):
    try:
        return DimensionFunction.parse(text)
    except (ValueError, CurvelabError):
        raise argparse.ArgumentTypeError(f"bad dimension function {text!r}") from None


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except HypothesisFailed as exc:
        sys.stderr.write(f"curvelab: hypothesis failed: {exc}\n")
        return EXIT_FAIL
    except (CurvelabError, UsageError, OSError) as exc:
        sys.stderr.write(f"curvelab: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
