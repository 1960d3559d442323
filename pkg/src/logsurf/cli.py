"""Command line interface.

Exit codes: 0 when the computation ran (whatever the verdict), 2 for bad input,
3 when a numerical solve did not converge.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import __version__
from .classifier import (
    CatalogInconsistency,
    ClassifierPrecondition,
    check_fano_edge,
    classify,
    reider_search,
)
from .edge import (
    ConvergenceError,
    GridTooCoarse,
    ModelMetricSpec,
    gauss_bonnet_defect,
    lelong_estimate,
    solve_radial_cone,
)
from .io import SchemaError, bundled_examples, bundled_text, dumps, load_pair
from .lattice import LatticeError, SurfacePair, validate
from .positivity import AlphaFamily, NoThreshold, Threshold, nef_threshold
from .topology import IDENTITY_TABLE_ALPHAS, bmy_check, bmy_limit_check, edge_invariants, log_chern

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path


def _load_valid(source: str) -> tuple[SurfacePair, list[str]]:
    try:
        p = load_pair(source)
    except SchemaError as e:
        raise InputError(e.message, e.path) from e
    except (FileNotFoundError, LatticeError) as e:
        raise InputError(str(e)) from e
    rep = validate(p)
    if not rep.ok:
        first = rep.failures[0]
        raise InputError("; ".join(f"[{f.invariant}] {f.message}" for f in rep.failures), first.path)
    return p, list(rep.warnings)


def _curves(p: SurfacePair, classes) -> list[dict]:
    return [{"label": p.label_of(c), "class": c} for c in classes]


def _threshold_dict(p: SurfacePair, t: Threshold | None):
    if t is None:
        return None
    return {
        "value": t.value,
        "strict": t.strict,
        "binding_curves": _curves(p, t.binding_curves),
        "square_binds": t.square_binds,
        "exact": t.exact,
    }


def _threshold_text(name: str, t: Threshold | None) -> str:
    if t is None:
        return f"{name} threshold: none"
    bind = ", ".join(t.binding_labels) or ("L_alpha^2 = 0" if t.square_binds else "-")
    held = "attained" if t.strict else "not attained"
    approx = "" if t.exact else " (rational upper bound)"
    return f"{name} threshold: {t.value}{approx} ({held}); binding: {bind}"


# --- reports -------------------------------------------------------------------


def classify_report(p: SurfacePair, warnings: list[str]) -> dict:
    v = classify(p)
    obs = v.obstructions
    return {
        "command": "classify",
        "pair": p.name,
        "d_minimal": v.d_minimal,
        "semistable": v.semistable,
        "log_general": v.log_general,
        "nef_near_one": v.nef_near_one,
        "ample_near_one": v.ample_near_one,
        "ke_edge_small_angles": v.ke_edge_small_angles,
        "obstructions": {
            "interior_minus2": _curves(p, [c.cls for c in obs.interior_minus2]),
            "boundary_minus2": _curves(p, [c.cls for c in obs.boundary_minus2]),
            "d_minimality_violations": _curves(p, [c.cls for c in obs.d_minimality_violations]),
            "semistability_violations": _curves(p, [c.cls for c in obs.semistability_violations]),
        },
        "nef_threshold": _threshold_dict(p, v.nef_threshold),
        "ample_threshold": _threshold_dict(p, v.ample_threshold),
        "case_tags": [{"curve": c, "case": t} for c, t in v.case_tags],
        "warnings": warnings,
    }


def _yn(b) -> str:
    return ("yes" if b else "no") if isinstance(b, bool) else str(b)


def classify_text(r: dict) -> str:
    lines = [
        f"pair: {r['pair']}",
        f"D-minimal: {_yn(r['d_minimal'])}",
        f"semi-stable: {_yn(r['semistable'])}",
        f"log general type: {r['log_general']}",
        f"K + alpha D nef and big near 1: {r['nef_near_one']}",
        f"K + alpha D ample near 1: {r['ample_near_one']}",
        f"edge KE metric for small cone angles: {r['ke_edge_small_angles']}",
    ]
    for key, label in (("nef_threshold", "nef"), ("ample_threshold", "ample")):
        t = r[key]
        if t is None:
            lines.append(f"{label} threshold: none")
        else:
            bind = ", ".join(c["label"] for c in t["binding_curves"]) or ("L_alpha^2 = 0" if t["square_binds"] else "-")
            lines.append(f"{label} threshold: {t['value']} ({'attained' if t['strict'] else 'not attained'}); binding: {bind}")
    for key, items in r["obstructions"].items():
        if items:
            lines.append(f"{key.replace('_', ' ')}: " + ", ".join(c["label"] for c in items))
    for tag in r["case_tags"]:
        lines.append(f"L.C = 0 on {tag['curve']}: {tag['case']}")
    for w in r["warnings"]:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"


def _classify_one(source: str, out_dir: str | None, as_json: bool) -> tuple[int, str, str]:
    """Worker for one pair: (exit code, stdout text, stderr text)."""
    try:
        p, warns = _load_valid(source)
        r = classify_report(p, warns)
    except InputError as e:
        return EXIT_INPUT, "", f"{source}: input error at {e.path or '.'}: {e}\n"
    except CatalogInconsistency as e:
        return EXIT_INPUT, "", f"{source}: catalog inconsistency: {e}\n"
    text = dumps(r) if as_json else classify_text(r)
    if out_dir:
        out = Path(out_dir) / f"{p.name or Path(source).stem}.{'json' if as_json else 'txt'}"
        out.write_text(text)
        return EXIT_OK, f"{source} -> {out}\n", ""
    return EXIT_OK, text, ""


def cmd_classify(args) -> int:
    if args.batch:
        Path(args.batch).mkdir(parents=True, exist_ok=True)
    if len(args.pairs) == 1 or args.jobs == 1:
        results = [_classify_one(s, args.batch, args.json) for s in args.pairs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_classify_one, args.pairs, [args.batch] * len(args.pairs), [args.json] * len(args.pairs)))
    code = EXIT_OK
    for c, out, err in results:
        sys.stdout.write(out)
        sys.stderr.write(err)
        code = max(code, c)
    return code


def cmd_threshold(args) -> int:
    p, _ = _load_valid(args.pair)
    fam = AlphaFamily.of_pair(p)
    props = ("nef", "ample") if args.property == "both" else (args.property,)
    report = {"command": "threshold", "pair": p.name}
    lines = []
    for prop in props:
        try:
            t = nef_threshold(fam, p, prop)
            report[prop] = _threshold_dict(p, t)
            lines.append(_threshold_text(prop, t))
        except NoThreshold as e:
            report[prop] = {"value": None, "reason": e.reason, "witness": None if e.witness is None else p.label_of(e.witness)}
            w = f" (witness {p.label_of(e.witness)})" if e.witness is not None else ""
            lines.append(f"{prop} threshold: none: {e.reason}{w}")
    _emit(args, report, "\n".join(lines) + "\n")
    return EXIT_OK


def _identity_rows(p: SurfacePair, alphas) -> list[dict]:
    rows = []
    for a in alphas:
        inv = edge_invariants(p, a)
        rows.append(
            {
                "alpha": inv.alpha,
                "chi_alpha": inv.chi_alpha,
                "sigma_alpha": inv.sigma_alpha,
                "l_alpha_sq": inv.l_alpha_sq,
                "identity_holds": 2 * inv.chi_alpha + 3 * inv.sigma_alpha == inv.l_alpha_sq,
                "conjectural": inv.conjectural,
            }
        )
    return rows


def _rows_text(rows) -> list[str]:
    out = ["alpha  chi_alpha  sigma_alpha  L_alpha^2  2chi+3sigma=L^2"]
    for r in rows:
        tag = " (conjectural)" if r["conjectural"] else ""
        out.append(f"{r['alpha']}  {r['chi_alpha']}  {r['sigma_alpha']}  {r['l_alpha_sq']}  {_yn(r['identity_holds'])}{tag}")
    return out


def cmd_bmy(args) -> int:
    import warnings

    p, _ = _load_valid(args.pair)
    n = log_chern(p)
    res, lim = bmy_check(p), bmy_limit_check(p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = _identity_rows(p, IDENTITY_TABLE_ALPHAS)
    report = {
        "command": "bmy",
        "pair": p.name,
        "c1_sq": n.c1_sq,
        "c2": n.c2,
        "chi_D": n.chi_D,
        "holds": res.holds,
        "equality": res.equality,
        "limit_form": {"lhs": lim.lhs, "rhs": lim.rhs, "holds": lim.holds},
        "identity_table": rows,
    }
    rel = "=" if res.equality else ("<" if res.holds else ">")
    lines = [
        f"pair: {p.name}",
        f"c1^2 = {n.c1_sq}, c2 = {n.c2}, chi(D) = {n.chi_D}",
        f"BMY: c1^2 = {res.lhs} {rel} {res.rhs} = 3 c2: {'holds' if res.holds else 'FAILS'}",
        f"limit form: chi - chi(D) = {lim.lhs} >= {lim.rhs}: {'holds' if lim.holds else 'FAILS'}",
        *_rows_text(rows),
    ]
    _emit(args, report, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_edge_invariants(args) -> int:
    import warnings

    p, _ = _load_valid(args.pair)
    alphas = args.alpha or list(IDENTITY_TABLE_ALPHAS)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = _identity_rows(p, alphas)
    report = {"command": "edge-invariants", "pair": p.name, "rows": rows}
    _emit(args, report, "\n".join([f"pair: {p.name}", *_rows_text(rows)]) + "\n")
    return EXIT_OK


def cmd_reider(args) -> int:
    p, _ = _load_valid(args.pair)
    try:
        r = reider_search(p, args.n_max)
    except ClassifierPrecondition as e:
        raise InputError(str(e)) from e
    report = {
        "command": "reider",
        "pair": p.name,
        "n": r.n,
        "alpha_n": r.alpha_n,
        "adjoint_class": r.adjoint_class,
        "adjoint_square": r.adjoint_square,
        "obstruction_curves": r.obstruction_curves,
        "rejected": [{"class": c, "reason": why} for c, why in r.rejected],
        "base_point_free": r.base_point_free,
    }
    lines = [
        f"pair: {p.name}",
        f"n = {r.n}, alpha_n = {r.alpha_n}",
        f"adjoint class K + (n-2)(K+D) = {r.adjoint_class}, square {r.adjoint_square}",
        f"obstruction candidates: {', '.join(str(c) for c in r.obstruction_curves) or 'none'}",
        *[f"rejected {c}: {why}" for c, why in r.rejected],
        f"base point free: {r.base_point_free}",
    ]
    _emit(args, report, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_cone_solve(args) -> int:
    try:
        res = solve_radial_cone(args.alpha, args.radius, args.grid, args.tol)
        status = "converged"
    except GridTooCoarse as e:
        res, status = e.result, f"residual above tolerance: {e}"
    except ConvergenceError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_NUMERIC
    gb = gauss_bonnet_defect(res)
    summary = res.summary()
    summary.update(
        command="cone-solve",
        status=status,
        tol=args.tol,
        gauss_bonnet_defect=gb.defect,
        inner_turning_limit=gb.inner_turning_limit,
    )
    if args.dump:
        with open(args.dump, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["rho", "phi", "K"])
            for r, f, k in zip(res.grid, res.phi, res.curvature):
                w.writerow([repr(float(r)), repr(float(f)), repr(float(k))])
    lines = [
        f"alpha = {res.alpha}, R = {res.radius}, grid = {res.grid_n}: {status}",
        f"oracle sup error     {res.oracle_sup_error:.3e}",
        f"curvature residual   {res.curvature_residual:.3e} on [{res.residual_window[0]:g}, {res.radius:g}]",
        f"cone angle           {res.cone_angle_estimate:.10f} (expected {2 * math.pi * (1 - res.alpha):.10f})",
        f"quasi-isometry band  [{res.quasi_isometry[0]:.6g}, {res.quasi_isometry[1]:.6g}]",
        f"Gauss-Bonnet defect  {gb.defect:.3e}; inner turning limit {gb.inner_turning_limit:.10f}",
        f"Newton iterations    {res.newton_iterations}",
    ]
    _emit(args, summary, "\n".join(lines) + "\n")
    return EXIT_OK if status == "converged" else EXIT_NUMERIC


def cmd_lelong(args) -> int:
    try:
        spec = ModelMetricSpec(args.alpha, quadrature_points=args.points)
        res = lelong_estimate(spec, args.radii, args.offset)
    except ValueError as e:
        raise InputError(str(e)) from e
    if args.dump:
        with open(args.dump, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "nu"])
            for r, v in zip(res.radii, res.values):
                w.writerow([repr(r), repr(v)])
    report = {
        "command": "lelong",
        "alpha": res.alpha,
        "offset": res.offset,
        "radii": res.radii,
        "values": res.values,
        "fitted_exponent": res.fitted_exponent,
        "expected_exponent": res.expected_exponent,
    }
    lines = [f"alpha = {res.alpha}, centre offset = {res.offset}", "r  nu(r)"]
    lines += [f"{r:.3e}  {v:.10e}" for r, v in zip(res.radii, res.values)]
    lines.append(f"fitted exponent {res.fitted_exponent:.6f} (expected {res.expected_exponent:.6f})")
    _emit(args, report, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_examples(args) -> int:
    names = bundled_examples()
    if args.export:
        out = Path(args.export)
        out.mkdir(parents=True, exist_ok=True)
        for n in names:
            (out / f"{n}.json").write_text(bundled_text(n))
        print(f"wrote {len(names)} examples to {out}")
    elif args.name:
        if args.name not in names:
            raise InputError(f"no bundled example named {args.name!r}")
        sys.stdout.write(bundled_text(args.name))
    else:
        print("\n".join(names))
    return EXIT_OK


def cmd_fano(args) -> int:
    p, _ = _load_valid(args.pair)
    v = check_fano_edge(p, args.alpha)
    report = {"command": "fano", "pair": p.name, "alpha": args.alpha, "anti_ample": v.state, "reason": v.reason}
    _emit(args, report, f"-(K + {args.alpha} D) ample: {v.state} ({v.reason})\n")
    return EXIT_OK


def _emit(args, report: dict, text: str) -> None:
    sys.stdout.write(dumps(report) if getattr(args, "json", False) else text)


# --- argument parsing -------------------------------------------------------------


def _open_unit(s: str) -> float:
    x = float(s)
    if not 0 < x < 1:
        raise argparse.ArgumentTypeError(f"{s} is not in the open interval (0, 1)")
    return x


def _unit_fraction(s: str) -> Fraction:
    try:
        x = Fraction(s)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"{s} is not a rational number") from e
    if not 0 <= x <= 1:
        raise argparse.ArgumentTypeError(f"{s} is not in [0, 1]")
    return x


def _positive(s: str) -> float:
    x = float(s)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"{s} is not positive")
    return x


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="logsurf", description="Positivity, log Chern numbers and edge metrics for surface pairs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def pair_cmd(name, help_, func):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("pair", help="pair file, or the name of a bundled example")
        sp.add_argument("--json", action="store_true", help="emit JSON")
        sp.set_defaults(func=func)
        return sp

    sp = sub.add_parser("classify", help="edge KE classification of one or more pairs")
    sp.add_argument("pairs", nargs="+", help="pair files or bundled example names")
    sp.add_argument("--json", action="store_true", help="emit JSON")
    sp.add_argument("--batch", metavar="DIR", help="write one report per pair into DIR")
    sp.add_argument("--jobs", type=int, default=4, help="worker processes for several pairs (default 4)")
    sp.set_defaults(func=cmd_classify)

    sp = pair_cmd("threshold", "nef and ample thresholds of K + alpha D", cmd_threshold)
    sp.add_argument("--property", choices=("nef", "ample", "both"), default="both")

    pair_cmd("bmy", "log Chern numbers and the BMY inequality", cmd_bmy)

    sp = pair_cmd("edge-invariants", "chi_alpha, sigma_alpha and the identity check", cmd_edge_invariants)
    sp.add_argument("--alpha", type=_unit_fraction, action="append", help="alpha value (repeatable, exact rational)")

    sp = pair_cmd("reider", "least n with a base point free adjoint bundle", cmd_reider)
    sp.add_argument("--n-max", type=int, default=64)

    sp = pair_cmd("fano", "ampleness of -(K + alpha D)", cmd_fano)
    sp.add_argument("--alpha", type=_unit_fraction, required=True)

    sp = sub.add_parser("cone-solve", help="radial curvature -1 cone metric against its closed form")
    sp.add_argument("--alpha", type=_open_unit, required=True)
    sp.add_argument("--radius", type=_open_unit, default=0.5)
    sp.add_argument("--grid", type=int, default=2000)
    sp.add_argument("--tol", type=_positive, default=1e-6)
    sp.add_argument("--dump", metavar="CSV", help="write rho,phi,K to CSV")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_cone_solve)

    sp = sub.add_parser("lelong", help="Lelong ratios of the model metric and their decay rate")
    sp.add_argument("--alpha", type=_open_unit, required=True)
    sp.add_argument("--radii", type=_open_unit, nargs="+", default=[1e-1, 1e-2, 1e-3, 1e-4])
    sp.add_argument("--offset", type=float, default=0.0, help="distance of the centre from the divisor")
    sp.add_argument("--points", type=int, default=64, help="Gauss–Legendre points")
    sp.add_argument("--dump", metavar="CSV", help="write r,nu to CSV")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_lelong)

    sp = sub.add_parser("examples", help="list, print or export the bundled example pairs")
    sp.add_argument("name", nargs="?")
    sp.add_argument("--export", metavar="DIR")
    sp.set_defaults(func=cmd_examples)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "cone-solve" and args.grid < 100:
        parser.error("--grid must be at least 100")
    try:
        return args.func(args)
    except InputError as e:
        where = f" at {e.path}" if e.path else ""
        sys.stderr.write(f"input error{where}: {e}\n")
        return EXIT_INPUT
    except CatalogInconsistency as e:
        sys.stderr.write(f"catalog inconsistency: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
