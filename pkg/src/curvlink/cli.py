"""Command-line front end.

Exit codes: 0 success or pass, 1 fail or infeasible, 2 usage or input error.
Angles shown to people are in degrees; JSON output carries radians alongside.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

from . import __version__
from .coxeter import CoxeterMatrix, ReflectionRep, element_order
from .dihedral import TABLE1_M, table1
from .errors import DomainError
from .links import ArtinDefiningGraph, DeltaAssignment, LGraphParams, block_link, l_graph, l_graph_diameter_formula
from .metric_graph import DEFAULT_TOL, diameter, graph_to_dict, shortest_path, systole
from .verdict import check, enumerate_amn2, excluded_triples, solve_deltas, triples_check

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def parse_int_list(text):
    """'3,4,7' and '3..13' forms, mixed freely: '3..13,18'."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty integer list")
    return out


def default_tol():
    raw = os.environ.get("CURVLINK_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise InputError(f"CURVLINK_TOL is not a number: {raw!r}") from None
    if not tol >= 0:
        raise InputError("CURVLINK_TOL must be non-negative")
    return tol


def _fmt(x, precision):
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return f"{x:.{precision}f}"


def _report(command, params, tol=None, **body):
    doc = {"command": command, "version": __version__, "params": params}
    if tol is not None:
        doc["tolerance"] = tol
    doc.update(body)
    return doc


def _emit_json(doc, out):
    out.write(json.dumps(doc, indent=2, sort_keys=False, allow_nan=True) + "\n")


def _emit_csv(header, rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from None


def _load_problem(args):
    g = ArtinDefiningGraph.from_dict(_load_json(args.input))
    if args.deltas in (None, "auto"):
        d = DeltaAssignment.symmetric(g)
    else:
        d = DeltaAssignment.from_dict(_load_json(args.deltas), g)
    return g, d


def _deg(x):
    return None if x is None or not math.isfinite(x) else math.degrees(x)


def _verdict_body(v, g):
    return {
        "pass": v.passed,
        "systole_deg": _deg(v.systole),
        "systole_rad": v.systole if math.isfinite(v.systole) else None,
        "slack_deg": _deg(v.slack),
        "cycle": list(v.cycle),
        "cycle_tags": list(v.cycle_tags),
        "deltas": v.deltas.to_dict(g),
    }


def cmd_table1(args, out):
    rows = table1(args.m)
    p = args.precision
    if args.format == "csv":
        _emit_csv(
            ["m", "theta_deg", "cos_theta", "cos_alpha", "alpha_deg"],
            [[r.m, _fmt(r.theta_deg, p), _fmt(r.cos_theta, 6), _fmt(r.cos_alpha, 6), _fmt(r.alpha_deg, p)] for r in rows],
            out,
        )
    else:
        _emit_json(
            _report(
                "table1",
                {"m": args.m},
                rows=[
                    {
                        "m": r.m,
                        "theta_deg": r.theta_deg,
                        "theta_rad": math.radians(r.theta_deg),
                        "cos_theta": r.cos_theta,
                        "cos_alpha": r.cos_alpha,
                        "alpha_deg": r.alpha_deg,
                        "alpha_rad": math.radians(r.alpha_deg),
                    }
                    for r in rows
                ],
            ),
            out,
        )
    return EXIT_OK


def cmd_block_link(args, out):
    if args.m == 2:
        delta = None
    elif args.delta_deg is None:
        from .dihedral import symmetric_delta

        delta = symmetric_delta(args.m)
    else:
        delta = math.radians(args.delta_deg)
    g = block_link(args.m, delta)
    w = systole(g)
    _emit_json(
        _report(
            "block-link",
            {"m": args.m, "delta_deg": _deg(delta)},
            graph=graph_to_dict(g),
            systole_deg=_deg(w.length) if w else None,
        ),
        out,
    )
    return EXIT_OK


def _cmd_verdict(name, fn):
    def run(args, out):
        tol = args.tol if args.tol is not None else default_tol()
        g, d = _load_problem(args)
        v = fn(g, d, tol)
        _emit_json(_report(name, {"input": args.input, "deltas": args.deltas}, tol, **_verdict_body(v, g)), out)
        return EXIT_OK if v.passed else EXIT_FAIL

    return run


def cmd_enumerate(args, out):
    if args.family != "amn2":
        raise InputError(f"unknown family {args.family!r}")
    tol = default_tol()
    rows = enumerate_amn2(args.m_max, args.n, tol)
    if args.csv:
        _emit_csv(
            ["n", "minimal_m", "required_alpha_deg", "finite_type_m"],
            [
                [r.n, "" if r.minimal_m is None else r.minimal_m, _fmt(math.degrees(r.required_alpha), args.precision),
                 " ".join(map(str, r.finite_type_ms))]
                for r in rows
            ],
            out,
        )
    else:
        _emit_json(
            _report(
                "enumerate",
                {"family": args.family, "m_max": args.m_max, "n": args.n},
                tol,
                rows=[
                    {
                        "n": r.n,
                        "minimal_m": r.minimal_m,
                        "required_alpha_deg": math.degrees(r.required_alpha),
                        "required_alpha_rad": r.required_alpha,
                        "finite_type_m": list(r.finite_type_ms),
                    }
                    for r in rows
                ],
            ),
            out,
        )
    return EXIT_OK


def cmd_excluded(args, out):
    tol = default_tol()
    rows = excluded_triples(args.max, tol)
    if args.csv:
        _emit_csv(["m1", "m2", "m3"], rows, out)
    else:
        _emit_json(_report("excluded-triples", {"max": args.max}, tol, rows=[list(r) for r in rows]), out)
    return EXIT_OK


def cmd_diam_l(args, out):
    rho, sigma = math.radians(args.rho_deg), math.radians(args.sigma_deg)
    p = LGraphParams(rho, sigma, args.n_r, args.n_s)
    g = l_graph(p)
    res = diameter(g, args.resolution)
    cross = {}
    for a in ("r+", "r-"):
        for b in ("s+", "s-"):
            cross[f"d({a},{b})_deg"] = math.degrees(shortest_path(g, a, b)[0])
    _emit_json(
        _report(
            "diam-l",
            {"rho_deg": args.rho_deg, "sigma_deg": args.sigma_deg, "n_r": args.n_r, "n_s": args.n_s},
            diameter_deg=math.degrees(res.length),
            diameter_rad=res.length,
            formula_deg=math.degrees(l_graph_diameter_formula(rho, sigma)),
            witness={
                "p": {"edge": res.p[0], "offset_rad": res.p[1]},
                "q": {"edge": res.q[0], "offset_rad": res.q[1]},
            },
            cross_distances=cross,
        ),
        out,
    )
    return EXIT_OK


def cmd_solve(args, out):
    tol = default_tol()
    g = ArtinDefiningGraph.from_dict(_load_json(args.input))
    if args.grid_deg <= 0:
        raise InputError("--grid-deg must be positive")
    res = solve_deltas(g, args.mode, math.radians(args.grid_deg), tol)
    body = {
        "feasible": res.feasible,
        "slack_deg": _deg(res.slack),
        "slack_rad": res.slack if math.isfinite(res.slack) else None,
        "cycle_tags": list(res.cycle_tags),
        "deltas": res.deltas.to_dict(g),
        "alphas_deg": {
            f"{x},{y}": math.degrees(res.deltas.alpha_beta(g, x, y)[0]) for x, y in g.finite_pairs()
        },
        "evaluations": res.evaluations,
        "envelopes": [
            {
                "m": e.m,
                "max_alpha_plus_two_beta_deg": math.degrees(e.max_value),
                "at_alpha_deg": math.degrees(e.argmax_alpha),
                "margin_deg": math.degrees(e.margin),
            }
            for e in res.envelopes
        ],
    }
    doc = _report("solve-deltas", {"input": args.input, "mode": args.mode, "grid_deg": args.grid_deg}, tol, **body)
    if args.json:
        _emit_json(doc, out)
    else:
        status = "feasible" if res.feasible else "infeasible (best found)"
        out.write(f"{status}: slack {_fmt(_deg(res.slack), 6)} deg\n")
        for k, v in body["alphas_deg"].items():
            out.write(f"  alpha[{k}] = {v:.6f} deg\n")
    return EXIT_OK if res.feasible else EXIT_FAIL


def cmd_coxeter(args, out):
    if len(args.indices) != 3:
        raise InputError("--indices takes exactly three values m,n,p")
    m, n, p = args.indices
    rep = ReflectionRep(CoxeterMatrix.triangle(m, n, p))
    res = element_order(rep, args.word, args.cap)
    order = "infinite" if res.infinite else res.order
    doc = _report(
        "coxeter-order",
        {"indices": args.indices, "word": args.word, "cap": args.cap},
        order=order,
        certificate=res.certificate,
        spectral_radius=res.spectral_radius,
        detail=res.detail,
    )
    if args.json:
        _emit_json(doc, out)
    else:
        out.write(f"W({m},{n},{p}) {args.word}: order {order if order is not None else 'undetermined'} "
                  f"[{res.certificate}, spectral radius {res.spectral_radius:.12g}]\n")
    return EXIT_OK if res.order is not None else EXIT_FAIL


def build_parser():
    ap = argparse.ArgumentParser(prog="curvlink", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"curvlink {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table1", help="symmetric alpha = beta angles per relator index")
    p.add_argument("--m", type=parse_int_list, default=list(TABLE1_M))
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--precision", type=int, default=3)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("block-link", help="link graph of a single building block")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta-deg", type=float, default=None, help="default: the symmetric delta")
    p.set_defaults(func=cmd_block_link)

    for name, fn in (("check", check), ("triples-check", triples_check)):
        p = sub.add_parser(name, help="link-condition verdict for an Artin defining graph")
        p.add_argument("--input", required=True)
        p.add_argument("--deltas", default="auto", help="'auto' (symmetric) or a delta JSON file")
        p.add_argument("--tol", type=float, default=None)
        p.set_defaults(func=_cmd_verdict(name, fn))

    p = sub.add_parser("enumerate", help="minimal m per n for A(m, n, 2)")
    p.add_argument("--family", default="amn2")
    p.add_argument("--m-max", type=int, default=60)
    p.add_argument("--n", type=parse_int_list, default=list(range(3, 9)))
    p.add_argument("--csv", action="store_true")
    p.add_argument("--precision", type=int, default=3)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("excluded-triples", help="index triples failing under the symmetric model")
    p.add_argument("--max", type=int, default=60)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_excluded)

    p = sub.add_parser("diam-l", help="diameter of the two-circle graph L")
    p.add_argument("--rho-deg", type=float, required=True)
    p.add_argument("--sigma-deg", type=float, required=True)
    p.add_argument("--n-r", type=int, default=1)
    p.add_argument("--n-s", type=int, default=1)
    p.add_argument("--resolution", type=int, default=8)
    p.set_defaults(func=cmd_diam_l)

    p = sub.add_parser("solve-deltas", help="search delta assignments maximizing the systole slack")
    p.add_argument("--input", required=True)
    p.add_argument("--mode", choices=("free", "symmetric"), default="free")
    p.add_argument("--grid-deg", type=float, default=0.5)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("coxeter-order", help="order of a word in a triangle Coxeter group")
    p.add_argument("--indices", type=parse_int_list, required=True)
    p.add_argument("--word", default="abc")
    p.add_argument("--cap", type=int, default=10000)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_coxeter)
    return ap


def run(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args, out)
    except (InputError, DomainError) as exc:
        err.write(f"curvlink {args.command}: {exc}\n")
        return EXIT_INPUT


def main():
    sys.exit(run())


def run_capture(argv):
    """Run and return ``(exit_code, stdout_text, stderr_text)``."""
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()
