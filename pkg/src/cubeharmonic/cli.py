"""Command line entry point: ``cubeharmonic <subcommand> ...``.

Inputs are JSON documents with a top-level ``"schema": 1`` (matrices may
also be given as plain CSV).  Output is JSON by default, sorted and
indented so identical invocations give identical bytes.  Validation
problems exit with status 2 and name the offending field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import bilinear, gaussian, khintchine, lacunary, martingale, verify
from .cube import MAX_ELL, CubeFunction, lp_norm
from .walsh import WalshSpectrum, analyze, synthesize

SCHEMA = 1


class InputError(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _read_text(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError("--input", str(exc)) from exc


def _load_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("input", f"malformed JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise InputError("input", "expected a JSON object")
    schema = doc.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise InputError("schema", f"unsupported schema {schema!r}, expected {SCHEMA}")
    return doc


def _field(doc: dict, name: str):
    if name not in doc:
        raise InputError(name, "missing")
    return doc[name]


def _real_array(value, name: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InputError(name, "expected an array of numbers") from exc
    bad = np.flatnonzero(~np.isfinite(arr.ravel()))
    if bad.size:
        raise InputError(f"{name}[{int(bad[0])}]", "not a finite number")
    return arr


def read_function(text: str) -> CubeFunction:
    doc = _load_json(text)
    ell = _field(doc, "ell")
    if isinstance(ell, bool) or not isinstance(ell, int) or not 1 <= ell <= MAX_ELL:
        raise InputError("ell", f"must be an integer in [1, {MAX_ELL}]")
    values = _real_array(_field(doc, "values"), "values")
    if values.ndim != 1 or values.size != 1 << ell:
        raise InputError("values", f"expected {1 << ell} entries for ell={ell}, got {values.size}")
    return CubeFunction(ell, values)


def read_matrix(text: str) -> np.ndarray:
    if text.lstrip().startswith("{"):
        rows = _field(_load_json(text), "rows")
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise InputError("rows", "expected a nonempty list of rows")
        widths = {len(r) for r in rows}
        if len(widths) != 1 or 0 in widths:
            raise InputError("rows", "rows must be nonempty and of equal length")
        return _real_array(rows, "rows")
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    if not rows:
        raise InputError("input", "empty CSV matrix")
    try:
        data = [[float(x) for x in r] for r in rows]
    except ValueError as exc:
        raise InputError("input", f"non-numeric CSV entry ({exc})") from exc
    if len({len(r) for r in data}) != 1:
        raise InputError("input", "CSV rows have different lengths")
    return _real_array(data, "rows")


def read_lacunary(text: str) -> lacunary.LacunaryPolynomial:
    coeffs = _field(_load_json(text), "coeffs")
    if not isinstance(coeffs, list) or not coeffs:
        raise InputError("coeffs", "expected a nonempty list of [re, im] pairs")
    if len(coeffs) > lacunary.MAX_M + 1:
        raise InputError("coeffs", f"at most {lacunary.MAX_M + 1} coefficients")
    pairs = _real_array(coeffs, "coeffs")
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise InputError("coeffs", "each coefficient must be a [re, im] pair")
    return lacunary.LacunaryPolynomial(pairs[:, 0] + 1j * pairs[:, 1])


# -- subcommands -----------------------------------------------------------

def cmd_walsh(args) -> dict:
    text = _read_text(args.input)
    if args.action == "analyze":
        f = read_function(text)
        s = analyze(f)
        return {"ell": f.ell, "coeffs": s.coeffs, "index": "subset bitmask",
                "method": "fast Walsh-Hadamard transform", "parseval_sum": s.energy(),
                "l2_norm_squared": lp_norm(f, 2) ** 2}
    doc = _load_json(text)
    ell = _field(doc, "ell")
    coeffs = _real_array(_field(doc, "coeffs"), "coeffs")
    if isinstance(ell, bool) or not isinstance(ell, int) or not 1 <= ell <= MAX_ELL:
        raise InputError("ell", f"must be an integer in [1, {MAX_ELL}]")
    if coeffs.ndim != 1 or coeffs.size != 1 << ell:
        raise InputError("coeffs", f"expected {1 << ell} entries for ell={ell}")
    f = synthesize(WalshSpectrum(ell, coeffs))
    return {"ell": ell, "values": f.values, "method": "fast Walsh-Hadamard transform"}


def cmd_maximal(args) -> dict:
    f = read_function(_read_text(args.input))
    mf = martingale.maximal_function(f)
    return {"ell": f.ell, "values": mf.values, "linf": lp_norm(mf, math.inf),
            "f_linf": lp_norm(f, math.inf), "method": "dyadic block averages, all levels"}


def cmd_square(args) -> dict:
    f = read_function(_read_text(args.input))
    sf = martingale.square_function(f)
    l2f, l2s = lp_norm(f, 2), lp_norm(sf, 2)
    return {"ell": f.ell, "values": sf.values, "l2_norm": l2s, "f_l2_norm": l2f,
            "l2_identity_dev": abs(l2s - l2f), "l4_ratio": lp_norm(sf, 4) / lp_norm(f, 4)
            if np.any(f.values) else None, "tolerance": 1e-10,
            "method": "martingale differences"}


def cmd_czdecomp(args) -> dict:
    if not args.lam > 0:
        raise InputError("--lambda", "must be positive")
    f = read_function(_read_text(args.input))
    blocks = martingale.cz_blocks(f, args.lam)
    level = martingale.superlevel_set(f, args.lam)
    l1 = lp_norm(f, 1)
    return {
        "ell": f.ell,
        "lambda": args.lam,
        "blocks": [{"level": b.level, "prefix": b.prefix, "measure": b.measure,
                    "average": b.mean(f)} for b in blocks],
        "superlevel_measure": level.measure,
        "superlevel_members": sorted(level.members),
        "f_l1_norm": l1,
        "weak_type_holds": args.lam * level.measure <= l1,
        "method": "top-down stopping time over dyadic blocks",
    }


def cmd_khintchine(args):
    if (args.p is None) == (args.q is None):
        raise InputError("--p/--q", "give exactly one of --p or --q")
    if args.ell < 1:
        raise InputError("--ell", "must be a positive integer")
    last = args.ell if args.ell_max is None else args.ell_max
    if last < args.ell:
        raise InputError("--ell-max", "must be >= --ell")
    rows = []
    for ell in range(args.ell, last + 1):
        if args.p is not None:
            if args.p != int(args.p) or int(args.p) % 2 or args.p < 4:
                raise InputError("--p", "must be an even integer >= 4")
            s = int(args.p) // 2
            if ell > khintchine.MAX_MOMENT_ELL or s > khintchine.MAX_MOMENT_S:
                raise InputError("--ell", "closed-form moments need ell <= 16 and p <= 12")
            r = khintchine.best_ratio_even(ell, s, restarts=args.restarts, seed=args.seed)
            row = {"ell": ell, "p": args.p, "constant": r.ratio, "argvector": r.vector,
                   "direction": "||f||_p <= C ||f||_2",
                   "gaussian_limit": gaussian.gaussian_khintchine_limit(args.p)}
            if s == 2:
                row["closed_form"] = khintchine.khintchine_p4_closed_form(ell)
        else:
            if not 0 < args.q < 2:
                raise InputError("--q", "must lie in (0, 2)")
            if ell > 20:
                raise InputError("--ell", "cube enumeration limited to ell <= 20")
            r = khintchine.best_ratio_low(ell, args.q, restarts=args.restarts, seed=args.seed)
            row = {"ell": ell, "q": args.q, "ratio": r.ratio, "constant": 1.0 / r.ratio,
                   "argvector": r.vector, "direction": "||f||_2 <= C ||f||_q",
                   "holder_constant": khintchine.holder_reverse_constant(args.q)}
        row.update(method=r.method, label=f"empirical at ell = {ell}",
                   restarts=args.restarts, stop_rel_improvement=khintchine.REL_STOP)
        rows.append(row)
    if args.format == "csv":
        return [[r["ell"], r["constant"], r["method"]] for r in rows], ["ell", "constant", "method"]
    return rows[0] if len(rows) == 1 else {"sweep": rows}


def cmd_gaussian(args) -> dict:
    if not (math.isfinite(args.p) and args.p >= 0):
        raise InputError("--p", "must be a finite number >= 0")
    gm = gaussian.gaussian_moment(args.p)
    out = {"p": args.p, "value": gm.value, "method": "pi^(-(p+1)/2) Gamma((p+1)/2)"}
    if args.p > 0:
        out["root"] = gm.root
    if args.p >= 1:
        out["gaussian_khintchine_limit"] = gaussian.gaussian_khintchine_limit(args.p)
    if args.vector is not None:
        try:
            v = np.array([float(x) for x in args.vector.split(",")])
        except ValueError as exc:
            raise InputError("--vector", "expected comma-separated numbers") from exc
        if args.p == 0:
            raise InputError("--p", "must be positive with --vector")
        out["vector"] = v
        out["linear_functional_moment"] = gaussian.linear_functional_moment(v, args.p)
        if args.check_quadrature and v.size <= 3:
            out["linear_functional_quadrature"] = gaussian.linear_functional_moment_quadrature(
                v, args.p)
    if args.check_quadrature:
        q = gaussian.moment_quadrature(args.p)
        out["quadrature"] = q
        out["quadrature_rel_dev"] = abs(q - gm.value) / gm.value
        out["tolerance"] = 1e-9
    return out


def cmd_lacunary(args) -> dict:
    f = read_lacunary(_read_text(args.input))
    l2, l4 = lacunary.l2_norm(f), lacunary.l4_norm_closed(f)
    return {
        "m": f.m,
        "l2_closed": l2,
        "l4_closed": l4,
        "l2_quadrature": lacunary.circle_quadrature_norm(f, 2),
        "l4_quadrature": lacunary.circle_quadrature_norm(f, 4),
        "quadrature_points": lacunary.default_points(f.m, 4),
        "ratio_l4_l2": l4 / l2 if l2 else None,
        "ratio_bound": 2**0.25,
        "method": "closed form via distinct pairwise sums of powers of two; trapezoid rule at roots of unity",
    }


def cmd_opnorm(args) -> dict:
    a = read_matrix(_read_text(args.input))
    if a.shape[1] > bilinear.MAX_ENUM:
        raise InputError("rows", f"at most {bilinear.MAX_ENUM} columns for exact enumeration")
    res = bilinear.infty_to_one_norm(a)
    tb = bilinear.trace_bound(a, np.sign(a).T)
    return {
        "shape": list(a.shape),
        "norm": res.norm,
        "w_star": res.w_star,
        "v_star": bilinear.row_signs(a, res.w_star),
        "entry_l1": float(np.abs(a).sum()),
        "trace_witness_pairing": tb.witness_pairing,
        "method": f"exact enumeration of 2^{a.shape[1] - 1} sign vectors",
    }


def cmd_grothendieck(args) -> dict:
    a = read_matrix(_read_text(args.input))
    if not np.any(a):
        raise InputError("rows", "matrix must be nonzero")
    if args.restarts < 1:
        raise InputError("--restarts", "must be positive")
    if args.dim is not None and args.dim < 1:
        raise InputError("--dim", "must be positive")
    if args.restrict:
        a = bilinear.restrict(a)
    cfg = bilinear.grothendieck_ratio(a, d=args.dim, restarts=args.restarts,
                                      tol=args.tol, seed=args.seed)
    objs = np.array(cfg.restart_objectives)
    return {
        "shape": list(a.shape),
        "d": cfg.d,
        "objective": cfg.objective,
        "scalar_norm": cfg.scalar_norm,
        "ratio": cfg.ratio,
        "k": bilinear.GROTHENDIECK_K,
        "v": cfg.v,
        "w": cfg.w,
        "restarts": {"count": int(objs.size), "best": float(objs.max()),
                     "worst": float(objs.min()), "mean": float(objs.mean())},
        "iterations": cfg.iterations,
        "tolerance": args.tol,
        "method": "alternating maximization; lower bound on the vector supremum",
    }


def cmd_verify_all(args):
    checks = verify.run_all(args.seed)
    for c in checks:
        print(c.line(), file=sys.stderr)
    if args.format == "csv":
        rows = [[c.number, "pass" if c.passed else "fail", c.title] for c in checks]
        return rows, ["criterion", "status", "title"]
    return {"all_passed": all(c.passed for c in checks),
            "criteria": [{"number": c.number, "title": c.title, "passed": c.passed,
                          "details": c.details} for c in checks]}


COMMANDS = {
    "walsh": cmd_walsh,
    "maximal": cmd_maximal,
    "square": cmd_square,
    "czdecomp": cmd_czdecomp,
    "khintchine": cmd_khintchine,
    "gaussian-moment": cmd_gaussian,
    "lacunary": cmd_lacunary,
    "opnorm": cmd_opnorm,
    "grothendieck": cmd_grothendieck,
    "verify-all": cmd_verify_all,
}

CSV_CAPABLE = {"khintchine", "verify-all"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--input", metavar="PATH", help="input file (default: stdin)")

    parser = argparse.ArgumentParser(prog="cubeharmonic", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walsh", parents=[common], help="Walsh analysis or synthesis")
    p.add_argument("action", choices=("analyze", "synthesize"))
    sub.add_parser("maximal", parents=[common], help="dyadic maximal function")
    sub.add_parser("square", parents=[common], help="dyadic square function")
    p = sub.add_parser("czdecomp", parents=[common], help="stopping-time blocks for a level")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p = sub.add_parser("khintchine", parents=[common], help="empirical Khintchine constants")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--ell-max", type=int, help="sweep ell from --ell to this value")
    p.add_argument("--p", type=float, help="even exponent >= 4 (upper constant)")
    p.add_argument("--q", type=float, help="exponent in (0, 2) (reverse constant)")
    p.add_argument("--restarts", type=int, default=khintchine.DEFAULT_RESTARTS)
    p = sub.add_parser("gaussian-moment", parents=[common], help="Gaussian absolute moments")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--vector", help="comma-separated v for the linear functional moment")
    p.add_argument("--check-quadrature", action="store_true")
    sub.add_parser("lacunary", parents=[common], help="lacunary polynomial norms")
    sub.add_parser("opnorm", parents=[common], help="exact l_inf -> l_1 norm")
    p = sub.add_parser("grothendieck", parents=[common], help="Grothendieck ratio lower bound")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--dim", type=int, help="ambient dimension (default m + n)")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--restrict", action="store_true", help="normalize to a restricted matrix first")
    sub.add_parser("verify-all", parents=[common], help="run every acceptance check")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = sys.stdout
    try:
        if args.format == "csv" and args.command not in CSV_CAPABLE:
            raise InputError("--format", f"csv output not available for {args.command}")
        result = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return 2
    if args.format == "csv":
        rows, header = result
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header + ["seed"])
        writer.writerows(row + [args.seed] for row in rows)
    else:
        doc = {"schema": SCHEMA, "command": args.command, "seed": args.seed, "result": result}
        json.dump(_jsonable(doc), out, indent=2, sort_keys=True)
        out.write("\n")
    if args.command == "verify-all":
        passed = result["all_passed"] if args.format == "json" else all(
            r[1] == "pass" for r in result[0])
        return 0 if passed else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
