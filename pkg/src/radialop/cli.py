"""``radialop`` command line: derive, verify, eval.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .core import RadialOperator, substitute_n
from .expr import ExprError, evaluate, render
from .geometry import metric_summary
from .quantization import ANGULAR_TERM, DimensionError, run_derivation
from .verify import SUITES, run_suite

REPORT_VERSION = "1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


_OPERATOR_SCHEMA = {
    "type": "object",
    "required": ["ascii", "latex", "terms"],
    "properties": {
        "ascii": {"type": "string"},
        "latex": {"type": "string"},
        "terms": {
            "type": "object",
            "patternProperties": {
                "^[0-9]+$": {
                    "type": "object",
                    "patternProperties": {
                        "^-?[0-9]+$": {"type": "array", "items": {"type": "string"}, "minItems": 1}
                    },
                    "additionalProperties": False,
                }
            },
            "additionalProperties": False,
        },
    },
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "command", "inputs", "sections", "records"],
    "additionalProperties": False,
    "$defs": {"operator": _OPERATOR_SCHEMA},
    "properties": {
        "version": {"const": REPORT_VERSION},
        "command": {"enum": ["derive", "verify", "eval"]},
        "inputs": {"type": "object"},
        "sections": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "description"],
                "properties": {
                    "name": {"type": "string"},
                    "description": {"type": "string"},
                    "operator": {"$ref": "#/$defs/operator"},
                },
            },
        },
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "check_name", "dimension", "samples", "max_abs_error",
                    "max_rel_error", "tolerance", "pass", "error_kind", "details",
                ],
                "properties": {
                    "check_name": {"type": "string"},
                    "dimension": {"type": "integer", "minimum": 1},
                    "samples": {"type": "integer", "minimum": 1},
                    "max_abs_error": {"type": "number", "minimum": 0},
                    "max_rel_error": {"type": "number", "minimum": 0},
                    "tolerance": {"type": "number", "exclusiveMinimum": 0},
                    "pass": {"type": "boolean"},
                    "error_kind": {"enum": ["relative", "absolute"]},
                    "details": {"type": "object"},
                },
            },
        },
    },
}


class UsageError(Exception):
    pass


def operator_json(op: RadialOperator) -> dict:
    """Operator as canonical ascii plus ``{order: {exponent: [c_0, c_1, ...]}}`` by n-degree."""
    terms = {}
    for k, coeff in op.items():
        by_exp = {}
        for e, poly in coeff.items():
            by_exp[str(e)] = [str(poly.coefficient(d)) for d in range(poly.degree + 1)]
        terms[str(k)] = by_exp
    return {"ascii": render(op), "latex": render(op, "latex"), "terms": terms}


# --------------------------------------------------------------------------- #
# derive
# --------------------------------------------------------------------------- #


def _section(name: str, description: str, **values) -> dict:
    return {"name": name, "description": description, **values}


def build_derive_report(dimension) -> dict:
    rep = run_derivation(dimension)
    h = rep.prefactors["hamiltonian"].render()
    p = rep.prefactors["momentum"].render()
    lap, mom, sq = (render(x) for x in (rep.radial_laplacian, rep.reduced_momentum, rep.momentum_squared))
    sections = [
        _section("metric", "hyperspherical metric tensor and volume element", **metric_summary(rep.dimension)),
        _section(
            "radial_laplacian",
            "radial part of the Laplace-Beltrami operator, r^(1-n) d r^(n-1) d",
            operator=operator_json(rep.radial_laplacian),
        ),
        _section(
            "reduced_momentum",
            "symmetrized radial derivative D_r; P_r = (-i*hbar) * D_r",
            operator=operator_json(rep.reduced_momentum),
        ),
        _section(
            "momentum_squared",
            "D_r o D_r in normal order, with its term-by-term decomposition",
            operator=operator_json(rep.momentum_squared),
            decomposition={k: operator_json(v) for k, v in rep.momentum_squared_terms.items()},
        ),
        _section(
            "discrepancy",
            "radial Laplacian minus D_r^2; zero exactly when the two Hamiltonian forms agree",
            operator=operator_json(rep.discrepancy),
        ),
        _section(
            "correction_term",
            "term added to P_r^2/(2m) + L^2/(2mr^2) to recover H",
            coefficient=str(rep.correction_term_coefficient)
            if not hasattr(rep.correction_term_coefficient, "items")
            else render(RadialOperator.multiplication(rep.correction_term_coefficient)),
            value=rep.correction_term,
        ),
        _section(
            "physical_forms",
            "operators with their physical prefactors; L^2 is carried as an opaque symbol",
            hamiltonian=f"H = {h} * [{lap}] + {ANGULAR_TERM}",
            momentum=f"P_r = ({p}) * [{mom}]",
            momentum_form=f"P_r^2/(2*m) + {ANGULAR_TERM} = {h} * [{sq}] + {ANGULAR_TERM}",
            relation=f"H = P_r^2/(2*m) + {ANGULAR_TERM} + {rep.correction_term}",
            prefactors={k: v.render() for k, v in rep.prefactors.items()},
        ),
        _section("symmetry_checks", "exact formal-adjoint and conjugation identities", **rep.symmetry_checks),
        _section("notes", "derivation steps", steps=list(rep.notes)),
    ]
    return {
        "version": REPORT_VERSION,
        "command": "derive",
        "inputs": {"n": "symbolic" if rep.dimension is None else rep.dimension},
        "sections": sections,
        "records": [],
    }


def _derive_text(doc: dict) -> str:
    s = {sec["name"]: sec for sec in doc["sections"]}
    n = doc["inputs"]["n"]
    lines = [f"radial operator derivation (n = {n})", "metric:"]
    for key in ("coordinates", "diagonal", "determinant", "radial_weight"):
        lines.append(f"  {key}: {s['metric'][key]}")
    lines.append(f"radial laplacian: {s['radial_laplacian']['operator']['ascii']}")
    lines.append(f"reduced momentum D_r: {s['reduced_momentum']['operator']['ascii']}")
    lines.append(f"D_r^2: {s['momentum_squared']['operator']['ascii']}")
    for key, op in s["momentum_squared"]["decomposition"].items():
        lines.append(f"  {key}: {op['ascii']}")
    lines.append(f"discrepancy: {s['discrepancy']['operator']['ascii']}")
    lines.append(f"correction term: {s['correction_term']['value']}")
    phys = s["physical_forms"]
    for key in ("hamiltonian", "momentum", "momentum_form", "relation"):
        lines.append(phys[key])
    lines.append("symmetry checks:")
    for key, value in s["symmetry_checks"].items():
        if key not in ("name", "description"):
            lines.append(f"  {key}: {'ok' if value else 'FAILED'}")
    return "\n".join(lines)


def cmd_derive(args) -> Tuple[dict, int]:
    try:
        doc = build_derive_report(args.n)
    except DimensionError as exc:
        raise UsageError(str(exc)) from exc
    return doc, EXIT_OK


# --------------------------------------------------------------------------- #
# verify
# --------------------------------------------------------------------------- #


def parse_range(text: str) -> List[int]:
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError as exc:
        raise UsageError(f"invalid dimension range {text!r}; expected a..b") from exc
    if not 1 <= lo <= hi <= 10:
        raise UsageError(f"dimension range must satisfy 1 <= a <= b <= 10, got {text!r}")
    return list(range(lo, hi + 1))


def cmd_verify(args) -> Tuple[dict, int]:
    dims = parse_range(args.n)
    if args.tol is not None and not args.tol > 0:
        raise UsageError("--tol must be positive")
    records = run_suite(args.suite, dims, seed=args.seed, tolerance=args.tol)
    ok = all(r.passed for r in records)
    doc = {
        "version": REPORT_VERSION,
        "command": "verify",
        "inputs": {"n": f"{dims[0]}..{dims[-1]}", "suite": args.suite, "seed": args.seed, "tol": args.tol},
        "sections": [
            _section(
                "summary",
                "numerical cross-checks of the symbolic identities",
                records=len(records),
                passed=sum(r.passed for r in records),
                all_passed=ok,
            )
        ],
        "records": [r.to_dict() for r in records],
    }
    return doc, EXIT_OK if ok else EXIT_FAIL


def _verify_text(doc: dict) -> str:
    lines = []
    for r in doc["records"]:
        status = "PASS" if r["pass"] else "FAIL"
        lines.append(
            f"{status} {r['check_name']} n={r['dimension']} samples={r['samples']} "
            f"max_abs={r['max_abs_error']:.3e} max_rel={r['max_rel_error']:.3e} "
            f"tol={r['tolerance']:.1e} ({r['error_kind']})"
        )
        for key, value in r["details"].items():
            if isinstance(value, float):
                lines.append(f"    {key}={value:.6g}")
    summary = doc["sections"][0]
    lines.append(f"{summary['passed']}/{summary['records']} checks passed")
    return "\n".join(lines)


# --------------------------------------------------------------------------- #
# eval
# --------------------------------------------------------------------------- #


def cmd_eval(args) -> Tuple[dict, int]:
    op = evaluate(args.expression)
    sections = [_section("canonical", "normal-ordered form", operator=operator_json(op))]
    if args.n is not None:
        try:
            n0 = int(args.n)
        except ValueError as exc:
            raise UsageError(f"--n must be an integer, got {args.n!r}") from exc
        sections.append(
            _section("specialized", f"n = {n0}", operator=operator_json(substitute_n(op, n0)))
        )
    doc = {
        "version": REPORT_VERSION,
        "command": "eval",
        "inputs": {"expression": args.expression, "n": args.n},
        "sections": sections,
        "records": [],
    }
    return doc, EXIT_OK


def _eval_text(doc: dict) -> str:
    return doc["sections"][-1]["operator"]["ascii"]


# --------------------------------------------------------------------------- #


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radialop", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("derive", parents=[fmt], help="run the radial derivation")
    p.add_argument("--n", default="symbolic", help="'symbolic' or a positive integer")
    p.set_defaults(handler=cmd_derive, text=_derive_text)

    p = sub.add_parser("verify", parents=[fmt], help="run numerical verification suites")
    p.add_argument("--n", default="1..7", help="dimension range a..b, 1 <= a <= b <= 10")
    p.add_argument("--suite", choices=SUITES + ("all",), default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None, help="override every record's tolerance")
    p.set_defaults(handler=cmd_verify, text=_verify_text)

    p = sub.add_parser("eval", parents=[fmt], help="normalize an operator expression")
    p.add_argument("expression")
    p.add_argument("--n", default=None, help="substitute an integer dimension")
    p.set_defaults(handler=cmd_eval, text=_eval_text)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        doc, code = args.handler(args)
    except ExprError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(exc.caret(), file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(args.text(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
