"""Command-line front end.

Every subcommand reads presentations in the text formats of :mod:`.io`,
takes explicit degree caps, and exits with

* 0 — success (for yes/no checks: the check passed),
* 2 — malformed input, reported as ``path:line:column: message``,
* 3 — a failed mathematical check or unsupported input,
* 4 — an inconclusive formality verdict (``formal-check`` only).

With ``--json`` the result is a single JSON document with ``"schema": 1``,
sorted keys and two-space indentation; for fixed input the bytes are
identical across runs (no timings or machine state leak in).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import io, models, quillen, resolutions
from .dg import DgPresentation
from .wcat import Lattice, LatticeError, cone_check, w_complex


def _emit(doc: dict) -> None:
    print(json.dumps(doc, sort_keys=True, indent=2))


def _load_graded(path: str, verb: str, flavors=None) -> DgPresentation:
    obj = io.parse_presentation(path)
    if not isinstance(obj, DgPresentation):
        raise io.ParseError(f"{verb} expects a graded presentation, "
                            "not a lattice", path)
    if flavors and obj.flavor not in flavors:
        raise io.ParseError(f"{verb} expects one of {'/'.join(flavors)}, "
                            f"found {obj.flavor}", path)
    return obj


def _load_lattice(path: str, verb: str) -> Lattice:
    obj = io.parse_presentation(path)
    if not isinstance(obj, Lattice):
        raise io.ParseError(f"{verb} expects a lattice", path)
    return obj


# ------------------------------------------------------------------- verbs

def _cmd_validate(args) -> int:
    p = _load_graded(args.file, "validate")
    report = p.validate(args.cap)
    if args.json:
        _emit({"schema": 1, "command": "validate", **report.as_dict()})
    elif report.ok:
        print(f"ok: square-zero through degree {args.cap}")
    else:
        for issue in report.issues:
            print(f"{issue.kind} at {issue.where} (degree {issue.degree}): "
                  f"{issue.detail}")
    return 0 if report.ok else 3


def _cmd_homology(args) -> int:
    p = _load_graded(args.file, "homology")
    report = p.homology(args.cap)
    if args.json:
        by_degree = {}
        for degree, data in report.by_degree.items():
            by_degree[str(degree)] = {
                "dim": data.dim,
                "cycle_rank": data.cycle_rank,
                "boundary_rank": data.boundary_rank,
                "representatives": [r.display() for r in data.representatives],
            }
        _emit({"schema": 1, "command": "homology", "cap": report.cap,
               "flavor": report.flavor, "dims": report.dims(),
               "by_degree": by_degree})
    else:
        for degree in range(1, report.cap + 1):
            data = report.by_degree[degree]
            reps = ", ".join(r.display() for r in data.representatives)
            print(f"degree {degree}: dim {data.dim}" +
                  (f"  [{reps}]" if reps else ""))
    return 0


def _cmd_minimal_model(args) -> int:
    a = _load_graded(args.file, "minimal-model", flavors=("DGA",))
    model, comparison = models.minimal_model_dga(a, args.cap)
    text = io.serialize_presentation(model)
    if args.json:
        _emit({"schema": 1, "command": "minimal-model", "cap": args.cap,
               "presentation": text,
               "comparison": {name: comparison.value_of(name).display()
                              for name in model.gen_names}})
    else:
        sys.stdout.write(text)
    return 0


def _bigraded(p: DgPresentation, cap: int) -> models.BigradedModel:
    h = models.present_homology(p, cap)
    return models.bigraded_model(h, cap)


def _cmd_bigraded_model(args) -> int:
    p = _load_graded(args.file, "bigraded-model", flavors=("DGL", "DGA"))
    bg = _bigraded(p, args.cap)
    bg.underlying.bidegrees = bg.bidegrees
    text = io.serialize_presentation(bg.underlying)
    if args.json:
        _emit({"schema": 1, "command": "bigraded-model", "cap": args.cap,
               "presentation": text,
               "bidegrees": {n: list(bd) for n, bd in bg.bidegrees.items()}})
    else:
        sys.stdout.write(text)
    return 0


def _cmd_filtered_model(args) -> int:
    target = _load_graded(args.file, "filtered-model", flavors=("DGL", "DGA"))
    bg = _bigraded(target, args.cap)
    fm = models.filtered_model(bg, target, args.cap)
    model = fm.presentation()
    model.bidegrees = bg.bidegrees
    text = io.serialize_presentation(model)
    support = sorted(fm.perturbation)
    perturbation = {n: fm.perturbation[n].display() for n in support}
    if args.json:
        _emit({"schema": 1, "command": "filtered-model", "cap": args.cap,
               "presentation": text, "support": support,
               "perturbation": perturbation,
               "comparison": {name: fm.comparison.value_of(name).display()
                              for name in model.gen_names}})
    else:
        sys.stdout.write(text)
        for name in support:
            print(f"# perturbation {name} = {perturbation[name]}")
    return 0


def _cmd_perturbation_system(args) -> int:
    p = _load_graded(args.file, "perturbation-system",
                     flavors=("DGL", "DGA"))
    system = models.perturbation_system(_bigraded(p, args.cap), args.cap)
    if args.json:
        _emit(system.as_json_doc())
    else:
        print(f"{len(system.variables)} variables, "
              f"{len(system.equations)} equations through degree {args.cap}")
        residuals = system.evaluate({})
        print("zero assignment satisfies the system: "
              + ("yes" if not residuals else f"no ({len(residuals)} residuals)"))
    return 0


def _cmd_formal_check(args) -> int:
    p = _load_graded(args.file, "formal-check", flavors=("DGL", "DGA"))
    result = models.is_formal_up_to(p, args.cap, budget=args.budget)
    if args.json:
        _emit({"schema": 1, "command": "formal-check", "cap": result.cap,
               "status": result.status,
               "obstruction_degree": result.obstruction_degree,
               "obstruction": result.obstruction, "detail": result.detail})
    elif result.status == "formal":
        print(f"formal through degree {result.cap}")
    elif result.status == "not-formal":
        print(f"not formal: obstruction in degree {result.obstruction_degree}"
              + (f" ({result.obstruction})" if result.obstruction else ""))
    else:
        print("inconclusive: " + (result.detail or "budget exhausted"))
    return 4 if result.status == "inconclusive" else 0


def _cmd_ce(args) -> int:
    l = _load_graded(args.file, "ce", flavors=("DGL",))
    coalgebra = quillen.ce(l, args.cap, args.convention)
    text = io.serialize_presentation(coalgebra.as_dgc())
    if args.json:
        _emit({"schema": 1, "command": "ce", "cap": args.cap,
               "convention": args.convention, "presentation": text})
    else:
        sys.stdout.write(text)
    return 0


def _cmd_cobar(args) -> int:
    c = _load_graded(args.file, "cobar", flavors=("DGC",))
    text = io.serialize_presentation(quillen.cobar(c, args.cap))
    if args.json:
        _emit({"schema": 1, "command": "cobar", "cap": args.cap,
               "presentation": text})
    else:
        sys.stdout.write(text)
    return 0


def _cmd_unit_check(args) -> int:
    l = _load_graded(args.file, "unit-check", flavors=("DGL",))
    report = quillen.unit_comparison(l, args.cap)
    if args.json:
        _emit({"schema": 1, "command": "unit-check", "cap": report.cap,
               "equal": report.equal,
               "by_degree": {str(d): row
                             for d, row in report.by_degree.items()}})
    else:
        for degree in range(1, report.cap + 1):
            row = report.by_degree[degree]
            print(f"degree {degree}: source {row['source']}, round trip "
                  f"{row['round_trip']}"
                  + ("" if row["equal"] else "  MISMATCH"))
    return 0 if report.equal else 3


def _cmd_w_complex(args) -> int:
    g = _load_lattice(args.file, "w-complex")
    source = args.source or g.init
    target = args.target or g.fin
    complex_ = w_complex(g, source, target)
    counts = complex_.cell_counts()
    square_zero = complex_.boundary_squares_to_zero()
    homology = complex_.reduced_homology_dims()
    if args.json:
        _emit({"schema": 1, "command": "w-complex", "source": source,
               "target": target,
               "cells": {str(dim): n for dim, n in counts.items()},
               "euler_characteristic": complex_.euler_characteristic(),
               "boundary_squares_to_zero": square_zero,
               "reduced_homology": homology})
    else:
        print("cells by dimension: "
              + ", ".join(f"{dim}: {n}" for dim, n in sorted(counts.items())))
        print(f"euler characteristic: {complex_.euler_characteristic()}")
        print(f"boundary squares to zero: {'yes' if square_zero else 'NO'}")
        print(f"reduced homology dimensions: {homology}")
    return 0 if square_zero else 3


def _cmd_cone_check(args) -> int:
    g = _load_lattice(args.file, "cone-check")
    report = cone_check(g)
    if args.json:
        _emit({"schema": 1, "command": "cone-check", **report.as_dict()})
    elif report.ok:
        print("ok: the double mapping cylinder is contractible "
              f"(critical cells: {', '.join(report.critical_cells)})")
    else:
        print(f"failed: {report.detail or 'nontrivial reduced homology'}")
        print(f"reduced homology dimensions: {report.homology}")
    return 0 if report.ok else 3


def _parse_steps(text: Optional[str]) -> Optional[list]:
    if text is None:
        return None
    try:
        steps = sorted({int(part) for part in text.split(",") if part.strip()})
    except ValueError:
        raise ValueError(f"--steps wants comma-separated integers, got {text!r}")
    if not steps or any(s not in range(1, 7) for s in steps):
        raise ValueError("--steps entries must lie in 1..6")
    return steps


def _cmd_verify_example(args) -> int:
    report = resolutions.run_corpus(args.cap, steps=_parse_steps(args.steps))
    if args.json:
        _emit({"schema": 1, "command": "verify-example", "cap": args.cap,
               "ok": report.ok,
               "checks": [{"step": e.step, "name": e.name, "ok": e.ok,
                           "detail": e.detail} for e in report.entries]})
    else:
        print(report.summary())
    return 0 if report.ok else 3


# ------------------------------------------------------------------ parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratmodels",
        description="Exact computations with differential graded Lie, "
                    "commutative and coalgebra presentations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, help_, *, file=True, cap=True):
        p = sub.add_parser(name, help=help_)
        if file:
            p.add_argument("file", help="input presentation")
        if cap:
            p.add_argument("--cap", type=int, required=True,
                           help="degree cap (all computations are truncated)")
        p.add_argument("--json", action="store_true",
                       help="emit one deterministic JSON document")
        p.set_defaults(handler=handler)
        return p

    add("validate", _cmd_validate,
        "check gradings and that the differential squares to zero")
    add("homology", _cmd_homology, "homology dimensions and representatives")
    add("minimal-model", _cmd_minimal_model,
        "minimal model of a commutative presentation")
    add("bigraded-model", _cmd_bigraded_model,
        "bigraded model of the homology of a presentation")
    add("filtered-model", _cmd_filtered_model,
        "filtered model: perturb the bigraded model of the homology "
        "until it is equivalent to the input")
    add("perturbation-system", _cmd_perturbation_system,
        "quadratic equations cutting out all admissible perturbations")
    formal = add("formal-check", _cmd_formal_check,
                 "decide formality up to the cap (exit 4 if inconclusive)")
    formal.add_argument("--budget", type=int, default=None,
                        help="search budget; also RATMODELS_FORMAL_BUDGET")
    ce_parser = add("ce", _cmd_ce,
                    "cochains-style coalgebra of a Lie presentation")
    ce_parser.add_argument("--convention", choices=("internal", "shifted"),
                           default="internal",
                           help="grading convention for the output")
    add("cobar", _cmd_cobar, "free Lie presentation on a coalgebra shift")
    add("unit-check", _cmd_unit_check,
        "compare homology with the coalgebra round trip")
    w_parser = add("w-complex", _cmd_w_complex,
                   "cubical subdivision complex between two lattice objects",
                   cap=False)
    w_parser.add_argument("--source", default=None,
                          help="start object (default: the initial object)")
    w_parser.add_argument("--target", default=None,
                          help="end object (default: the final object)")
    add("cone-check", _cmd_cone_check,
        "verify the subdivision complex of a lattice is contractible",
        cap=False)
    verify = add("verify-example", _cmd_verify_example,
                 "re-derive the bundled worked example", file=False)
    verify.add_argument("--steps", default=None,
                        help="comma-separated subset of 1..6 (default: all)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except io.ParseError as error:
        print(error, file=sys.stderr)
        return 2
    except LatticeError as error:
        print(f"lattice error: {error}", file=sys.stderr)
        return 2
    except OSError as error:
        print(error, file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
