"""Command-line front end for reproducible equilibrium-census runs.

Exit codes: 0 ok, 2 parse error, 3 convexity error, 4 degeneracy error,
5 inconsistent census, 1 any other failure. All randomness (rotation
trials, tie perturbation) is seeded; reports embed the resolved config,
so identical invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import reports
from .detect import equilibrium_census, radius_bound, radius_sweep
from .errors import (
    ConvexityError,
    DegenerateFieldError,
    DegenerateHessianError,
    DegenerateMeshError,
    GridEquilError,
    InconsistentCensusError,
    MeshFormatError,
    NonClosedMeshError,
)
from .fields import BUILTIN_FIELDS, ScalarField, builtin_field, quadratic
from .grid import RECTANGLE, sample
from .oracle import find_stationary
from .surface import census_surface, load_mesh

EXIT_OK = 0
EXIT_OTHER = 1
EXIT_PARSE = 2
EXIT_CONVEXITY = 3
EXIT_DEGENERACY = 4
EXIT_INCONSISTENT = 5


def _add_field_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--field", choices=sorted(BUILTIN_FIELDS), help="built-in field name")
    p.add_argument("--quad", metavar="CXX,CXY,CYY,CX,CY,C0",
                   help="custom quadratic field coefficients")
    p.add_argument("--a", type=float, default=1.0, help="domain length in x (default 1)")
    p.add_argument("--b", type=float, default=1.0, help="domain length in y (default 1)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=0.1,
                   help="margin for the radius bound, in (0,1) (default 0.1)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for rotations and tie perturbation (default 0)")
    p.add_argument("--tie-break", choices=["lex", "hash"], default="lex",
                   help="tie policy: lexicographic or seeded hash perturbation")
    p.add_argument("--output", help="report file (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default=None,
                   help="force the report format where both make sense")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gridequil",
                                 description="Count global equilibria of sampled fields and convex bodies")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze-fn", help="census of a built-in or quadratic field")
    _add_field_args(p)
    p.add_argument("--n", type=int, required=True, help="grid subdivisions per side")
    p.add_argument("--r", default="auto", help="circle radius (integer or 'auto')")
    _add_common(p)

    p = sub.add_parser("analyze-mesh", help="closed-surface census of a convex mesh")
    p.add_argument("--mesh", required=True, help="OFF or OBJ file")
    p.add_argument("--mesh-format", choices=["off", "obj"], default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", default="auto", help="circle radius (integer or 'auto')")
    _add_common(p)

    p = sub.add_parser("sweep", help="census counts over a range of radii")
    _add_field_args(p)
    p.add_argument("--mesh", help="OFF or OBJ file (alternative to --field/--quad)")
    p.add_argument("--mesh-format", choices=["off", "obj"], default=None)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r-min", type=int, default=1)
    p.add_argument("--r-max", type=int, required=True)
    _add_common(p)

    p = sub.add_parser("oracle", help="continuous stationary points of a field")
    _add_field_args(p)
    p.add_argument("--seed-grid", type=int, default=256,
                   help="scan resolution for gradient sign changes (default 256)")
    _add_common(p)

    p = sub.add_parser("count-1d", help="interior extrema of a 1D sample file")
    p.add_argument("--values", required=True,
                   help="text file of whitespace-separated sample values")
    _add_common(p)
    return ap


def _make_field(args) -> ScalarField:
    if (args.field is None) == (args.quad is None):
        raise ValueError("select exactly one input: --field or --quad")
    if args.field is not None:
        return builtin_field(args.field, a=args.a, b=args.b)
    try:
        coeffs = [float(t) for t in args.quad.split(",")]
    except ValueError as exc:
        raise MeshFormatError(f"malformed --quad coefficients: {args.quad!r}") from exc
    if len(coeffs) != 6:
        raise MeshFormatError("--quad needs 6 comma-separated coefficients")
    return quadratic(*coeffs, a=args.a, b=args.b)


def _parse_radius(text) -> int | str:
    if text == "auto":
        return "auto"
    try:
        r = int(text)
    except ValueError:
        raise ValueError(f"--r must be a positive integer or 'auto', got {text!r}") from None
    if r < 1:
        raise ValueError("--r must be >= 1")
    return r


def _auto_field_radius(field: ScalarField, epsilon: float) -> int:
    """Radius from the largest Hessian eigenvalue ratio over the field's extrema."""
    report = find_stationary(field)
    ratios = [p.eigens.ratio for p in report.points if p.eigens.ratio is not None]
    return radius_bound(max(ratios, default=1.0), field.a, field.b, epsilon)


def _config_dict(args, **extra) -> dict:
    cfg = {
        "command": args.command,
        "seed": getattr(args, "seed", 0),
        "tie_break": getattr(args, "tie_break", "lex"),
        "epsilon": getattr(args, "epsilon", None),
        "format": getattr(args, "format", None),
    }
    for key in ("field", "quad", "mesh", "mesh_format", "a", "b", "n",
                "r_min", "r_max", "seed_grid", "values"):
        if hasattr(args, key):
            cfg[key] = getattr(args, key)
    cfg.update(extra)
    return cfg


def _emit(args, text: str) -> None:
    if args.output:
        reports.write_atomic(args.output, text)
    else:
        sys.stdout.write(text)


def _run_analyze_fn(args) -> int:
    field = _make_field(args)
    r = _parse_radius(args.r)
    if r == "auto":
        r = _auto_field_radius(field, args.epsilon)
    grid = sample(field, args.n, RECTANGLE)
    census = equilibrium_census(grid, r, tie_break=args.tie_break, seed=args.seed)
    doc = reports.census_dict(census, grid)
    doc["config"] = _config_dict(args, r=r)
    _emit(args, reports.json_text(doc))
    return EXIT_OK


def _run_analyze_mesh(args) -> int:
    mesh = load_mesh(args.mesh, fmt=args.mesh_format)
    r = _parse_radius(args.r)
    sc = census_surface(mesh, args.n, r, epsilon=args.epsilon,
                        tie_break=args.tie_break, seed=args.seed)
    doc = reports.surface_census_dict(sc)
    doc["config"] = _config_dict(args, r=sc.census.r)
    _emit(args, reports.json_text(doc))
    return EXIT_OK


def _run_sweep(args) -> int:
    if args.mesh is not None:
        if args.field is not None or args.quad is not None:
            raise ValueError("select exactly one input: --mesh or --field/--quad")
        from .surface import radial_field
        from .grid import SPHERE_CHART
        field = radial_field(load_mesh(args.mesh, fmt=args.mesh_format))
        grid = sample(field, args.n, SPHERE_CHART)
    else:
        grid = sample(_make_field(args), args.n, RECTANGLE)
    result = radius_sweep(grid, args.r_min, args.r_max,
                          tie_break=args.tie_break, seed=args.seed)
    fmt = args.format or "csv"
    if fmt == "csv":
        config = reports.json_text(_config_dict(args)).replace("\n", " ").strip()
        _emit(args, f"# config: {config}\n" + reports.sweep_csv(result))
    else:
        doc = reports.sweep_dict(result)
        doc["config"] = _config_dict(args)
        _emit(args, reports.json_text(doc))
    return EXIT_OK


def _run_oracle(args) -> int:
    field = _make_field(args)
    report = find_stationary(field, seed_grid=args.seed_grid)
    doc = reports.oracle_dict(report)
    doc["config"] = _config_dict(args)
    _emit(args, reports.json_text(doc))
    return EXIT_OK


def _run_count_1d(args) -> int:
    try:
        with open(args.values) as fh:
            values = [float(t) for t in fh.read().split()]
    except (OSError, ValueError) as exc:
        raise MeshFormatError(f"cannot read sample values: {exc}") from exc
    from .detect import count_1d
    k, l = count_1d(values, tie_break=args.tie_break, seed=args.seed)
    doc = {"k": k, "l": l, "samples": len(values), "config": _config_dict(args)}
    _emit(args, reports.json_text(doc))
    return EXIT_OK


_RUNNERS = {
    "analyze-fn": _run_analyze_fn,
    "analyze-mesh": _run_analyze_mesh,
    "sweep": _run_sweep,
    "oracle": _run_oracle,
    "count-1d": _run_count_1d,
}


def run(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _RUNNERS[args.command](args)
    except MeshFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ConvexityError, NonClosedMeshError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVEXITY
    except (DegenerateHessianError, DegenerateFieldError, DegenerateMeshError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY
    except InconsistentCensusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except (GridEquilError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OTHER


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
