from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .config import RunConfig, atomic_write, format_csv, parallel_map, parse_vector
from .errors import CoincidentPointsError, GrazingDirectionError, LayeredElasticaError, ValidationError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CHECK_FAILED = 2


class _Parser(argparse.ArgumentParser):
    """Reports usage errors as exit code 1 instead of argparse's 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--medium", default=None, help="ElasticMedium JSON (lambda, mu, rho_plus, rho_minus, omega, dim)")
    p.add_argument("--quad", default=None, help="QuadConfig JSON (tol, node_budget, indent_scale)")
    p.add_argument("--out", default=None, help="Output path; stdout if omitted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="layered-elastica", description="Two-layered elastic Green's tensors and rough-interface scattering")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="Green's tensor on a grid, as CSV")
    _common(p)
    p.add_argument("--dim", type=int, choices=[2, 3], default=None)
    p.add_argument("--source", required=True, help="Source point y, e.g. '[0.5, 1.0]'")
    p.add_argument("--grid", required=True, help="x1:a:b:n,x2:c:d:n[,x3:e:f:n]")

    p = sub.add_parser("farfield", help="Far-field patterns of the correction potentials, as CSV")
    _common(p)
    p.add_argument("--dim", type=int, choices=[2, 3], default=None)
    p.add_argument("--source", required=True)
    p.add_argument("--angles", type=int, default=64, help="2D: number of directions")
    p.add_argument("--theta", type=int, default=8, help="3D: number of polar angles")
    p.add_argument("--phi", type=int, default=8, help="3D: number of azimuths")

    p = sub.add_parser("verify", help="Run property suites; JSON report")
    _common(p)
    p.add_argument("suite_name", nargs="?", default=None)
    p.add_argument("--suite", action="append", default=[])
    p.add_argument("--all", action="store_true")
    p.add_argument("--R-list", dest="r_list", default=None, help="Radii for the radiation suite, e.g. 25,50,100")
    p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("solve", help="Rough-interface point-source scattering in 2D")
    _common(p)
    p.add_argument("--profile", required=True, help="Profile JSON {type: flat|bump|samples, ...}")
    p.add_argument("--source", required=True, help="[z1, z2, re a1, im a1, re a2, im a2]")
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--nodes", type=int, default=512)
    p.add_argument("--ppw", type=float, default=10.0, help="Mesh points per shortest wavelength")
    p.add_argument("--grid", default=None, help="Field grid; defaults to 32x32 over [-R, R]^2")

    p = sub.add_parser("specfun-probe", help=argparse.SUPPRESS)
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--z", action="append", required=True, help="'re,im' of an argument; repeatable")
    p.add_argument("--out", default=None)
    p.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _emit(out: Optional[Path], text: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def _complex_cells(values: np.ndarray) -> List[float]:
    flat = np.asarray(values, dtype=complex).ravel()
    return [v for z in flat for v in (z.real, z.imag)]


def _entry_header(dim: int) -> List[str]:
    return [f"{p}_G{i}{j}" for i in range(1, dim + 1) for j in range(1, dim + 1) for p in ("re", "im")]


def cmd_eval(args: argparse.Namespace) -> int:
    cfg = RunConfig.load("eval", args.medium, args.quad, args.out, args.seed, args.dim, args.grid)
    from .green2d import assemble_G
    from .green3d import assemble_G3d, selected_variants

    dim = cfg.dim
    y = np.array(parse_vector(args.source, dim))
    assemble = assemble_G if dim == 2 else assemble_G3d
    if dim == 3:
        selected_variants(cfg.medium)
    pts = cfg.grid.points()

    def one(x: np.ndarray) -> np.ndarray:
        try:
            return assemble(x, y, cfg.medium, cfg.quad).entries
        except CoincidentPointsError:
            logger.warning("grid point %s coincides with the source; writing NaN", x.tolist())
        except LayeredElasticaError as exc:
            logger.warning("grid point %s failed (%s: %s); writing NaN", x.tolist(), type(exc).__name__, exc)
        return np.full((dim, dim), np.nan + 0j)

    values = parallel_map(one, list(pts))
    header = [f"x{i}" for i in range(1, dim + 1)] + _entry_header(dim)
    rows = [list(x) + _complex_cells(v) for x, v in zip(pts, values)]
    _emit(cfg.output_path, format_csv(header, rows))
    return EXIT_OK


def cmd_farfield(args: argparse.Namespace) -> int:
    cfg = RunConfig.load("farfield", args.medium, args.quad, args.out, args.seed, args.dim)
    dim = cfg.dim
    y = np.array(parse_vector(args.source, dim))
    if dim == 2:
        from .green2d import far_field

        rows = []
        for k in range(args.angles):
            th = 2 * np.pi * (k + 0.5) / args.angles
            d = np.array([np.cos(th), np.sin(th)])
            for a in ("p", "s"):
                for j in (1, 2):
                    try:
                        pat = far_field(a, j, d, y, cfg.medium)
                    except GrazingDirectionError:
                        continue
                    rows.append([th, a, j, pat.value.real, pat.value.imag])
        _emit(cfg.output_path, format_csv(["angle", "wave_type", "j", "re", "im"], rows))
        return EXIT_OK

    from .green3d import all_keys, far_field3d, selected_variants

    variants = selected_variants(cfg.medium)
    y_side = 1 if y[2] > 0 else -1
    keys = [key for key in all_keys() if key.y_side == y_side]
    rows = []
    for i in range(args.theta):
        th = np.pi * (i + 0.5) / args.theta
        for q in range(args.phi):
            ph = 2 * np.pi * q / args.phi
            d = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
            x_side = 1 if d[2] > 0 else -1
            for key in keys:
                if x_side not in key.x_sides():
                    continue
                try:
                    pat = far_field3d(key, d, y, cfg.medium, variants=variants)
                except GrazingDirectionError:
                    continue
                comp = "" if key.component is None else str(key.component)
                rows.append([th, ph, key.family, key.column, key.part, comp, pat.wave_type,
                             pat.value.real, pat.value.imag])
    header = ["theta", "phi", "family", "j", "part", "component", "wave_type", "re", "im"]
    _emit(cfg.output_path, format_csv(header, rows))
    return EXIT_OK


def _suite_options(name: str, args: argparse.Namespace) -> Dict[str, object]:
    opts: Dict[str, object] = {}
    if name == "radiation" and args.r_list:
        opts["radii_2d"] = parse_vector(args.r_list)
    if args.samples is not None and name in ("stress-identity", "angular-identities", "spectral-residual",
                                             "sommerfeld", "degenerate"):
        opts["samples"] = args.samples
    return opts


def cmd_verify(args: argparse.Namespace) -> int:
    from .verify import SUITE_ORDER, run_suite

    cfg = RunConfig.load("verify", args.medium, args.quad, args.out, args.seed)
    names = list(SUITE_ORDER) if args.all else [n for n in [args.suite_name, *args.suite] if n]
    if not names:
        raise _UsageError("name a suite or pass --all")
    reports = []
    for name in names:
        reports.extend(run_suite(name, cfg.medium, cfg.quad, cfg.seed, **_suite_options(name, args)))
    ok = all(r.passed for r in reports)
    doc = {
        "medium": cfg.medium.to_dict(),
        "seed": cfg.seed,
        "suites": names,
        "reports": [r.to_dict() for r in reports],
        "pass": ok,
    }
    _emit(cfg.output_path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    for r in reports:
        if not r.passed:
            sys.stderr.write(f"FAILED {r.check}: {r.metric} = {r.value:.3e} (threshold {r.threshold:.1e})\n")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_solve(args: argparse.Namespace) -> int:
    from .bie2d import IncidentSource, SurfaceProfile, exterior_field, solve_scattering

    R = args.R
    grid = args.grid or f"x1:{-R}:{R}:32,x2:{-R}:{R}:32"
    cfg = RunConfig.load("solve", args.medium, args.quad, args.out, args.seed, 2, grid)
    if cfg.output_path is None:
        raise _UsageError("solve needs --out")
    if not Path(args.profile).exists():
        raise ValidationError(f"profile file {args.profile} does not exist")
    profile = SurfaceProfile.from_json(args.profile)
    source = IncidentSource.parse(parse_vector(args.source, 6))
    sol = solve_scattering(profile, cfg.medium, source, R, args.nodes, cfg.quad, args.ppw)

    pts = cfg.grid.points()
    inside = np.linalg.norm(pts, axis=1) <= R
    values = np.full((pts.shape[0], 2), np.nan + 0j)
    if np.any(inside):
        values[inside] = sol.field(pts[inside])
    if np.any(~inside):
        values[~inside] = exterior_field(sol, pts[~inside])
    csv_path = cfg.output_path.with_suffix(".csv")
    header = ["x1", "x2", "re_u1", "im_u1", "re_u2", "im_u2"]
    atomic_write(csv_path, format_csv(header, [list(x) + _complex_cells(v) for x, v in zip(pts, values)]))
    doc = {
        "medium": cfg.medium.to_dict(),
        "profile": profile.to_dict(),
        "source": {"z": source.z.tolist(), "a": [[c.real, c.imag] for c in source.a]},
        "R": R,
        "nodes": args.nodes,
        "points_per_wavelength": args.ppw,
        "volume_dofs": int(sol.disc.mesh.n_dofs),
        "field_csv": csv_path.name,
        "density": [[v.real, v.imag] for v in sol.p.ravel()],
    }
    atomic_write(cfg.output_path, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def cmd_specfun_probe(args: argparse.Namespace) -> int:
    from .specfun import probe

    rows = []
    for text in args.z:
        re, im = parse_vector(text, 2)
        v = probe(args.order, complex(re, im))
        rows.append([v.order, *_complex_cells(np.array([v.argument, v.J, v.Y, v.H1]))])
    header = ["order", "re_z", "im_z", "re_J", "im_J", "re_Y", "im_Y", "re_H1", "im_H1"]
    _emit(None if args.out is None else Path(args.out), format_csv(header, rows))
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "farfield": cmd_farfield,
    "verify": cmd_verify,
    "solve": cmd_solve,
    "specfun-probe": cmd_specfun_probe,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(None if argv is None else list(argv))
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except (LayeredElasticaError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
