"""Command-line entry point.

Subcommands::

    nucspec spectrum  --operator FILE [--n N] [--delta D] [--tau T]
    nucspec det-scan  --operator FILE --grid "re0:re1:nre,im0:im1:nim" [--contour "cx,cy,r,nodes"]
    nucspec verify    [--seed S] [--suite NAME ...]
    nucspec interval  [--operator FILE] [--nodes M] [--delta D] [--tau T]
    nucspec jensen    --operator FILE [--contour "0,0,r,nodes"] [--n N]

Every command writes into ``--out`` (default ``.``): a data file
(``<command>.csv`` or ``<command>.yaml`` with ``--format structured-text``)
and a ``<command>.json`` metadata document. Operator files are described in
:mod:`nucspec.opfile`.

CSV columns:

* spectrum, interval: ``Re λ,Im λ,multiplicity,band_distance,stable``
* det-scan: ``Re z,Im z,Re d,Im d,log|d|``

Exit codes: 0 success, 1 verification failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np
import yaml

from .contour import Contour, ContourError, adaptive_winding, jensen_sides, lattice_disc_function
from .conformal import phi_inverse
from .determinant import perturbation_determinant
from .interval import DEFAULT_NODES, MIN_NODES, KernelModel, MultiplicationModel
from .operators import LAPLACIAN_BAND, OperatorError, nuclear_norm_bound
from .opfile import OperatorFileError, load_operator
from .resolvent import BandProximityError
from .spectrum import DEFAULT_DELTA, IntervalProblem, Spectrum, interval_spectrum, laplacian_spectrum
from .suites import DEFAULT_SEED, SUITES, run_suites
from .sums import lieb_thirring_sum

log = logging.getLogger("nucspec")

SPECTRUM_HEADER = ["Re λ", "Im λ", "multiplicity", "band_distance", "stable"]
SCAN_HEADER = ["Re z", "Im z", "Re d", "Im d", "log|d|"]
JENSEN_TOL = 1e-6


class InputError(ValueError):
    """Invalid command-line input (exit code 2)."""


def _num(x) -> str:
    # shortest round-trip repr: deterministic and lossless
    return repr(float(x))


def parse_grid(text: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        re_part, im_part = text.split(",")
        axes = []
        for part in (re_part, im_part):
            lo, hi, n = part.split(":")
            n = int(n)
            if n < 1:
                raise ValueError
            axes.append(np.linspace(float(lo), float(hi), n))
    except ValueError:
        raise InputError(f"grid must look like 're0:re1:nre,im0:im1:nim', got {text!r}") from None
    return axes[0], axes[1]


def parse_contour(text: str) -> Contour:
    try:
        cx, cy, r, nodes = text.split(",")
        return Contour(complex(float(cx), float(cy)), float(r), int(nodes))
    except (ValueError, ContourError) as exc:
        raise InputError(f"contour must look like 'cx,cy,r,nodes', got {text!r} ({exc})") from None


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_table(path_stem: Path, fmt: str, header: list[str], rows: list[list]) -> Path:
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        path = path_stem.with_suffix(".csv")
        path.write_text(buf.getvalue(), encoding="utf-8")
    else:
        path = path_stem.with_suffix(".yaml")
        docs = [dict(zip(header, row)) for row in rows]
        path.write_text(yaml.safe_dump({"columns": header, "rows": docs}, sort_keys=False, allow_unicode=True), encoding="utf-8")
    return path


def _write_meta(path_stem: Path, meta: dict) -> Path:
    path = path_stem.with_suffix(".json")
    path.write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    return path


def _spectrum_rows(spec: Spectrum, fmt: str) -> list[list]:
    rows = []
    for r in spec.records:
        vals = [complex(r.value).real, complex(r.value).imag, r.multiplicity, r.band_distance, r.stable]
        if fmt == "csv":
            vals = [_num(vals[0]), _num(vals[1]), str(vals[2]), _num(vals[3]), str(vals[4]).lower()]
        else:
            vals = [float(vals[0]), float(vals[1]), int(vals[2]), float(vals[3]), bool(vals[4])]
        rows.append(vals)
    return rows


def _check_delta(delta: float) -> None:
    if not delta > 0:
        raise InputError(f"--delta must be positive, got {delta}")


def _check_tau(tau: float) -> None:
    if not tau > 0:
        raise InputError(f"--tau must be positive, got {tau}")


def _lattice_operator(args):
    if not args.operator:
        raise InputError("--operator is required")
    loaded = load_operator(args.operator)
    if loaded.scenario != "laplacian":
        raise InputError(f"{args.operator}: expected a laplacian scenario, got {loaded.scenario}")
    return loaded.lattice


def _emit_spectrum(args, name: str, spec: Spectrum, extra: dict) -> None:
    out = _out_dir(args)
    lt = lieb_thirring_sum(spec, args.tau)
    data = _write_table(out / name, args.format, SPECTRUM_HEADER, _spectrum_rows(spec, args.format))
    meta = {"command": name, **spec.meta, "tau": args.tau, "band": [spec.band.a, spec.band.b],
            "eigenvalue_count": int(sum(r.multiplicity for r in spec.records)),
            "lieb_thirring_sum": lt, "data": data.name, **extra}
    _write_meta(out / name, meta)
    print(f"eigenvalues: {meta['eigenvalue_count']}")
    print(f"lieb_thirring_sum (tau={args.tau:g}): {lt:.10g}")


def cmd_spectrum(args) -> int:
    _check_delta(args.delta)
    _check_tau(args.tau)
    K = _lattice_operator(args)
    spec = laplacian_spectrum(K, args.n, args.delta)
    _emit_spectrum(args, "spectrum", spec, {"operator": str(args.operator), "rank": K.rank,
                                            "nuclear_norm_bound": nuclear_norm_bound(K)})
    return 0


def cmd_det_scan(args) -> int:
    _check_delta(args.delta)
    K = _lattice_operator(args)
    if not args.grid:
        raise InputError("--grid is required")
    xs, ys = parse_grid(args.grid)
    zz = (xs[None, :] + 1j * ys[:, None]).ravel()
    gap = LAPLACIAN_BAND.distance(zz)
    if np.any(gap < args.delta):
        bad = zz[np.argmin(gap)]
        raise InputError(f"grid node {bad} lies within --delta {args.delta} of the band [-2, 2]")
    winding = None
    if args.contour:
        c = parse_contour(args.contour)
        res = adaptive_winding(K, c)
        winding = {"contour": args.contour, "count": res.count, "residual": res.residual}
    rows = []
    for z in zz:
        s = perturbation_determinant(z, K)
        v = [z.real, z.imag, s.value.real, s.value.imag, s.modulus_log]
        rows.append([_num(x) for x in v] if args.format == "csv" else [float(x) for x in v])
    out = _out_dir(args)
    data = _write_table(out / "det_scan", args.format, SCAN_HEADER, rows)
    meta = {"command": "det-scan", "operator": str(args.operator), "grid": args.grid,
            "points": len(rows), "delta": args.delta, "data": data.name}
    if winding is not None:
        meta["winding"] = winding
        print(f"zeros inside contour: {winding['count']}")
    _write_meta(out / "det_scan", meta)
    print(f"grid points: {len(rows)}")
    return 0


def cmd_verify(args) -> int:
    names = args.suite or None
    if names:
        unknown = [n for n in names if n not in SUITES]
        if unknown:
            raise InputError(f"unknown suite(s) {unknown}; available: {list(SUITES)}")
    report = run_suites(args.seed, names)
    out = _out_dir(args)
    _write_meta(out / "verify", report)
    for s in report["suites"]:
        status = "PASS" if s["passed"] else "FAIL"
        print(f"{status} {s['name']}: {s['draws']} draws, {s['violations']} violations, worst ratio {s['worst']:.6g}")
        if not s["passed"] and s["violating_sample"] is not None:
            print(f"  violating sample: {json.dumps(s['violating_sample'], default=str)}")
    print(f"seed {report['seed']}: {'all suites pass' if report['passed'] else 'FAILED'}")
    return 0 if report["passed"] else 1


def _default_interval(nodes: int) -> IntervalProblem:
    model = MultiplicationModel.from_function(lambda t: t, 0.0, 1.0, nodes)
    kernel = KernelModel.from_function(lambda t, s: np.ones(np.broadcast(t, s).shape), 0.0, 1.0, nodes)
    return IntervalProblem(model, kernel)


def cmd_interval(args) -> int:
    _check_delta(args.delta)
    _check_tau(args.tau)
    if args.nodes is not None and args.nodes < MIN_NODES:
        raise InputError(f"--nodes must be at least {MIN_NODES}, got {args.nodes}")
    if args.operator:
        loaded = load_operator(args.operator)
        if loaded.scenario != "interval":
            raise InputError(f"{args.operator}: expected an interval scenario, got {loaded.scenario}")
        problem = loaded.interval
        if args.nodes is not None and args.nodes != problem.model.n:
            if not problem.can_resample:
                raise InputError("--nodes cannot resample tabulated samples")
            problem = problem.resampled(args.nodes)
    else:
        problem = _default_interval(args.nodes or DEFAULT_NODES)
    spec = interval_spectrum(problem, args.delta)
    _emit_spectrum(args, "interval", spec, {"operator": str(args.operator) if args.operator else "builtin:M=t,k=1"})
    return 0


def cmd_jensen(args) -> int:
    K = _lattice_operator(args)
    c = parse_contour(args.contour)
    if c.center != 0:
        raise InputError("the Jensen circle is centred at w = 0; use '0,0,r,nodes'")
    if not 0 < c.radius < 1:
        raise InputError(f"Jensen radius must lie in (0, 1), got {c.radius}")
    spec = laplacian_spectrum(K, args.n, args.delta)
    zeros = [phi_inverse(v) for v in spec.values()]
    left, right = jensen_sides(lattice_disc_function(K), zeros, c.radius, c.nodes)
    resid = abs(left - right)
    meta = {"command": "jensen", "operator": str(args.operator), "radius": c.radius, "nodes": c.nodes,
            "zero_sum": left, "mean_log_abs": right, "residual": resid, "tolerance": JENSEN_TOL,
            "zeros": [[complex(w).real, complex(w).imag] for w in zeros]}
    _write_meta(_out_dir(args) / "jensen", meta)
    print(f"sum log(r/|w_k|) = {left:.15g}")
    print(f"mean log|h|      = {right:.15g}")
    print(f"residual         = {resid:.3g}")
    return 0 if resid < JENSEN_TOL else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nucspec", description="Discrete spectra of nuclear perturbations.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--format", choices=["csv", "structured-text"], default="csv")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="band exclusion radius")
    common.add_argument("--tau", type=float, default=1.0)

    s = sub.add_parser("spectrum", parents=[common], help="discrete spectrum of Delta + K")
    s.add_argument("--operator")
    s.add_argument("--n", type=int, default=200, help="truncation half-width")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("det-scan", parents=[common], help="perturbation determinant on a z-grid")
    s.add_argument("--operator")
    s.add_argument("--grid")
    s.add_argument("--contour")
    s.set_defaults(func=cmd_det_scan)

    s = sub.add_parser("verify", parents=[common], help="randomized inequality suites")
    s.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)} (repeatable)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("interval", parents=[common], help="multiplication operator plus kernel")
    s.add_argument("--operator")
    s.add_argument("--nodes", type=int)
    s.set_defaults(func=cmd_interval)

    s = sub.add_parser("jensen", parents=[common], help="Jensen identity for d o phi")
    s.add_argument("--operator")
    s.add_argument("--contour", default="0,0,0.9,8192", help="'0,0,r,nodes' in the w-disc")
    s.add_argument("--n", type=int, default=200)
    s.set_defaults(func=cmd_jensen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, OperatorFileError, OperatorError, BandProximityError, ContourError, ValueError) as exc:
        # every validation error in the library derives from ValueError
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
