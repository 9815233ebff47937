"""Command-line front end.

Exit codes: 0 success, 1 verdict mismatch / drift / non-unit-speed input,
2 unknown family or malformed input.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import itertools
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import catalog
from .curves import AnalyticCurve, PolynomialJet
from .frenet import SpeedError, classify_biharmonic_tangent, frenet_sampled
from .integrator import DriftError, IntegratorConfig, Method, solve_lift
from .planar import GridSpec
from .spaces import SymmetricSpace, make_space

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
THREADS_ENV = "BIHARMONIC_LAB_THREADS"


class UsageError(ValueError):
    pass


# --- serialisation -----------------------------------------------------------


def fmt(x) -> str:
    """Shortest round-trip decimal for a float."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if not math.isfinite(v) else v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def manifest_path(out: str) -> str:
    return out + ".manifest.json"


def write_manifest(args, command: str, params: dict, tolerances: dict, outputs: list, status: int, **extra):
    if not args.out:
        return
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "parameters": params,
        "tolerances": tolerances,
        "outputs": outputs,
        "exit_status": status,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    doc.update(extra)
    write_atomic(manifest_path(args.out), dumps(doc))


def emit(args, text: str) -> None:
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


# --- argument parsing ----------------------------------------------------------


def parse_window(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"window must be t0:t1[:n], got {text!r}")
    t0, t1 = float(parts[0]), float(parts[1])
    n = int(parts[2]) if len(parts) == 3 else catalog.DEFAULT_WINDOW[2]
    if not (math.isfinite(t0) and math.isfinite(t1)) or t1 <= t0 or n < 2:
        raise UsageError(f"invalid window {text!r}")
    return t0, t1, n


def parse_grid(text: str) -> GridSpec:
    try:
        xs, ys = text.split(",")
        x0, x1, nx = xs.split(":")
        y0, y1, ny = ys.split(":")
        return GridSpec(float(x0), float(x1), int(nx), float(y0), float(y1), int(ny))
    except ValueError as exc:
        raise UsageError(f"grid must be x0:x1:nx,y0:y1:ny ({exc})") from None


def parse_params(text: str | None, names: tuple[str, ...]) -> dict[str, float]:
    """``"a=1,b=0"`` or positional ``"1,0,2"`` in the case's parameter order."""
    if not text:
        return {}
    items = [s.strip() for s in text.split(",") if s.strip()]
    if all("=" in s for s in items):
        return {k.strip(): float(v) for k, v in (s.split("=", 1) for s in items)}
    if any("=" in s for s in items):
        raise UsageError("do not mix named and positional parameters")
    if len(items) > len(names):
        raise UsageError(f"expected at most {len(names)} parameters {list(names)}")
    return dict(zip(names, map(float, items)))


def parse_tol(values: list[str] | None) -> dict[str, float]:
    out = {}
    for v in values or []:
        if "=" in v:
            k, x = v.split("=", 1)
            if k not in catalog.DEFAULT_TOLERANCES:
                raise UsageError(f"unknown tolerance {k!r}; choose from {sorted(catalog.DEFAULT_TOLERANCES)}")
            out[k] = float(x)
        else:
            out.update({k: float(v) for k in catalog.DEFAULT_TOLERANCES})
    for k, x in out.items():
        if not x >= 0:
            raise UsageError(f"tolerance {k} must be non-negative")
    return out


def _resolve_id(args) -> str:
    fid = args.case
    if fid is None:
        raise UsageError("--case is required")
    if "/" not in fid:
        if args.space is None:
            raise UsageError("give --case as space/case or together with --space")
        fid = f"{args.space}/{fid}"
    if fid not in catalog.CASES:
        raise catalog.UnknownFamilyError(f"unknown family {fid!r}; choose from {sorted(catalog.CASES)}")
    return fid


def build_spec(args, params=None) -> catalog.FamilySpec:
    fid = _resolve_id(args)
    info = catalog.CASES[fid]
    if params is None:
        params = parse_params(args.params, info.params)
    target = "sphere"
    if info.planar:
        target = args.space if args.space not in (None, "planar") else "sphere"
    return catalog.FamilySpec(fid, params, n=args.n, index=args.index, target=target)


# --- commands -----------------------------------------------------------------


def cmd_verify(args) -> int:
    spec = build_spec(args)
    window = parse_window(args.window) if args.window else catalog.DEFAULT_WINDOW
    grid = parse_grid(args.grid) if args.grid else catalog.DEFAULT_GRID
    tol = dict(catalog.DEFAULT_TOLERANCES)
    tol.update(parse_tol(args.tol))
    report = catalog.verify_family(spec, window, grid, tol, closed_form=not args.no_closed_form)
    status = EXIT_OK if report.passed else EXIT_FAIL
    doc = {"schema_version": SCHEMA_VERSION, "command": "verify", "report": report.to_dict()}
    emit(args, dumps(doc))
    if status != EXIT_OK:
        lines = [f"{k}: max {s.max:.3e} (tol {s.tol:g})" for k, s in sorted(report.series.items())]
        sys.stderr.write(f"verdict {report.observed} (expected {report.expected})\n" + "\n".join(lines) + "\n")
    write_manifest(args, "verify", _spec_params(spec, window=window), tol, [args.out] if args.out else [], status)
    return status


def _spec_params(spec: catalog.FamilySpec, **extra) -> dict:
    d = {"family": spec.family, "n": spec.n, "index": spec.index, "params": spec.params}
    if spec.info.planar:
        d["target"] = spec.target
    d.update(extra)
    return d


def _point_columns(model: SymmetricSpace) -> list[str]:
    if model.name == "sphere":
        return [f"x{i}" for i in range(model.N)]
    if model.name == "cpn":
        return [f"{p}{i}" for i in range(model.N) for p in ("re", "im")]
    if model.name == "hpn":
        return [f"q{i}_{c}" for i in range(model.n + 1) for c in ("1", "i", "j", "k")]
    return [f"x{i + 1}" for i in range(model.n)]


def load_coefficient_family(path: str):
    """Family from a JSON file ``{"space", "n", "coeffs"[, "coeffs_imag"]}``.

    ``coeffs`` lists the chart-coordinate polynomial coefficients, lowest
    degree first; each entry has the shape of the model's chart.
    """
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
        model = make_space(doc["space"], int(doc["n"]))
        c = np.asarray(doc["coeffs"], dtype=float)
        if "coeffs_imag" in doc:
            c = c + 1j * np.asarray(doc["coeffs_imag"], dtype=float)
    except KeyError as exc:
        raise UsageError(f"coefficient file lacks {exc}") from None
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read coefficient file: {exc}") from None
    fam = AnalyticCurve.from_m_coords(model, PolynomialJet(c), label=os.path.basename(path))
    fam.jet(0.0)  # shape check
    return model, fam, {"coefficients": path, "space": model.name, "n": model.n}


def cmd_integrate(args) -> int:
    if args.coeffs:
        model, fam, params = load_coefficient_family(args.coeffs)
        x0 = None
    else:
        spec = build_spec(args)
        if spec.info.planar:
            raise UsageError("integrate handles curve families; planar maps are checked by verify")
        model, fam, params = spec.model(), catalog.make_family(spec), _spec_params(spec)
        x0 = spec.initial()
    t0, t1 = (parse_window(args.window)[:2]) if args.window else catalog.DEFAULT_WINDOW[:2]
    cfg = IntegratorConfig(Method(args.method), args.steps, drift_tol=args.drift_tol)
    params.update(method=cfg.method.value, steps=cfg.steps, window=[t0, t1])
    status, partial = EXIT_OK, False
    try:
        traj = solve_lift(fam, x0, (t0, t1), cfg)
    except DriftError as err:
        traj, status, partial = err.partial, EXIT_FAIL, True
        sys.stderr.write(f"{err}\n")
    header = ["t", *_point_columns(model), "drift"]
    rows = [[float(t), *pt.flat(), float(d)] for t, pt, d in zip(traj.times, traj.points, traj.drift)]
    emit(args, csv_text(header, rows))
    outputs = [args.out] if args.out else []
    if args.tangent_out:
        if model.name not in ("sphere", "euclidean"):
            raise UsageError("tangent export needs a real chart (sphere or euclidean)")
        th = [f"u{i + 1}" for i in range(model.m_dim)]
        trows = [[float(t), *model.m_coords(fam.value(float(t)))] for t in traj.times]
        write_atomic(args.tangent_out, csv_text(["s", *th], trows))
        outputs.append(args.tangent_out)
    write_manifest(args, "integrate", params, {"drift": cfg.drift_tol}, outputs, status, partial=partial)
    return status


def _scan_grid(args, names):
    axes = {}
    for item in args.param or []:
        if "=" not in item:
            raise UsageError(f"--param expects name=v1,v2,..., got {item!r}")
        k, vals = item.split("=", 1)
        if k not in names:
            raise UsageError(f"unknown parameter {k!r}; expected one of {list(names)}")
        axes[k] = sorted({float(v) for v in vals.split(",") if v.strip()})
    keys = [k for k in names if k in axes]
    return keys, list(itertools.product(*(axes[k] for k in keys)))


def cmd_scan(args) -> int:
    fid = _resolve_id(args)
    info = catalog.CASES[fid]
    base = parse_params(args.params, info.params)
    keys, points = _scan_grid(args, info.params)
    window = parse_window(args.window) if args.window else catalog.DEFAULT_WINDOW
    grid = parse_grid(args.grid) if args.grid else catalog.DEFAULT_GRID
    kind = args.residual

    def run(values):
        params = dict(base)
        params.update(zip(keys, values))
        spec = build_spec(args, params)
        fam = catalog.make_family(spec)
        if spec.info.planar:
            from .planar import grid_norms

            return float(grid_norms(fam.fields, grid, kind).max())
        from .curves import residual_norms

        ts = np.linspace(window[0], window[1], window[2])
        return float(residual_norms(fam, ts, kind).max())

    threads = max(1, int(os.environ.get(THREADS_ENV, "1") or 1))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(run, points))
    header = [*keys, f"max_{kind}_residual"]
    emit(args, csv_text(header, [[*p, r] for p, r in zip(points, results)]))
    write_manifest(
        args,
        "scan",
        {"family": fid, "base": base, "axes": keys, "residual": kind, "window": list(window)},
        {},
        [args.out] if args.out else [],
        EXIT_OK,
    )
    return EXIT_OK


def read_curve_csv(path: str):
    try:
        with open(path, encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    if len(rows) < 2:
        raise UsageError("curve file has no samples")
    header, body = rows[0], [r for r in rows[1:] if r]
    try:
        data = np.array([[float(v) for v in r] for r in body])
    except ValueError as exc:
        raise UsageError(f"non-numeric entry in curve file: {exc}") from None
    if data.ndim != 2 or data.shape[1] not in (3, 4):
        raise UsageError("curve file needs an arc-length column followed by 2 or 3 coordinates")
    return header, data[:, 0], data[:, 1:]


def cmd_frenet(args) -> int:
    _, s, P = read_curve_csv(args.input)
    if args.ambient is not None and args.ambient != P.shape[1]:
        raise UsageError(f"--ambient {args.ambient} does not match {P.shape[1]} coordinate columns")
    try:
        data = frenet_sampled(s, P, tangent=args.tangent)
    except SpeedError as err:
        sys.stderr.write(f"{err}\n")
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": "frenet",
            "error": "non-unit-speed",
            "speed_min": err.speed_min,
            "speed_max": err.speed_max,
        }
        emit(args, dumps(doc))
        write_manifest(args, "frenet", {"input": args.input}, {}, [args.out] if args.out else [], EXIT_FAIL)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cls = classify_biharmonic_tangent(data, tol=args.tol)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "frenet",
        "ambient": data.ambient,
        "s": data.s,
        "kappa": data.kappa,
        "classification": cls.to_dict(),
    }
    if data.tau is not None:
        doc["tau"] = data.tau
    emit(args, dumps(doc))
    write_manifest(
        args, "frenet", {"input": args.input, "tangent": args.tangent}, {"constancy": args.tol}, [args.out] if args.out else [], EXIT_OK
    )
    return EXIT_OK


# --- entry point ----------------------------------------------------------------


def _common(p, params=True):
    p.add_argument("--case", help="family identifier, e.g. sphere/axis or planar/separable")
    p.add_argument("--space", help="space of the case, or the target of planar/separable")
    p.add_argument("--n", type=int, default=None, help="dimension parameter of the space")
    p.add_argument("--index", type=int, default=1, help="1-based chart direction (sphere/axis)")
    if params:
        p.add_argument("--params", help="a,b,c or name=value list")
    p.add_argument("--window", help="t0:t1[:n]")
    p.add_argument("--out", help="output file (stdout when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biharmonic-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="check a catalogued family against its expected verdict")
    _common(p)
    p.add_argument("--grid", help="x0:x1:nx,y0:y1:ny for planar maps")
    p.add_argument("--tol", action="append", help="tolerance for all checks, or kind=value (repeatable)")
    p.add_argument("--no-closed-form", action="store_true", help="skip the integrator/closed-form comparison")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("integrate", help="integrate the lift of a curve family and export the trajectory")
    _common(p)
    p.add_argument("--coeffs", help="JSON file of chart polynomial coefficients instead of --case")
    p.add_argument("--method", default=Method.RKMK4.value, choices=[m.value for m in Method])
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--drift-tol", type=float, default=1e-8)
    p.add_argument("--tangent-out", help="also export the tangent curve (real charts)")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("scan", help="maximum residual over a parameter grid")
    _common(p)
    p.add_argument("--grid", help="x0:x1:nx,y0:y1:ny for planar maps")
    p.add_argument("--param", action="append", help="name=v1,v2,... (repeatable)")
    p.add_argument("--residual", default="biharmonic", choices=["harmonic", "biharmonic"])
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("frenet", help="curvature, torsion and classification of a sampled curve")
    p.add_argument("--input", required=True, help="CSV with arc length then 2 or 3 coordinates")
    p.add_argument("--tangent", action="store_true", help="samples are the unit tangent curve")
    p.add_argument("--ambient", type=int, choices=[2, 3])
    p.add_argument("--tol", type=float, default=None, help="constancy tolerance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_frenet)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (catalog.UnknownFamilyError, KeyError) as exc:
        sys.stderr.write(f"error: {exc.args[0] if exc.args else exc}\n")
        return EXIT_USAGE
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
