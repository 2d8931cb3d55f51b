"""Command line front-end: evaluate variables, run check suites, holonomies.

Three subcommands share one json config (see config module docstring):

    ashgeo eval     -c cfg.json            per-point table of all quantities
    ashgeo check    -c cfg.json [--suite NAME]   identity/property suites
    ashgeo holonomy -c cfg.json --path path.json  SO(3)/SU(2) holonomy pair

Exit codes: 0 success, 1 numerical failure (including failed suites),
2 invalid configuration.  ASHGEO_THREADS caps eval parallelism; output
order is by sample index regardless of execution order.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import expr as ex
from .ashtekar import ashtekar_form_field, physics_components
from .config import RunConfig, format_beta, load_config_file
from .errors import ComputationError, ConfigError
from .geometry import frame_det, orthonormal_frame_field
from .spin import PathSpec, adjoint_map, covering_map, group_drift, holonomy
from .suites import run_suites, suite_names


# ---------------------------------------------------------------------------
# Serialization helpers


def _real_matrix(m: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.asarray(m)]


def _complex_entry(z) -> dict[str, float]:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _complex_matrix(m: np.ndarray) -> list[list[dict[str, float]]]:
    return [[_complex_entry(v) for v in row] for row in np.asarray(m)]


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _csv_text(write_rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    write_rows(writer)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# eval


def _threads(n_points: int) -> int:
    raw = os.environ.get("ASHGEO_THREADS")
    if raw is None:
        limit = min(4, os.cpu_count() or 1)
    else:
        try:
            limit = int(raw)
        except ValueError:
            raise ConfigError(
                f"ASHGEO_THREADS must be a positive integer, got {raw!r}"
            ) from None
        if limit < 1:
            raise ConfigError(f"ASHGEO_THREADS must be a positive integer, got {raw!r}")
    return max(1, min(limit, n_points))


def _eval_point(cfg: RunConfig, e, index: int, p) -> dict:
    em = e.mat(p)
    det = frame_det(e, p)
    phys = physics_components(cfg.beta, cfg.q, cfg.w, e, p)
    return {
        "index": index,
        "point": {n: float(p[n]) for n in cfg.chart.names},
        "q": _real_matrix(cfg.q.mat(p)),
        "e": _real_matrix(em),
        "det_e": float(det),
        "E": _real_matrix(em / det),
        "K": _real_matrix(cfg.q.mat(p) @ cfg.w.at(p)),
        "W": _real_matrix(cfg.w.at(p)),
        "Gamma": _real_matrix(phys.gamma),
        "k": _real_matrix(phys.k),
        "A": _complex_matrix(phys.a),
    }


_EVAL_MATS = ("q", "e", "E", "K", "W", "Gamma", "k")


def _eval_csv(rows, names) -> str:
    header = ["index", *names]
    for key in _EVAL_MATS:
        if key == "e":  # after e comes its determinant and the density
            header += [f"e_{a+1}{i+1}" for a in range(3) for i in range(3)]
            header.append("det_e")
            continue
        header += [f"{key}_{a+1}{b+1}" for a in range(3) for b in range(3)]
    header += [
        f"A_{a+1}{k+1}_{part}" for a in range(3) for k in range(3)
        for part in ("re", "im")
    ]

    def write(writer):
        writer.writerow(header)
        for row in rows:
            out = [row["index"], *(row["point"][n] for n in names)]
            for key in _EVAL_MATS:
                out += [row[key][a][b] for a in range(3) for b in range(3)]
                if key == "e":
                    out.append(row["det_e"])
            out += [
                row["A"][a][k][part] for a in range(3) for k in range(3)
                for part in ("re", "im")
            ]
            writer.writerow(out)

    return _csv_text(write)


def cmd_eval(cfg: RunConfig) -> tuple[str, int]:
    points = cfg.sample_points()
    e = orthonormal_frame_field(cfg.q)
    workers = _threads(len(points))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(
                pool.map(lambda ip: _eval_point(cfg, e, ip[0], ip[1]),
                         enumerate(points))
            )
    else:
        rows = [_eval_point(cfg, e, i, p) for i, p in enumerate(points)]
    if cfg.fmt == "csv":
        return _eval_csv(rows, cfg.chart.names), 0
    doc = {
        "model": cfg.model_kind,
        "beta": _complex_entry(cfg.beta),
        "points": rows,
    }
    return _dump_json(doc), 0


# ---------------------------------------------------------------------------
# check


def cmd_check(cfg: RunConfig, requested=None) -> tuple[str, int]:
    results = run_suites(cfg, requested)
    all_passed = all(r.passed for r in results)
    if cfg.fmt == "csv":
        def write(writer):
            writer.writerow(["name", "n_samples", "max_error", "tolerance", "passed"])
            for r in results:
                writer.writerow(
                    [r.name, r.n_samples, repr(r.max_error), repr(r.tolerance),
                     str(r.passed).lower()]
                )
        return _csv_text(write), 0 if all_passed else 1
    doc = {
        "model": cfg.model_kind,
        "beta": _complex_entry(cfg.beta),
        "seed": cfg.seed,
        "suites": [
            {
                "name": r.name,
                "n_samples": r.n_samples,
                "max_error": r.max_error,
                "tolerance": r.tolerance,
                "passed": r.passed,
            }
            for r in results
        ],
        "passed": all_passed,
    }
    return _dump_json(doc), 0 if all_passed else 1


# ---------------------------------------------------------------------------
# holonomy


def _load_path(fname: str, chart) -> PathSpec:
    try:
        with open(fname, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as err:
        raise ConfigError(f"path: cannot read {fname}: {err}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"path: invalid json ({err})") from None
    if not isinstance(doc, dict):
        raise ConfigError("path: top level must be an object")
    unknown = set(doc) - {"components", "steps"}
    if unknown:
        raise ConfigError(f"path: unknown key(s) {sorted(unknown)}")
    comps = doc.get("components")
    if not isinstance(comps, list) or len(comps) != 3:
        raise ConfigError("path.components: expected a list of 3 expressions in s")
    parsed = []
    for i, text in enumerate(comps):
        if not isinstance(text, str):
            raise ConfigError(f"path.components[{i}]: expected an expression string")
        try:
            parsed.append(ex.parse(text, variables=("s",)))
        except ConfigError as err:
            raise ConfigError(f"path.components[{i}]: {err}") from None
    steps = doc.get("steps", 400)
    if isinstance(steps, bool) or not isinstance(steps, int):
        raise ConfigError("path.steps: expected an integer")
    return PathSpec(chart, parsed, steps)


def cmd_holonomy(cfg: RunConfig, path: PathSpec) -> tuple[str, int]:
    e = orthonormal_frame_field(cfg.q)
    form = ashtekar_form_field(cfg.beta, cfg.q, cfg.w, e)
    h_so3 = holonomy(form, path, "SO3")
    u_su2 = holonomy(form, path, "SU2")
    mapped = adjoint_map(u_su2) if form.is_complex() else covering_map(u_su2)
    residual = float(np.linalg.norm(mapped - h_so3))
    doc = {
        "model": cfg.model_kind,
        "beta": _complex_entry(cfg.beta),
        "steps": path.steps,
        "so3": _complex_matrix(h_so3),
        "su2": _complex_matrix(u_su2),
        "residual": residual,
        "drift_so3": group_drift(h_so3),
        "drift_su2": group_drift(u_su2),
    }
    if cfg.fmt == "csv":
        def write(writer):
            writer.writerow(["name", "value"])
            for g, mat in (("so3", h_so3), ("su2", u_su2)):
                n = mat.shape[0]
                for a in range(n):
                    for b in range(n):
                        z = complex(mat[a, b])
                        writer.writerow([f"{g}_{a+1}{b+1}_re", repr(z.real)])
                        writer.writerow([f"{g}_{a+1}{b+1}_im", repr(z.imag)])
            writer.writerow(["residual", repr(residual)])
            writer.writerow(["drift_so3", repr(doc["drift_so3"])])
            writer.writerow(["drift_su2", repr(doc["drift_su2"])])
        return _csv_text(write), 0
    return _dump_json(doc), 0


# ---------------------------------------------------------------------------
# argument plumbing


def _parse_tol(pairs) -> dict[str, float]:
    out: dict[str, float] = {}
    known = set(suite_names())
    for item in pairs or ():
        name, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"--tol expects SUITE=EPS, got {item!r}")
        if name not in known:
            raise ConfigError(
                f"--tol: unknown suite {name!r}; choose from {', '.join(sorted(known))}"
            )
        try:
            eps = float(val)
        except ValueError:
            raise ConfigError(f"--tol {name}: {val!r} is not a number") from None
        if not eps > 0.0:
            raise ConfigError(f"--tol {name}: tolerance must be > 0")
        out[name] = eps
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", required=True, metavar="FILE",
                        help="json run configuration")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (overrides the config)")
    common.add_argument("--seed", type=int, default=None, metavar="N",
                        help="sampling seed (overrides the config)")
    common.add_argument("--tol", action="append", metavar="SUITE=EPS",
                        help="tolerance override, repeatable")

    parser = argparse.ArgumentParser(
        prog="ashgeo",
        description="Ashtekar variables on coordinate charts: evaluate, "
                    "verify identities, integrate holonomies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("eval", parents=[common],
                   help="tabulate q, e, E, K, W, Gamma, k, A at sample points")
    p_check = sub.add_parser("check", parents=[common],
                             help="run identity/property suites")
    p_check.add_argument("--suite", action="append", metavar="NAME",
                         help="run only the named suite(s), repeatable")
    p_hol = sub.add_parser("holonomy", parents=[common],
                           help="SO(3)/SU(2) holonomy along a path")
    p_hol.add_argument("--path", required=True, metavar="FILE",
                       help="json path spec: components in s, steps")
    return parser


def _resolved_config(args) -> RunConfig:
    cfg = load_config_file(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.format is not None:
        updates["fmt"] = args.format
    overrides = _parse_tol(args.tol)
    if overrides:
        updates["tolerances"] = {**cfg.tolerances, **overrides}
    return replace(cfg, **updates) if updates else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolved_config(args)
        if args.command == "eval":
            out, code = cmd_eval(cfg)
        elif args.command == "check":
            out, code = cmd_check(cfg, args.suite)
        else:
            path = _load_path(args.path, cfg.chart)
            out, code = cmd_holonomy(cfg, path)
    except ConfigError as err:
        print(f"ashgeo: config error: {err}", file=sys.stderr)
        return 2
    except ComputationError as err:
        print(f"ashgeo: computation failed: {err}", file=sys.stderr)
        return 1
    except ValueError as err:  # e.g. a non-finite value rejected by the encoder
        print(f"ashgeo: computation failed: {err}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
