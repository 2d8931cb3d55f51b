"""Run configuration: one json document drives eval, check, and holonomy.

Schema (expressions are strings in the expr grammar):

    {
      "model": {            exactly one of the three keys
        "frw":   {"preset": "flat"}
                 | {"kappa": -1 | 0 | 1, "scale": "exp(0.5*t)",
                    "t_interval": [-1.5, 1.5]},
        "split": {"time": "t", "t_interval": [-1.5, 1.5],
                  "names": ["x1","x2","x3"], "box": [[lo,hi],[lo,hi],[lo,hi]],
                  "lapse": "1", "metric": [[..3 strings..] x3]},
        "slice": {"names": [...], "box": [...], "metric": [[...] x3],
                  "weingarten": [[...] x3]},
        "tau0": 0.0         time of the evaluation slice (frw / split only)
      },
      "beta": "0.2374" | "i" | "1+0.5i" | {"re": 1.0, "im": 0.5},
      "samples": {"count": 25, "seed": 7} | {"points": [{"x1": ..}, ..]},
      "format": "json" | "csv",
      "suites": ["jacobi", ...],
      "tolerances": {"jacobi": 1e-9, ...}
    }

Validation failures raise ConfigError carrying the offending field path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import expr as ex
from .errors import ComputationError, ConfigError
from .expr import Expr
from .frw import FrwModel, make_frw, preset
from .geometry import Chart, SliceMetric, SpacetimeSplit, induce_slice_metric
from .hypersurface import EndoField, weingarten_endo
from .sampling import SplitMix64, sample_point

def _imag_coeff(body: str) -> float:
    if body in ("", "+"):
        return 1.0
    if body == "-":
        return -1.0
    return float(body)


def parse_beta(text) -> complex:
    """Accept "re+im i" strings ("1", "i", "-0.5i", "1+2i") or {"re","im"}."""
    if isinstance(text, dict):
        try:
            return complex(float(text.get("re", 0.0)), float(text.get("im", 0.0)))
        except (TypeError, ValueError):
            raise ConfigError("beta: re/im entries must be numbers") from None
    if isinstance(text, bool) or text is None:
        raise ConfigError("beta: expected string or re/im object")
    if isinstance(text, (int, float)):
        return complex(text)
    if not isinstance(text, str):
        raise ConfigError(f"beta: expected string or re/im object, got {type(text).__name__}")
    s = text.strip().replace(" ", "")
    bad = ConfigError(f"beta: cannot parse {text!r}; use forms like '1', 'i', '1+0.5i'")
    if not s:
        raise bad
    try:
        if s[-1] in "iI":
            body = s[:-1]
            # split off a leading real part at the last +/- that is not an
            # exponent sign and not the leading sign of the whole string
            cut = 0
            for k in range(1, len(body)):
                if body[k] in "+-" and body[k - 1] not in "eE":
                    cut = k
            if cut == 0:
                value = complex(0.0, _imag_coeff(body))
            else:
                value = complex(float(body[:cut]), _imag_coeff(body[cut:]))
        else:
            value = complex(float(s), 0.0)
    except ValueError:
        raise bad from None
    if value == 0:
        raise ConfigError("beta: must be nonzero")
    return value


def format_beta(b: complex) -> str:
    if b.imag == 0:
        return repr(b.real)
    if b.real == 0:
        return f"{b.imag!r}i"
    sign = "+" if b.imag >= 0 else "-"
    return f"{b.real!r}{sign}{abs(b.imag)!r}i"


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run: slice metric, Weingarten field, sampling plan."""

    model_kind: str                  # "frw" | "split" | "slice"
    q: SliceMetric                   # metric of the evaluation slice
    w: EndoField                     # Weingarten map on that slice
    beta: complex
    tau0: float | None
    frw: FrwModel | None
    split: SpacetimeSplit | None
    seed: int = 1
    count: int = 25
    points: tuple | None = None      # explicit sample points, if given
    fmt: str = "json"
    suites: tuple[str, ...] | None = None
    tolerances: dict[str, float] = field(default_factory=dict)

    @property
    def chart(self) -> Chart:
        return self.q.chart

    def sample_points(self) -> list[dict[str, float]]:
        if self.points is not None:
            return [dict(p) for p in self.points]
        rng = SplitMix64(self.seed)
        return [sample_point(self.chart, rng) for _ in range(self.count)]


def _expect(obj, key, path, types, required=True, default=None):
    if key not in obj:
        if required:
            raise ConfigError(f"{path}.{key}: required field missing")
        return default
    v = obj[key]
    if types is not None and not isinstance(v, types):
        names = types.__name__ if isinstance(types, type) else "/".join(
            t.__name__ for t in types
        )
        raise ConfigError(f"{path}.{key}: expected {names}, got {type(v).__name__}")
    return v


def _parse_expr(text, path, variables) -> Expr:
    if isinstance(text, (int, float)):
        return ex.Const(float(text))
    if not isinstance(text, str):
        raise ConfigError(f"{path}: expected expression string, got {type(text).__name__}")
    try:
        return ex.parse(text, variables=variables)
    except ConfigError as err:
        raise ConfigError(f"{path}: {err}") from None


def _parse_matrix(rows, path, variables) -> list[list[Expr]]:
    if not isinstance(rows, list) or len(rows) != 3 or any(
        not isinstance(r, list) or len(r) != 3 for r in rows
    ):
        raise ConfigError(f"{path}: expected a 3x3 array of expressions")
    return [
        [_parse_expr(rows[i][j], f"{path}[{i}][{j}]", variables) for j in range(3)]
        for i in range(3)
    ]


def _parse_names_box(obj, path):
    names = _expect(obj, "names", path, list)
    if len(names) != 3 or any(not isinstance(n, str) or not n for n in names):
        raise ConfigError(f"{path}.names: expected 3 coordinate names")
    box = _expect(obj, "box", path, list)
    if len(box) != 3 or any(not isinstance(b, list) or len(b) != 2 for b in box):
        raise ConfigError(f"{path}.box: expected 3 [lo, hi] pairs")
    try:
        box_t = tuple((float(lo), float(hi)) for lo, hi in box)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}.box: bounds must be numbers") from None
    for (lo, hi), n in zip(box_t, names):
        if not lo < hi:
            raise ConfigError(f"{path}.box: empty interval {lo}..{hi} for {n}")
    return tuple(names), box_t


def _grid_points(chart: Chart, extra: dict | None = None):
    pts = []
    for i in (0.15, 0.5, 0.85):
        for j in (0.15, 0.5, 0.85):
            for k in (0.15, 0.5, 0.85):
                p = chart.interior_point((i, j, k))
                if extra:
                    p.update(extra)
                pts.append(p)
    return pts


def _symmetric_metric(chart, rows, path, extra: dict | None = None):
    q = SliceMetric(chart, rows)
    pts = _grid_points(chart, extra)
    try:
        q.check_symmetric_input(rows, pts)
        q.check_positive_definite(pts)
    except ComputationError as err:
        raise ConfigError(f"{path}: {err}") from None
    return q


def _load_frw(obj, path="model.frw"):
    if "preset" in obj:
        name = _expect(obj, "preset", path, str)
        extra = set(obj) - {"preset"}
        if extra:
            raise ConfigError(f"{path}: preset excludes other keys, got {sorted(extra)}")
        try:
            return preset(name)
        except ConfigError as err:
            raise ConfigError(f"{path}.preset: {err}") from None
    kappa = _expect(obj, "kappa", path, int)
    scale = _expect(obj, "scale", path, str)
    interval = _expect(obj, "t_interval", path, list, required=False,
                       default=[-1.5, 1.5])
    if len(interval) != 2:
        raise ConfigError(f"{path}.t_interval: expected [lo, hi]")
    try:
        return make_frw(kappa, scale, (float(interval[0]), float(interval[1])))
    except ConfigError as err:
        raise ConfigError(f"{path}: {err}") from None


def _load_split(obj, path="model.split"):
    names, box = _parse_names_box(obj, path)
    time = _expect(obj, "time", path, str)
    interval = _expect(obj, "t_interval", path, list)
    if len(interval) != 2:
        raise ConfigError(f"{path}.t_interval: expected [lo, hi]")
    chart = Chart(names, box)
    lapse = _parse_expr(_expect(obj, "lapse", path, (str, int, float),
                                required=False, default="1"),
                        f"{path}.lapse", (time,))
    variables = tuple(names) + (time,)
    rows = _parse_matrix(_expect(obj, "metric", path, list), f"{path}.metric",
                         variables)
    try:
        split = SpacetimeSplit(time, (float(interval[0]), float(interval[1])),
                               chart, lapse, rows)
    except (ValueError, ConfigError, ComputationError) as err:
        raise ConfigError(f"{path}: {err}") from None
    lo, hi = split.t_interval
    times = [lo + (hi - lo) * k / 8 for k in range(9)]
    mid = 0.5 * (lo + hi)
    _symmetric_metric(chart, rows, f"{path}.metric", extra={time: mid})
    try:
        split.check_lapse_positive(times)
    except ComputationError as err:
        raise ConfigError(f"{path}.lapse: {err}") from None
    return split


def _load_slice(obj, path="model.slice"):
    names, box = _parse_names_box(obj, path)
    chart = Chart(names, box)
    rows = _parse_matrix(_expect(obj, "metric", path, list), f"{path}.metric",
                         tuple(names))
    q = _symmetric_metric(chart, rows, f"{path}.metric")
    w_rows = _parse_matrix(_expect(obj, "weingarten", path, list),
                           f"{path}.weingarten", tuple(names))
    w = EndoField(chart, w_rows)
    return q, w


def load_config(doc) -> RunConfig:
    """Validate a parsed json document (or a json string) into a RunConfig."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as err:
            raise ConfigError(f"config: invalid json ({err})") from None
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    known = {"model", "beta", "samples", "format", "suites", "tolerances"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"config: unknown keys {sorted(unknown)}")

    model = _expect(doc, "model", "config", dict)
    sources = [k for k in ("frw", "split", "slice") if k in model]
    if len(sources) != 1:
        raise ConfigError(
            f"model: exactly one of frw, split, slice required, got {sources or 'none'}"
        )
    kind = sources[0]
    stray = set(model) - {kind, "tau0"}
    if stray:
        raise ConfigError(f"model: unknown keys {sorted(stray)}")
    tau0 = model.get("tau0", 0.0)
    if not isinstance(tau0, (int, float)):
        raise ConfigError("model.tau0: expected a number")
    tau0 = float(tau0)

    frw_model = None
    split = None
    if kind == "frw":
        frw_model = _load_frw(model["frw"])
        split = frw_model.split
    elif kind == "split":
        split = _load_split(model["split"])
    if split is not None:
        lo, hi = split.t_interval
        if not lo < tau0 < hi:
            raise ConfigError(f"model.tau0: {tau0} outside t_interval ({lo}, {hi})")
        q = (frw_model.induced_metric(tau0) if frw_model is not None
             else induce_slice_metric(split, tau0))
        w = weingarten_endo(split).subst_time(split.time, tau0)
    else:
        if "tau0" in model:
            raise ConfigError("model.tau0: not meaningful for a slice model")
        tau0 = None
        q, w = _load_slice(model["slice"])

    beta = parse_beta(doc.get("beta", "1"))

    samples = _expect(doc, "samples", "config", dict, required=False,
                      default={"count": 25, "seed": 1})
    seed, count, points = 1, 25, None
    if "points" in samples:
        if set(samples) - {"points"}:
            raise ConfigError("samples: points excludes count/seed")
        raw_pts = samples["points"]
        if not isinstance(raw_pts, list) or not raw_pts:
            raise ConfigError("samples.points: expected a nonempty list")
        pts = []
        for idx, rp in enumerate(raw_pts):
            if not isinstance(rp, dict):
                raise ConfigError(f"samples.points[{idx}]: expected an object")
            missing = [n for n in q.chart.names if n not in rp]
            if missing:
                raise ConfigError(f"samples.points[{idx}]: missing {missing}")
            p = {}
            for n in q.chart.names:
                v = rp[n]
                if not isinstance(v, (int, float)):
                    raise ConfigError(f"samples.points[{idx}].{n}: expected a number")
                p[n] = float(v)
            if not q.chart.contains(p):
                raise ConfigError(
                    f"samples.points[{idx}]: outside chart box {q.chart.box}"
                )
            pts.append(p)
        points = tuple(pts)
    else:
        stray = set(samples) - {"count", "seed"}
        if stray:
            raise ConfigError(f"samples: unknown keys {sorted(stray)}")
        count = samples.get("count", 25)
        if not isinstance(count, int) or count < 1:
            raise ConfigError("samples.count: expected an integer >= 1")
        seed = samples.get("seed", 1)
        if not isinstance(seed, int):
            raise ConfigError("samples.seed: expected an integer")

    fmt = doc.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError(f"format: expected json or csv, got {fmt!r}")

    suites = doc.get("suites")
    if suites is not None:
        if not isinstance(suites, list) or any(not isinstance(s, str) for s in suites):
            raise ConfigError("suites: expected a list of suite names")
        suites = tuple(suites)

    tols = doc.get("tolerances", {})
    if not isinstance(tols, dict):
        raise ConfigError("tolerances: expected an object")
    for k, v in tols.items():
        if not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError(f"tolerances.{k}: must be > 0")
    tols = {k: float(v) for k, v in tols.items()}

    return RunConfig(
        model_kind=kind, q=q, w=w, beta=beta, tau0=tau0, frw=frw_model,
        split=split, seed=seed, count=count, points=points, fmt=fmt,
        suites=suites, tolerances=tols,
    )


def load_config_file(fname: str) -> RunConfig:
    try:
        with open(fname, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigError(f"config: cannot read {fname}: {err}") from None
    return load_config(text)
