"""Deterministic sampling utilities.

All randomness in the CLI and the check suites flows through SplitMix64 so
that a (config, seed) pair reproduces byte-identical output on any platform.
The generator is the standard splitmix64 sequence: state advances by the
64-bit golden-ratio constant and each output is finalized by two xor-shift
multiplies; uniform doubles take the top 53 bits.  Nothing here depends on
Python's global random state.
"""

from __future__ import annotations

import numpy as np

from . import expr as ex
from .errors import DegenerateMetricError
from .expr import Expr
from .geometry import Chart, SliceMetric, SpacetimeSplit

_MASK = (1 << 64) - 1


class SplitMix64:
    """splitmix64 sequence; deterministic and portable across platforms."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * (2.0 ** -53)
        return lo + (hi - lo) * u

    def spawn(self) -> "SplitMix64":
        """Independent child stream (used to decorrelate suites)."""
        return SplitMix64(self.next_u64())


def sample_point(chart: Chart, rng: SplitMix64, margin: float = 0.05) -> dict[str, float]:
    """Uniform point in the chart box, kept away from the open boundary."""
    p = {}
    for name, (lo, hi) in zip(chart.names, chart.box):
        pad = (hi - lo) * margin
        p[name] = rng.uniform(lo + pad, hi - pad)
    return p


def sample_time(st: SpacetimeSplit, rng: SplitMix64, margin: float = 0.05) -> float:
    lo, hi = st.t_interval
    pad = (hi - lo) * margin
    return rng.uniform(lo + pad, hi - pad)


def random_vector(rng: SplitMix64, scale: float = 1.0) -> np.ndarray:
    return np.array([rng.uniform(-scale, scale) for _ in range(3)])


def random_complex_vector(rng: SplitMix64, scale: float = 1.0) -> np.ndarray:
    re = random_vector(rng, scale)
    im = random_vector(rng, scale)
    return re + 1j * im


def random_rotation(rng: SplitMix64) -> np.ndarray:
    """Uniform-ish SO(3) element via an axis-angle exponential (Rodrigues)."""
    axis = np.array([rng.uniform(-1, 1) for _ in range(3)])
    n = np.linalg.norm(axis)
    if n < 1e-9:
        axis, n = np.array([1.0, 0.0, 0.0]), 1.0
    axis = axis / n
    angle = rng.uniform(0.0, 2.0 * np.pi)
    K = np.array(
        [
            [0.0, -axis[2], axis[1]],
            [axis[2], 0.0, -axis[0]],
            [-axis[1], axis[0], 0.0],
        ]
    )
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * (K @ K)


def random_poly(
    rng: SplitMix64, names, scale: float, terms: int = 3, funcs: bool = False
) -> Expr:
    """Small smooth expression: constant plus a few low-degree terms."""
    e = ex.Const(round(rng.uniform(-scale, scale), 6))
    for _ in range(terms):
        coef = ex.Const(round(rng.uniform(-scale, scale), 6))
        v1 = ex.Var(names[rng.next_u64() % len(names)])
        kind = rng.next_u64() % (4 if funcs else 3)
        if kind == 0:
            term = ex.mul(coef, v1)
        elif kind == 1:
            v2 = ex.Var(names[rng.next_u64() % len(names)])
            term = ex.mul(coef, ex.mul(v1, v2))
        elif kind == 2:
            term = ex.mul(coef, ex.mul(v1, ex.mul(v1, v1)))
        else:
            term = ex.mul(coef, ex.sin(v1))
        e = ex.add(e, term)
    return e


def random_metric(
    chart: Chart,
    rng: SplitMix64,
    scale: float = 0.06,
    extra_names: tuple[str, ...] = (),
    extra_values: tuple[float, ...] = (-1.0, 0.0, 1.0),
    max_tries: int = 50,
) -> SliceMetric:
    """Random SPD metric: a diagonal base plus small symmetric perturbations.

    Positivity is re-verified on a deterministic sample grid; rejected draws
    are resampled from the same stream, so results stay seed-reproducible.
    extra_names lets entries depend on parameters beyond the chart (a time
    coordinate); the grid then cycles those through extra_values.
    """
    names = chart.names + tuple(extra_names)
    grid = _check_grid(chart)
    if extra_names:
        grid = [
            {**p, **{n: v for n in extra_names}}
            for p in grid
            for v in extra_values
        ]
    for _ in range(max_tries):
        rows = [[None] * 3 for _ in range(3)]
        for a in range(3):
            base = ex.Const(1.0 + rng.uniform(0.0, 1.5))
            rows[a][a] = ex.add(base, random_poly(rng, names, scale, funcs=True))
            for b in range(a + 1, 3):
                rows[a][b] = rows[b][a] = random_poly(rng, names, scale, funcs=True)
        q = SliceMetric(chart, rows)
        try:
            q.check_positive_definite(grid)
            return q
        except DegenerateMetricError:
            continue
    raise DegenerateMetricError("could not draw a positive definite metric")


def _check_grid(chart: Chart):
    pts = []
    for fa in (0.0, 0.5, 1.0):
        for fb in (0.0, 0.5, 1.0):
            for fc in (0.0, 0.5, 1.0):
                pts.append(chart.interior_point((fa, fb, fc)))
    return pts


def random_vecfield(chart: Chart, rng: SplitMix64, scale: float = 0.8):
    from .levi_civita import VecField

    return VecField(
        chart,
        [random_poly(rng, chart.names, scale, funcs=True) for _ in range(3)],
    )
