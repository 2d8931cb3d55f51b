"""Homogeneous isotropic models: reference charts, scale factor, oracles.

A model is a warped product with lapse 1 and spatial metric a(t)^2 q_ref,
where q_ref is a constant-curvature reference metric with kappa in
{-1, 0, +1}.  On the slice t = tau0 everything about the deformed
connection collapses to closed forms in

    h         = a'(tau0) / a(tau0)
    kappa_eff = kappa / a(tau0)^2

namely W = h Id, T^A(X, Y) = 2 beta h cross(X, Y), and

    R^A(X, Y)Z = ((beta h)^2 - kappa_eff) cross(cross(X, Y), Z)

with cross the vector product of the induced metric a(tau0)^2 q_ref.
These serve as independent oracles for the general-purpose machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import expr as ex
from .errors import ComputationError, ConfigError
from .expr import Binding, Expr, Var
from .geometry import Chart, SliceMetric, SpacetimeSplit, induce_slice_metric
from .vecprod import ivp

_TIME = "t"

_FLAT_BOX = ((-0.9, 0.9), (-0.9, 0.9), (-0.9, 0.9))
_CLOSED_BOX = ((0.4, 2.7), (0.4, 2.7), (0.15, 6.1))
_OPEN_BOX = ((0.35, 1.8), (0.4, 2.7), (0.15, 6.1))


def reference_chart(kappa: int) -> Chart:
    """A box where the kappa reference metric is smooth and nondegenerate."""
    if kappa == 0:
        return Chart(("x1", "x2", "x3"), _FLAT_BOX)
    if kappa == 1:
        return Chart(("x1", "x2", "x3"), _CLOSED_BOX)
    if kappa == -1:
        return Chart(("x1", "x2", "x3"), _OPEN_BOX)
    raise ConfigError(f"kappa must be -1, 0 or +1, got {kappa}")


def reference_metric(kappa: int) -> SliceMetric:
    """Constant-curvature reference: Cartesian for kappa = 0, geodesic
    (radius, polar, azimuthal) coordinates for kappa = +-1."""
    chart = reference_chart(kappa)
    x1, x2 = Var("x1"), Var("x2")
    one = ex.ONE
    zero = ex.ZERO
    if kappa == 0:
        rows = ((one, zero, zero), (zero, one, zero), (zero, zero, one))
        return SliceMetric(chart, rows)
    radial = ex.sin(x1) if kappa == 1 else ex.sinh(x1)
    r2 = ex.mul(radial, radial)
    s2 = ex.mul(ex.sin(x2), ex.sin(x2))
    rows = (
        (one, zero, zero),
        (zero, r2, zero),
        (zero, zero, ex.mul(r2, s2)),
    )
    return SliceMetric(chart, rows)


@dataclass(frozen=True)
class FrwModel:
    """Scale factor, curvature sign, and the associated 3+1 split."""

    kappa: int
    a: Expr
    chart: Chart
    q_ref: SliceMetric
    split: SpacetimeSplit

    def scale(self, tau0: float) -> float:
        v = self.a.eval({_TIME: tau0})
        if v <= 0:
            raise ComputationError(f"scale factor must be positive, a({tau0}) = {v}")
        return v

    def hubble(self, tau0: float) -> float:
        return ex.diff(self.a, _TIME).eval({_TIME: tau0}) / self.scale(tau0)

    def kappa_eff(self, tau0: float) -> float:
        return self.kappa / self.scale(tau0) ** 2

    def induced_metric(self, tau0: float) -> SliceMetric:
        return _induced(self, float(tau0))


@lru_cache(maxsize=64)
def _induced(m: "FrwModel", tau0: float) -> SliceMetric:
    return induce_slice_metric(m.split, tau0)


def make_frw(kappa: int, a, t_interval: tuple[float, float] = (-1.5, 1.5)) -> FrwModel:
    """Build the model; the scale factor may be an Expr in t or a string."""
    a = ex.parse(a, variables=(_TIME,)) if isinstance(a, str) else ex.as_expr(a)
    if not a.free_vars <= {_TIME}:
        raise ConfigError(
            f"scale factor may depend on '{_TIME}' only, got {sorted(a.free_vars)}"
        )
    q_ref = reference_metric(kappa)
    chart = q_ref.chart
    a2 = ex.mul(a, a)
    g_rows = tuple(
        tuple(ex.mul(a2, q_ref.rows[i][j]) for j in range(3)) for i in range(3)
    )
    lo, hi = float(t_interval[0]), float(t_interval[1])
    if not lo < hi:
        raise ConfigError(f"empty time interval {t_interval}")
    for k in range(21):
        tv = lo + (hi - lo) * k / 20
        if a.eval({_TIME: tv}) <= 0:
            raise ConfigError(f"scale factor not positive at t = {tv}")
    split = SpacetimeSplit(_TIME, (lo, hi), chart, ex.ONE, g_rows)
    return FrwModel(int(kappa), a, chart, q_ref, split)


PRESETS = {
    "flat": (0, "exp(0.5*t)"),
    "closed": (1, "exp(0.5*t)"),
    "open": (-1, "exp(0.5*t)"),
}


def preset(name: str) -> FrwModel:
    """Named models for the command line: flat, closed, open."""
    try:
        kappa, a = PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown model preset {name!r}; choose from {sorted(PRESETS)}"
        ) from None
    return make_frw(kappa, a)


class FrwOracles(NamedTuple):
    weingarten: np.ndarray  # expected W(X)
    torsion: np.ndarray     # expected T^A(X, Y)
    curvature: np.ndarray   # expected R^A(X, Y)Z


def frw_oracles(m: FrwModel, beta, tau0: float, X, Y, Z,
                p: Binding) -> FrwOracles:
    """Closed-form predictions on the slice t = tau0, for vectors at p."""
    from .ashtekar import beta_value

    b = beta_value(beta)
    h = m.hubble(tau0)
    q_t = m.induced_metric(tau0)
    Xv, Yv, Zv = (np.asarray(v, dtype=float) for v in (X, Y, Z))
    w = h * Xv
    xy = ivp(q_t, Xv, Yv, p)
    torsion = 2.0 * b * h * xy
    curv = ((b * h) ** 2 - m.kappa_eff(tau0)) * ivp(q_t, xy, Zv, p)
    return FrwOracles(w, torsion, curv)
