"""Levi-Civita connection and curvature of a slice metric.

Christoffel symbols are built as Expr trees from the Koszul formula

    Gamma^c_ab = 1/2 Q^cd (d_a q_db + d_b q_da - d_d q_ab)

so that the curvature tensor can differentiate them exactly.  Only the chart
coordinates are differentiated; any other free variable (such as the time of
a split) is treated as a parameter.

Curvature sign convention: R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z,
with components R(d_a, d_b) d_c = R^d_cab d_d.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import expr as ex
from .errors import ComputationError
from .expr import Binding, Expr
from .geometry import Chart, SliceMetric, mat_eval, metric_inverse_exprs


@dataclass(frozen=True, eq=False)
class VecField:
    """Tangent vector field with Expr components in the coordinate basis."""

    chart: Chart
    comps: tuple[Expr, Expr, Expr]

    def __init__(self, chart: Chart, comps):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "comps", tuple(ex.as_expr(c) for c in comps))
        object.__setattr__(self, "_jac", None)

    @classmethod
    def constant(cls, chart: Chart, values) -> "VecField":
        return cls(chart, [float(v) for v in values])

    @classmethod
    def coordinate(cls, chart: Chart, a: int) -> "VecField":
        return cls(chart, [1.0 if i == a else 0.0 for i in range(3)])

    def at(self, p: Binding) -> np.ndarray:
        return np.array([c.eval(p) for c in self.comps], dtype=float)

    def jacobian(self) -> tuple[tuple[Expr, ...], ...]:
        """d_a Y^c, cached; rows indexed by c, columns by a."""
        jac = self._jac
        if jac is None:
            names = self.chart.names
            jac = tuple(
                tuple(ex.diff(c, names[a]) for a in range(3)) for c in self.comps
            )
            object.__setattr__(self, "_jac", jac)
        return jac


def vec_at(v, p: Binding) -> np.ndarray:
    """Coerce a VecField or an array-like of components to a vector at p."""
    if isinstance(v, VecField):
        return v.at(p)
    return np.asarray(v)


def christoffel_general(
    names: Sequence[str],
    g_rows: Sequence[Sequence[Expr]],
    ginv_rows: Sequence[Sequence[Expr]],
) -> tuple:
    """Gamma[c][a][b] for an arbitrary-dimension metric given with its inverse."""
    n = len(names)
    dg = [
        [[ex.diff(g_rows[a][b], names[d]) for d in range(n)] for b in range(n)]
        for a in range(n)
    ]
    half = ex.Const(0.5)
    out = []
    for c in range(n):
        plane = []
        for a in range(n):
            line = []
            for b in range(n):
                total = ex.ZERO
                for d in range(n):
                    s = ex.add(dg[d][b][a], dg[d][a][b])
                    s = ex.sub(s, dg[a][b][d])
                    total = ex.add(total, ex.mul(ginv_rows[c][d], s))
                line.append(ex.mul(half, total))
            plane.append(tuple(line))
        out.append(tuple(plane))
    return tuple(out)


@lru_cache(maxsize=256)
def christoffel_exprs(q: SliceMetric) -> tuple:
    return christoffel_general(q.chart.names, q.rows, metric_inverse_exprs(q))


@dataclass(frozen=True)
class ChristoffelAtPoint:
    """Gamma^c_ab evaluated at one point; values[c][a][b], symmetric in a, b."""

    values: np.ndarray

    def __post_init__(self):
        sym = np.max(np.abs(self.values - np.swapaxes(self.values, 1, 2)))
        if sym > 1e-10:
            raise ComputationError(f"connection coefficients not symmetric: {sym}")


def christoffel(q: SliceMetric, p: Binding) -> ChristoffelAtPoint:
    gamma = christoffel_exprs(q)
    vals = np.array(
        [[[gamma[c][a][b].eval(p) for b in range(3)] for a in range(3)]
         for c in range(3)],
        dtype=float,
    )
    return ChristoffelAtPoint(vals)


def cov_deriv(q: SliceMetric, X, Y: VecField, p: Binding) -> np.ndarray:
    """(D_X Y)^c = X^a d_a Y^c + Gamma^c_ab X^a Y^b at p.

    X may be complex-valued; the result inherits its dtype.
    """
    Xv = vec_at(X, p)
    Yv = Y.at(p)
    jac = mat_eval(Y.jacobian(), p)
    gamma = christoffel(q, p).values
    return jac @ Xv + np.einsum("cab,a,b->c", gamma, Xv, Yv)


def cov_deriv_field(q: SliceMetric, X: VecField, Y: VecField) -> VecField:
    """D_X Y with Expr components, for repeated differentiation."""
    gamma = christoffel_exprs(q)
    names = q.chart.names
    comps = []
    for c in range(3):
        total = ex.ZERO
        for a in range(3):
            total = ex.add(total, ex.mul(X.comps[a], ex.diff(Y.comps[c], names[a])))
            for b in range(3):
                term = ex.mul(ex.mul(gamma[c][a][b], X.comps[a]), Y.comps[b])
                total = ex.add(total, term)
        comps.append(total)
    return VecField(q.chart, comps)


def lie_bracket(X: VecField, Y: VecField) -> VecField:
    """[X, Y]^c = X^a d_a Y^c - Y^a d_a X^c."""
    names = X.chart.names
    comps = []
    for c in range(3):
        total = ex.ZERO
        for a in range(3):
            total = ex.add(total, ex.mul(X.comps[a], ex.diff(Y.comps[c], names[a])))
            total = ex.sub(total, ex.mul(Y.comps[a], ex.diff(X.comps[c], names[a])))
        comps.append(total)
    return VecField(X.chart, comps)


@lru_cache(maxsize=128)
def riemann_exprs(q: SliceMetric) -> tuple:
    """R^d_cab = d_a Gamma^d_bc - d_b Gamma^d_ac + Gamma^d_ae Gamma^e_bc
    - Gamma^d_be Gamma^e_ac."""
    gamma = christoffel_exprs(q)
    names = q.chart.names
    out = []
    for d in range(3):
        block = []
        for c in range(3):
            plane = []
            for a in range(3):
                line = []
                for b in range(3):
                    term = ex.sub(
                        ex.diff(gamma[d][b][c], names[a]),
                        ex.diff(gamma[d][a][c], names[b]),
                    )
                    for e_ in range(3):
                        term = ex.add(term, ex.mul(gamma[d][a][e_], gamma[e_][b][c]))
                        term = ex.sub(term, ex.mul(gamma[d][b][e_], gamma[e_][a][c]))
                    line.append(term)
                plane.append(tuple(line))
            block.append(tuple(plane))
        out.append(tuple(block))
    return tuple(out)


def riemann(q: SliceMetric, X, Y, Z, p: Binding) -> np.ndarray:
    """R(X, Y)Z at p; the inputs only matter through their values at p."""
    R = np.array(
        [
            [
                [[riemann_exprs(q)[d][c][a][b].eval(p) for b in range(3)]
                 for a in range(3)]
                for c in range(3)
            ]
            for d in range(3)
        ],
        dtype=float,
    )
    return np.einsum(
        "dcab,a,b,c->d", R, vec_at(X, p), vec_at(Y, p), vec_at(Z, p)
    )
