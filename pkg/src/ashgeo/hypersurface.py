"""Extrinsic geometry of the slices of a 3+1 split.

The spacetime metric is g = -f dt^2 + g_t with the lapse f a positive
function of t alone, so the future unit normal is n = f^(-1/2) d_t with
g(n, n) = -1.  The Weingarten map is the spacetime covariant derivative of
the normal field, W(X) = D4_X n, computed here through the full 4x4
Christoffel symbols rather than any slice shortcut; the classical rate
formula K_ab = d_t (g_t)_ab / (2 sqrt(f)) is provided separately so tests
can play the two routes against each other.

W maps slice-tangent vectors to slice-tangent vectors (its t-component
cancels because f carries no spatial dependence) and is self-adjoint for
the induced metric, with K(X, Y) = <W(X), Y>.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import expr as ex
from .expr import Binding, Expr
from .geometry import (
    Chart,
    SliceMetric,
    SpacetimeSplit,
    inverse_exprs,
    mat_eval,
)
from .levi_civita import VecField, christoffel_general, vec_at


@dataclass(frozen=True, eq=False)
class EndoField:
    """Endomorphism field on a chart; entries[b][a] = component b of W(d_a)."""

    chart: Chart
    entries: tuple[tuple[Expr, ...], ...]

    def __init__(self, chart: Chart, entries):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(
            self, "entries", tuple(tuple(ex.as_expr(v) for v in row) for row in entries)
        )

    @classmethod
    def constant(cls, chart: Chart, matrix) -> "EndoField":
        return cls(chart, np.asarray(matrix, dtype=float).tolist())

    @classmethod
    def scaled_identity(cls, chart: Chart, factor) -> "EndoField":
        f = ex.as_expr(factor)
        return cls(
            chart,
            [[f if a == b else ex.ZERO for a in range(3)] for b in range(3)],
        )

    @classmethod
    def from_bilinear(cls, q: SliceMetric, k_rows) -> "EndoField":
        """Raise the first index of a symmetric bilinear form: W^b_a = Q^bc K_ca."""
        from .geometry import metric_inverse_exprs

        ginv = metric_inverse_exprs(q)
        k = tuple(tuple(ex.as_expr(v) for v in row) for row in k_rows)
        entries = []
        for b in range(3):
            row = []
            for a in range(3):
                total = ex.ZERO
                for c in range(3):
                    total = ex.add(total, ex.mul(ginv[b][c], k[c][a]))
                row.append(total)
            entries.append(row)
        return cls(q.chart, entries)

    def at(self, p: Binding) -> np.ndarray:
        return mat_eval(self.entries, p)

    def apply(self, X, p: Binding) -> np.ndarray:
        return self.at(p) @ np.asarray(X)

    def apply_field(self, X: VecField) -> VecField:
        comps = []
        for b in range(3):
            total = ex.ZERO
            for a in range(3):
                total = ex.add(total, ex.mul(self.entries[b][a], X.comps[a]))
            comps.append(total)
        return VecField(self.chart, comps)

    def subst_time(self, time: str, t0: float) -> "EndoField":
        return EndoField(
            self.chart,
            [[v.subst({time: t0}) for v in row] for row in self.entries],
        )

    def symmetry_residual(self, q: SliceMetric, p: Binding) -> float:
        """How far K_ab = q_cb W^c_a is from symmetric at p."""
        K = q.mat(p) @ self.at(p)
        return float(np.max(np.abs(K - K.T)))


@lru_cache(maxsize=128)
def _christoffel4(st: SpacetimeSplit) -> tuple:
    """4D Christoffels of g = -f dt^2 + g_t; index 0 is the time direction."""
    names4 = (st.time,) + st.chart.names
    zero = ex.ZERO
    g4 = [[zero] * 4 for _ in range(4)]
    g4[0][0] = ex.neg(st.lapse)
    for a in range(3):
        for b in range(3):
            g4[a + 1][b + 1] = st.g_rows[a][b]
    ginv_spatial = inverse_exprs(st.g_rows)
    ginv4 = [[zero] * 4 for _ in range(4)]
    ginv4[0][0] = ex.div(ex.Const(-1.0), st.lapse)
    for a in range(3):
        for b in range(3):
            ginv4[a + 1][b + 1] = ginv_spatial[a][b]
    return christoffel_general(names4, g4, ginv4)


def unit_normal(st: SpacetimeSplit) -> tuple[Expr, Expr, Expr, Expr]:
    """Components (n^t, n^1, n^2, n^3) of the future unit normal field."""
    return (ex.pow_(st.lapse, ex.Const(-0.5)), ex.ZERO, ex.ZERO, ex.ZERO)


def normal_norm_sq(st: SpacetimeSplit) -> Expr:
    """g(n, n) as an Expr; identically -1 for a valid split."""
    n0 = unit_normal(st)[0]
    return ex.mul(ex.neg(st.lapse), ex.mul(n0, n0))


def weingarten4(st: SpacetimeSplit, X, p: Binding) -> np.ndarray:
    """All four components of D4_X n for a slice-tangent X (3 components).

    The time component vanishes identically; it is returned so callers can
    assert tangency rather than trust it.
    """
    gamma4 = _christoffel4(st)
    n0 = unit_normal(st)[0]
    Xv = vec_at(X, p)
    n0_val = n0.eval(p)
    out = np.zeros(4, dtype=complex if np.iscomplexobj(Xv) else float)
    # D_X n^mu = X^a d_a n^mu + Gamma4^mu_{a 0} X^a n^0; d_a n^mu = 0 because
    # the lapse has no spatial dependence.
    for mu in range(4):
        acc = 0.0
        for a in range(3):
            acc = acc + gamma4[mu][a + 1][0].eval(p) * Xv[a]
        out[mu] = acc * n0_val
    return out


def weingarten(st: SpacetimeSplit, X, p: Binding) -> np.ndarray:
    """W(X) = D4_X n restricted to the slice (t-component dropped)."""
    return weingarten4(st, X, p)[1:]


@lru_cache(maxsize=128)
def weingarten_endo(st: SpacetimeSplit) -> EndoField:
    """W as an endomorphism field, entries W^b_a = f^(-1/2) Gamma4^b_{a 0}."""
    gamma4 = _christoffel4(st)
    n0 = unit_normal(st)[0]
    entries = [
        [ex.mul(n0, gamma4[b + 1][a + 1][0]) for a in range(3)] for b in range(3)
    ]
    return EndoField(st.chart, entries)


def second_fundamental_form(st: SpacetimeSplit, X, Y, p: Binding) -> float:
    """K(X, Y) = <W(X), Y> with the induced metric at p (p binds t too)."""
    W = weingarten(st, X, p)
    q_at = mat_eval(st.g_rows, p)
    return W @ q_at @ vec_at(Y, p)


def k_rate_exprs(st: SpacetimeSplit) -> tuple[tuple[Expr, ...], ...]:
    """Independent route: K_ab = d_t (g_t)_ab / (2 sqrt(f))."""
    denom = ex.mul(ex.Const(2.0), ex.sqrt(st.lapse))
    return tuple(
        tuple(ex.div(ex.diff(st.g_rows[a][b], st.time), denom) for b in range(3))
        for a in range(3)
    )
