"""Charts, slice metrics, 3+1 split metrics, frames and densitized triads.

Conventions used throughout the package:

* A point is a Binding (dict of coordinate name -> float).  Tangent vectors
  are plain numpy arrays of components in the coordinate basis, attached to
  whatever point the call site supplies.
* A Frame is the 3x3 matrix field e with e[a][i] = component a of the i-th
  frame vector; columns are the frame vectors, so q-orthonormality reads
  e^T Q e = 1.  Coordinate bases are taken positively oriented, and the
  deterministic Gram-Schmidt below keeps det e > 0.
* Matrix entries are Expr trees, so every derived object (inverse metric,
  determinant, connection coefficients) stays exactly differentiable.
  Entries may contain free variables beyond the chart coordinates (the time
  coordinate of a split rides along as a parameter).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import expr as ex
from .errors import DegenerateMetricError, OutOfDomainError
from .expr import Binding, Expr

Interval = tuple[float, float]

_EDGE_MARGIN = 0.05  # sampling stays this fraction away from open interval ends


@dataclass(frozen=True, eq=False)
class Chart:
    """An open coordinate box for a 3-dimensional slice."""

    names: tuple[str, str, str]
    box: tuple[Interval, Interval, Interval]
    positively_oriented: bool = True

    def __post_init__(self):
        if len(set(self.names)) != 3:
            raise ValueError(f"coordinate names must be distinct: {self.names}")
        for name, (lo, hi) in zip(self.names, self.box):
            if not lo < hi:
                raise ValueError(f"empty interval for {name}: ({lo}, {hi})")

    def contains(self, p: Binding) -> bool:
        return all(lo < p[n] < hi for n, (lo, hi) in zip(self.names, self.box))

    def require_contains(self, p: Binding) -> None:
        if not self.contains(p):
            where = {n: p.get(n) for n in self.names}
            raise OutOfDomainError(f"point {where} outside chart box {self.box}")

    def interior_point(self, fractions: Sequence[float]) -> dict[str, float]:
        """Point at the given fractional positions of each interval."""
        out = {}
        for n, (lo, hi), f in zip(self.names, self.box, fractions):
            g = _EDGE_MARGIN + (1 - 2 * _EDGE_MARGIN) * float(f)
            out[n] = lo + (hi - lo) * g
        return out

    def center(self) -> dict[str, float]:
        return self.interior_point((0.5, 0.5, 0.5))


def _to_expr_rows(rows) -> tuple[tuple[Expr, ...], ...]:
    return tuple(tuple(ex.as_expr(v) for v in row) for row in rows)


def _symmetrize(rows) -> tuple[tuple[Expr, ...], ...]:
    # keep the upper triangle; mirror it so symmetry holds by construction
    r = _to_expr_rows(rows)
    n = len(r)
    return tuple(
        tuple(r[i][j] if i <= j else r[j][i] for j in range(n)) for i in range(n)
    )


def mat_eval(rows: Sequence[Sequence[Expr]], p: Binding) -> np.ndarray:
    return np.array([[e.eval(p) for e in row] for row in rows], dtype=float)


def det_expr(rows: Sequence[Sequence[Expr]]) -> Expr:
    """Determinant of a square Expr matrix by cofactor expansion."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = ex.ZERO
    for j in range(n):
        minor = [
            [rows[i][k] for k in range(n) if k != j] for i in range(1, n)
        ]
        term = ex.mul(rows[0][j], det_expr(minor))
        total = ex.add(total, term) if j % 2 == 0 else ex.sub(total, term)
    return total


def inverse_exprs(rows: Sequence[Sequence[Expr]]) -> tuple[tuple[Expr, ...], ...]:
    """Inverse of a square Expr matrix via adjugate / determinant."""
    n = len(rows)
    d = det_expr(rows)
    out = []
    for i in range(n):
        line = []
        for j in range(n):
            minor = [
                [rows[r][c] for c in range(n) if c != i]
                for r in range(n) if r != j
            ]
            cof = det_expr(minor)
            if (i + j) % 2 == 1:
                cof = ex.neg(cof)
            line.append(ex.div(cof, d))
        out.append(tuple(line))
    return tuple(out)


def inner_expr(q_rows, u_comps, v_comps) -> Expr:
    """Bilinear pairing u^a q_ab v^b as an Expr."""
    total = ex.ZERO
    for a in range(3):
        for b in range(3):
            total = ex.add(total, ex.mul(ex.mul(u_comps[a], q_rows[a][b]), v_comps[b]))
    return total


@dataclass(frozen=True, eq=False)
class SliceMetric:
    """Riemannian metric on a chart; entries are Expr, symmetric by build."""

    chart: Chart
    rows: tuple[tuple[Expr, ...], ...]

    def __init__(self, chart: Chart, rows):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "rows", _symmetrize(rows))

    def entry(self, a: int, b: int) -> Expr:
        return self.rows[a][b]

    def mat(self, p: Binding) -> np.ndarray:
        return mat_eval(self.rows, p)

    def inner(self, u, v, p: Binding):
        """Bilinear q(u, v) at p; complex components pass through."""
        return np.asarray(u) @ self.mat(p) @ np.asarray(v)

    def check_positive_definite(self, points: Iterable[Binding]) -> None:
        for p in points:
            m = self.mat(p)
            if not _spd(m):
                raise DegenerateMetricError(
                    f"metric not positive definite at {dict(p)}"
                )

    def check_symmetric_input(self, raw_rows, points: Iterable[Binding],
                              tol: float = 1e-9) -> None:
        """Validate that user-supplied rows were actually symmetric."""
        rows = _to_expr_rows(raw_rows)
        for p in points:
            m = mat_eval(rows, p)
            if np.max(np.abs(m - m.T)) > tol:
                raise DegenerateMetricError(
                    f"metric entries not symmetric at {dict(p)}"
                )


def _spd(m: np.ndarray) -> bool:
    return (
        m[0, 0] > 0.0
        and np.linalg.det(m[:2, :2]) > 0.0
        and np.linalg.det(m) > 0.0
    )


@lru_cache(maxsize=256)
def metric_det_expr(q: SliceMetric) -> Expr:
    return det_expr(q.rows)


@lru_cache(maxsize=256)
def metric_inverse_exprs(q: SliceMetric) -> tuple[tuple[Expr, ...], ...]:
    return inverse_exprs(q.rows)


@dataclass(frozen=True, eq=False)
class SpacetimeSplit:
    """Metric g = -f dt^2 + g_t on I x chart, with lapse f a function of t only."""

    time: str
    t_interval: Interval
    chart: Chart
    lapse: Expr
    g_rows: tuple[tuple[Expr, ...], ...]

    def __init__(self, time, t_interval, chart, lapse, g_rows):
        lapse = ex.as_expr(lapse)
        if time in chart.names:
            raise ValueError(f"time coordinate {time!r} collides with chart names")
        if not lapse.free_vars <= {time}:
            raise ValueError(
                f"lapse may depend on {time!r} only, got {sorted(lapse.free_vars)}"
            )
        object.__setattr__(self, "time", time)
        object.__setattr__(self, "t_interval", tuple(map(float, t_interval)))
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "lapse", lapse)
        object.__setattr__(self, "g_rows", _symmetrize(g_rows))

    def require_time(self, t0: float) -> None:
        lo, hi = self.t_interval
        if not lo < t0 < hi:
            raise OutOfDomainError(f"time {t0} outside interval ({lo}, {hi})")

    def check_lapse_positive(self, times: Iterable[float]) -> None:
        for t0 in times:
            if self.lapse.eval({self.time: t0}) <= 0.0:
                raise DegenerateMetricError(f"lapse not positive at {self.time}={t0}")

    def spatial_metric(self) -> SliceMetric:
        """g_t as a SliceMetric with the time coordinate riding as a parameter."""
        return SliceMetric(self.chart, self.g_rows)


def induce_slice_metric(st: SpacetimeSplit, t0: float) -> SliceMetric:
    """Restrict g_t to the slice t = t0."""
    st.require_time(t0)
    rows = [[e.subst({st.time: t0}) for e in row] for row in st.g_rows]
    return SliceMetric(st.chart, rows)


@dataclass(frozen=True, eq=False)
class Frame:
    """Matrix field of frame vectors; column i holds the components of e_i."""

    chart: Chart
    cols: tuple[tuple[Expr, ...], ...]  # cols[a][i] = component a of e_i

    def __init__(self, chart: Chart, cols):
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "cols", _to_expr_rows(cols))

    @classmethod
    def constant(cls, chart: Chart, matrix) -> "Frame":
        return cls(chart, [[float(v) for v in row] for row in np.asarray(matrix)])

    @classmethod
    def identity(cls, chart: Chart) -> "Frame":
        return cls.constant(chart, np.eye(3))

    def column(self, i: int) -> tuple[Expr, Expr, Expr]:
        return tuple(self.cols[a][i] for a in range(3))

    def mat(self, p: Binding) -> np.ndarray:
        return mat_eval(self.cols, p)

    def det_expr(self) -> Expr:
        return det_expr(self.cols)


class DensitizedTriad(Frame):
    """Weight-one densitized version of a frame: E = e / det e."""


def frame_det(e: Frame, p: Binding) -> float:
    """det of the frame matrix at p; errors if numerically singular."""
    d = float(np.linalg.det(e.mat(p)))
    if abs(d) < 1e-12:
        raise DegenerateMetricError(f"frame is singular at {dict(p)}")
    return d


def gram_schmidt(Q: np.ndarray) -> np.ndarray:
    """Orthonormalize the coordinate basis against a 3x3 SPD matrix Q.

    Processes the basis vectors in index order, so the result is the unique
    upper-triangular frame with positive diagonal; det stays positive.
    """
    if not _spd(Q):
        raise DegenerateMetricError("metric matrix is not positive definite")
    cols = []
    for a in range(3):
        v = np.zeros(3)
        v[a] = 1.0
        for u in cols:
            v = v - (u @ Q @ v) * u
        n2 = v @ Q @ v
        if n2 <= 0.0:
            raise DegenerateMetricError("metric degenerate along basis direction")
        cols.append(v / np.sqrt(n2))
    return np.column_stack(cols)


def orthonormal_frame(q: SliceMetric, p: Binding) -> Frame:
    """Numeric q-orthonormal frame at a single point, wrapped as constants."""
    return Frame.constant(q.chart, gram_schmidt(q.mat(p)))


@lru_cache(maxsize=128)
def orthonormal_frame_field(q: SliceMetric) -> Frame:
    """Symbolic Gram-Schmidt: a differentiable q-orthonormal frame field."""
    basis = [tuple(ex.ONE if a == i else ex.ZERO for a in range(3)) for i in range(3)]
    cols: list[tuple[Expr, ...]] = []
    for i in range(3):
        v = list(basis[i])
        for u in cols:
            coef = inner_expr(q.rows, u, v)
            v = [ex.sub(v[a], ex.mul(coef, u[a])) for a in range(3)]
        norm = ex.sqrt(inner_expr(q.rows, v, v))
        cols.append(tuple(ex.div(v[a], norm) for a in range(3)))
    matrix = [[cols[i][a] for i in range(3)] for a in range(3)]
    return Frame(q.chart, matrix)


def check_orthonormal(q: SliceMetric, e: Frame, p: Binding) -> float:
    """Max deviation of e^T Q e from the identity at p."""
    m = e.mat(p)
    return float(np.max(np.abs(m.T @ q.mat(p) @ m - np.eye(3))))


def densitize(e: Frame) -> DensitizedTriad:
    """E = (1 / det e) e, a weight-one density; det E = (det e)^(-2)."""
    d = e.det_expr()
    cols = [[ex.div(e.cols[a][i], d) for i in range(3)] for a in range(3)]
    return DensitizedTriad(e.chart, cols)


def reconstruct_frame(E: DensitizedTriad) -> Frame:
    """Invert densitization on the det E > 0 branch: e = (det E)^(-1/2) E.

    Points where det E <= 0 raise EvalDomainError on evaluation.
    """
    d = E.det_expr()
    scale = ex.pow_(d, ex.Const(-0.5))
    cols = [[ex.mul(scale, E.cols[a][i]) for i in range(3)] for a in range(3)]
    return Frame(E.chart, cols)


def metric_from_frame(e: Frame) -> SliceMetric:
    """The unique metric making e orthonormal: Q = (e e^T)^(-1)."""
    p_rows = [
        [
            _dot3(e.cols[a], e.cols[b])
            for b in range(3)
        ]
        for a in range(3)
    ]
    return SliceMetric(e.chart, inverse_exprs(p_rows))


def _dot3(u, v) -> Expr:
    total = ex.ZERO
    for k in range(3):
        total = ex.add(total, ex.mul(u[k], v[k]))
    return total
