"""The deformed metric connection D^A and its local so(3)-valued form.

Given a slice metric q, a q-symmetric endomorphism field W and a nonzero
complex parameter beta, the connection is

    D^A_X Y = D_X Y + beta cross(W(X), Y)

with D the Levi-Civita connection of q and cross the metric vector product.
Because cross(V, .) is q-antisymmetric, D^A is again metric; it trades
torsion for the extrinsic data instead:

    T^A(X, Y)   = beta [ cross(W(X), Y) - cross(W(Y), X) ]
    R^A(X, Y)Z  = R(X, Y)Z
                  + beta cross((D_X W)Y - (D_Y W)X, Z)
                  + beta^2 cross(cross(W(X), W(Y)), Z)

Torsion and curvature are computed both from these closed forms and from
their definitions (first covariant derivatives, respectively nested second
ones); the two routes share no algebra beyond the connection itself and are
asserted against each other in the test suites.

Everything complex is kept out of the Expr layer: a beta-linear object is
carried as real coefficient fields of beta^0, beta^1, beta^2 and assembled
with the complex scalar only at evaluation points.

Local form convention: for an oriented q-orthonormal frame field e, the
matrix of A(d_a) acts on frame labels with

    A_a[j][i] = < D^A_{d_a} e_i , e_j >

which is antisymmetric in (i, j) and expands as A_a = sum_k A_a^k M_k in the
so(3) basis (M_k)_{ij} = -eps_kij.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import expr as ex
from .errors import ComputationError, NonOrthonormalFrameError
from .expr import Binding, Expr
from .geometry import (
    Chart,
    Frame,
    SliceMetric,
    check_orthonormal,
    gram_schmidt,
    inner_expr,
)
from .hypersurface import EndoField
from .levi_civita import VecField, cov_deriv, cov_deriv_field, lie_bracket, riemann
from .vecprod import inner, ivp, ivp_field

# (M_i)_jk = -eps_ijk; [M_i, M_j] = eps_ijk M_k
SO3_BASIS = np.zeros((3, 3, 3))
for _i in range(3):
    for _j in range(3):
        for _k in range(3):
            sign = {(0, 1, 2): 1.0, (1, 2, 0): 1.0, (2, 0, 1): 1.0,
                    (0, 2, 1): -1.0, (2, 1, 0): -1.0, (1, 0, 2): -1.0}.get(
                        (_i, _j, _k), 0.0)
            SO3_BASIS[_i, _j, _k] = -sign

_EPS = -SO3_BASIS  # eps_ijk with eps_123 = +1


@dataclass(frozen=True)
class BarberoImmirzi:
    """The deformation parameter; any nonzero complex number."""

    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if self.value == 0:
            raise ComputationError("deformation parameter beta must be nonzero")


def beta_value(beta) -> complex:
    if isinstance(beta, BarberoImmirzi):
        return beta.value
    return BarberoImmirzi(beta).value


def so3_from_components(c) -> np.ndarray:
    """sum_i c_i M_i; complex coefficients allowed."""
    return np.einsum("i,ijk->jk", np.asarray(c), SO3_BASIS)


def so3_components(S: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Expansion coefficients of an antisymmetric matrix in the M basis."""
    S = np.asarray(S)
    if np.max(np.abs(S + S.T)) > tol * max(1.0, np.max(np.abs(S))):
        raise ComputationError("matrix is not antisymmetric; not in so(3)")
    return -0.5 * np.einsum("lij,ij->l", _EPS, S)


def ashtekar_deriv(beta, q: SliceMetric, W: EndoField, X, Y: VecField,
                   p: Binding) -> np.ndarray:
    """D^A_X Y at p.  X is a vector at p (complex allowed), Y a field."""
    b = beta_value(beta)
    base = cov_deriv(q, X, Y, p)
    from .levi_civita import vec_at

    wx = W.at(p) @ vec_at(X, p)
    return base + b * ivp(q, wx, Y.at(p), p)


class TorsionResult(NamedTuple):
    definitional: np.ndarray
    closed_form: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(self.definitional - self.closed_form)))


def torsion_A(beta, q: SliceMetric, W: EndoField, X: VecField, Y: VecField,
              p: Binding) -> TorsionResult:
    """T^A(X, Y) at p by definition and by the closed form."""
    b = beta_value(beta)
    defn = (
        ashtekar_deriv(b, q, W, X.at(p), Y, p)
        - ashtekar_deriv(b, q, W, Y.at(p), X, p)
        - lie_bracket(X, Y).at(p)
    )
    Wm = W.at(p)
    Xv, Yv = X.at(p), Y.at(p)
    closed = b * (ivp(q, Wm @ Xv, Yv, p) - ivp(q, Wm @ Yv, Xv, p))
    return TorsionResult(defn, closed)


class CurvatureOp:
    """R^A(X, Y)Z for fixed fields, reusable across sample points and betas.

    The definitional route expands the nested derivative into powers of beta
    with real vector-field coefficients:

        R^A = t0 + beta t1 + beta^2 t2

    where t0 is the Levi-Civita curvature combination and t1, t2 collect the
    mixed and doubled cross-product terms.  The closed-form route combines
    the curvature tensor, (D W), and iterated products evaluated pointwise.
    """

    def __init__(self, q: SliceMetric, W: EndoField, X: VecField, Y: VecField,
                 Z: VecField):
        self.q, self.W = q, W
        self.X, self.Y, self.Z = X, Y, Z
        D = lambda U, V: cov_deriv_field(q, U, V)
        self._terms = None
        # pieces for the closed form
        self._wy = W.apply_field(Y)
        self._wx = W.apply_field(X)
        self._dx_wy = D(X, self._wy)
        self._dy_wx = D(Y, self._wx)
        self._dxy = D(X, Y)
        self._dyx = D(Y, X)

    def _beta_terms(self):
        if self._terms is None:
            q, W, X, Y, Z = self.q, self.W, self.X, self.Y, self.Z
            D = lambda U, V: cov_deriv_field(q, U, V)
            B = lambda U, V: ivp_field(q, W.apply_field(U), V)
            bracket = lie_bracket(X, Y)
            dyz, dxz = D(Y, Z), D(X, Z)
            byz, bxz = B(Y, Z), B(X, Z)
            t0 = _sub3(_sub3(D(X, dyz), D(Y, dxz)), D(bracket, Z))
            t1 = _sub3(
                _add3(D(X, byz), B(X, dyz)),
                _add3(_add3(D(Y, bxz), B(Y, dxz)), B(bracket, Z)),
            )
            t2 = _sub3(B(X, byz), B(Y, bxz))
            self._terms = (t0, t1, t2)
        return self._terms

    def definitional(self, beta, p: Binding) -> np.ndarray:
        b = beta_value(beta)
        t0, t1, t2 = self._beta_terms()
        return t0.at(p) + b * t1.at(p) + b * b * t2.at(p)

    def closed_form(self, beta, p: Binding) -> np.ndarray:
        b = beta_value(beta)
        q, W = self.q, self.W
        Xv, Yv, Zv = self.X.at(p), self.Y.at(p), self.Z.at(p)
        Wm = W.at(p)
        base = riemann(q, Xv, Yv, Zv, p)
        # (D_X W)Y = D_X (W Y) - W (D_X Y)
        dw_xy = self._dx_wy.at(p) - Wm @ self._dxy.at(p)
        dw_yx = self._dy_wx.at(p) - Wm @ self._dyx.at(p)
        mid = ivp(q, dw_xy - dw_yx, Zv, p)
        top = ivp(q, ivp(q, Wm @ Xv, Wm @ Yv, p), Zv, p)
        return base + b * mid + b * b * top


def _add3(u: VecField, v: VecField) -> VecField:
    return VecField(u.chart, [ex.add(a, b) for a, b in zip(u.comps, v.comps)])


def _sub3(u: VecField, v: VecField) -> VecField:
    return VecField(u.chart, [ex.sub(a, b) for a, b in zip(u.comps, v.comps)])


class CurvatureResult(NamedTuple):
    definitional: np.ndarray
    closed_form: np.ndarray

    @property
    def residual(self) -> float:
        return float(np.max(np.abs(self.definitional - self.closed_form)))


def curvature_A(beta, q: SliceMetric, W: EndoField, X: VecField, Y: VecField,
                Z: VecField, p: Binding) -> CurvatureResult:
    op = CurvatureOp(q, W, X, Y, Z)
    return CurvatureResult(op.definitional(beta, p), op.closed_form(beta, p))


def reconstruct_W(beta, q: SliceMetric, B: Callable, p: Binding) -> np.ndarray:
    """Recover the matrix of W at p from samples of the torsion map

        B(X, Y) = beta [ cross(W X, Y) - cross(W Y, X) ].

    Contracting against an oriented q-orthonormal frame and using the triple
    product identity collapses the frame sum to

        (1 / beta) sum_i cross(e_i, B(X, e_i)) = W X + tr(W) X

    whose right side has trace 4 tr(W); subtracting a quarter of it isolates W.
    """
    b = beta_value(beta)
    e = gram_schmidt(q.mat(p))
    cols = []
    for a in range(3):
        X = np.zeros(3)
        X[a] = 1.0
        acc = np.zeros(3, dtype=complex)
        for i in range(3):
            ei = e[:, i]
            acc = acc + ivp(q, ei, np.asarray(B(X, ei)), p)
        cols.append(acc / b)
    m = np.column_stack(cols)
    out = m - 0.25 * np.trace(m) * np.eye(3)
    if np.max(np.abs(out.imag)) < 1e-9 * max(1.0, np.max(np.abs(out.real))):
        return out.real
    return out


@dataclass(frozen=True)
class LocalLieForm:
    """Matrices of a connection form along the coordinate directions.

    matrices[a] is A(d_a) in a fixed Lie-algebra representation; `algebra`
    records which one ("so3": 3x3, "su2": 2x2).
    """

    matrices: tuple[np.ndarray, ...]
    algebra: str = "so3"

    def components(self) -> np.ndarray:
        """comps[a][k] with A(d_a) = sum_k comps[a][k] basis_k."""
        if self.algebra == "so3":
            return np.stack([so3_components(m) for m in self.matrices])
        from .spin import su2_components

        return np.stack([su2_components(m) for m in self.matrices])

    def antisymmetry_residual(self) -> float:
        if self.algebra != "so3":
            raise ComputationError("antisymmetry residual applies to so3 matrices")
        return max(
            float(np.max(np.abs(m + np.swapaxes(m, -1, -2)))) for m in self.matrices
        )


def local_form(beta, q: SliceMetric, W: EndoField, e: Frame, p: Binding,
               orthonormal_tol: float = 1e-8) -> LocalLieForm:
    """A(d_a)[j][i] = < D^A_{d_a} e_i, e_j > for each coordinate direction."""
    b = beta_value(beta)
    resid = check_orthonormal(q, e, p)
    if resid > orthonormal_tol:
        raise NonOrthonormalFrameError(
            f"frame deviates from q-orthonormality by {resid:.3e} at {dict(p)}"
        )
    cols = [VecField(q.chart, e.column(i)) for i in range(3)]
    evals = [c.at(p) for c in cols]
    Wm = W.at(p)
    mats = []
    for a in range(3):
        Xv = np.zeros(3)
        Xv[a] = 1.0
        m = np.zeros((3, 3), dtype=complex)
        for i in range(3):
            dcol = cov_deriv(q, Xv, cols[i], p) + b * ivp(q, Wm[:, a], evals[i], p)
            for j in range(3):
                m[j, i] = inner(q, dcol, evals[j], p)
        mats.append(m if b.imag else m.real)
    return LocalLieForm(tuple(mats), "so3")


class PhysicsComponents(NamedTuple):
    gamma: np.ndarray  # gamma[a][k]: rotation part
    k: np.ndarray      # k[a][i] = K(d_a, d_b) e_i^b: extrinsic part
    a: np.ndarray      # gamma + beta k


def physics_components(beta, q: SliceMetric, W: EndoField, e: Frame,
                       p: Binding) -> PhysicsComponents:
    """Split of the local form into rotation and extrinsic coefficients.

    gamma_a^k = 1/2 eps_ijk < D_{d_a} e_i, e_j >, and k_a^i contracts the
    second fundamental form K = q W with the frame; A_a^i = gamma + beta k.
    """
    b = beta_value(beta)
    cols = [VecField(q.chart, e.column(i)) for i in range(3)]
    evals = [c.at(p) for c in cols]
    gamma = np.zeros((3, 3))
    for a in range(3):
        Xv = np.zeros(3)
        Xv[a] = 1.0
        pair = np.zeros((3, 3))
        dcols = [cov_deriv(q, Xv, cols[i], p) for i in range(3)]
        for i in range(3):
            for j in range(3):
                pair[i, j] = inner(q, dcols[i], evals[j], p)
        gamma[a] = 0.5 * np.einsum("ijk,ij->k", _EPS, pair)
    Km = q.mat(p) @ W.at(p)  # K_ba = q_bc W^c_a; symmetric
    kai = np.zeros((3, 3))
    for a in range(3):
        for i in range(3):
            kai[a, i] = Km[:, a] @ evals[i]
    return PhysicsComponents(gamma, kai, gamma + b * kai)


# ---------------------------------------------------------------------------
# Field versions (used by holonomy integration and the CLI sweep)


def gamma_k_fields(q: SliceMetric, W: EndoField, e: Frame):
    """(gamma[a][k], k[a][i]) as Expr matrices over the chart."""
    cols = [VecField(q.chart, e.column(i)) for i in range(3)]
    dcols = [
        [cov_deriv_field(q, VecField.coordinate(q.chart, a), cols[i])
         for i in range(3)]
        for a in range(3)
    ]
    gamma = []
    for a in range(3):
        row = []
        for k in range(3):
            total = ex.ZERO
            for i in range(3):
                for j in range(3):
                    s = _EPS[i, j, k]
                    if s == 0.0:
                        continue
                    term = inner_expr(q.rows, dcols[a][i].comps, cols[j].comps)
                    term = ex.mul(ex.Const(0.5 * s), term)
                    total = ex.add(total, term)
            row.append(total)
        gamma.append(tuple(row))
    # K_ba = q_bc W^c_a, then k_a^i = K_ba e_i^b
    k_rows = []
    for b_ in range(3):
        row = []
        for a in range(3):
            total = ex.ZERO
            for c in range(3):
                total = ex.add(total, ex.mul(q.rows[b_][c], W.entries[c][a]))
            row.append(total)
        k_rows.append(row)
    kai = []
    for a in range(3):
        row = []
        for i in range(3):
            total = ex.ZERO
            for b_ in range(3):
                total = ex.add(total, ex.mul(k_rows[b_][a], cols[i].comps[b_]))
            row.append(total)
        kai.append(tuple(row))
    return tuple(gamma), tuple(kai)


@dataclass(frozen=True, eq=False)
class LieFormField:
    """Connection form with Expr component functions against the M/tau bases.

    comps_re/comps_im are 3x3 matrices indexed [a][k]: the coefficient of
    basis_k along the coordinate direction d_a.  The same components serve
    so(3) (M_k) and su(2) (tau_k); swapping the basis is exactly the lift
    through the double cover.
    """

    chart: Chart
    comps_re: tuple[tuple[Expr, ...], ...]
    comps_im: tuple[tuple[Expr, ...], ...] | None = None

    def is_complex(self) -> bool:
        return self.comps_im is not None

    def coefficients_at(self, velocity, p: Binding) -> np.ndarray:
        """sum_a v^a comps[a][k] as a complex 3-vector of coefficients."""
        v = np.asarray(velocity)
        out = np.zeros(3, dtype=complex)
        for a in range(3):
            if v[a] == 0.0:
                continue
            for k in range(3):
                c = self.comps_re[a][k].eval(p)
                if self.comps_im is not None:
                    c = c + 1j * self.comps_im[a][k].eval(p)
                out[k] += v[a] * c
        return out


def ashtekar_form_field(beta, q: SliceMetric, W: EndoField, e: Frame) -> LieFormField:
    """A_a^k = gamma_a^k + beta k_a^k as component fields."""
    b = beta_value(beta)
    gamma, kai = gamma_k_fields(q, W, e)
    re = tuple(
        tuple(ex.add(gamma[a][k], ex.mul(ex.Const(b.real), kai[a][k]))
              for k in range(3))
        for a in range(3)
    )
    if b.imag == 0.0:
        return LieFormField(q.chart, re, None)
    im = tuple(
        tuple(ex.mul(ex.Const(b.imag), kai[a][k]) for k in range(3))
        for a in range(3)
    )
    return LieFormField(q.chart, re, im)
