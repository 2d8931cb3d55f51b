"""Double cover SU(2) -> SO(3), algebra isomorphism, and path holonomy.

Basis conventions:

    tau_j = -(i/2) sigma_j        [tau_i, tau_j] = eps_ijk tau_k
    (M_i)_jk = -eps_ijk           [M_i, M_j]     = eps_ijk M_k

lambda_star maps tau_i -> M_i and is exactly the adjoint action of su(2) on
itself written in the tau basis.  The covering map is conjugation:
U tau_i U^-1 = lambda(U)_ji tau_j, so lambda(-U) = lambda(U) and
lambda(exp(xi)) = exp(lambda_star(xi)).

Holonomies solve U'(s) = -A(c'(s)) U(s), U(0) = 1, by fixed-step RK4 over a
path given as Expr components of a parameter s in [0, 1].  A connection with
a complex deformation parameter takes values in the complexified algebras;
the integration is unchanged, only group-membership checks stop applying.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .ashtekar import SO3_BASIS, LieFormField, LocalLieForm, so3_components
from .errors import ComputationError, ConfigError, OutOfDomainError
from .expr import Expr
from .geometry import Chart

_SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

SU2_BASIS = -0.5j * _SIGMA  # tau_i


def su2_from_components(c) -> np.ndarray:
    """sum_i c_i tau_i; complex coefficients give sl(2, C) elements."""
    return np.einsum("i,ijk->jk", np.asarray(c), SU2_BASIS)


def su2_components(xi: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Coefficients against tau_i; errors if xi is outside their span.

    The tau_i are Frobenius-orthogonal with squared norm 1/2, so
    c_i = 2 tr(tau_i^dagger xi); this stays valid for complex spans.
    """
    xi = np.asarray(xi, dtype=complex)
    c = 2.0 * np.einsum("ikj,kj->i", SU2_BASIS.conj(), xi)
    resid = np.max(np.abs(xi - su2_from_components(c)))
    if resid > tol * max(1.0, float(np.max(np.abs(xi)))):
        raise ComputationError(
            f"matrix is not in the traceless span of tau (residual {resid:.2e})"
        )
    return c


def lambda_star(xi: np.ndarray) -> np.ndarray:
    """Algebra isomorphism su(2) -> so(3): tau_i -> M_i."""
    return so3_from_su2_components(su2_components(xi))


def so3_from_su2_components(c) -> np.ndarray:
    return np.einsum("i,ijk->jk", np.asarray(c), SO3_BASIS)


def lambda_star_inv(S: np.ndarray) -> np.ndarray:
    """Inverse isomorphism so(3) -> su(2): M_i -> tau_i."""
    return su2_from_components(so3_components(S))


def _adjoint_in_tau_basis(U: np.ndarray, Uinv: np.ndarray) -> np.ndarray:
    R = np.zeros((3, 3), dtype=complex)
    for i in range(3):
        conj = U @ SU2_BASIS[i] @ Uinv
        R[:, i] = 2.0 * np.einsum("jlk,lk->j", SU2_BASIS.conj(), conj)
    return R


def covering_map(U: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """lambda(U) for U in SU(2): the rotation with U tau_i U^-1 = R_ji tau_j."""
    U = np.asarray(U, dtype=complex)
    if np.max(np.abs(U.conj().T @ U - np.eye(2))) > tol:
        raise ComputationError("matrix is not unitary")
    if abs(np.linalg.det(U) - 1.0) > tol:
        raise ComputationError("matrix does not have unit determinant")
    R = _adjoint_in_tau_basis(U, U.conj().T)
    if np.max(np.abs(R.imag)) > 1e-12:
        raise ComputationError("covering image unexpectedly complex")
    return R.real


def adjoint_map(U: np.ndarray) -> np.ndarray:
    """Conjugation action for invertible U in SL(2, C); extends covering_map."""
    U = np.asarray(U, dtype=complex)
    return _adjoint_in_tau_basis(U, np.linalg.inv(U))


def lift_connection(form: LocalLieForm) -> LocalLieForm:
    """Rewrite so(3) matrices as su(2) ones with the same tau components."""
    if form.algebra != "so3":
        raise ComputationError("connection form is already lifted")
    comps = form.components()
    mats = tuple(su2_from_components(comps[a]) for a in range(len(form.matrices)))
    return LocalLieForm(mats, "su2")


@dataclass(frozen=True, eq=False)
class PathSpec:
    """Piecewise-smooth path c(s), s in [0, 1], as Expr chart components."""

    chart: Chart
    comps: tuple[Expr, Expr, Expr]
    steps: int = 400

    def __init__(self, chart: Chart, comps, steps: int = 400):
        comps = tuple(ex.as_expr(c) for c in comps)
        if int(steps) < 10:
            raise ConfigError(f"path needs at least 10 steps, got {steps}")
        for c in comps:
            if not c.free_vars <= {"s"}:
                raise ConfigError(
                    f"path components may depend on 's' only, got {sorted(c.free_vars)}"
                )
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "comps", comps)
        object.__setattr__(self, "steps", int(steps))
        object.__setattr__(
            self, "velocity", tuple(ex.diff(c, "s") for c in comps)
        )

    def point(self, s: float) -> dict[str, float]:
        b = {"s": s}
        return {n: c.eval(b) for n, c in zip(self.chart.names, self.comps)}

    def velocity_at(self, s: float) -> np.ndarray:
        b = {"s": s}
        return np.array([v.eval(b) for v in self.velocity])

    def check_inside(self, samples: int = 64) -> None:
        for k in range(samples + 1):
            p = self.point(k / samples)
            if not self.chart.contains(p):
                raise OutOfDomainError(
                    f"path leaves the chart box at s={k / samples}: {p}"
                )

    def reversed(self) -> "PathSpec":
        one_minus = ex.sub(ex.ONE, ex.Var("s"))
        return PathSpec(
            self.chart,
            [ex.subst(c, {"s": one_minus}) for c in self.comps],
            self.steps,
        )


def _form_matrix(form: LieFormField, basis: np.ndarray, s: float,
                 path: PathSpec) -> np.ndarray:
    p = path.point(s)
    coeff = form.coefficients_at(path.velocity_at(s), p)
    return np.einsum("i,ijk->jk", coeff, basis)


def holonomy(form: LieFormField, path: PathSpec, group: str = "SO3") -> np.ndarray:
    """Path-ordered solution of U' = -A(c') U by fixed-step RK4.

    group selects the representation: "SO3" integrates with the M basis,
    "SU2" with the tau basis.  For real-valued forms the result drifts off
    the group by O(h^4) only; with complex components it lands in the
    complexified group and no unitarity holds.
    """
    if group not in ("SO3", "SU2"):
        raise ConfigError(f"unknown group {group!r}")
    path.check_inside()
    basis = SO3_BASIS if group == "SO3" else SU2_BASIS
    dim = 3 if group == "SO3" else 2
    n = path.steps
    if n > 10_000:
        raise ConfigError(f"step count {n} exceeds the 10000 cap")
    h = 1.0 / n
    U = np.eye(dim, dtype=complex)
    for k in range(n):
        s = k * h
        A0 = _form_matrix(form, basis, s, path)
        A1 = _form_matrix(form, basis, s + 0.5 * h, path)
        A2 = _form_matrix(form, basis, s + h, path)
        k1 = -A0 @ U
        k2 = -A1 @ (U + 0.5 * h * k1)
        k3 = -A1 @ (U + 0.5 * h * k2)
        k4 = -A2 @ (U + h * k3)
        U = U + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not form.is_complex():
        drift = np.max(np.abs(U.conj().T @ U - np.eye(dim)))
        if drift > 1e-6:
            raise ComputationError(f"holonomy drifted off the group by {drift:.2e}")
        if group == "SO3":
            U = U.real
    return U


def group_drift(U: np.ndarray) -> float:
    """Distance of U^dagger U from the identity (0 for a group element)."""
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))
