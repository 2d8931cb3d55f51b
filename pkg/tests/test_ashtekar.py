"""Deformed connection: metricity, product rule, torsion, curvature, local forms."""

import numpy as np
import pytest

from ashgeo import expr as ex
from ashgeo.ashtekar import (
    SO3_BASIS,
    BarberoImmirzi,
    CurvatureOp,
    ashtekar_deriv,
    ashtekar_form_field,
    beta_value,
    curvature_A,
    gamma_k_fields,
    local_form,
    physics_components,
    reconstruct_W,
    so3_components,
    so3_from_components,
    torsion_A,
)
from ashgeo.errors import ComputationError, NonOrthonormalFrameError
from ashgeo.geometry import (
    Chart,
    Frame,
    inner_expr,
    orthonormal_frame_field,
)
from ashgeo.hypersurface import EndoField
from ashgeo.levi_civita import VecField, cov_deriv, lie_bracket
from ashgeo.sampling import (
    SplitMix64,
    random_metric,
    random_poly,
    random_vecfield,
    sample_point,
)
from ashgeo.vecprod import inner, ivp

BETAS = [1.0, 0.2374, 1j]


def unit_chart():
    return Chart(("x1", "x2", "x3"), ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)))


def random_endo(chart, rng, scale=0.35):
    rows = [
        [random_poly(rng, chart.names, scale) for _ in range(3)]
        for _ in range(3)
    ]
    return EndoField(chart, rows)


def symmetric_weingarten(q, rng, scale=0.35):
    """Random q-symmetric endomorphism, built by raising a symmetric bilinear."""
    chart = q.chart
    rows = [[None] * 3 for _ in range(3)]
    for a in range(3):
        for b in range(a, 3):
            rows[a][b] = rows[b][a] = random_poly(rng, chart.names, scale)
    return EndoField.from_bilinear(q, rows)


def setup(seed, symmetric_w=True):
    rng = SplitMix64(seed)
    chart = unit_chart()
    q = random_metric(chart, rng)
    W = symmetric_weingarten(q, rng) if symmetric_w else random_endo(chart, rng)
    X = random_vecfield(chart, rng)
    Y = random_vecfield(chart, rng)
    Z = random_vecfield(chart, rng)
    p = sample_point(chart, rng)
    return chart, q, W, X, Y, Z, p, rng


# ---------------------------------------------------------------- so(3) basis


def test_so3_basis_brackets():
    eps = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        eps[i, j, k] = 1.0
        eps[j, i, k] = -1.0
    for i in range(3):
        for j in range(3):
            br = SO3_BASIS[i] @ SO3_BASIS[j] - SO3_BASIS[j] @ SO3_BASIS[i]
            expect = sum(eps[i, j, k] * SO3_BASIS[k] for k in range(3))
            assert np.max(np.abs(br - expect)) < 1e-14


def test_so3_components_roundtrip():
    rng = SplitMix64(7)
    for _ in range(20):
        c = np.array([rng.uniform(-2, 2) for _ in range(3)])
        S = so3_from_components(c)
        assert np.max(np.abs(S + S.T)) < 1e-14
        assert np.max(np.abs(so3_components(S) - c)) < 1e-12


def test_so3_components_rejects_symmetric_part():
    S = so3_from_components([1.0, 0.5, -0.25])
    S[0, 0] = 0.3
    with pytest.raises(ComputationError):
        so3_components(S)


def test_beta_validation():
    with pytest.raises(ComputationError):
        BarberoImmirzi(0.0)
    assert beta_value(BarberoImmirzi(0.2374)) == 0.2374
    assert beta_value(1j) == 1j


# ----------------------------------------------------- derivation properties


@pytest.mark.parametrize("beta", BETAS)
def test_metricity(beta):
    chart, q, W, X, Y, Z, p, rng = setup(101)
    lhs_expr = ex.ZERO
    q_inner = inner_expr(q.rows, Y.comps, Z.comps)
    for a, name in enumerate(chart.names):
        lhs_expr = ex.add(lhs_expr, ex.mul(X.comps[a], ex.diff(q_inner, name)))
    for _ in range(12):
        pt = sample_point(chart, rng)
        lhs = lhs_expr.eval(pt)
        dy = ashtekar_deriv(beta, q, W, X, Y, pt)
        dz = ashtekar_deriv(beta, q, W, X, Z, pt)
        rhs = inner(q, dy, Z.at(pt), pt) + inner(q, Y.at(pt), dz, pt)
        assert abs(lhs - rhs) < 1e-9


@pytest.mark.parametrize("beta", BETAS)
def test_product_rule_for_vecprod(beta):
    # nabla^A_X (Y x Z) = (nabla^A_X Y) x Z + Y x (nabla^A_X Z)
    chart, q, W, X, Y, Z, p, rng = setup(202)
    from ashgeo.vecprod import ivp_field

    YxZ = ivp_field(q, Y, Z)
    for _ in range(8):
        pt = sample_point(chart, rng)
        lhs = ashtekar_deriv(beta, q, W, X, YxZ, pt)
        dy = ashtekar_deriv(beta, q, W, X, Y, pt)
        dz = ashtekar_deriv(beta, q, W, X, Z, pt)
        rhs = ivp(q, dy, Z.at(pt), pt) + ivp(q, Y.at(pt), dz, pt)
        assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_beta_zero_limit_is_levi_civita():
    chart, q, W, X, Y, Z, p, rng = setup(303)
    got = ashtekar_deriv(1e-30, q, W, X, Y, p)
    assert np.max(np.abs(got - cov_deriv(q, X, Y, p))) < 1e-12


# ------------------------------------------------------------------- torsion


@pytest.mark.parametrize("beta", BETAS)
def test_torsion_two_routes(beta):
    chart, q, W, X, Y, Z, p, rng = setup(404)
    for _ in range(6):
        pt = sample_point(chart, rng)
        res = torsion_A(beta, q, W, X, Y, pt)
        assert res.residual < 1e-8
        # closed form is antisymmetric and proportional to beta
        swap = torsion_A(beta, q, W, Y, X, pt)
        assert np.max(np.abs(res.closed_form + swap.closed_form)) < 1e-9


def test_torsion_vanishes_without_deformation():
    chart, q, W, X, Y, Z, p, rng = setup(505)
    zero_w = EndoField.constant(chart, np.zeros((3, 3)))
    res = torsion_A(0.7, q, zero_w, X, Y, p)
    assert np.max(np.abs(res.definitional)) < 1e-10


# ----------------------------------------------------------------- curvature


@pytest.mark.parametrize("beta", BETAS)
def test_curvature_two_routes(beta):
    chart, q, W, X, Y, Z, p, rng = setup(606)
    op = CurvatureOp(q, W, X, Y, Z)
    for _ in range(4):
        pt = sample_point(chart, rng)
        a = op.definitional(beta, pt)
        b = op.closed_form(beta, pt)
        assert np.max(np.abs(a - b)) < 1e-8


@pytest.mark.parametrize("beta", [1.0, 1j])
def test_curvature_antisymmetries(beta):
    chart, q, W, X, Y, Z, p, rng = setup(707)
    V = random_vecfield(chart, rng)
    op_xy = CurvatureOp(q, W, X, Y, Z)
    op_yx = CurvatureOp(q, W, Y, X, Z)
    op_v = CurvatureOp(q, W, X, Y, V)
    for _ in range(3):
        pt = sample_point(chart, rng)
        rxy = op_xy.closed_form(beta, pt)
        ryx = op_yx.closed_form(beta, pt)
        assert np.max(np.abs(rxy + ryx)) < 1e-8
        # metric antisymmetry in the last two slots needs W q-symmetric
        rv = op_v.closed_form(beta, pt)
        lhs = inner(q, rxy, V.at(pt), pt)
        rhs = inner(q, rv, Z.at(pt), pt)
        assert abs(lhs + rhs) < 1e-8


def test_curvature_definitional_matches_plain_riemann_at_tiny_beta():
    from ashgeo.levi_civita import riemann

    chart, q, W, X, Y, Z, p, rng = setup(808)
    op = CurvatureOp(q, W, X, Y, Z)
    got = op.definitional(1e-30, p)
    assert np.max(np.abs(got - riemann(q, X, Y, Z, p))) < 1e-9


# ------------------------------------------------------------ reconstruction


@pytest.mark.parametrize("beta", BETAS)
def test_weingarten_reconstruction(beta):
    chart, q, W, X, Y, Z, p, rng = setup(909)

    def torsion_map_at(pt):
        def B(Xv, Yv):
            wx = W.at(pt) @ np.asarray(Xv)
            wy = W.at(pt) @ np.asarray(Yv)
            return beta * (ivp(q, wx, np.asarray(Yv), pt)
                           - ivp(q, wy, np.asarray(Xv), pt))

        return B

    for _ in range(6):
        pt = sample_point(chart, rng)
        got = reconstruct_W(beta, q, torsion_map_at(pt), pt)
        assert np.max(np.abs(got - W.at(pt))) < 1e-9


# ----------------------------------------------------------------- local form


def test_local_form_antisymmetric_for_real_beta():
    # antisymmetry holds for a frame orthonormal as a field, not just at p
    chart, q, W, X, Y, Z, p, rng = setup(111)
    e = orthonormal_frame_field(q)
    form = local_form(1.3, q, W, e, p)
    assert form.antisymmetry_residual() < 1e-9
    comps = form.components()
    assert comps.shape == (3, 3)


def test_local_form_rejects_non_orthonormal_frame():
    chart, q, W, X, Y, Z, p, rng = setup(222)
    bad = Frame.constant(chart, np.eye(3) * 1.7)
    with pytest.raises(NonOrthonormalFrameError):
        local_form(1.0, q, W, bad, p)


@pytest.mark.parametrize("beta", BETAS)
def test_decomposition_matches_local_form(beta):
    # A_a^i = Gamma_a^i + beta k_a^i, assembled against the M basis,
    # must reproduce the connection matrices themselves.
    chart, q, W, X, Y, Z, p, rng = setup(333)
    e = orthonormal_frame_field(q)
    form = local_form(beta, q, W, e, p)
    phys = physics_components(beta, q, W, e, p)
    assert np.max(np.abs(phys.a - (phys.gamma + beta * phys.k))) < 1e-12
    for a in range(3):
        assembled = so3_from_components(phys.a[a])
        assert np.max(np.abs(assembled - form.matrices[a])) < 1e-9


def test_gamma_k_fields_match_pointwise():
    chart, q, W, X, Y, Z, p, rng = setup(444)
    e_field = orthonormal_frame_field(q)
    gamma_f, k_f = gamma_k_fields(q, W, e_field)
    beta = 0.61
    for _ in range(4):
        pt = sample_point(chart, rng)
        phys = physics_components(beta, q, W, e_field, pt)
        got_gamma = np.array([[g.eval(pt) for g in row] for row in gamma_f])
        got_k = np.array([[g.eval(pt) for g in row] for row in k_f])
        assert np.max(np.abs(got_gamma - phys.gamma)) < 1e-8
        assert np.max(np.abs(got_k - phys.k)) < 1e-8


@pytest.mark.parametrize("beta", [0.95, 1j])
def test_form_field_matches_pointwise(beta):
    chart, q, W, X, Y, Z, p, rng = setup(555)
    e_field = orthonormal_frame_field(q)
    ff = ashtekar_form_field(beta, q, W, e_field)
    assert ff.is_complex() == (beta == 1j)
    for _ in range(4):
        pt = sample_point(chart, rng)
        phys = physics_components(beta, q, W, e_field, pt)
        v = np.array([rng.uniform(-1, 1) for _ in range(3)])
        want = np.einsum("a,ak->k", v, phys.a)
        got = ff.coefficients_at(v, pt)
        assert np.max(np.abs(got - want)) < 1e-8


def test_local_form_bracket_is_jacobian_of_vecprod():
    # the M basis realizes u x v: (sum_i u_i M_i) v = u x v in an
    # orthonormal frame, tying the algebra to the induced product
    rng = SplitMix64(99)
    for _ in range(10):
        u = np.array([rng.uniform(-1, 1) for _ in range(3)])
        v = np.array([rng.uniform(-1, 1) for _ in range(3)])
        got = so3_from_components(u) @ v
        assert np.max(np.abs(got - np.cross(u, v))) < 1e-13
