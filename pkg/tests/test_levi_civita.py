"""Connection coefficients, covariant derivative, curvature tensor."""

from __future__ import annotations

import math

import numpy as np
import pytest

from ashgeo import expr as ex
from ashgeo import geometry as geo
from ashgeo import levi_civita as lc
from ashgeo.sampling import SplitMix64, random_metric, random_vecfield, sample_point


def unit_chart():
    return geo.Chart(("x1", "x2", "x3"), ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)))


def sphere_chart():
    return geo.Chart(("x1", "x2", "x3"), ((0.35, 2.75), (0.35, 2.75), (0.1, 6.1)))


def round_sphere_metric():
    c = sphere_chart()
    x1, x2 = ex.Var("x1"), ex.Var("x2")
    s1 = ex.sin(x1)
    s2 = ex.sin(x2)
    return geo.SliceMetric(
        c,
        [
            [ex.ONE, ex.ZERO, ex.ZERO],
            [ex.ZERO, s1 * s1, ex.ZERO],
            [ex.ZERO, ex.ZERO, s1 * s1 * s2 * s2],
        ],
    )


def finite_diff_christoffel(q, p, h=1e-5):
    """Independent oracle: Koszul formula with centred differences."""
    names = q.chart.names

    def dmetric(d):
        up = dict(p)
        dn = dict(p)
        up[names[d]] += h
        dn[names[d]] -= h
        return (q.mat(up) - q.mat(dn)) / (2 * h)

    dg = np.array([dmetric(d) for d in range(3)])  # dg[d][a][b] = d_d q_ab
    Qinv = np.linalg.inv(q.mat(p))
    gamma = np.zeros((3, 3, 3))
    for c in range(3):
        for a in range(3):
            for b in range(3):
                s = 0.0
                for d in range(3):
                    s += Qinv[c, d] * (dg[a][d][b] + dg[b][d][a] - dg[d][a][b])
                gamma[c, a, b] = 0.5 * s
    return gamma


def test_christoffel_vanishes_for_constant_metric():
    q = geo.SliceMetric(unit_chart(), np.diag([2.0, 3.0, 5.0]).tolist())
    vals = lc.christoffel(q, {"x1": 0.3, "x2": 0.1, "x3": -0.4}).values
    assert np.max(np.abs(vals)) == 0.0


def test_christoffel_round_sphere_value():
    # For q = diag(1, sin^2 x1, ...): Gamma^1_22 = -1/2 d_1(sin^2 x1)
    q = round_sphere_metric()
    p = {"x1": 0.7, "x2": 1.1, "x3": 2.0}
    vals = lc.christoffel(q, p).values
    assert abs(vals[0][1][1] - (-math.sin(0.7) * math.cos(0.7))) < 1e-10


def test_christoffel_matches_finite_difference_oracle():
    rng = SplitMix64(11)
    q = random_metric(unit_chart(), rng)
    for _ in range(5):
        p = sample_point(unit_chart(), rng)
        exact = lc.christoffel(q, p).values
        approx = finite_diff_christoffel(q, p)
        assert np.max(np.abs(exact - approx)) < 1e-6


def test_christoffel_symmetric_lower_indices():
    rng = SplitMix64(5)
    q = random_metric(unit_chart(), rng)
    p = sample_point(unit_chart(), rng)
    vals = lc.christoffel(q, p).values
    assert np.max(np.abs(vals - np.swapaxes(vals, 1, 2))) < 1e-12


def test_cov_deriv_is_torsion_free():
    rng = SplitMix64(7)
    chart = unit_chart()
    q = random_metric(chart, rng)
    X = random_vecfield(chart, rng)
    Y = random_vecfield(chart, rng)
    bracket = lc.lie_bracket(X, Y)
    for _ in range(10):
        p = sample_point(chart, rng)
        lhs = lc.cov_deriv(q, X.at(p), Y, p) - lc.cov_deriv(q, Y.at(p), X, p)
        assert np.max(np.abs(lhs - bracket.at(p))) < 1e-10


def test_cov_deriv_metricity():
    """X<Y,Z> = <DX Y, Z> + <Y, DX Z> at 50 random samples."""
    rng = SplitMix64(13)
    chart = unit_chart()
    worst = 0.0
    for _ in range(5):
        q = random_metric(chart, rng)
        Y = random_vecfield(chart, rng)
        Z = random_vecfield(chart, rng)
        pairing = geo.inner_expr(q.rows, Y.comps, Z.comps)
        grads = [ex.diff(pairing, n) for n in chart.names]
        for _ in range(10):
            p = sample_point(chart, rng)
            Xv = np.array([rng.uniform(-1, 1) for _ in range(3)])
            lhs = sum(Xv[a] * grads[a].eval(p) for a in range(3))
            rhs = q.inner(lc.cov_deriv(q, Xv, Y, p), Z.at(p), p) + q.inner(
                Y.at(p), lc.cov_deriv(q, Xv, Z, p), p
            )
            worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-9


def test_cov_deriv_field_matches_pointwise():
    rng = SplitMix64(17)
    chart = unit_chart()
    q = random_metric(chart, rng)
    X = random_vecfield(chart, rng)
    Y = random_vecfield(chart, rng)
    D = lc.cov_deriv_field(q, X, Y)
    for _ in range(5):
        p = sample_point(chart, rng)
        assert np.max(np.abs(D.at(p) - lc.cov_deriv(q, X.at(p), Y, p))) < 1e-11


def test_riemann_flat_metric_vanishes():
    q = geo.SliceMetric(unit_chart(), np.eye(3).tolist())
    rng = SplitMix64(3)
    p = sample_point(unit_chart(), rng)
    Z = lc.VecField.coordinate(unit_chart(), 2)
    val = lc.riemann(q, [1.0, 0, 0], [0, 1.0, 0], Z, p)
    assert np.max(np.abs(val)) == 0.0


def test_riemann_antisymmetric_in_first_pair():
    rng = SplitMix64(19)
    chart = unit_chart()
    q = random_metric(chart, rng)
    for _ in range(5):
        p = sample_point(chart, rng)
        X = np.array([rng.uniform(-1, 1) for _ in range(3)])
        Y = np.array([rng.uniform(-1, 1) for _ in range(3)])
        Z = np.array([rng.uniform(-1, 1) for _ in range(3)])
        assert np.max(
            np.abs(lc.riemann(q, X, Y, Z, p) + lc.riemann(q, Y, X, Z, p))
        ) < 1e-10


def test_riemann_definition_from_double_derivative():
    """R(X,Y)Z agrees with DX DY Z - DY DX Z - D[X,Y] Z on random fields."""
    rng = SplitMix64(23)
    chart = unit_chart()
    q = random_metric(chart, rng)
    X = random_vecfield(chart, rng)
    Y = random_vecfield(chart, rng)
    Z = random_vecfield(chart, rng)
    dyz = lc.cov_deriv_field(q, Y, Z)
    dxz = lc.cov_deriv_field(q, X, Z)
    bracket = lc.lie_bracket(X, Y)
    for _ in range(4):
        p = sample_point(chart, rng)
        val = (
            lc.cov_deriv(q, X.at(p), dyz, p)
            - lc.cov_deriv(q, Y.at(p), dxz, p)
            - lc.cov_deriv(q, bracket.at(p), Z, p)
        )
        ref = lc.riemann(q, X.at(p), Y.at(p), Z, p)
        assert np.max(np.abs(val - ref)) < 1e-9


def test_round_sphere_has_unit_curvature():
    """R(X,Y)Z = <Z,Y>X - <Z,X>Y on the round unit-radius metric."""
    q = round_sphere_metric()
    rng = SplitMix64(29)
    for _ in range(8):
        p = sample_point(q.chart, rng)
        X = np.array([rng.uniform(-1, 1) for _ in range(3)])
        Y = np.array([rng.uniform(-1, 1) for _ in range(3)])
        Z = np.array([rng.uniform(-1, 1) for _ in range(3)])
        got = lc.riemann(q, X, Y, Z, p)
        want = q.inner(Z, Y, p) * X - q.inner(Z, X, p) * Y
        assert np.max(np.abs(got - want)) < 1e-8
