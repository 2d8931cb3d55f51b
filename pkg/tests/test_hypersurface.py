"""Unit normal, Weingarten map, second fundamental form."""

from __future__ import annotations

import math

import numpy as np
import pytest

from ashgeo import expr as ex
from ashgeo import geometry as geo
from ashgeo import hypersurface as hs
from ashgeo.sampling import SplitMix64, random_metric, random_vector, sample_point


def unit_chart():
    return geo.Chart(("x1", "x2", "x3"), ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)))


def frw_like_split(rate=0.5):
    """f = 1, g_t = exp(2 * rate * t) * delta: scale factor exp(rate * t)."""
    c = unit_chart()
    a2 = ex.exp(ex.Const(2.0 * rate) * ex.Var("t"))
    rows = [[a2 if i == j else ex.ZERO for j in range(3)] for i in range(3)]
    return geo.SpacetimeSplit("t", (-2.0, 2.0), c, 1.0, rows)


def random_split(seed=401):
    """Generic well-conditioned split with t-dependent metric and lapse."""
    rng = SplitMix64(seed)
    c = unit_chart()
    q = random_metric(c, rng, extra_names=("t",))
    t = ex.Var("t")
    lapse = 1.0 + 0.2 * t * t
    return geo.SpacetimeSplit("t", (-1.0, 1.0), c, lapse, q.rows), rng


def spacetime_point(rng, chart, t):
    p = sample_point(chart, rng)
    p["t"] = t
    return p


def test_unit_normal_has_norm_minus_one():
    st, _ = random_split()
    nn = hs.normal_norm_sq(st)
    for t in (-0.5, 0.0, 0.7):
        assert abs(nn.eval({"t": t}) + 1.0) < 1e-14


def test_weingarten_is_tangent():
    st, rng = random_split(403)
    for _ in range(6):
        p = spacetime_point(rng, st.chart, rng.uniform(-0.9, 0.9))
        w4 = hs.weingarten4(st, random_vector(rng), p)
        assert abs(w4[0]) < 1e-14


def test_weingarten_frw_is_hubble_times_identity():
    st = frw_like_split(rate=0.5)
    rng = SplitMix64(405)
    for t in (-1.0, 0.0, 0.8):
        p = spacetime_point(rng, st.chart, t)
        X = random_vector(rng)
        assert np.max(np.abs(hs.weingarten(st, X, p) - 0.5 * X)) < 1e-9


def test_weingarten_power_law_scale_factor():
    # a = t^2 on t > 0: adot/a = 2/t, so W(X) = X at t = 2
    c = unit_chart()
    t = ex.Var("t")
    a2 = (t * t) * (t * t)
    rows = [[a2 if i == j else ex.ZERO for j in range(3)] for i in range(3)]
    st = geo.SpacetimeSplit("t", (0.5, 4.0), c, 1.0, rows)
    rng = SplitMix64(407)
    p = spacetime_point(rng, c, 2.0)
    X = random_vector(rng)
    assert np.max(np.abs(hs.weingarten(st, X, p) - X)) < 1e-12


def test_weingarten_linear_in_x():
    st, rng = random_split(409)
    p = spacetime_point(rng, st.chart, 0.3)
    X, Y = random_vector(rng), random_vector(rng)
    lhs = hs.weingarten(st, 2.0 * X + Y, p)
    rhs = 2.0 * hs.weingarten(st, X, p) + hs.weingarten(st, Y, p)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_second_fundamental_form_symmetric():
    st, rng = random_split(411)
    worst = 0.0
    for _ in range(8):
        p = spacetime_point(rng, st.chart, rng.uniform(-0.9, 0.9))
        X, Y = random_vector(rng), random_vector(rng)
        worst = max(
            worst,
            abs(
                hs.second_fundamental_form(st, X, Y, p)
                - hs.second_fundamental_form(st, Y, X, p)
            ),
        )
    assert worst < 1e-10


def test_k_matches_metric_rate_formula():
    """Christoffel route vs d_t(g_t)/(2 sqrt(f)) on a generic split."""
    st, rng = random_split(413)
    rate = hs.k_rate_exprs(st)
    worst = 0.0
    for _ in range(8):
        p = spacetime_point(rng, st.chart, rng.uniform(-0.9, 0.9))
        X, Y = random_vector(rng), random_vector(rng)
        via_w = hs.second_fundamental_form(st, X, Y, p)
        via_rate = sum(
            rate[a][b].eval(p) * X[a] * Y[b] for a in range(3) for b in range(3)
        )
        worst = max(worst, abs(via_w - via_rate))
    assert worst < 1e-10


def test_frw_exponential_k_is_hubble_times_metric():
    st = frw_like_split(rate=0.3)
    rng = SplitMix64(415)
    p = spacetime_point(rng, st.chart, 0.0)  # a(0) = 1
    X, Y = random_vector(rng), random_vector(rng)
    got = hs.second_fundamental_form(st, X, Y, p)
    q0 = geo.induce_slice_metric(st, 0.0)
    assert abs(got - 0.3 * q0.inner(X, Y, p)) < 1e-12


def test_weingarten_endo_matches_pointwise_map():
    st, rng = random_split(417)
    W = hs.weingarten_endo(st)
    for _ in range(6):
        p = spacetime_point(rng, st.chart, rng.uniform(-0.9, 0.9))
        X = random_vector(rng)
        assert np.max(np.abs(W.apply(X, p) - hs.weingarten(st, X, p))) < 1e-12


def test_weingarten_endo_is_q_symmetric():
    st, rng = random_split(419)
    W = hs.weingarten_endo(st)
    q = st.spatial_metric()
    for _ in range(5):
        p = spacetime_point(rng, st.chart, rng.uniform(-0.9, 0.9))
        assert W.symmetry_residual(q, p) < 1e-10


def test_endo_from_bilinear_is_q_symmetric():
    rng = SplitMix64(421)
    chart = unit_chart()
    q = random_metric(chart, rng)
    k_rows = [[0.0] * 3 for _ in range(3)]
    for a in range(3):
        for b in range(a, 3):
            k_rows[a][b] = k_rows[b][a] = round(rng.uniform(-1, 1), 6)
    W = hs.EndoField.from_bilinear(q, k_rows)
    for _ in range(5):
        p = sample_point(chart, rng)
        assert W.symmetry_residual(q, p) < 1e-12
        # lowering the raised index gives back the bilinear form
        K = q.mat(p) @ W.at(p)
        assert np.max(np.abs(K - np.array(k_rows))) < 1e-10
