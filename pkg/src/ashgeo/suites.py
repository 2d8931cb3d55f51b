"""Named identity suites behind `ashgeo check`.

Every suite draws its own randomness from a SplitMix64 stream derived from
the run seed and a fixed per-suite offset, so reports are reproducible and
independent of which subset of suites is selected.  Each returns the number
of samples inspected and the worst error observed; the runner compares that
against the suite tolerance (overridable per run).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import expm

from . import expr as ex
from .ashtekar import (
    CurvatureOp,
    ashtekar_deriv,
    ashtekar_form_field,
    local_form,
    physics_components,
    reconstruct_W,
    so3_from_components,
    torsion_A,
)
from .config import RunConfig
from .errors import ConfigError
from .expr import Var
from .frw import frw_oracles, make_frw, reference_metric
from .geometry import (
    Chart,
    SliceMetric,
    densitize,
    gram_schmidt,
    inner_expr,
    metric_from_frame,
    orthonormal_frame_field,
    reconstruct_frame,
    Frame,
    mat_eval,
)
from .hypersurface import EndoField, weingarten_endo
from .levi_civita import VecField, cov_deriv, riemann
from .sampling import (
    SplitMix64,
    random_metric,
    random_poly,
    random_rotation,
    random_vecfield,
    random_vector,
    sample_point,
)
from .spin import (
    SU2_BASIS,
    PathSpec,
    adjoint_map,
    covering_map,
    holonomy,
    lambda_star,
    su2_from_components,
)
from .vecprod import inner, ivp, ivp_field, ivp_hodge

BETA_SET = (1.0, 0.2374, 1j)

FRW_CASES = tuple(
    (kappa, scale) for kappa in (-1, 0, 1)
    for scale in ("exp(0.5*t)", "1 + 0.1*t^2")
)


@dataclass(frozen=True)
class SuiteResult:
    name: str
    n_samples: int
    max_error: float
    tolerance: float
    passed: bool


def _unit_chart() -> Chart:
    return Chart(("x1", "x2", "x3"), ((-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)))


def _sym_endo(q: SliceMetric, rng, scale=0.35) -> EndoField:
    rows = [[None] * 3 for _ in range(3)]
    for a in range(3):
        for b in range(a, 3):
            rows[a][b] = rows[b][a] = random_poly(rng, q.chart.names, scale)
    return EndoField.from_bilinear(q, rows)


def _setup_random(rng, n_fields=3):
    chart = _unit_chart()
    q = random_metric(chart, rng)
    fields = [random_vecfield(chart, rng) for _ in range(n_fields)]
    return chart, q, fields


# ------------------------------------------------------------- vector product


def _vecprod_samples(rng, n, identity):
    chart = _unit_chart()
    worst = 0.0
    for _ in range(n):
        q = random_metric(chart, rng)
        p = sample_point(chart, rng)
        X, Y, Z = (random_vector(rng) for _ in range(3))
        worst = max(worst, identity(q, X, Y, Z, p))
    return n, worst


def suite_antisymmetry(cfg, rng):
    def check(q, X, Y, Z, p):
        return float(np.max(np.abs(ivp(q, X, Y, p) + ivp(q, Y, X, p))))

    return _vecprod_samples(rng, 200, check)


def suite_cyclic(cfg, rng):
    def check(q, X, Y, Z, p):
        return abs(inner(q, ivp(q, X, Y, p), Z, p) - inner(q, X, ivp(q, Y, Z, p), p))

    return _vecprod_samples(rng, 200, check)


def suite_triple_product(cfg, rng):
    def check(q, X, Y, Z, p):
        got = ivp(q, X, ivp(q, Y, Z, p), p)
        want = inner(q, X, Z, p) * np.asarray(Y) - inner(q, X, Y, p) * np.asarray(Z)
        return float(np.max(np.abs(got - want)))

    return _vecprod_samples(rng, 200, check)


def suite_jacobi(cfg, rng):
    def check(q, X, Y, Z, p):
        s = (
            ivp(q, X, ivp(q, Y, Z, p), p)
            + ivp(q, Y, ivp(q, Z, X, p), p)
            + ivp(q, Z, ivp(q, X, Y, p), p)
        )
        return float(np.max(np.abs(s)))

    return _vecprod_samples(rng, 200, check)


def suite_frame_independence(cfg, rng):
    chart = _unit_chart()
    q = random_metric(chart, rng)
    p = sample_point(chart, rng)
    X, Y = random_vector(rng), random_vector(rng)
    base_frame = gram_schmidt(q.mat(p))
    ref = ivp(q, X, Y, p, frame=base_frame)
    worst = 0.0
    for _ in range(50):
        rot = random_rotation(rng)
        got = ivp(q, X, Y, p, frame=base_frame @ rot)
        worst = max(worst, float(np.max(np.abs(got - ref))))
    return 50, worst


def suite_hodge_agreement(cfg, rng):
    chart = _unit_chart()
    worst = 0.0
    n = 100
    for _ in range(n):
        q = random_metric(chart, rng)
        p = sample_point(chart, rng)
        X, Y = random_vector(rng), random_vector(rng)
        worst = max(
            worst,
            float(np.max(np.abs(ivp(q, X, Y, p) - ivp_hodge(q, X, Y, p)))),
        )
    return n, worst


# ------------------------------------------------------- product rule suites


def suite_leibniz_lc(cfg, rng):
    worst, n = 0.0, 0
    for _ in range(3):
        chart, q, _ = _setup_random(rng, 0)
        for _ in range(17):
            X, Y, Z = (random_vecfield(chart, rng) for _ in range(3))
            yz = ivp_field(q, Y, Z)
            p = sample_point(chart, rng)
            lhs = cov_deriv(q, X.at(p), yz, p)
            rhs = ivp(q, cov_deriv(q, X.at(p), Y, p), Z.at(p), p) + ivp(
                q, Y.at(p), cov_deriv(q, X.at(p), Z, p), p
            )
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
            n += 1
    return n, worst


def _deformed_setup(rng, n_pairs=2):
    out = []
    for _ in range(n_pairs):
        chart = _unit_chart()
        q = random_metric(chart, rng)
        W = _sym_endo(q, rng)
        out.append((chart, q, W))
    return out


def suite_metricity_a(cfg, rng):
    worst, n = 0.0, 0
    for chart, q, W in _deformed_setup(rng):
        for _ in range(2):
            X, Y, Z = (random_vecfield(chart, rng) for _ in range(3))
            lhs_expr = ex.ZERO
            q_inner = inner_expr(q.rows, Y.comps, Z.comps)
            for a, name in enumerate(chart.names):
                lhs_expr = ex.add(lhs_expr, ex.mul(X.comps[a], ex.diff(q_inner, name)))
            for _ in range(9):
                p = sample_point(chart, rng)
                lhs = lhs_expr.eval(p)
                for beta in BETA_SET:
                    dy = ashtekar_deriv(beta, q, W, X, Y, p)
                    dz = ashtekar_deriv(beta, q, W, X, Z, p)
                    rhs = inner(q, dy, Z.at(p), p) + inner(q, Y.at(p), dz, p)
                    worst = max(worst, abs(lhs - rhs))
                    n += 1
    return n, worst


def suite_leibniz_a(cfg, rng):
    worst, n = 0.0, 0
    for chart, q, W in _deformed_setup(rng):
        for _ in range(2):
            X, Y, Z = (random_vecfield(chart, rng) for _ in range(3))
            yz = ivp_field(q, Y, Z)
            for _ in range(9):
                p = sample_point(chart, rng)
                for beta in BETA_SET:
                    lhs = ashtekar_deriv(beta, q, W, X.at(p), yz, p)
                    dy = ashtekar_deriv(beta, q, W, X.at(p), Y, p)
                    dz = ashtekar_deriv(beta, q, W, X.at(p), Z, p)
                    rhs = ivp(q, dy, Z.at(p), p) + ivp(q, Y.at(p), dz, p)
                    worst = max(worst, float(np.max(np.abs(lhs - rhs))))
                    n += 1
    return n, worst


# --------------------------------------------------------- dual-route suites


def suite_torsion_dual(cfg, rng):
    worst, n = 0.0, 0
    for chart, q, W in _deformed_setup(rng):
        X, Y = random_vecfield(chart, rng), random_vecfield(chart, rng)
        for _ in range(17):
            p = sample_point(chart, rng)
            for beta in BETA_SET:
                worst = max(worst, torsion_A(beta, q, W, X, Y, p).residual)
                n += 1
    return n, worst


def suite_curvature_dual(cfg, rng):
    worst, n = 0.0, 0
    chart = _unit_chart()
    q = random_metric(chart, rng)
    W = _sym_endo(q, rng)
    for _ in range(2):
        X, Y, Z = (random_vecfield(chart, rng) for _ in range(3))
        op = CurvatureOp(q, W, X, Y, Z)
        for _ in range(25):
            p = sample_point(chart, rng)
            for beta in (1.0, 1j):
                d = op.definitional(beta, p)
                c = op.closed_form(beta, p)
                worst = max(worst, float(np.max(np.abs(d - c))))
                n += 1
    return n, worst


def suite_curvature_antisym(cfg, rng):
    chart = _unit_chart()
    q = random_metric(chart, rng)
    W = _sym_endo(q, rng)
    X, Y, Z, V = (random_vecfield(chart, rng) for _ in range(4))
    op_xy = CurvatureOp(q, W, X, Y, Z)
    op_yx = CurvatureOp(q, W, Y, X, Z)
    op_v = CurvatureOp(q, W, X, Y, V)
    worst, n = 0.0, 0
    for _ in range(9):
        p = sample_point(chart, rng)
        for beta in (1.0, 1j):
            rxy = op_xy.closed_form(beta, p)
            ryx = op_yx.closed_form(beta, p)
            rv = op_v.closed_form(beta, p)
            worst = max(worst, float(np.max(np.abs(rxy + ryx))))
            pair = inner(q, rxy, V.at(p), p) + inner(q, rv, Z.at(p), p)
            worst = max(worst, abs(pair))
            n += 2
    return n, worst


# ----------------------------------------------------------------- FRW suites


def _frw_models():
    return [(make_frw(kappa, scale), kappa, scale) for kappa, scale in FRW_CASES]


def suite_frw_weingarten(cfg, rng):
    worst, n = 0.0, 0
    tau0 = 0.0
    for m, kappa, scale in _frw_models():
        W = weingarten_endo(m.split)
        h = m.hubble(tau0)
        for _ in range(5):
            p = dict(sample_point(m.chart, rng))
            p["t"] = tau0
            worst = max(worst, float(np.max(np.abs(W.at(p) - h * np.eye(3)))))
            n += 1
    return n, worst


def suite_frw_torsion(cfg, rng):
    worst, n = 0.0, 0
    tau0 = 0.0
    beta = cfg.beta
    for m, kappa, scale in _frw_models():
        q_t = m.induced_metric(tau0)
        W_t = weingarten_endo(m.split).subst_time("t", tau0)
        for _ in range(3):
            p = sample_point(m.chart, rng)
            Xv, Yv = random_vector(rng), random_vector(rng)
            X = VecField.constant(m.chart, Xv)
            Y = VecField.constant(m.chart, Yv)
            res = torsion_A(beta, q_t, W_t, X, Y, p)
            oracle = frw_oracles(m, beta, tau0, Xv, Yv, Yv, p).torsion
            worst = max(worst, res.residual)
            worst = max(worst, float(np.max(np.abs(res.definitional - oracle))))
            n += 1
    return n, worst


def suite_frw_curvature(cfg, rng):
    worst, n = 0.0, 0
    tau0 = 0.0
    beta = cfg.beta
    for m, kappa, scale in _frw_models():
        q_t = m.induced_metric(tau0)
        W_t = weingarten_endo(m.split).subst_time("t", tau0)
        Xv, Yv, Zv = (random_vector(rng) for _ in range(3))
        X, Y, Z = (VecField.constant(m.chart, v) for v in (Xv, Yv, Zv))
        op = CurvatureOp(q_t, W_t, X, Y, Z)
        for _ in range(3):
            p = sample_point(m.chart, rng)
            oracle = frw_oracles(m, beta, tau0, Xv, Yv, Zv, p).curvature
            worst = max(worst, float(np.max(np.abs(op.definitional(beta, p) - oracle))))
            worst = max(worst, float(np.max(np.abs(op.closed_form(beta, p) - oracle))))
            n += 1
    return n, worst


# --------------------------------------------------- local form decomposition


def suite_decomposition(cfg, rng):
    worst, n = 0.0, 0
    beta = cfg.beta
    # the FRW closed model plus a random time-dependent split
    m = make_frw(1, "exp(0.5*t)")
    cases = [
        (m.induced_metric(0.0), weingarten_endo(m.split).subst_time("t", 0.0))
    ]
    chart = _unit_chart()
    q_r = random_metric(chart, rng, extra_names=("t",))
    from .geometry import SpacetimeSplit, induce_slice_metric

    split = SpacetimeSplit("t", (-1.0, 1.0), chart, ex.ONE, q_r.rows)
    q_t = induce_slice_metric(split, 0.25)
    w_t = weingarten_endo(split).subst_time("t", 0.25)
    cases.append((q_t, w_t))
    for q, W in cases:
        e = orthonormal_frame_field(q)
        for _ in range(4):
            p = sample_point(q.chart, rng)
            form = local_form(beta, q, W, e, p)
            phys = physics_components(beta, q, W, e, p)
            for a in range(3):
                assembled = so3_from_components(phys.a[a])
                worst = max(
                    worst, float(np.max(np.abs(assembled - form.matrices[a])))
                )
                n += 1
    return n, worst


# ------------------------------------------------------------- reconstruction


def suite_roundtrip_frame(cfg, rng):
    worst, n = 0.0, 0
    chart = _unit_chart()
    for _ in range(5):
        q = random_metric(chart, rng)
        e = orthonormal_frame_field(q)
        E = densitize(e)
        back = reconstruct_frame(E)
        for _ in range(10):
            p = sample_point(chart, rng)
            a = mat_eval(e.cols, p)
            b = mat_eval(back.cols, p)
            worst = max(worst, float(np.max(np.abs(a - b))))
            n += 1
    return n, worst


def suite_roundtrip_w(cfg, rng):
    worst, n = 0.0, 0
    for chart, q, W in _deformed_setup(rng):
        for beta in BETA_SET:
            for _ in range(4):
                p = sample_point(chart, rng)

                def torsion_map(Xv, Yv, p=p, beta=beta):
                    wx = W.at(p) @ np.asarray(Xv)
                    wy = W.at(p) @ np.asarray(Yv)
                    return beta * (
                        ivp(q, wx, np.asarray(Yv), p) - ivp(q, wy, np.asarray(Xv), p)
                    )

                got = reconstruct_W(beta, q, torsion_map, p)
                worst = max(worst, float(np.max(np.abs(got - W.at(p)))))
                n += 1
    return n, worst


def suite_pipeline(cfg, rng):
    """(E, deformed derivative) -> (q, K) on homogeneous models."""
    worst, n = 0.0, 0
    beta = cfg.beta
    tau0 = 0.0
    for kappa in (0, 1):
        m = make_frw(kappa, "exp(0.5*t)")
        q_t = m.induced_metric(tau0)
        W_t = weingarten_endo(m.split).subst_time("t", tau0)
        e = orthonormal_frame_field(q_t)
        E = densitize(e)
        back = reconstruct_frame(E)
        q_back = metric_from_frame(back)
        h = m.hubble(tau0)
        for _ in range(4):
            p = sample_point(m.chart, rng)
            # metric leg
            qa = q_t.mat(p)
            qb = q_back.mat(p)
            worst = max(worst, float(np.max(np.abs(qa - qb))))
            # extrinsic leg: torsion of the deformed derivative -> W -> K
            def torsion_map(Xv, Yv, p=p):
                X = VecField.constant(m.chart, np.asarray(Xv, dtype=float))
                Y = VecField.constant(m.chart, np.asarray(Yv, dtype=float))
                return (
                    ashtekar_deriv(beta, q_t, W_t, Xv, Y, p)
                    - ashtekar_deriv(beta, q_t, W_t, Yv, X, p)
                )

            w_got = reconstruct_W(beta, q_t, torsion_map, p)
            K_got = qa @ w_got
            K_want = h * qa
            worst = max(worst, float(np.max(np.abs(K_got - K_want))))
            n += 2
    return n, worst


# ------------------------------------------------------------------ spin suites


def suite_spin_cover(cfg, rng):
    worst, n = 0.0, 0
    for _ in range(10):
        c = np.array([rng.uniform(-2, 2) for _ in range(3)])
        xi = su2_from_components(c)
        for t in (0.4, 1.0):
            U = expm(t * xi)
            got = covering_map(U)
            want = expm(t * lambda_star(xi))
            worst = max(worst, float(np.max(np.abs(got - want))))
            worst = max(worst, float(np.max(np.abs(covering_map(-U) - got))))
            n += 2
    return n, worst


def _random_loop(chart: Chart, rng, steps=240) -> PathSpec:
    s = Var("s")
    comps = []
    for a in range(3):
        lo, hi = chart.box[a]
        mid = 0.5 * (lo + hi)
        amp = 0.35 * (hi - lo) * rng.uniform(0.3, 1.0)
        phase = rng.uniform(0.0, 6.28)
        wav = ex.sin(
            ex.add(ex.mul(ex.Const(2.0 * np.pi), s), ex.Const(phase))
        )
        comps.append(ex.add(ex.Const(mid), ex.mul(ex.Const(amp), wav)))
    return PathSpec(chart, comps, steps)


def suite_holonomy_cover(cfg, rng):
    m = cfg.frw if cfg.frw is not None else make_frw(1, "exp(0.5*t)")
    tau0 = cfg.tau0 if cfg.tau0 is not None else 0.0
    q_t = m.induced_metric(tau0)
    W_t = weingarten_endo(m.split).subst_time("t", tau0)
    e = orthonormal_frame_field(q_t)
    form = ashtekar_form_field(cfg.beta, q_t, W_t, e)
    worst, n = 0.0, 0
    for _ in range(10):
        path = _random_loop(q_t.chart, rng)
        R = holonomy(form, path, "SO3")
        U = holonomy(form, path, "SU2")
        lam = adjoint_map(U) if form.is_complex() else covering_map(U)
        worst = max(worst, float(np.max(np.abs(lam - R))))
        n += 1
    return n, worst


def suite_const_curvature(cfg, rng):
    worst, n = 0.0, 0
    for kappa in (-1, 1):
        q = reference_metric(kappa)
        for _ in range(10):
            p = sample_point(q.chart, rng)
            X, Y, Z = (random_vector(rng) for _ in range(3))
            got = riemann(q, X, Y, Z, p)
            want = kappa * (inner(q, Z, Y, p) * X - inner(q, Z, X, p) * Y)
            worst = max(worst, float(np.max(np.abs(got - want))))
            n += 1
    return n, worst


# ---------------------------------------------------------------- the registry


@dataclass(frozen=True)
class _Entry:
    fn: Callable
    tolerance: float
    offset: int


REGISTRY: dict[str, _Entry] = {
    "antisymmetry": _Entry(suite_antisymmetry, 1e-9, 11),
    "cyclic": _Entry(suite_cyclic, 1e-9, 12),
    "triple_product": _Entry(suite_triple_product, 1e-9, 13),
    "jacobi": _Entry(suite_jacobi, 1e-9, 14),
    "frame_independence": _Entry(suite_frame_independence, 1e-10, 15),
    "hodge_agreement": _Entry(suite_hodge_agreement, 1e-10, 16),
    "leibniz_lc": _Entry(suite_leibniz_lc, 1e-8, 21),
    "metricity_a": _Entry(suite_metricity_a, 1e-9, 31),
    "leibniz_a": _Entry(suite_leibniz_a, 1e-9, 32),
    "torsion_dual": _Entry(suite_torsion_dual, 1e-8, 41),
    "curvature_dual": _Entry(suite_curvature_dual, 1e-8, 42),
    "curvature_antisym": _Entry(suite_curvature_antisym, 1e-8, 43),
    "frw_weingarten": _Entry(suite_frw_weingarten, 1e-9, 51),
    "frw_torsion": _Entry(suite_frw_torsion, 1e-9, 52),
    "frw_curvature": _Entry(suite_frw_curvature, 1e-8, 53),
    "decomposition": _Entry(suite_decomposition, 1e-9, 61),
    "roundtrip_frame": _Entry(suite_roundtrip_frame, 1e-12, 71),
    "roundtrip_w": _Entry(suite_roundtrip_w, 1e-9, 72),
    "pipeline": _Entry(suite_pipeline, 1e-8, 73),
    "spin_cover": _Entry(suite_spin_cover, 1e-8, 81),
    "holonomy_cover": _Entry(suite_holonomy_cover, 1e-6, 82),
    "const_curvature": _Entry(suite_const_curvature, 1e-8, 91),
}


def suite_names() -> tuple[str, ...]:
    return tuple(REGISTRY)


def resolve_selection(requested) -> tuple[str, ...]:
    if not requested:
        return suite_names()
    unknown = [s for s in requested if s not in REGISTRY]
    if unknown:
        raise ConfigError(
            f"suites: unknown {unknown}; available: {', '.join(REGISTRY)}"
        )
    # run in registry order regardless of request order
    wanted = set(requested)
    return tuple(s for s in REGISTRY if s in wanted)


def run_suite(name: str, cfg: RunConfig) -> SuiteResult:
    entry = REGISTRY[name]
    tol = cfg.tolerances.get(name, entry.tolerance)
    rng = SplitMix64((cfg.seed << 16) ^ entry.offset)
    n, err = entry.fn(cfg, rng)
    return SuiteResult(name, n, float(err), tol, bool(err < tol))


def run_suites(cfg: RunConfig, requested=None) -> list[SuiteResult]:
    names = resolve_selection(requested if requested is not None else cfg.suites)
    return [run_suite(name, cfg) for name in names]
