"""Metric vector product on an oriented 3-dimensional slice.

The product transports the Euclidean cross product through any oriented
q-orthonormal frame e:

    cross(X, Y) = e [ e^-1 X x e^-1 Y ]

The result does not depend on which such frame is used, only on the metric;
`ivp` uses the deterministic Gram-Schmidt frame unless an explicit one is
passed.  `ivp_hodge` is an independent route through the volume form,

    cross(X, Y)^c = sqrt(det Q) Q^cd eps_dab X^a Y^b,   eps_123 = +1,

kept free of any frame machinery so the two implementations can check each
other.  Components may be complex; the product is extended bilinearly.
"""

from __future__ import annotations

import numpy as np

from . import expr as ex
from .errors import ComputationError
from .expr import Binding
from .geometry import (
    SliceMetric,
    gram_schmidt,
    metric_det_expr,
    metric_inverse_exprs,
)
from .levi_civita import VecField, vec_at

_EPS = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _EPS[_i, _j, _k] = 1.0
    _EPS[_i, _k, _j] = -1.0


def ivp(q: SliceMetric, X, Y, p: Binding, frame=None) -> np.ndarray:
    """cross(X, Y) at p through an oriented q-orthonormal frame.

    frame: optional 3x3 matrix whose columns are q-orthonormal with positive
    determinant; defaults to the Gram-Schmidt frame of q at p.
    """
    Qm = q.mat(p)
    if frame is None:
        e = gram_schmidt(Qm)
    else:
        e = np.asarray(frame, dtype=float)
        if np.max(np.abs(e.T @ Qm @ e - np.eye(3))) > 1e-8:
            raise ComputationError("supplied frame is not q-orthonormal")
        if np.linalg.det(e) <= 0.0:
            raise ComputationError("supplied frame is not positively oriented")
    a = np.linalg.solve(e, vec_at(X, p))
    b = np.linalg.solve(e, vec_at(Y, p))
    return e @ np.cross(a, b)


def ivp_hodge(q: SliceMetric, X, Y, p: Binding) -> np.ndarray:
    """Same product via sqrt(det Q) Q^cd eps_dab X^a Y^b; no frames involved."""
    Qm = q.mat(p)
    det = np.linalg.det(Qm)
    if det <= 0.0:
        raise ComputationError(f"metric determinant not positive at {dict(p)}")
    lower = np.einsum("dab,a,b->d", _EPS, vec_at(X, p), vec_at(Y, p))
    return np.sqrt(det) * np.linalg.solve(Qm, lower)


def ivp_field(q: SliceMetric, X: VecField, Y: VecField) -> VecField:
    """cross(X, Y) with Expr components (the volume-form route, symbolically)."""
    ginv = metric_inverse_exprs(q)
    root = ex.sqrt(metric_det_expr(q))
    comps = []
    for c in range(3):
        total = ex.ZERO
        for d in range(3):
            for a in range(3):
                for b in range(3):
                    s = _EPS[d, a, b]
                    if s == 0.0:
                        continue
                    term = ex.mul(ginv[c][d], ex.mul(X.comps[a], Y.comps[b]))
                    if s < 0:
                        total = ex.sub(total, term)
                    else:
                        total = ex.add(total, term)
        comps.append(ex.mul(root, total))
    return VecField(q.chart, comps)


def inner(q: SliceMetric, u, v, p: Binding):
    """Bilinear metric pairing of two (possibly complex) vectors at p."""
    return np.asarray(u) @ q.mat(p) @ np.asarray(v)
