"""Finite-difference curvature oracle and closed-form scalar curvature.

The oracle differentiates a chart-local metric field twice: Christoffel
symbols by central differences of the metric, the Riemann tensor by central
differences of the Christoffels, Ricci by contraction, and the scalar by the
inverse-metric trace.  Everything is second order in the step h.  Curvature
is always computed in the graph chart of the evaluation point, so all
reported quantities are either scalars or chart-local tensors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ChartCoords,
    ChartDomainError,
    SpherePoint,
    as_weight,
    chart_jacobians,
    chart_points_to_ambient,
    graph_chart,
)
from .structures import frame_arrays, metric_arrays

DEFAULT_STEP = 1e-3


class SingularMetricError(RuntimeError):
    """Metric matrix numerically singular inside an FD stencil."""


@dataclass(frozen=True)
class CurvatureData:
    """FD curvature output at one point, in graph-chart coordinates."""

    ric: np.ndarray
    s: float
    chart: ChartCoords
    h: float


@dataclass(frozen=True)
class ScalarReport:
    """Closed-form scalar curvature data of the weighted structure."""

    s_transverse: float
    s: float
    s0: float
    s_minus_s0: float


def _offsets(mch: int, h: float) -> np.ndarray:
    """Stencil offsets: index 0 is the center, 1+2i / 2+2i are +/- h e_i."""
    off = np.zeros((2 * mch + 1, mch))
    for i in range(mch):
        off[1 + 2 * i, i] = h
        off[2 + 2 * i, i] = -h
    return off


def _christoffel_batch(G: np.ndarray, h: float) -> np.ndarray:
    """Christoffels from metric values on the one-level stencil.

    G has shape (B, 2m+1, m, m): metric at center and +/- h along each axis.
    Returns (B, m, m, m) with Gamma[b, k, i, j] = Gamma^k_ij at the center.
    """
    B, _, m, _ = G.shape
    dg = (G[:, 1::2] - G[:, 2::2]) / (2.0 * h)  # (B, m, m, m): d_l g_ij
    g0 = G[:, 0]
    try:
        ginv = np.linalg.inv(g0)
    except np.linalg.LinAlgError as exc:
        raise SingularMetricError("singular metric matrix in FD stencil") from exc
    # cheap 1-norm condition estimate; the real guard is against degeneracy
    cond = np.abs(g0).max(axis=(1, 2)) * np.abs(ginv).max(axis=(1, 2))
    if np.any(~np.isfinite(cond)) or np.any(cond > 1e12):
        raise SingularMetricError("metric condition number exceeds 1e12 in stencil")
    term = (
        np.transpose(dg, (0, 2, 3, 1))
        + np.transpose(dg, (0, 3, 2, 1))
        - np.transpose(dg, (0, 1, 2, 3))
    )
    # term[b, i, j, l] = d_i g_jl + d_j g_il - d_l g_ij
    return 0.5 * np.einsum("bkl,bijl->bkij", ginv, term)


def scalar_fd_batch(metric_field, U0: np.ndarray, h: float, full: bool = False):
    """Batched FD curvature at chart points U0 (B, m) for one shared chart.

    `metric_field` maps (P, m) chart points to (P, m, m) metric matrices.
    Returns scalar curvatures (B,), or (ric, s, g0) when `full` is set.
    """
    U0 = np.atleast_2d(U0)
    B, m = U0.shape
    off = _offsets(m, h)
    no = off.shape[0]
    # two-level stencil: Gamma locations x metric offsets
    U = U0[:, None, None, :] + off[None, :, None, :] + off[None, None, :, :]
    radius2 = np.einsum("...i,...i->...", U, U)
    if np.any(radius2 >= 1.0 - 1e-9):
        raise ChartDomainError("FD stencil leaves the chart ball")
    G = metric_field(U.reshape(B * no * no, m)).reshape(B, no, no, m, m)
    Gam = _christoffel_batch(G.reshape(B * no, no, m, m), h).reshape(B, no, m, m, m)
    dGam = (Gam[:, 1::2] - Gam[:, 2::2]) / (2.0 * h)  # (B, m, m, m, m): d_mu Gamma
    Gam0 = Gam[:, 0]
    # Ric_sn = d_mu G^mu_ns - d_n G^mu_mus + G^mu_mul G^l_ns - G^mu_nl G^l_mus
    ric = (
        np.einsum("bmmns->bsn", dGam)
        - np.einsum("bnmms->bsn", dGam)
        + np.einsum("bmml,blns->bsn", Gam0, Gam0)
        - np.einsum("bmnl,blms->bsn", Gam0, Gam0)
    )
    g0 = G[:, 0, 0]
    s = np.einsum("bsn,bsn->b", np.linalg.inv(g0), ric)
    if full:
        return ric, s, g0
    return s


def chart_metric_field(ambient_metric, index: int, sign: float):
    """Pull an ambient metric function back to one graph chart.

    `ambient_metric` maps (P, 2n+2) ambient points to (P, 2n+2, 2n+2)
    tangent-restricted metric matrices.
    """

    def field(U: np.ndarray) -> np.ndarray:
        pts = chart_points_to_ambient(index, sign, U)
        J = chart_jacobians(index, sign, U)
        return np.einsum("bai,bab,bbj->bij", J, ambient_metric(pts), J)

    return field


def weighted_metric_field(w, a: float = 1.0):
    """Ambient metric function of the (homothety-scaled) weighted structure."""
    w = as_weight(w)

    def ambient_metric(pts: np.ndarray) -> np.ndarray:
        return metric_arrays(w, pts, a)

    ambient_metric.ambient_field = True
    return ambient_metric


def curvature_fd(metric_field, at: SpherePoint, h: float = DEFAULT_STEP,
                 richardson: bool = False) -> CurvatureData:
    """FD Ricci and scalar curvature at one point.

    Parameters
    ----------
    metric_field : callable
        Either an ambient metric function (P, 2n+2) -> (P, 2n+2, 2n+2), or a
        chart-local function produced by :func:`chart_metric_field`; ambient
        functions are pulled back to the graph chart of `at` automatically.
    at : SpherePoint
        Evaluation point; curvature is computed in its graph chart.
    h : float
        Central-difference step, 1e-5 <= h <= 1e-2.
    richardson : bool
        If set, combine steps h and h/2 to cancel the O(h^2) term.
    """
    if not (1e-5 <= h <= 1e-2):
        raise ValueError("FD step h must lie in [1e-5, 1e-2]")
    chart = graph_chart(at)
    mch = chart.u.size

    if _is_ambient_field(metric_field, at):
        field = chart_metric_field(metric_field, chart.index, chart.sign)
    else:
        field = _vectorize_field(metric_field, mch)
    ric, s, g0 = scalar_fd_batch(field, chart.u[None, :], h, full=True)
    ric, s = ric[0], float(s[0])
    if richardson:
        ric2, s2, _ = scalar_fd_batch(field, chart.u[None, :], h / 2.0, full=True)
        ric = (4.0 * ric2[0] - ric) / 3.0
        s = (4.0 * float(s2[0]) - s) / 3.0
    return CurvatureData(ric=ric, s=s, chart=chart, h=h)


def _is_ambient_field(f, at: SpherePoint) -> bool:
    if getattr(f, "ambient_field", False):
        return True
    m = at.ambient.size
    try:
        out = f(at.ambient[None, :])
    except Exception:
        return False
    return isinstance(out, np.ndarray) and out.shape == (1, m, m)


def _vectorize_field(f, mch: int):
    """Accept either batched (B,m)->(B,m,m) or per-point (m,)->(m,m) fields."""
    try:
        out = f(np.zeros((1, mch)))
        if isinstance(out, np.ndarray) and out.shape == (1, mch, mch):
            return f
    except Exception:
        pass

    def batched(U: np.ndarray) -> np.ndarray:
        return np.stack([np.asarray(f(u)) for u in np.atleast_2d(U)])

    return batched


def scalar_closed(w, p: SpherePoint) -> ScalarReport:
    """Closed-form transverse scalar curvature of the weighted structure.

    s^T = 4(n+1) sum_j w_j (2 W - (n+2) w_j) r_j / D with W = sum w_k and
    D = sum w_k r_k; s = s^T - 2n; s0 = 2n(2W - 1) is the volume mean of s;
    and s - s0 = 4(n+2) sum_j w_j (W - (n+1) w_j) r_j / D.
    """
    w = as_weight(w)
    n = w.n
    r = p.radii
    e = w.entries
    W = w.total
    D = float(e @ r)
    sT = 4.0 * (n + 1) * float(np.sum(e * (2.0 * W - (n + 2) * e) * r)) / D
    s0 = 2.0 * n * (2.0 * W - 1.0)
    sms0 = 4.0 * (n + 2) * float(np.sum(e * (W - (n + 1) * e) * r)) / D
    return ScalarReport(s_transverse=sT, s=sT - 2.0 * n, s0=s0, s_minus_s0=sms0)


def scalar_closed_batch(w, pts: np.ndarray) -> np.ndarray:
    """s^T at a batch of ambient points (closed form)."""
    w = as_weight(w)
    pts = np.atleast_2d(pts)
    m = w.n + 1
    r = pts[:, :m] ** 2 + pts[:, m:] ** 2
    e = w.entries
    W = w.total
    D = r @ e
    return 4.0 * (w.n + 1) * (r @ (e * (2.0 * W - (w.n + 2) * e))) / D


def mean_scalar(w) -> float:
    """Volume mean of the scalar curvature: 2n(2 sum(w) - 1)."""
    w = as_weight(w)
    return 2.0 * w.n * (2.0 * w.total - 1.0)


@dataclass(frozen=True)
class EinsteinResiduals:
    einstein_res: float
    lam: float
    nu: float
    eta_einstein_res: float


def einstein_residuals(w, a: float, p: SpherePoint, h: float = DEFAULT_STEP) -> EinsteinResiduals:
    """Einstein and eta-Einstein residuals of the homothety-scaled frame.

    einstein_res is ||Ric - 2n g||_inf in the chart.  The eta-Einstein pair
    (lambda, nu) is fitted by least squares under the constraint
    lambda + nu = 2n, which is forced by Ric(xi, xi) = 2n; the remaining
    infinity-norm residual is reported.
    """
    w = as_weight(w)
    n = w.n
    data = curvature_fd(weighted_metric_field(w, a), p, h)
    chart = data.chart
    J = chart_jacobians(chart.index, chart.sign, chart.u[None, :])[0]
    fr = frame_arrays(w, p.ambient[None, :], a)
    g_ch = J.T @ fr["g"][0] @ J
    eta_ch = fr["eta"][0] @ J
    ee = np.outer(eta_ch, eta_ch)
    einstein_res = float(np.abs(data.ric - 2.0 * n * g_ch).max())
    # Ric - 2n eta x eta = lambda (g - eta x eta), least squares for lambda
    lhs = data.ric - 2.0 * n * ee
    basis = g_ch - ee
    lam = float(np.sum(lhs * basis) / np.sum(basis * basis))
    nu = 2.0 * n - lam
    res = float(np.abs(data.ric - lam * g_ch - nu * ee).max())
    return EinsteinResiduals(einstein_res=einstein_res, lam=lam, nu=nu, eta_einstein_res=res)
