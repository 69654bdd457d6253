"""Integration against the weighted volume measure on S^{2n+1}.

Two independent routes are provided.  The deterministic route uses the
identity dmu_{g_w} = D^{-(n+1)} dmu_round together with the simplex
reduction: for torus-invariant F,

    int_S F(r) dmu_round = 2 pi^{n+1} int_{T_n} F(r) dr_1 ... dr_n,

with T_n = {r_i >= 0, sum r_i <= 1} and r_0 = 1 - sum r_i.  (The radii of a
uniformly random sphere point are uniform on the simplex; the round volume
2 pi^{n+1}/n! times the n! of the corner-simplex volume gives the constant.)
The Monte Carlo route averages f * D^{-(n+1)} over uniform sphere samples
and never feeds the deterministic one.  A truncated-orthant rule handles
the rational chart integrands of the Futaki module.
"""

from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .core import as_weight, random_sphere_points


class QuadratureError(RuntimeError):
    """Non-finite values or undetected decay in a quadrature rule."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Method and resolution of an integration request.

    `order` is nodes per axis for the deterministic methods and the sample
    count for sphere-mc.
    """

    method: str = "simplex-gauss"
    order: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("simplex-gauss", "sphere-mc"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.method == "simplex-gauss" and self.order < 2:
            raise ValueError("simplex-gauss needs order >= 2")
        if self.method == "sphere-mc" and self.order < 1000:
            raise ValueError("sphere-mc needs at least 1000 samples")


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float


@dataclass(frozen=True)
class VolumeReport:
    closed: float
    numeric: float


def gauss_nodes_01(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def simplex_nodes(n: int, order: int):
    """Tensorized Gauss-Legendre nodes/weights on the corner simplex T_n.

    Returns (nodes, weights) with nodes of shape (P, n+1) giving the full
    radius vector (r_0, ..., r_n), r_0 = 1 - sum of the rest.
    """
    t, wt = gauss_nodes_01(order)
    if n == 1:
        r1 = t
        wts = wt
        r = np.stack([1.0 - r1, r1], axis=1)
        return r, wts
    if n == 2:
        t1, t2 = np.meshgrid(t, t, indexing="ij")
        w1, w2 = np.meshgrid(wt, wt, indexing="ij")
        r1 = t1.ravel()
        r2 = (t2 * (1.0 - t1)).ravel()
        wts = (w1 * w2 * (1.0 - t1)).ravel()
        r = np.stack([1.0 - r1 - r2, r1, r2], axis=1)
        return r, wts
    # iterated Duffy-type substitution for general n
    grids = np.meshgrid(*([t] * n), indexing="ij")
    wgrids = np.meshgrid(*([wt] * n), indexing="ij")
    shape = grids[0].shape
    rs = []
    rem = np.ones(shape)
    wts = np.ones(shape)
    for k in range(n):
        rk = grids[k] * rem
        wts = wts * wgrids[k] * rem
        rem = rem - rk
        rs.append(rk.ravel())
    wts = wts.ravel()
    r0 = 1.0 - sum(rs)
    r = np.stack([r0] + rs, axis=1)
    return r, wts


def integrate_invariant(w, f, spec: QuadratureSpec | None = None) -> float:
    """Integral of a torus-invariant function against dmu_{g_w}.

    Parameters
    ----------
    f : callable
        Function of the radius vector r (length n+1, positive, summing
        to 1) returning a float.
    spec : QuadratureSpec, optional
        Must be a simplex-gauss spec; defaults to order 64.

    Returns
    -------
    float
        The integral; non-finite when the integrand is singular on the
        simplex (reported rather than raised, so callers can flag it).
    """
    w = as_weight(w)
    spec = spec or QuadratureSpec()
    if spec.method != "simplex-gauss":
        raise ValueError("integrate_invariant is the deterministic route; use simplex-gauss")
    n = w.n
    r, wts = simplex_nodes(n, spec.order)
    dens = (r @ w.entries) ** -(n + 1)
    vals = np.array([f(rr) for rr in r], dtype=float)
    return float(2.0 * np.pi ** (n + 1) * np.sum(wts * vals * dens))


def integrate_mc(w, f, spec: QuadratureSpec) -> McEstimate:
    """Monte Carlo integral of f (a function of SpherePoint radii) over dmu_{g_w}.

    Samples uniform sphere points, averages f * Vol_round * D^{-(n+1)}.
    Deterministic for a fixed (seed, order); accumulation uses numpy's
    fixed-order pairwise summation, so results are bit-reproducible.
    """
    from .core import SpherePoint

    w = as_weight(w)
    if spec.method != "sphere-mc":
        raise ValueError("integrate_mc requires a sphere-mc spec")
    n = w.n
    pts = random_sphere_points(n, spec.order, spec.seed)
    m = n + 1
    r = pts[:, :m] ** 2 + pts[:, m:] ** 2
    dens = (r @ w.entries) ** -(n + 1)
    vol_round = 2.0 * np.pi ** (n + 1) / math.factorial(n)
    vals = np.fromiter(
        (f(SpherePoint(p[:m], p[m:])) for p in pts), dtype=float, count=len(pts)
    )
    samples = vals * dens * vol_round
    mean = float(np.sum(samples) / len(samples))
    var = float(np.sum((samples - mean) ** 2) / (len(samples) - 1))
    stderr = float(np.sqrt(var / len(samples)))
    return McEstimate(value=mean, stderr=stderr)


def volume(w, order: int = 64) -> VolumeReport:
    """Closed-form and quadrature volume of (S^{2n+1}, g_w).

    The closed form is 2 pi^{n+1} / (n! prod w_j).
    """
    w = as_weight(w)
    n = w.n
    closed = 2.0 * np.pi ** (n + 1) / (math.factorial(n) * float(np.prod(w.entries)))
    numeric = integrate_invariant(w, lambda r: 1.0, QuadratureSpec(order=order))
    return VolumeReport(closed=closed, numeric=numeric)


def integrate_orthant(n: int, integrand, order: int = 64) -> float:
    """Integral over the positive orthant R_+^n by rational compactification.

    Each axis is mapped by x = u / (1 - u), u in (0, 1), and tensorized
    Gauss-Legendre applied.  The integrand must decay fast enough for the
    transformed values to stay finite (the rational chart integrands decay
    like |x|^{-(n+2)} or faster); slow decay is reported.
    """
    u, wu = gauss_nodes_01(order)
    x_axis = u / (1.0 - u)
    jac_axis = 1.0 / (1.0 - u) ** 2
    if n == 1:
        X = x_axis[:, None]
        J = wu * jac_axis
    else:
        grids = np.meshgrid(*([x_axis] * n), indexing="ij")
        X = np.stack([g.ravel() for g in grids], axis=1)
        jw = np.meshgrid(*([wu * jac_axis] * n), indexing="ij")
        J = np.ones(X.shape[0])
        for g in jw:
            J = J * g.ravel()
    vals = np.array([integrand(x) for x in X], dtype=float)
    contrib = vals * J
    if not np.all(np.isfinite(contrib)):
        raise QuadratureError("non-finite transformed values: integrand decays too slowly")
    return float(np.sum(contrib))
