"""The scalar-curvature obstruction character of a weighted polarization.

For a torus direction X_b = sum b_j H_j with holomorphy potential
f_b = eta_w(X_b) = (sum b_j r_j) / D, the character evaluates by three
independent routes:

 * closed:   -16 pi^{n+1}/(n+1)! (sum_i (b_i/w_i) A_i
              + 1/2 sum_{i != j} (b_i/w_i) A_j) / prod w_j,
              with A_j = W - (n+1) w_j;
 * chart:    -8 (n+2) pi^{n+1} int_{R^n_+} (b_0 + sum b_j x_j)
              (w_0 A_0 + sum w_j A_j x_j) / (w_0 + sum w_j x_j)^{n+3} dx;
 * sphere:   -int f_b (s - s0) dmu_{g_w} over the sphere.

The character vanishes identically exactly when all A_j coincide (all
zero), i.e. when the weights are proportional to (1, ..., 1): only those
polarizations carry constant-scalar-curvature representatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Weight, as_weight
from .curvature import scalar_closed_batch, mean_scalar
from .quadrature import QuadratureSpec, integrate_invariant, integrate_orthant


@dataclass(frozen=True)
class FutakiInput:
    """Coefficients of the torus direction X_b = sum b_j H_j."""

    b: np.ndarray

    def __init__(self, b):
        b = np.asarray(b, dtype=float)
        if not np.all(np.isfinite(b)):
            raise ValueError("direction coefficients must be finite")
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class ClassifyReport:
    A: np.ndarray
    csc: bool
    einstein: bool
    futaki_norm: float


def as_direction(b) -> np.ndarray:
    return b.b if isinstance(b, FutakiInput) else np.asarray(b, dtype=float)


def coefficients_a(w: Weight) -> np.ndarray:
    """A_j = W - (n+1) w_j; sums to zero identically."""
    w = as_weight(w)
    return w.total - (w.n + 1) * w.entries


def futaki_closed(w, b) -> float:
    """Closed-form value of the character on the direction b."""
    w = as_weight(w)
    b = as_direction(b)
    if b.size != w.n + 1:
        raise ValueError("direction length must be n+1")
    n = w.n
    A = coefficients_a(w)
    bw = b / w.entries
    diag = float(bw @ A)
    cross = float(np.sum(bw) * np.sum(A) - bw @ A)  # sum over i != j
    pref = -16.0 * np.pi ** (n + 1) / math.factorial(n + 1)
    return pref * (diag + 0.5 * cross) / float(np.prod(w.entries))


def futaki_chart(w, b, order: int = 64) -> float:
    """Chart-integral route: truncated-orthant quadrature of the rational integrand."""
    w = as_weight(w)
    b = as_direction(b)
    n = w.n
    A = coefficients_a(w)
    e = w.entries

    def integrand(x):
        num1 = b[0] + float(b[1:] @ x)
        num2 = e[0] * A[0] + float((e[1:] * A[1:]) @ x)
        den = e[0] + float(e[1:] @ x)
        return num1 * num2 / den ** (n + 3)

    return -8.0 * (n + 2) * np.pi ** (n + 1) * integrate_orthant(n, integrand, order)


def futaki_sphere(w, b, spec: QuadratureSpec | None = None) -> float:
    """Sphere-integral route: -int f_b (s - s0) dmu with f_b = eta_w(X_b)."""
    w = as_weight(w)
    b = as_direction(b)
    n = w.n
    e = w.entries
    W = w.total
    A = coefficients_a(w)

    def integrand(r):
        D = float(e @ r)
        f_b = float(b @ r) / D
        s_minus_s0 = 4.0 * (n + 2) * float((e * A) @ r) / D
        return -f_b * s_minus_s0

    return integrate_invariant(w, integrand, spec or QuadratureSpec())


def futaki_numeric(w, b, method: str = "chart", spec: QuadratureSpec | None = None) -> float:
    """Numerical character value by the requested route ('chart' or 'sphere')."""
    spec = spec or QuadratureSpec()
    if method == "chart":
        return futaki_chart(w, b, spec.order)
    if method == "sphere":
        return futaki_sphere(w, b, spec)
    raise ValueError(f"unknown method {method!r}; expected 'chart' or 'sphere'")


def futaki_norm(w) -> float:
    """max_j |F(e_j)| over the standard basis directions (closed form)."""
    w = as_weight(w)
    vals = [abs(futaki_closed(w, np.eye(w.n + 1)[j])) for j in range(w.n + 1)]
    return float(max(vals))


def classify(w, a: float = 1.0) -> ClassifyReport:
    """Classify the cone point (w, a): CSC iff all A_j vanish; Einstein at the
    standard structure only.

    CSC uses the scale-invariant tolerance max |A_j| < 1e-10 W.  Einstein
    requires CSC plus lambda = 2n for the homothety-scaled structure: after
    normalizing w by its first entry and folding the scale into a, this
    means a equals the common weight value.
    """
    w = as_weight(w)
    if a <= 0:
        raise ValueError("homothety parameter a must be positive")
    A = coefficients_a(w)
    tol = 1e-10 * w.total
    csc = bool(np.abs(A).max() < tol)
    einstein = False
    if csc:
        # w = l (1,..,1); the scaled structure has lambda = (lambda_w + 2)/a - 2
        # with lambda_w = 2(n+1) l - 2, so lambda = 2n exactly at a = l.
        l = float(w.entries[0])
        einstein = abs(a - l) < 1e-10 * max(1.0, l)
    return ClassifyReport(A=A, csc=csc, einstein=einstein, futaki_norm=futaki_norm(w))
