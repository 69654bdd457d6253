"""Core geometric types: sphere points, tangent vectors, graph charts.

The sphere S^{2n+1} sits in R^{2n+2} identified with C^{n+1} through
z_k = x_k + i y_k.  Ambient vectors are ordered (x_0..x_n, y_0..y_n).
All differential-geometric tensors elsewhere in the package are ambient
(2n+2)-dimensional objects restricted to the tangent space; chart
coordinates appear only transiently inside finite-difference kernels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

UNIT_TOL = 1e-12


class ChartDomainError(ValueError):
    """Chart coordinates outside the valid graph-chart domain."""


@dataclass(frozen=True)
class ConventionLedger:
    """Normalization constants fixed once by the round-sphere calibration.

    ``kappa`` multiplies the exterior derivative of the contact form in the
    metric reconstruction g = kappa * d_eta o (1 x Phi) + eta x eta.  With the
    full exterior-derivative convention d(alpha)(X,Y) = X alpha(Y) - Y alpha(X)
    - alpha([X,Y]) and the complex structure J(u,v) = (-v,u), the unweighted
    metric equals the Euclidean restriction exactly when kappa = -1/2
    (calibration residual ~1e-16, pinned by the test suite).  ``dc_sign``
    orients the d^c operator used by transverse deformations; it is fixed by
    the volume-form expansion identity.
    """

    kappa: float = -0.5
    d_convention: str = "full"
    j_orientation: int = 1
    dc_sign: float = 1.0


LEDGER = ConventionLedger()
KAPPA = LEDGER.kappa


@dataclass(frozen=True)
class Weight:
    """Positive weight vector selecting a Reeb field in the torus algebra."""

    entries: np.ndarray
    n: int

    def __init__(self, entries):
        entries = np.asarray(entries, dtype=float)
        if entries.ndim != 1 or entries.size < 2:
            raise ValueError("weight vector needs at least 2 entries")
        if not np.all(np.isfinite(entries)):
            raise ValueError("weight entries must be finite")
        if np.any(entries <= 0):
            raise ValueError(f"weight entries must be positive, got {entries}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "n", entries.size - 1)

    @property
    def total(self) -> float:
        return float(self.entries.sum())

    @property
    def full(self) -> np.ndarray:
        """Entries repeated over the (x, y) blocks, length 2n+2."""
        return np.concatenate([self.entries, self.entries])

    def __iter__(self):
        return iter(self.entries)


def as_weight(w) -> Weight:
    return w if isinstance(w, Weight) else Weight(w)


@dataclass(frozen=True)
class SpherePoint:
    """A point of S^{2n+1} stored as real/imaginary ambient blocks."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError("x and y blocks must be 1-d of equal length")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        norm2 = float(x @ x + y @ y)
        if abs(norm2 - 1.0) > 1e-10:
            raise ValueError(f"point not on the unit sphere: |z|^2 = {norm2!r}")

    @classmethod
    def from_ambient(cls, q) -> "SpherePoint":
        q = np.asarray(q, dtype=float)
        m = q.size // 2
        return cls(q[:m], q[m:])

    @property
    def n(self) -> int:
        return self.x.size - 1

    @property
    def ambient(self) -> np.ndarray:
        return np.concatenate([self.x, self.y])

    @property
    def radii(self) -> np.ndarray:
        """r_k = |z_k|^2; sums to 1 on the sphere."""
        return self.x**2 + self.y**2


@dataclass(frozen=True)
class TangentVector:
    """Ambient vector tangent to the sphere at its base point."""

    v: np.ndarray
    base: SpherePoint = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float)
        object.__setattr__(self, "v", v)
        if abs(float(v @ self.base.ambient)) > UNIT_TOL * max(1.0, np.linalg.norm(v)):
            raise ValueError("vector is not tangent to the sphere at its base point")


@dataclass(frozen=True)
class ChartCoords:
    """Graph-chart coordinates: the largest ambient coordinate is solved for."""

    index: int
    u: np.ndarray
    sign: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        object.__setattr__(self, "u", u)
        if float(u @ u) >= 1.0:
            raise ChartDomainError("chart coordinates leave the unit ball")


def random_sphere_points(n: int, count: int, seed: int) -> np.ndarray:
    """Uniform sample of `count` points on S^{2n+1}, rows of shape (2n+2,).

    Normalizes standard-normal draws; deterministic for a fixed seed.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, 2 * n + 2))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_sphere_point(n: int, seed: int) -> SpherePoint:
    """Uniformly distributed point on S^{2n+1}; deterministic in the seed."""
    return SpherePoint.from_ambient(random_sphere_points(n, 1, seed)[0])


def tangent_project(p: SpherePoint, v) -> TangentVector:
    """Project an ambient vector onto the tangent space at p."""
    q = p.ambient
    v = np.asarray(v, dtype=float)
    return TangentVector(v - (v @ q) * q, p)


def graph_chart(p: SpherePoint) -> ChartCoords:
    """Chart dropping the ambient coordinate of largest magnitude.

    The dropped coordinate is recovered from the unit constraint with the
    recorded sign; the chart is uniformly well conditioned because the
    dropped coordinate is at least 1/sqrt(2n+2) in magnitude.
    """
    q = p.ambient
    idx = int(np.argmax(np.abs(q)))
    if abs(q[idx]) < 1.0 / np.sqrt(q.size) - 1e-9:
        raise ChartDomainError("no coordinate large enough for a graph chart")
    sign = 1.0 if q[idx] >= 0 else -1.0
    return ChartCoords(index=idx, u=np.delete(q, idx), sign=sign)


def from_chart(chart: ChartCoords) -> SpherePoint:
    """Inverse of :func:`graph_chart`; solves the dropped coordinate."""
    u = chart.u
    s = 1.0 - float(u @ u)
    if s <= 0.0:
        raise ChartDomainError("chart coordinates leave the unit ball")
    q = np.insert(u, chart.index, chart.sign * np.sqrt(s))
    return SpherePoint.from_ambient(q)


def chart_points_to_ambient(index: int, sign: float, U: np.ndarray) -> np.ndarray:
    """Batched chart inverse: U of shape (B, 2n+1) -> ambient (B, 2n+2)."""
    U = np.atleast_2d(U)
    s = 1.0 - np.einsum("bi,bi->b", U, U)
    if np.any(s <= 0.0):
        raise ChartDomainError("chart coordinates leave the unit ball")
    B, mch = U.shape
    q = np.empty((B, mch + 1))
    keep = [i for i in range(mch + 1) if i != index]
    q[:, keep] = U
    q[:, index] = sign * np.sqrt(s)
    return q


def chart_jacobians(index: int, sign: float, U: np.ndarray) -> np.ndarray:
    """d(ambient)/d(u) for a batch of chart points, shape (B, 2n+2, 2n+1)."""
    U = np.atleast_2d(U)
    B, mch = U.shape
    s = np.sqrt(1.0 - np.einsum("bi,bi->b", U, U))
    J = np.zeros((B, mch + 1, mch))
    keep = [i for i in range(mch + 1) if i != index]
    for col, row in enumerate(keep):
        J[:, row, col] = 1.0
    J[:, index, :] = -sign * U / s[:, None]
    return J
