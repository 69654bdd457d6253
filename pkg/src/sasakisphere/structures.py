"""Weighted Sasakian structure tensors on S^{2n+1}.

For a positive weight vector w the Reeb field is xi_w = sum w_k H_k with
H_k = y_k d/dx_k - x_k d/dy_k.  The contact form is eta_w = eta / D with
eta the standard form and D = eta(xi_w) = sum w_k |z_k|^2; Phi_w restricts
to the standard complex structure on the contact distribution, and the
metric is rebuilt from (eta_w, Phi_w) through the calibrated reconstruction

    g_w(X, Y) = kappa * d(eta_w)(X, Phi_w Y) + eta_w(X) eta_w(Y).

d(eta_w) is evaluated in closed form (quotient rule on eta / D), never by
numerical differentiation.  Everything here is batched: `pts` arguments are
(B, 2n+2) arrays of ambient points; public single-point wrappers convert.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    KAPPA,
    SpherePoint,
    TangentVector,
    Weight,
    as_weight,
)


@dataclass(frozen=True)
class ContactFrame:
    """All structure tensors of a (possibly homothety-scaled) frame at a point.

    Tensors are ambient (2n+2)-dimensional, tangentially projected.  `deta`
    is the antisymmetric matrix of the exterior derivative of the frame's
    contact form, so g(Phi X, Y) = kappa * deta(X, Y) on tangent vectors.
    """

    point: SpherePoint
    eta: np.ndarray
    xi: np.ndarray
    phi: np.ndarray
    g: np.ndarray
    deta: np.ndarray
    D: float


def _j_matrix(m: int) -> np.ndarray:
    J = np.zeros((2 * m, 2 * m))
    J[:m, m:] = -np.eye(m)
    J[m:, :m] = np.eye(m)
    return J


def _s_matrix(m: int) -> np.ndarray:
    # eta = S q componentwise: eta = (y, -x)
    return -_j_matrix(m)


def _deta_matrix(m: int) -> np.ndarray:
    # full d-convention: d eta = -2 sum dx_k ^ dy_k
    return 2.0 * _j_matrix(m)


def eta_standard(pts: np.ndarray) -> np.ndarray:
    """Standard contact covector eta = sum(y_k dx_k - x_k dy_k), batched."""
    pts = np.atleast_2d(pts)
    m = pts.shape[1] // 2
    return np.concatenate([pts[:, m:], -pts[:, :m]], axis=1)


def xi_weighted(w: Weight, pts: np.ndarray) -> np.ndarray:
    """Reeb field sum w_k H_k as ambient components, batched."""
    pts = np.atleast_2d(pts)
    m = pts.shape[1] // 2
    e = w.entries
    return np.concatenate([e * pts[:, m:], -e * pts[:, :m]], axis=1)


def d_weighted(w: Weight, pts: np.ndarray) -> np.ndarray:
    """D = sum w_k r_k, batched."""
    pts = np.atleast_2d(pts)
    return np.einsum("bi,i,bi->b", pts, w.full, pts)


def tangent_projectors(pts: np.ndarray) -> np.ndarray:
    pts = np.atleast_2d(pts)
    m = pts.shape[1]
    return np.eye(m)[None, :, :] - np.einsum("bi,bj->bij", pts, pts)


def frame_arrays(w: Weight, pts: np.ndarray, a: float = 1.0) -> dict:
    """Batched structure tensors of the weighted frame, homothety-scaled by `a`.

    Returns a dict with keys eta (B,m), xi (B,m), phi (B,m,m), g (B,m,m),
    deta (B,m,m), D (B,), proj (B,m,m).  With a = 1 this is the frame of
    (xi_w, eta_w); for a != 1 the transverse homothety
    xi_a = xi_w / a, eta_a = a eta_w, g_a = a g_w + (a^2 - a) eta_w x eta_w
    is applied.
    """
    w = as_weight(w)
    if a <= 0:
        raise ValueError("homothety parameter a must be positive")
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    B, mm = pts.shape
    m = mm // 2
    if m != w.n + 1:
        raise ValueError("weight length does not match point dimension")

    J = _j_matrix(m)
    A0 = _deta_matrix(m)
    eta = eta_standard(pts)
    xiw = xi_weighted(w, pts)
    D = d_weighted(w, pts)
    etaw = eta / D[:, None]
    tau = 2.0 * w.full[None, :] * pts  # dD
    deta_w = (
        A0[None, :, :] / D[:, None, None]
        - (np.einsum("bi,bj->bij", tau, eta) - np.einsum("bi,bj->bij", eta, tau))
        / (D**2)[:, None, None]
    )
    # Phi_0 = J - q x eta on the sphere; Phi_w = Phi_0 - (Phi_0 xi_w) x eta_w
    phi0 = J[None, :, :] - np.einsum("bi,bj->bij", pts, eta)
    mvec = np.einsum("bij,bj->bi", phi0, xiw)
    phiw = phi0 - np.einsum("bi,bj->bij", mvec, etaw)

    proj = tangent_projectors(pts)
    g = KAPPA * np.einsum("bij,bjk->bik", deta_w, phiw) + np.einsum(
        "bi,bj->bij", etaw, etaw
    )
    if a != 1.0:
        etaw_outer = np.einsum("bi,bj->bij", etaw, etaw)
        g = a * g + (a * a - a) * etaw_outer
        etaw = a * etaw
        xiw = xiw / a
        deta_w = a * deta_w

    g = np.einsum("bij,bjk,bkl->bil", proj, g, proj)
    g = 0.5 * (g + np.transpose(g, (0, 2, 1)))
    return {
        "eta": np.einsum("bi,bij->bj", etaw, proj),
        "xi": xiw,
        "phi": np.einsum("bij,bjk,bkl->bil", proj, phiw, proj),
        "g": g,
        "deta": np.einsum("bij,bjk,bkl->bil", proj, deta_w, proj),
        "D": D,
        "proj": proj,
    }


def metric_arrays(w: Weight, pts: np.ndarray, a: float = 1.0) -> np.ndarray:
    """Batched metric matrices only (cheaper entry point for FD kernels)."""
    return frame_arrays(w, pts, a)["g"]


def _single_frame(w, p: SpherePoint, a: float = 1.0) -> ContactFrame:
    w = as_weight(w)
    f = frame_arrays(w, p.ambient[None, :], a)
    return ContactFrame(
        point=p,
        eta=f["eta"][0],
        xi=f["xi"][0],
        phi=f["phi"][0],
        g=f["g"][0],
        deta=f["deta"][0],
        D=float(f["D"][0]),
    )


def reeb_field(w, p: SpherePoint) -> TangentVector:
    """xi_w = sum w_k H_k at p; tangent to the sphere by construction."""
    w = as_weight(w)
    return TangentVector(xi_weighted(w, p.ambient[None, :])[0], p)


def contact_form(w, p: SpherePoint) -> np.ndarray:
    """eta_w = eta / D as an ambient covector, tangentially projected."""
    w = as_weight(w)
    q = p.ambient[None, :]
    eta = eta_standard(q)[0] / d_weighted(w, q)[0]
    return eta - (eta @ p.ambient) * p.ambient


def phi_tensor(w, p: SpherePoint) -> np.ndarray:
    """Phi_w = Phi_0 - Phi_0(xi_w) x eta_w, projected to the tangent space."""
    return _single_frame(w, p).phi


def sasaki_metric(w, p: SpherePoint) -> ContactFrame:
    """Full structure frame (eta_w, xi_w, Phi_w, g_w, d eta_w) at p."""
    return _single_frame(w, p)


def homothety_frame(w, a: float, p: SpherePoint) -> ContactFrame:
    """Transverse homothety of the weighted frame by a > 0."""
    if a <= 0:
        raise ValueError("homothety parameter a must be positive")
    return _single_frame(w, p, a)


def is_positive_reeb(w) -> bool:
    """True iff the weight vector lies in the open positive orthant."""
    entries = np.asarray(w.entries if isinstance(w, Weight) else w, dtype=float)
    return bool(np.all(entries > 1e-12))


def volume_density(w, pts: np.ndarray, a: float = 1.0) -> np.ndarray:
    """dmu_{g} / dmu_round at each point; equals a^{n+1} D^{-(n+1)}."""
    w = as_weight(w)
    D = d_weighted(w, np.atleast_2d(pts))
    return a ** (w.n + 1) * D ** -(w.n + 1)


def wedge_top(eta: np.ndarray, deta: np.ndarray, basis: np.ndarray, n: int) -> np.ndarray:
    """Evaluate eta ^ (deta)^n on a tangent basis, batched.

    `basis` has shape (B, 2n+2, 2n+1) with columns spanning the tangent
    space.  Only n in {1, 2} is needed; the value is used in ratios so no
    overall factorial constant is applied.
    """
    cols = basis.shape[2]
    if n == 1:
        assert cols == 3
        b = [basis[:, :, i] for i in range(3)]
        ev = lambda i: np.einsum("bi,bi->b", eta, b[i])
        A = lambda i, j: np.einsum("bi,bij,bj->b", b[i], deta, b[j])
        return ev(0) * A(1, 2) - ev(1) * A(0, 2) + ev(2) * A(0, 1)
    if n == 2:
        assert cols == 5
        from itertools import permutations

        vals = np.zeros(basis.shape[0])
        ev = [np.einsum("bi,bi->b", eta, basis[:, :, i]) for i in range(5)]
        A = {}
        for i in range(5):
            for j in range(5):
                A[i, j] = np.einsum("bi,bij,bj->b", basis[:, :, i], deta, basis[:, :, j])
        for perm in permutations(range(5)):
            sign = _perm_sign(perm)
            vals += sign * ev[perm[0]] * A[perm[1], perm[2]] * A[perm[3], perm[4]]
        return vals / 4.0  # 1/(1! 2! 2!)
    raise NotImplementedError("wedge_top implemented for n in {1, 2}")


def _perm_sign(perm) -> int:
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def tangent_bases(pts: np.ndarray) -> np.ndarray:
    """Orthonormal tangent bases, shape (B, 2n+2, 2n+1), via batched eigh."""
    proj = tangent_projectors(np.atleast_2d(pts))
    evals, evecs = np.linalg.eigh(proj)
    # ascending eigenvalues: first column ~0 (normal), rest ~1 (tangent)
    return evecs[:, :, 1:]
