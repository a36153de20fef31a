"""
🧱 Hypersurface Spinor Identities
================================

Spinors of the cylinder dt² + g_t restricted to a leaf, in the leaf
representation where e_k acts by γ(ν)γ(e_k). Ambient bivectors map into the
leaf representation as

    γ_j γ_k -> γ'_j γ'_k,   γ_0 γ_k -> γ'_k,   γ_j γ_0 -> -γ'_j,

so the whole ambient spin connection is evaluated on leaf spinors. On top of
it this module checks the spinorial Gauss formula, the relation between the
ambient and leafwise Dirac operators, and the commutator [∇_ν, D̃].
"""

import logging
from functools import lru_cache
from typing import Callable, Dict, Optional, Sequence

import numpy as np
from scipy.linalg import block_diag

from algebra.clifford import Signature
from algebra.spinor_rep import SpinorRep, build_spinor_rep, hypersurface_restriction
from geometry.chart_tensor import divergence_endomorphism, frame_christoffel, gram_schmidt
from geometry.cylinder import MetricFamily, weingarten
from spin.spin_field import SpinorField, dirac, gradient_frame, spin_covariant_derivatives, spin_forms
from spin.variation import _transport, normal_connection, transported_field
from utils.numerics import gradient, scalar_diff

logger = logging.getLogger(__name__)

CylinderSpinor = Callable[[float, np.ndarray], np.ndarray]


@lru_cache(maxsize=None)
def leaf_rep(signature: Signature) -> SpinorRep:
    """Leaf representation induced from the spinors of signature (r+1, s)"""
    return hypersurface_restriction(build_spinor_rep(Signature(signature.r + 1, signature.s)))


def cylinder_frame(fam: MetricFamily) -> Callable[[np.ndarray], np.ndarray]:
    """y = (t, x) -> blockdiag(1, E_t(x))"""
    return lambda y: block_diag(1.0, gram_schmidt(fam.g(y[0], y[1:]))[0])


def cylinder_bivector(rep: SpinorRep) -> Callable[[int, int], np.ndarray]:
    def bivector(j: int, k: int) -> np.ndarray:
        if j == 0 and k == 0:
            return -np.eye(rep.dim, dtype=complex)
        if j == 0:
            return rep.gamma[k - 1]
        if k == 0:
            return -rep.gamma[j - 1]
        return rep.pair(j - 1, k - 1)

    return bivector


def cylinder_connection_forms(fam: MetricFamily, rep: SpinorRep, t: float, x: Sequence[float],
                              h: Optional[float] = None) -> np.ndarray:
    """Ambient spin connection forms ω^Z_a, a = 0 (normal) .. n, on leaf spinors"""
    y = np.concatenate([[float(t)], np.asarray(x, dtype=float)])
    fgamma = frame_christoffel(fam.cylinder, y, cylinder_frame(fam), h)
    eps = (1,) + fam.signature.eps
    return spin_forms(fgamma, eps, cylinder_bivector(rep))


def cylinder_spin_derivatives(fam: MetricFamily, rep: SpinorRep, phi: CylinderSpinor, t: float, x: Sequence[float],
                              include_normal: bool = True, h: Optional[float] = None) -> np.ndarray:
    """
    nabla[a] = ∇^Z_{e_a} Φ at (t, x); a = 0 is ν = ∂_t.

    Without ``include_normal`` the normal row is left at zero and Φ is not
    differentiated in t.
    """
    x = np.asarray(x, dtype=float)
    E = gram_schmidt(fam.g(t, x))[0]
    sigma = phi(t, x)
    dx = gradient(lambda z: phi(t, z), x, h)
    omega = cylinder_connection_forms(fam, rep, t, x, h)
    out = np.zeros((fam.dim + 1, rep.dim), dtype=complex)
    out[1:] = np.einsum("ai,ad->id", E, dx)
    if include_normal:
        out[0] = scalar_diff(lambda s: phi(s, x), t, h)
    return out + np.einsum("ade,e->ad", omega, sigma)


def _weingarten_frame(fam: MetricFamily, t: float, x: np.ndarray) -> np.ndarray:
    """Wf[l,i] = l-th frame component of W(e_i)"""
    E = gram_schmidt(fam.g(t, x))[0]
    return np.linalg.solve(E, weingarten(fam, t, x) @ E)


def hypersurface_gauss_residual(fam: MetricFamily, phi: CylinderSpinor, rep: SpinorRep, t: float,
                                p: Sequence[float], h: Optional[float] = None) -> float:
    """max_i |∇^Z_{e_i} Φ - ∇^M_{e_i} Φ + ½ ν·W(e_i)·Φ|"""
    p = np.asarray(p, dtype=float)
    ambient = cylinder_spin_derivatives(fam, rep, phi, t, p, include_normal=False, h=h)
    leaf = SpinorField(metric=fam.slice(t), rep=rep, value=lambda x: phi(t, x))
    intrinsic = spin_covariant_derivatives(leaf, p, h)
    Wf = _weingarten_frame(fam, t, p)
    sigma = phi(t, p)
    worst = 0.0
    for i in range(fam.dim):
        defect = ambient[1 + i] - intrinsic[i] + 0.5 * rep.vector(Wf[:, i]) @ sigma
        worst = max(worst, float(np.linalg.norm(defect)))
    return worst


def dirac_relation_residual(fam: MetricFamily, phi: CylinderSpinor, rep: SpinorRep, t: float,
                            p: Sequence[float], h: Optional[float] = None) -> float:
    """|ν·D^Z Φ - (D̃ Φ + (n/2) H Φ - ∇_ν Φ)|"""
    p = np.asarray(p, dtype=float)
    ambient = cylinder_spin_derivatives(fam, rep, phi, t, p, h=h)
    eps = fam.signature.eps
    nu_dirac = sum(eps[i] * rep.gamma[i] @ ambient[1 + i] for i in range(fam.dim)) - ambient[0]
    leaf = SpinorField(metric=fam.slice(t), rep=rep, value=lambda x: phi(t, x))
    H = float(np.trace(weingarten(fam, t, p))) / fam.dim
    rhs = dirac(leaf, p, h) + 0.5 * fam.dim * H * phi(t, p) - ambient[0]
    return float(np.linalg.norm(nu_dirac - rhs))


def commutator_sides(fam: MetricFamily, psi0: SpinorField, t0: float, p: Sequence[float],
                     h: Optional[float] = None, ode_step: Optional[float] = None) -> Dict[str, np.ndarray]:
    """
    [∇_ν, D̃]Φ for Φ the parallel extension of ψ0, against
    𝔇^W Φ - (n/2) ν·grad H·Φ + ½ ν·div W·Φ.
    """
    p = np.asarray(p, dtype=float)
    rep = psi0.rep
    n = fam.dim

    def chi(t: float) -> np.ndarray:
        return dirac(transported_field(fam, psi0, t0, t, ode_step), p, h)

    lhs = scalar_diff(chi, t0, h) + normal_connection(fam, rep, t0, p, h) @ chi(t0)

    leaf = fam.slice(t0)
    field0 = psi0.on(leaf)
    G = fam.g(t0, p)
    E, eps = gram_schmidt(G)
    eps = np.asarray(eps)
    nabla = spin_covariant_derivatives(field0, p, h)
    Wf = _weingarten_frame(fam, t0, p)
    frak = sum(eps[i] * Wf[k, i] * rep.gamma[i] @ nabla[k] for i in range(n) for k in range(n))
    dH = gradient(lambda x: np.trace(weingarten(fam, t0, x)) / n, p, h)
    divW = divergence_endomorphism(lambda x: weingarten(fam, t0, x), leaf, p, h)
    sigma = psi0(p)
    grad_term = rep.vector(gradient_frame(E, eps, dH)) @ sigma
    div_term = rep.vector(eps * (E.T @ G @ divW)) @ sigma
    rhs = frak - 0.5 * n * grad_term + 0.5 * div_term
    return {"lhs": lhs, "rhs": rhs}


def commutator_residual(fam: MetricFamily, psi0: SpinorField, t0: float, p: Sequence[float],
                        h: Optional[float] = None, ode_step: Optional[float] = None) -> float:
    sides = commutator_sides(fam, psi0, t0, p, h, ode_step)
    return float(np.linalg.norm(sides["lhs"] - sides["rhs"]))


def parallel_extension(fam: MetricFamily, psi0: SpinorField, t0: float,
                       ode_step: Optional[float] = None) -> CylinderSpinor:
    """Φ(t, x) = τ_{t0}^t ψ0(x)"""
    def phi(t: float, x: np.ndarray) -> np.ndarray:
        if t == t0:
            return psi0(x)
        return _transport(fam, psi0.rep, x, t0, t, psi0(x), ode_step)

    return phi
