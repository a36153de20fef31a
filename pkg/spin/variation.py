"""
🔀 Spinor Transport and Metric Variations
========================================

Spinors of different leaf metrics g_t are identified by parallel transport
along the normal geodesics of the cylinder dt² + g_t. With that
identification this module evaluates

- the first variation of the Dirac operator, compared with
  -½ 𝔇^ġ ψ + ¼ grad(tr_g ġ)·ψ - ¼ (div ġ)^♯·ψ,
- the energy-momentum tensor Q(X,Y) = -¼ Re(<ψ, X·∇_Y ψ> + <ψ, Y·∇_X ψ>),
  optionally with the +½ Re<ψ,(D-λ)ψ> g(X,Y) term,
- the pointwise variation of the Dirac Lagrangian density.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from algebra.spinor_rep import SpinorRep, SpinorVector
from geometry.chart_tensor import divergence_bilinear, gram_schmidt
from geometry.cylinder import MetricFamily
from spin.spin_field import (SpinorField, dirac, gradient_frame, spin_covariant_derivatives)
from utils.errors import DimensionMismatchError
from utils.numerics import gradient, rk4, scalar_diff

logger = logging.getLogger(__name__)


# transport

def normal_connection(fam: MetricFamily, rep: SpinorRep, t: float, x: np.ndarray,
                      h: Optional[float] = None) -> np.ndarray:
    """
    ω_ν = ½ Σ_{j<k} Γ^k_0j ε_j e_j·e_k with
    Γ^k_0j = ε_k <∇_∂t e_j, e_k> = ε_k e_kᵀ (g ∂_t e_j + ½ ġ e_j).
    """
    G = fam.g(t, x)
    E, eps = gram_schmidt(G)
    dE = scalar_diff(lambda s: gram_schmidt(fam.g(s, x))[0], t, h)
    M = E.T @ (G @ dE + 0.5 * fam.gdot(t, x) @ E)
    n = fam.dim
    omega = np.zeros((rep.dim, rep.dim), dtype=complex)
    for j in range(n):
        for k in range(j + 1, n):
            omega += 0.5 * eps[k] * M[k, j] * eps[j] * rep.pair(j, k)
    return omega


def _transport(fam: MetricFamily, rep: SpinorRep, x: Sequence[float], t0: float, t1: float, sigma: np.ndarray,
               h: Optional[float] = None, tol: float = 1e-9) -> np.ndarray:
    x = np.asarray(x, dtype=float)

    def rhs(t: float, s: np.ndarray) -> np.ndarray:
        return -normal_connection(fam, rep, t, x) @ s

    return rk4(rhs, np.asarray(sigma, dtype=complex), t0, t1, h, tol=tol)


def transport_spinor(fam: MetricFamily, x: Sequence[float], t0: float, t1: float,
                     sigma: Union[SpinorVector, np.ndarray], rep: Optional[SpinorRep] = None,
                     h: Optional[float] = None, tol: float = 1e-9) -> SpinorVector:
    """Parallel transport of a spinor along t -> (t, x) from t0 to t1"""
    if isinstance(sigma, SpinorVector):
        rep = rep or sigma.rep
        sigma = sigma.components
    if rep is None:
        raise DimensionMismatchError("a representation is needed to transport raw spinor components")
    return SpinorVector(_transport(fam, rep, x, t0, t1, sigma, h, tol), rep)


def transported_field(fam: MetricFamily, psi: SpinorField, t0: float, t: float,
                      ode_step: Optional[float] = None) -> SpinorField:
    """τ_{t0}^t ψ as a spinor field of the leaf g_t"""
    if t == t0:
        return psi.on(fam.slice(t))

    def value(x: np.ndarray) -> np.ndarray:
        return _transport(fam, psi.rep, x, t0, t, psi(x), ode_step)

    return psi.on(fam.slice(t), value=value)


def transported_dirac(fam: MetricFamily, psi: SpinorField, t0: float, t: float, p: Sequence[float],
                      h: Optional[float] = None, ode_step: Optional[float] = None) -> np.ndarray:
    """τ_t^{t0} D^{g_t} τ_{t0}^t ψ at p"""
    field_t = transported_field(fam, psi, t0, t, ode_step)
    return _transport(fam, psi.rep, p, t, t0, dirac(field_t, p, h), ode_step)


# variation of the Dirac operator

def _leaf_frame(fam: MetricFamily, t: float, p: np.ndarray):
    G = fam.g(t, p)
    E, eps = gram_schmidt(G)
    return G, E, np.asarray(eps)


def variation_rhs(fam: MetricFamily, psi: SpinorField, t0: float, p: Sequence[float],
                  h: Optional[float] = None) -> np.ndarray:
    """-½ 𝔇^ġ ψ + ¼ grad(tr_g ġ)·ψ - ¼ (div ġ)^♯·ψ at (t0, p)"""
    p = np.asarray(p, dtype=float)
    rep = psi.rep
    leaf = fam.slice(t0)
    field0 = psi.on(leaf)
    G, E, eps = _leaf_frame(fam, t0, p)
    k_frame = E.T @ fam.gdot(t0, p) @ E
    nabla = spin_covariant_derivatives(field0, p, h)
    sigma = psi(p)
    frak = sum(eps[i] * eps[j] * k_frame[i, j] * rep.gamma[i] @ nabla[j]
               for i in range(rep.n) for j in range(rep.n))
    dtr = gradient(lambda x: np.trace(np.linalg.solve(fam.g(t0, x), fam.gdot(t0, x))), p, h)
    div_k = divergence_bilinear(lambda x: fam.gdot(t0, x), leaf, p, h)
    grad_part = rep.vector(gradient_frame(E, eps, dtr)) @ sigma
    div_part = rep.vector(gradient_frame(E, eps, div_k)) @ sigma
    return -0.5 * frak + 0.25 * grad_part - 0.25 * div_part


@dataclass
class VariationResult:
    """📊 Finite-difference variation next to its closed form"""

    lhs: np.ndarray
    rhs: np.ndarray
    delta: Optional[float] = None

    @property
    def residual(self) -> float:
        return float(np.linalg.norm(self.lhs - self.rhs))

    def to_dict(self) -> Dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "delta": self.delta, "residual": self.residual}


def variation_check(fam: MetricFamily, psi: SpinorField, t0: float, p: Sequence[float],
                    delta: Optional[float] = None, h: Optional[float] = None,
                    ode_step: Optional[float] = None) -> VariationResult:
    """
    d/dt τ_t^{t0} D^{g_t} τ_{t0}^t ψ at t0 against the closed form.

    With ``delta`` the t-derivative is the plain central quotient of that
    step (second-order error, for convergence studies); otherwise the
    Richardson-extrapolated difference with the configured step is used.
    """
    def F(t: float) -> np.ndarray:
        return transported_dirac(fam, psi, t0, t, p, h, ode_step)

    if delta is None:
        lhs = scalar_diff(F, t0, h)
    else:
        lhs = (F(t0 + delta) - F(t0 - delta)) / (2 * delta)
    return VariationResult(lhs=lhs, rhs=variation_rhs(fam, psi, t0, p, h), delta=delta)


def convergence_ratio(fam: MetricFamily, psi: SpinorField, t0: float, p: Sequence[float],
                      delta: float = 0.05, h: Optional[float] = None) -> float:
    """residual(δ) / residual(δ/2); close to 4 for a second-order quotient"""
    coarse = variation_check(fam, psi, t0, p, delta=delta, h=h).residual
    fine = variation_check(fam, psi, t0, p, delta=delta / 2, h=h).residual
    return coarse / fine


# energy-momentum

@dataclass
class SymTensor2:
    """A symmetric 2-tensor at a point, stored in orthonormal frame components"""

    frame_components: np.ndarray
    frame: np.ndarray
    signs: Sequence[int] = field(default_factory=tuple)

    def coordinates(self) -> np.ndarray:
        Einv = np.linalg.inv(self.frame)
        return Einv.T @ self.frame_components @ Einv

    def __call__(self, X: np.ndarray, Y: np.ndarray) -> float:
        return float(np.asarray(X) @ self.coordinates() @ np.asarray(Y))

    def pair(self, k_frame: np.ndarray) -> float:
        """<Q, k> = Σ ε_i ε_j Q(e_i,e_j) k(e_i,e_j)"""
        s = np.asarray(self.signs, dtype=float)
        return float(np.sum(np.outer(s, s) * self.frame_components * k_frame))

    def symmetry_defect(self) -> float:
        return float(np.abs(self.frame_components - self.frame_components.T).max())

    def to_dict(self) -> Dict[str, Any]:
        return {"frame_components": self.frame_components, "coordinates": self.coordinates()}


def energy_momentum(psi: SpinorField, p: Sequence[float], lam: Optional[float] = None,
                    h: Optional[float] = None) -> SymTensor2:
    """
    Q(e_i,e_j) = -¼ Re(<ψ, e_i·∇_j ψ> + <ψ, e_j·∇_i ψ>); with ``lam`` the
    non-critical term ½ Re<ψ,(D-λ)ψ> g(e_i,e_j) is added.
    """
    p = np.asarray(p, dtype=float)
    rep = psi.rep
    sigma = psi(p)
    nabla = spin_covariant_derivatives(psi, p, h)
    n = rep.n
    raw = np.array([[rep.inner(sigma, rep.gamma[i] @ nabla[j]) for j in range(n)] for i in range(n)])
    Q = -0.25 * np.real(raw + raw.T)
    eps = psi.metric.signature.eps
    if lam is not None:
        D = sum(eps[i] * rep.gamma[i] @ nabla[i] for i in range(n))
        Q = Q + 0.5 * np.real(rep.inner(sigma, D - lam * sigma)) * np.diag(eps)
    return SymTensor2(frame_components=Q, frame=psi.frame(p), signs=eps)


def volume_ratio(fam: MetricFamily, t0: float, t: float, p: Sequence[float]) -> float:
    """dV_{g_t} / dV_{g_t0} at p"""
    return float(np.sqrt(abs(np.linalg.det(fam.g(t, p))) / abs(np.linalg.det(fam.g(t0, p)))))


def volume_derivative_check(fam: MetricFamily, t0: float, p: Sequence[float], h: Optional[float] = None) -> Dict[str, float]:
    """d/dt dV_t/dV_t0 from determinants against ½ tr(g⁻¹ ġ)"""
    fd = float(scalar_diff(lambda t: np.array(volume_ratio(fam, t0, t, p)), t0, h))
    closed = 0.5 * float(np.trace(np.linalg.solve(fam.g(t0, p), fam.gdot(t0, p))))
    return {"finite_difference": fd, "closed_form": closed, "residual": abs(fd - closed)}


def lagrangian_variation_check(fam: MetricFamily, psi: SpinorField, lam: float, t0: float, p: Sequence[float],
                               h: Optional[float] = None, ode_step: Optional[float] = None) -> Dict[str, float]:
    """
    d/dt [Re<ψ, τ D_t τ ψ - λψ> dV_t/dV_t0] at t0 against <Q_λ, ġ>.

    Clifford terms of the Dirac variation have purely imaginary expectation,
    so the identity holds pointwise and not only after integration.
    """
    p = np.asarray(p, dtype=float)
    rep = psi.rep
    sigma = psi(p)
    base = rep.inner(sigma, sigma)

    def density(t: float) -> np.ndarray:
        value = rep.inner(sigma, transported_dirac(fam, psi, t0, t, p, h, ode_step)) - lam * base
        return np.array(np.real(value) * volume_ratio(fam, t0, t, p))

    lhs = float(scalar_diff(density, t0, h))
    leaf_field = psi.on(fam.slice(t0))
    Q = energy_momentum(leaf_field, p, lam=lam, h=h)
    k_frame = Q.frame.T @ fam.gdot(t0, p) @ Q.frame
    rhs = Q.pair(k_frame)
    return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs)}


def generalized_killing_energy(psi: SpinorField, A: np.ndarray, p: Sequence[float]) -> SymTensor2:
    """¼ <X, A Y> <ψ, ψ>, the energy-momentum expected of a generalized Killing spinor"""
    p = np.asarray(p, dtype=float)
    E = psi.frame(p)
    G = psi.metric(p)
    norm = np.real(psi.rep.inner(psi(p), psi(p)))
    return SymTensor2(frame_components=0.25 * norm * (E.T @ G @ A @ E), frame=E, signs=psi.metric.signature.eps)
