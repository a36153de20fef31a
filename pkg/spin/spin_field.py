"""
🧭 Spinor Fields and the Dirac Operator
======================================

Spinor fields on a chart are given by their components relative to the
deterministic orthonormal frame section. This module provides the spin
connection

    ∇_{e_i} ψ = d_{e_i} σ + ½ Σ_{j<k} Γ^k_ij ε_j γ(e_j) γ(e_k) σ,

the Dirac operator D = Σ ε_i e_i · ∇_{e_i}, the curvature of the spin
connection, and residual checks of the standard identities (metric
compatibility, Leibniz rule, the Ricci identity, formal self-adjointness).
"""

import logging
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from algebra.spinor_rep import SpinorRep, SpinorVector
from geometry.chart_tensor import (MatrixFn, MetricField, christoffel, frame_christoffel, frame_field,
                                   lowered_riemann, ricci)
from geometry.expressions import ScalarExpr, compile_matrix
from utils.errors import DimensionMismatchError, SchemaError, SignatureMismatchError
from utils.numerics import gradient

logger = logging.getLogger(__name__)

SpinorFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class SpinorField:
    """A spinor field in frame components on a chart"""

    metric: MetricField
    rep: SpinorRep
    value: SpinorFn
    frame_fn: Optional[MatrixFn] = None
    name: str = "psi"
    components: Optional[List[Tuple[ScalarExpr, ScalarExpr]]] = None

    def __post_init__(self):
        if self.rep.signature != self.metric.signature:
            raise SignatureMismatchError(
                f"spinor representation of {self.rep.signature} on a metric of signature {self.metric.signature}")
        if self.frame_fn is None:
            object.__setattr__(self, "frame_fn", frame_field(self.metric))

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        sigma = np.asarray(self.value(np.asarray(x, dtype=float)), dtype=complex)
        if sigma.shape != (self.rep.dim,):
            raise DimensionMismatchError(f"spinor value of shape {sigma.shape}, expected ({self.rep.dim},)")
        return sigma

    def at(self, x: Sequence[float]) -> SpinorVector:
        return SpinorVector(self(x), self.rep)

    def frame(self, x: Sequence[float]) -> np.ndarray:
        return self.frame_fn(np.asarray(x, dtype=float))

    def on(self, metric: MetricField, value: Optional[SpinorFn] = None) -> "SpinorField":
        """The same representation on another metric (a leaf g_t of a family)"""
        return replace(self, metric=metric, value=value or self.value, frame_fn=None, components=None)

    @classmethod
    def from_expressions(cls, metric: MetricField, rep: SpinorRep, components: Sequence[Sequence[Any]],
                         name: str = "psi") -> "SpinorField":
        """components[k] = [re-expr, im-expr] of the k-th spinor component"""
        pairs = [tuple(ScalarExpr.coerce(e) for e in comp) for comp in components]
        if any(len(p) != 2 for p in pairs):
            raise SchemaError("spinor components must be [re, im] pairs")
        if len(pairs) != rep.dim:
            raise DimensionMismatchError(f"{len(pairs)} spinor components for a representation of dimension {rep.dim}")
        compiled = compile_matrix([[re, im] for re, im in pairs], metric.dim)

        def value(x: np.ndarray) -> np.ndarray:
            parts = compiled(0.0, x)
            return parts[:, 0] + 1j * parts[:, 1]

        return cls(metric=metric, rep=rep, value=value, name=name, components=pairs)

    @classmethod
    def constant(cls, metric: MetricField, rep: SpinorRep, sigma: Sequence[complex], name: str = "const") -> "SpinorField":
        sigma = np.asarray(sigma, dtype=complex)
        return cls(metric=metric, rep=rep, value=lambda x: sigma, name=name)


def spinor_from_json(obj: Dict[str, Any], metric: MetricField, rep: SpinorRep) -> SpinorField:
    try:
        return SpinorField.from_expressions(metric, rep, obj["components"], name=obj.get("name", "psi"))
    except KeyError as e:
        raise SchemaError(f"spinor JSON is missing {e}") from e


# connection

def spin_forms(fgamma: np.ndarray, eps: Sequence[int], bivector: Callable[[int, int], np.ndarray]) -> np.ndarray:
    """ω_i = ½ Σ_{j<k} Γ^k_ij ε_j B(j,k) for every frame direction i"""
    n = fgamma.shape[0]
    forms = []
    for i in range(n):
        omega = 0.5 * sum(fgamma[k, i, j] * eps[j] * bivector(j, k)
                          for j in range(n) for k in range(j + 1, n))
        forms.append(np.asarray(omega, dtype=complex))
    return np.stack(forms)


def connection_forms(psi: SpinorField, p: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    fgamma = frame_christoffel(psi.metric, p, psi.frame_fn, h)
    return spin_forms(fgamma, psi.metric.signature.eps, psi.rep.pair)


def spin_covariant_derivatives(psi: SpinorField, p: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    """nabla[i] = ∇_{e_i} ψ at p"""
    p = np.asarray(p, dtype=float)
    E = psi.frame(p)
    dsigma = gradient(psi, p, h)
    omega = connection_forms(psi, p, h)
    return np.einsum("ai,ad->id", E, dsigma) + np.einsum("ide,e->id", omega, psi(p))


def spin_covariant_derivative(psi: SpinorField, direction: int, p: Sequence[float],
                              h: Optional[float] = None) -> SpinorVector:
    return SpinorVector(spin_covariant_derivatives(psi, p, h)[direction], psi.rep)


def dirac_from_derivatives(rep: SpinorRep, nabla: np.ndarray) -> np.ndarray:
    eps = rep.signature.eps
    return sum(eps[i] * rep.gamma[i] @ nabla[i] for i in range(rep.n))


def dirac(psi: SpinorField, p: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    """D ψ = Σ ε_i e_i · ∇_{e_i} ψ"""
    return dirac_from_derivatives(psi.rep, spin_covariant_derivatives(psi, p, h))


def frame_vector(E: np.ndarray, G: np.ndarray, eps: Sequence[int], v: np.ndarray) -> np.ndarray:
    """Frame components ε_k <v, e_k> of a coordinate vector"""
    return np.asarray(eps) * (E.T @ G @ v)


def gradient_frame(E: np.ndarray, eps: Sequence[int], df: np.ndarray) -> np.ndarray:
    """Frame components of grad f from the differential df"""
    return np.asarray(eps) * (E.T @ df)


def clifford_multiply(rep: SpinorRep, E: np.ndarray, G: np.ndarray, v: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    return rep.vector(frame_vector(E, G, rep.signature.eps, v)) @ sigma


# curvature

def coordinate_forms(psi: SpinorField, x: np.ndarray, h: Optional[float] = None) -> np.ndarray:
    """Ω_a = Σ_i (E⁻¹)[i,a] ω_i, so that ∇_{∂_a} = ∂_a + Ω_a"""
    Einv = np.linalg.inv(psi.frame(x))
    return np.einsum("ia,ide->ade", Einv, connection_forms(psi, x, h))


def spin_curvature(psi: SpinorField, p: Sequence[float], h: Optional[float] = None) -> Dict[str, np.ndarray]:
    """
    Curvature F[a,b] = R^Σ(∂_a, ∂_b) of the spin connection, from its forms,
    next to ½ Σ_{i<j} ε_i ε_j <R(∂_a,∂_b)e_i, e_j> γ_i γ_j.
    """
    p = np.asarray(p, dtype=float)
    n = psi.metric.dim
    omega = coordinate_forms(psi, p, h)
    domega = gradient(lambda x: coordinate_forms(psi, x, h), p, h)  # [c,a,...]
    F = np.zeros((n, n, psi.rep.dim, psi.rep.dim), dtype=complex)
    for a in range(n):
        for b in range(n):
            F[a, b] = domega[a, b] - domega[b, a] + omega[a] @ omega[b] - omega[b] @ omega[a]
    E = psi.frame(p)
    eps = psi.metric.signature.eps
    Rl = np.einsum("abcd,ci,dj->abij", lowered_riemann(psi.metric, p, h), E, E)
    algebraic = np.zeros_like(F)
    for a in range(n):
        for b in range(n):
            algebraic[a, b] = 0.5 * sum(eps[i] * eps[j] * Rl[a, b, i, j] * psi.rep.pair(i, j)
                                        for i in range(n) for j in range(i + 1, n))
    return {"connection": F, "algebraic": algebraic,
            "residual": np.asarray(float(np.abs(F - algebraic).max()))}


def ricci_identity_residual(psi: SpinorField, p: Sequence[float], h: Optional[float] = None) -> float:
    """max_j |Σ_i ε_i e_i · R^Σ(e_i, e_j) - ½ Ric(e_j)·| as operators"""
    p = np.asarray(p, dtype=float)
    E = psi.frame(p)
    eps = psi.metric.signature.eps
    F = spin_curvature(psi, p, h)["connection"]
    Ff = np.einsum("abde,ai,bj->ijde", F, E, E)
    ric_f = E.T @ ricci(psi.metric, p, h) @ E
    worst = 0.0
    for j in range(psi.metric.dim):
        lhs = sum(eps[i] * psi.rep.gamma[i] @ Ff[i, j] for i in range(psi.metric.dim))
        rhs = 0.5 * psi.rep.vector(np.asarray(eps) * ric_f[j])
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


# identity residuals

def metric_compatibility_residual(phi: SpinorField, psi: SpinorField, p: Sequence[float],
                                  h: Optional[float] = None) -> float:
    """max_i |e_i<φ,ψ> - <∇_i φ,ψ> - <φ,∇_i ψ>|"""
    p = np.asarray(p, dtype=float)
    rep = psi.rep
    d_inner = gradient(lambda x: np.array([rep.inner(phi(x), psi(x))]), p, h)[:, 0]
    E = psi.frame(p)
    n_phi = spin_covariant_derivatives(phi, p, h)
    n_psi = spin_covariant_derivatives(psi, p, h)
    worst = 0.0
    for i in range(rep.n):
        lhs = E[:, i] @ d_inner
        rhs = rep.inner(n_phi[i], psi(p)) + rep.inner(phi(p), n_psi[i])
        worst = max(worst, abs(lhs - rhs))
    return float(worst)


def covariant_derivative_vector(g: MetricField, Y: Callable[[np.ndarray], np.ndarray], p: np.ndarray,
                                h: Optional[float] = None) -> np.ndarray:
    """nY[c,a] = (∇_{∂_a} Y)^c"""
    gamma = christoffel(g, p, h)
    dY = gradient(Y, p, h)  # [a,c]
    return dY.T + np.einsum("cab,b->ca", gamma, np.asarray(Y(p)))


def leibniz_residual(psi: SpinorField, Y: Callable[[np.ndarray], np.ndarray], p: Sequence[float],
                     h: Optional[float] = None) -> float:
    """max_i |∇_i(Y·ψ) - (∇_i Y)·ψ - Y·∇_i ψ|"""
    p = np.asarray(p, dtype=float)
    g, rep = psi.metric, psi.rep

    def y_psi(x: np.ndarray) -> np.ndarray:
        return clifford_multiply(rep, psi.frame(x), g(x), np.asarray(Y(x)), psi(x))

    product = psi.on(g, value=y_psi)
    lhs = spin_covariant_derivatives(product, p, h)
    n_psi = spin_covariant_derivatives(psi, p, h)
    E, G = psi.frame(p), g(p)
    nY = covariant_derivative_vector(g, Y, p, h) @ E  # [c,i] = (∇_{e_i} Y)^c
    worst = 0.0
    for i in range(rep.n):
        rhs = clifford_multiply(rep, E, G, nY[:, i], psi(p)) + clifford_multiply(rep, E, G, np.asarray(Y(p)), n_psi[i])
        worst = max(worst, float(np.abs(lhs[i] - rhs).max()))
    return worst


def self_adjointness_residual(phi: SpinorField, psi: SpinorField, p: Sequence[float],
                              h: Optional[float] = None) -> float:
    """
    |div Y - (<Dφ,ψ> - <φ,Dψ>)| where <Y,Z> = <Z·φ,ψ>.

    For representations whose form makes vectors self-adjoint the identity
    reads div Y = <Dφ,ψ> + <φ,Dψ>.
    """
    p = np.asarray(p, dtype=float)
    g, rep = psi.metric, psi.rep
    eps = np.asarray(g.signature.eps)

    def Y(x: np.ndarray) -> np.ndarray:
        E = psi.frame(x)
        comps = np.array([rep.inner(rep.gamma[k] @ phi(x), psi(x)) for k in range(rep.n)])
        return E @ (eps * comps)

    nY = covariant_derivative_vector(g, Y, p, h)
    div = np.trace(nY)
    sign = 1 if rep.beta_skew else -1
    rhs = rep.inner(dirac(phi, p, h), psi(p)) - sign * rep.inner(phi(p), dirac(psi, p, h))
    return float(abs(div - rhs))
