"""
🗝️ Generalized Killing Spinors
=============================

Spinors with ∇_X ψ = ½ A(X)·ψ for a symmetric endomorphism field A. Such a
spinor extends by parallel transport to a parallel spinor on the cylinder
over g_t = g((Id - tA)²·,·) whenever A is a Codazzi tensor; the check here
builds that cylinder and measures the ambient covariant derivative.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from algebra.spinor_rep import SpinorRep
from geometry.chart_tensor import MetricField, sample_points
from geometry.embedding import EndoField, check_hypersurface_data, killing_family
from spin.hypersurface import cylinder_spin_derivatives, parallel_extension
from spin.spin_field import SpinorField, connection_forms, spin_covariant_derivatives
from utils.config import resolve
from utils.errors import PreconditionError
from utils.numerics import make_rng, rk4

logger = logging.getLogger(__name__)


def killing_equation_residual(psi: SpinorField, A: EndoField, p: Sequence[float], h: Optional[float] = None) -> float:
    """max_i |∇_{e_i} ψ - ½ A(e_i)·ψ|"""
    p = np.asarray(p, dtype=float)
    E = psi.frame(p)
    Af = np.linalg.solve(E, A(p) @ E)
    nabla = spin_covariant_derivatives(psi, p, h)
    sigma = psi(p)
    return max(float(np.linalg.norm(nabla[i] - 0.5 * psi.rep.vector(Af[:, i]) @ sigma))
               for i in range(psi.rep.n))


def integrate_killing_spinor(metric: MetricField, A: EndoField, rep: SpinorRep, base: Sequence[float],
                             sigma0: Sequence[complex], x: Sequence[float], h: Optional[float] = None,
                             fd_step: Optional[float] = None) -> np.ndarray:
    """
    Solve ∂_a σ = ½ A(∂_a)·σ - Ω_a σ along the coordinate segments from
    ``base`` to ``x``, one coordinate at a time in index order.
    """
    zero_field = SpinorField(metric=metric, rep=rep, value=lambda z: np.zeros(rep.dim, dtype=complex))
    sigma = np.asarray(sigma0, dtype=complex)
    point = np.array(base, dtype=float)
    target = np.asarray(x, dtype=float)
    for a in range(metric.dim):
        if target[a] == point[a]:
            continue
        start = point.copy()

        def rhs(s: float, y: np.ndarray, a: int = a, start: np.ndarray = start) -> np.ndarray:
            z = start.copy()
            z[a] = s
            E = zero_field.frame(z)
            Einv = np.linalg.inv(E)
            omega_a = np.einsum("i,ide->de", Einv[:, a], connection_forms(zero_field, z, fd_step))
            clifford = rep.vector(Einv @ A(z)[:, a])
            return 0.5 * clifford @ y - omega_a @ y

        sigma = rk4(rhs, sigma, float(point[a]), float(target[a]), h, tol=1e-8)
        point[a] = target[a]
    return sigma


def killing_spinor_field(metric: MetricField, A: EndoField, rep: SpinorRep, base: Sequence[float],
                         sigma0: Sequence[complex], h: Optional[float] = None) -> SpinorField:
    """The generalized Killing spinor through (base, σ0), evaluated by integration"""
    def value(x: np.ndarray) -> np.ndarray:
        return integrate_killing_spinor(metric, A, rep, base, sigma0, x, h)

    return SpinorField(metric=metric, rep=rep, value=value, name="killing")


@dataclass
class KillingReport:
    """📊 Parallel-spinor check of a generalized Killing cylinder"""

    codazzi_residual: float
    killing_residual: float
    window: List[float]
    residual: float = 0.0
    points: List[List[float]] = field(default_factory=list)
    tol: float = 1e-3

    @property
    def passed(self) -> bool:
        return self.residual <= self.tol

    def to_dict(self) -> Dict[str, Any]:
        return {"codazzi_residual": self.codazzi_residual, "killing_residual": self.killing_residual,
                "window": self.window, "residual": self.residual, "points": self.points, "pass": self.passed}


def killing_cylinder_check(g: MetricField, A: EndoField, psi: SpinorField, samples: int = 3,
                           t_fractions: Sequence[float] = (-0.5, 0.0, 0.5), tol: Optional[float] = None,
                           seed: Optional[int] = None, h: Optional[float] = None,
                           ode_step: Optional[float] = None) -> KillingReport:
    """
    Extend ψ along t by transport and report max |∇^Z_{e_i} Ψ| over spatial
    frame directions, at ``samples`` leaf points and the t-values given as
    fractions of the invertibility window.
    """
    precondition = resolve("precondition_tol", None)
    rng = make_rng(seed)
    points = sample_points(g.domain, samples, rng, margin=0.15)
    codazzi = check_hypersurface_data(g, A, None, seed=seed, h=h).codazzi_residual
    killing = max(killing_equation_residual(psi, A, p, h) for p in points)
    if killing > precondition:
        raise PreconditionError(f"ψ does not satisfy the generalized Killing equation (residual {killing:.2e})",
                                {"killing_residual": killing, "codazzi_residual": codazzi})
    fam = killing_family(g, A, check=False)
    lo, hi = fam.t_interval
    phi = parallel_extension(fam, psi, 0.0, ode_step)
    report = KillingReport(codazzi_residual=codazzi, killing_residual=killing, window=[lo, hi],
                           tol=resolve("killing_tol", tol))
    for x in points:
        for frac in t_fractions:
            t = frac * (hi if frac >= 0 else -lo)
            nabla = cylinder_spin_derivatives(fam, psi.rep, phi, t, x, include_normal=False, h=h)
            worst = float(np.linalg.norm(nabla[1:], axis=1).max())
            report.residual = max(report.residual, worst)
            report.points.append([t] + [float(v) for v in x])
    logger.info("🔍 Killing cylinder residual %.3e over %d points", report.residual, len(report.points))
    return report
