"""
🪐 Constant-Curvature Embedding Data
===================================

Generalized sine and cosine, Gauss and Codazzi residual checkers for a field of
symmetric endomorphisms A on (M, g), and the explicit metric families

    g_t = g((cs_κ(t) Id - sn_κ(t) A)² ·, ·)        (constant curvature κ)
    g_t = g((Id - t A)² ·, ·)                       (generalized Killing cylinders)

whose cylinders dt² + g_t are verified against the brute-force curvature.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from geometry.chart_tensor import (MetricField, covariant_derivative_endomorphism, lower_riemann,
                                   gram_schmidt, ricci_from_riemann, riemann, sample_points)
from geometry.cylinder import MetricFamily, weingarten
from geometry.expressions import T, ScalarExpr, compile_matrix, expr_grid
from utils.config import resolve
from utils.errors import DimensionMismatchError, PreconditionError, SchemaError
from utils.numerics import make_rng

logger = logging.getLogger(__name__)

# W_0 = A is exact; only the t-difference error remains
WEINGARTEN_TOL = 1e-6


# generalized sine and cosine

def sn(kappa: float, t: float) -> float:
    """sin(√κ t)/√κ, t or sinh(√-κ t)/√-κ"""
    if kappa > 0:
        c = math.sqrt(kappa)
        return math.sin(c * t) / c
    if kappa < 0:
        c = math.sqrt(-kappa)
        return math.sinh(c * t) / c
    return float(t)


def cs(kappa: float, t: float) -> float:
    if kappa > 0:
        return math.cos(math.sqrt(kappa) * t)
    if kappa < 0:
        return math.cosh(math.sqrt(-kappa) * t)
    return 1.0


def _sn_cs_exprs(kappa: float) -> Tuple[sympy.Expr, sympy.Expr]:
    if kappa > 0:
        c = sympy.sqrt(sympy.nsimplify(kappa))
        return sympy.sin(c * T) / c, sympy.cos(c * T)
    if kappa < 0:
        c = sympy.sqrt(sympy.nsimplify(-kappa))
        return sympy.sinh(c * T) / c, sympy.cosh(c * T)
    return T, sympy.Integer(1)


# endomorphism fields

@dataclass(frozen=True, eq=False)
class EndoField:
    """A field of endomorphisms; A[c,b] is the c-component of A(∂_b)"""

    dim: int
    fn: Callable[[np.ndarray], np.ndarray]
    name: str = "A"
    expressions: Optional[List[List[ScalarExpr]]] = None

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    @classmethod
    def from_expressions(cls, entries: Sequence[Sequence[Any]], name: str = "A") -> "EndoField":
        grid = expr_grid(entries)
        n = len(grid)
        if any(len(row) != n for row in grid):
            raise SchemaError("endomorphism coefficients must form a square array")
        compiled = compile_matrix(grid, n)
        return cls(dim=n, fn=lambda x: compiled(0.0, x), name=name, expressions=grid)

    @classmethod
    def scalar(cls, g: MetricField, value: float) -> "EndoField":
        n = g.dim
        return cls.from_expressions([[value if i == j else 0 for j in range(n)] for i in range(n)],
                                    name=f"{value:g}·Id")

    def symmetry_defect(self, g: MetricField, p: Sequence[float]) -> float:
        GA = g(p) @ self(p)
        return float(np.abs(GA - GA.T).max())

    def check_symmetric(self, g: MetricField, points: Sequence[np.ndarray], tol: float = 1e-10) -> None:
        if self.dim != g.dim:
            raise DimensionMismatchError(f"{self.dim}x{self.dim} endomorphism on a {g.dim}-dimensional chart")
        worst = max(self.symmetry_defect(g, p) for p in points)
        if worst > tol:
            raise PreconditionError(f"{self.name} is not g-symmetric (defect {worst:.2e})",
                                    {"symmetry_defect": worst})


def endo_from_json(obj: Any) -> EndoField:
    """{"A": [[expr, ...], ...]} or the bare coefficient array"""
    entries = obj["A"] if isinstance(obj, dict) else obj
    return EndoField.from_expressions(entries)


# Gauss and Codazzi residuals

def _frame_components(E: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    return np.linalg.solve(E, vectors)


def codazzi_residual(g: MetricField, A: EndoField, p: Sequence[float], h: Optional[float] = None) -> float:
    """max over frame pairs of |(∇_X A)Y - (∇_Y A)X|"""
    p = np.asarray(p, dtype=float)
    E, _ = gram_schmidt(g(p))
    nA = covariant_derivative_endomorphism(A, g, p, h)  # [a,c,b]
    defect = nA.transpose(1, 0, 2) - nA.transpose(1, 2, 0)  # [c,a,b]: (∇_a A)∂_b - (∇_b A)∂_a
    framed = np.einsum("cab,ai,bj->cij", defect, E, E)
    return float(np.abs(_frame_components(E, framed.reshape(g.dim, -1))).max())


def gauss_residual(g: MetricField, A: EndoField, kappa: float, p: Sequence[float], h: Optional[float] = None) -> float:
    """
    max over frame triples of
    |R(X,Y)Z - <AY,Z>AX + <AX,Z>AY - κ(<Y,Z>X - <X,Z>Y)|.
    """
    p = np.asarray(p, dtype=float)
    E, eps = gram_schmidt(g(p))
    Einv = np.linalg.inv(E)
    eps = np.array(eps, dtype=float)
    R = riemann(g, p, h)
    Rf = np.einsum("abcd,ai,bj,ck,ld->ijkl", R, E, E, E, Einv)
    Af = Einv @ A(p) @ E
    AZ = eps[:, None] * Af  # <A e_j, e_k> = ε_k Af[k,j] at [k,j]
    eye = np.eye(g.dim)
    term_a = np.einsum("kj,li->ijkl", AZ, Af) - np.einsum("ki,lj->ijkl", AZ, Af)
    metric = np.diag(eps)
    term_k = kappa * (np.einsum("jk,il->ijkl", metric, eye) - np.einsum("ik,jl->ijkl", metric, eye))
    return float(np.abs(Rf - term_a - term_k).max())


# families

def invertibility_window(A: EndoField, g: MetricField, kappa: float = 0.0, samples: Optional[int] = None,
                         margin: Optional[float] = None, t_limit: float = 1.0,
                         seed: Optional[int] = None) -> Tuple[float, float]:
    """
    Largest symmetric t-window (-a, a) on which cs_κ(t) Id - sn_κ(t) A stays
    invertible.

    Real eigenvalues of A are sampled at the box center and random points, the
    first singular time on each side is found in closed form, a is the nearer
    of the two, capped at ``t_limit`` and shrunk by the safety ``margin``.
    """
    count = resolve("signature_samples", samples)
    margin = resolve("window_margin", margin)
    rng = make_rng(seed)
    lo = np.array([b[0] for b in g.domain])
    hi = np.array([b[1] for b in g.domain])
    points = [0.5 * (lo + hi)] + list(sample_points(g.domain, count - 1, rng, margin=0.0))
    upper, lower = t_limit, -t_limit
    for p in points:
        for lam in np.linalg.eigvals(A(p)):
            if abs(lam.imag) > 1e-12:
                continue
            for root in _singular_times(float(lam.real), kappa):
                if root > 0:
                    upper = min(upper, root)
                elif root < 0:
                    lower = max(lower, root)
    a = min(upper, -lower) * (1 - margin)
    return -a, a


def _singular_times(lam: float, kappa: float) -> List[float]:
    """Nearest solutions of cs_κ(t) = λ sn_κ(t) on each side of 0"""
    if kappa == 0:
        return [1.0 / lam] if lam != 0 else []
    if kappa > 0:
        c = math.sqrt(kappa)
        first = math.atan2(c, lam) / c
        return [first, first - math.pi / c]
    c = math.sqrt(-kappa)
    if abs(lam) <= c:
        return []
    return [math.atanh(c / lam) / c]


def constant_curvature_weingarten(A: np.ndarray, kappa: float, t: float) -> np.ndarray:
    """W_t = (cs Id - sn A)⁻¹ (κ sn Id + cs A)"""
    eye = np.eye(A.shape[0])
    s, c = sn(kappa, t), cs(kappa, t)
    return np.linalg.solve(c * eye - s * A, kappa * s * eye + c * A)


def _shrink_family(g: MetricField, A: EndoField, kappa: float, window: Tuple[float, float],
                   name: str) -> MetricFamily:
    n = g.dim
    if g.expressions is not None and A.expressions is not None:
        s, c = _sn_cs_exprs(kappa)
        Gm = sympy.Matrix([[e.expr for e in row] for row in g.expressions])
        Am = sympy.Matrix([[e.expr for e in row] for row in A.expressions])
        B = c * sympy.eye(n) - s * Am
        Gt = Gm * B * B
        entries = [[ScalarExpr(Gt[i, j]) for j in range(n)] for i in range(n)]
        # G·B² is symmetric for g-symmetric A; take the upper triangle
        for i in range(n):
            for j in range(i):
                entries[i][j] = entries[j][i]
        return MetricFamily.from_expressions(entries, g.signature, g.domain, window, name=name, validate=False)

    def fn(t: float, x: np.ndarray) -> np.ndarray:
        B = cs(kappa, t) * np.eye(n) - sn(kappa, t) * A(x)
        return g(x) @ B @ B

    return MetricFamily(dim=n, signature=g.signature, domain=g.domain, t_interval=window, fn=fn, name=name)


@dataclass
class PreconditionReport:
    codazzi_residual: float
    gauss_residual: Optional[float] = None
    symmetry_defect: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {"codazzi_residual": self.codazzi_residual, "gauss_residual": self.gauss_residual,
                "symmetry_defect": self.symmetry_defect}


def check_hypersurface_data(g: MetricField, A: EndoField, kappa: Optional[float], samples: int = 8,
                            tol: Optional[float] = None, seed: Optional[int] = None,
                            h: Optional[float] = None) -> PreconditionReport:
    """Codazzi (and, with κ given, Gauss) residuals of (g, A) at sample points"""
    tol = resolve("precondition_tol", tol)
    points = sample_points(g.domain, samples, make_rng(seed), margin=0.1)
    A.check_symmetric(g, points)
    report = PreconditionReport(
        codazzi_residual=max(codazzi_residual(g, A, p, h) for p in points),
        gauss_residual=None if kappa is None else max(gauss_residual(g, A, kappa, p, h) for p in points),
        symmetry_defect=max(A.symmetry_defect(g, p) for p in points),
    )
    if report.codazzi_residual > tol or (report.gauss_residual or 0.0) > tol:
        raise PreconditionError(f"hypersurface data ({g.name}, {A.name}) violate the Gauss/Codazzi equations",
                                report.to_dict())
    return report


def safe_window(A: EndoField, g: MetricField, kappa: float, t_limit: float = 1.0,
                **window_kw) -> Tuple[float, float]:
    """``invertibility_window`` with a warning when the singular set cuts into ``t_limit``"""
    window = invertibility_window(A, g, kappa, t_limit=t_limit, **window_kw)
    if window[1] < t_limit * (1 - resolve("window_margin", window_kw.get("margin"))) - 1e-12:
        logger.warning("⚠️ t-window shrunk to [%.4f, %.4f] by singular cs - sn·A", *window)
    return window


def constant_curvature_family(g: MetricField, A: EndoField, kappa: float, check: bool = True,
                              t_limit: float = 1.0, **window_kw) -> MetricFamily:
    """The family whose cylinder has constant sectional curvature κ"""
    if check:
        check_hypersurface_data(g, A, kappa)
    window = safe_window(A, g, kappa, t_limit, **window_kw)
    return _shrink_family(g, A, kappa, window, name=f"cc[{g.name},{A.name},κ={kappa:g}]")


def killing_family(g: MetricField, A: EndoField, check: bool = True, t_limit: float = 1.0,
                   **window_kw) -> MetricFamily:
    """g_t = g((Id - tA)² ·, ·)"""
    if check:
        check_hypersurface_data(g, A, None)
    window = safe_window(A, g, 0.0, t_limit, **window_kw)
    return _shrink_family(g, A, 0.0, window, name=f"killing[{g.name},{A.name}]")


# verification

def riccati_residual(fam: MetricFamily, kappa: float, t: float, x: Sequence[float], h: Optional[float] = None) -> float:
    """max |R(X,ν)ν - κX| over coordinate directions X"""
    y = np.concatenate([[float(t)], np.asarray(x, dtype=float)])
    R = riemann(fam.cylinder, y, h)
    return float(np.abs(R[1:, 0, 0, :] - kappa * np.eye(fam.dim + 1)[1:, :]).max())


@dataclass
class CurvatureCheck:
    """📊 Constant-curvature verification of a cylinder"""

    kappa: float
    window: Tuple[float, float]
    samples: int
    tangential: float = 0.0
    normal: float = 0.0
    riccati: float = 0.0
    ricci: float = 0.0
    weingarten_at_zero: Optional[float] = None

    @property
    def curvature_residual(self) -> float:
        return max(self.tangential, self.normal, self.riccati)

    def passed(self, tol: Optional[float] = None) -> bool:
        if self.weingarten_at_zero is not None and not self.weingarten_at_zero <= WEINGARTEN_TOL:
            return False
        return max(self.curvature_residual, self.ricci) <= resolve("curvature_tol", tol)

    def to_dict(self) -> Dict[str, Any]:
        return {"kappa": self.kappa, "window": list(self.window), "samples": self.samples,
                "tangential": self.tangential, "normal": self.normal, "riccati": self.riccati,
                "ricci": self.ricci, "curvature_residual": self.curvature_residual,
                "weingarten_at_zero": self.weingarten_at_zero}


def verify_constant_curvature(fam: MetricFamily, kappa: float, samples: int = 20, seed: Optional[int] = None,
                              A: Optional[EndoField] = None, h: Optional[float] = None) -> CurvatureCheck:
    """
    Compare the brute-force curvature of dt² + g_t with κ(<Y,Z>X - <X,Z>Y)
    at random interior points, split into tangential, normal and Riccati parts.
    """
    rng = make_rng(seed)
    box = (fam.t_interval,) + tuple(fam.domain)
    check = CurvatureCheck(kappa=kappa, window=fam.t_interval, samples=samples)
    n1 = fam.dim + 1
    for y in sample_points(box, samples, rng, margin=0.05):
        Z = fam.cylinder
        G = Z(y)
        R = riemann(Z, y, h)
        Rl = lower_riemann(R, G)
        model = kappa * (np.einsum("bc,ad->abcd", G, G) - np.einsum("ac,bd->abcd", G, G))
        diff = np.abs(Rl - model)
        check.tangential = max(check.tangential, float(diff[1:, 1:, 1:, 1:].max()))
        check.normal = max(check.normal, float(diff[1:, 1:, 1:, 0].max()))
        check.riccati = max(check.riccati, float(diff[1:, 0, 0, 1:].max()))
        ric = ricci_from_riemann(R)
        check.ricci = max(check.ricci, float(np.abs(ric - (n1 - 1) * kappa * G).max()))
    if A is not None:
        x0 = 0.5 * (np.array([b[0] for b in fam.domain]) + np.array([b[1] for b in fam.domain]))
        check.weingarten_at_zero = float(np.abs(weingarten(fam, 0.0, x0) - A(x0)).max())
    return check


@dataclass
class EmbeddingReport:
    """📊 Everything ``embed verify`` reports"""

    codazzi_residual: float
    gauss_residual: float
    window: Tuple[float, float]
    curvature: CurvatureCheck
    tol: float

    @property
    def passed(self) -> bool:
        return self.curvature.passed(self.tol)

    def to_dict(self) -> Dict[str, Any]:
        return {"codazzi_residual": self.codazzi_residual, "gauss_residual": self.gauss_residual,
                "window": list(self.window), "curvature_residual": self.curvature.curvature_residual,
                "details": self.curvature.to_dict(), "pass": self.passed}


def verify_embedding(g: MetricField, A: EndoField, kappa: float, samples: int = 20, tol: Optional[float] = None,
                     seed: Optional[int] = None) -> EmbeddingReport:
    """
    Report Gauss/Codazzi residuals of the input and the curvature residual of
    the constructed cylinder; invalid input is still built so that negative
    controls show a large residual instead of an error.
    """
    rng = make_rng(seed)
    points = sample_points(g.domain, min(samples, 8), rng, margin=0.1)
    codazzi = max(codazzi_residual(g, A, p) for p in points)
    gauss = max(gauss_residual(g, A, kappa, p) for p in points)
    fam = constant_curvature_family(g, A, kappa, check=False)
    check = verify_constant_curvature(fam, kappa, samples=samples, seed=seed, A=A)
    return EmbeddingReport(codazzi_residual=codazzi, gauss_residual=gauss, window=fam.t_interval,
                           curvature=check, tol=resolve("curvature_tol", tol))
