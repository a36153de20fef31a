"""
🌌 Lorentzian Inner Products
===========================

Points of the space of Lorentzian inner products on ℝⁿ, the endomorphism
relating two of them, the two-dimensional de Sitter picture, and geodesics
g_t = g₀(exp(t·a)·,·) generated by g₀-symmetric endomorphisms a.

In dimension two the question whether g₀ and g₁ are joined by a geodesic is
settled by the trace of the (unimodular) relating endomorphism alone;
``classify_2d`` implements that decision and returns the generator.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag, cholesky, expm, null_space

from geometry.chart_tensor import signature_of
from utils.config import resolve
from utils.errors import (ConditioningError, DimensionMismatchError, NoGeneratorError, SchemaError,
                          SignatureMismatchError, VolumeMismatchError)

logger = logging.getLogger(__name__)

# standard area form ω(x, y) = x₀y₁ - x₁y₀
OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])

_UNIMODULAR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LorentzProduct:
    """🔍 A symmetric n×n matrix of signature (n-1, 1)"""

    matrix: np.ndarray
    normalized: bool = False

    @classmethod
    def from_matrix(cls, G: Union[np.ndarray, Sequence[Sequence[float]]], normalize: bool = False,
                    tol: float = 1e-12) -> "LorentzProduct":
        G = np.asarray(G, dtype=float)
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] < 2:
            raise SchemaError("a Lorentzian product needs a square matrix of size ≥ 2", {"shape": list(G.shape)})
        scale = max(1.0, float(np.abs(G).max()))
        if float(np.abs(G - G.T).max()) > tol * scale * 1e3:
            raise SchemaError("matrix is not symmetric", {"defect": float(np.abs(G - G.T).max())})
        G = 0.5 * (G + G.T)
        n = G.shape[0]
        pos, neg = signature_of(G)
        if (pos, neg) != (n - 1, 1):
            raise SignatureMismatchError(f"expected signature ({n - 1},1), found ({pos},{neg})",
                                         {"expected": [n - 1, 1], "found": [pos, neg]})
        if normalize:
            G = normalize_volume(G)
        return cls(matrix=G, normalized=normalize)

    @classmethod
    def from_json(cls, obj: Any) -> "LorentzProduct":
        if isinstance(obj, dict):
            if "matrix" not in obj:
                raise SchemaError("Lorentz product JSON needs a 'matrix' entry", {"keys": sorted(obj)})
            return cls.from_matrix(obj["matrix"], normalize=bool(obj.get("normalize", False)))
        return cls.from_matrix(obj)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def __call__(self, v: np.ndarray, w: np.ndarray) -> float:
        return float(np.asarray(v) @ self.matrix @ np.asarray(w))

    def to_dict(self) -> Dict[str, Any]:
        return {"matrix": self.matrix.tolist(), "normalized": self.normalized}


Product = Union[LorentzProduct, np.ndarray, Sequence[Sequence[float]]]


def as_product(g: Product) -> LorentzProduct:
    return g if isinstance(g, LorentzProduct) else LorentzProduct.from_matrix(g)


def normalize_volume(G: np.ndarray) -> np.ndarray:
    """Rescale G so that |det G| = 1"""
    G = np.asarray(G, dtype=float)
    d = abs(float(np.linalg.det(G)))
    return G * d ** (-1.0 / G.shape[0])


def symmetry_residual(G: np.ndarray, a: np.ndarray) -> float:
    """max |G a - (G a)ᵀ|: zero iff a is G-symmetric"""
    Ga = G @ a
    return float(np.abs(Ga - Ga.T).max())


def relating_endomorphism(g0: Product, g1: Product) -> np.ndarray:
    """A = G₀⁻¹G₁, so that g₁ = g₀(A·,·)"""
    g0, g1 = as_product(g0), as_product(g1)
    if g0.n != g1.n:
        raise DimensionMismatchError(f"dimensions differ: {g0.n} vs {g1.n}", {"g0": g0.n, "g1": g1.n})
    A = np.linalg.solve(g0.matrix, g1.matrix)
    scale = max(1.0, float(np.abs(g1.matrix).max()))
    residuals = {"g0": symmetry_residual(g0.matrix, A), "g1": symmetry_residual(g1.matrix, A)}
    if max(residuals.values()) > 1e-8 * scale * max(1.0, float(np.abs(A).max())):
        raise ConditioningError("relating endomorphism lost symmetry", residuals)
    return A


def act_on_metric(gamma: np.ndarray, G: np.ndarray) -> np.ndarray:
    """γ·g = g(γ⁻¹·, γ⁻¹·)"""
    inv = np.linalg.inv(gamma)
    return inv.T @ G @ inv


def lorentz_gauge(G: np.ndarray) -> np.ndarray:
    """
    B with Bᵀ G B = diag(1, …, 1, -1): the columns form a G-pseudo-orthonormal
    basis, timelike vector last.
    """
    values, vectors = np.linalg.eigh(0.5 * (G + G.T))
    order = [i for i in range(len(values)) if values[i] > 0] + [i for i in range(len(values)) if values[i] < 0]
    if len(order) != len(values):
        raise ConditioningError("metric has a zero eigenvalue", {"eigenvalues": values.tolist()})
    return vectors[:, order] / np.sqrt(np.abs(values[order]))


# ---------------------------------------------------------------------------
# de Sitter picture (n = 2)
# ---------------------------------------------------------------------------

@dataclass
class DeSitterPoint:
    """I_g with g = ω(·, I_g·): trace free, determinant -1"""

    matrix: np.ndarray
    omega: np.ndarray

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def residuals(self) -> Dict[str, float]:
        return {"trace": abs(self.trace), "det": abs(self.det + 1.0),
                "involution": float(np.abs(self.matrix @ self.matrix - np.eye(2)).max())}

    def to_dict(self) -> Dict[str, Any]:
        return {"matrix": self.matrix.tolist(), "omega": self.omega.tolist(), "residuals": self.residuals()}


def _area_form(omega: Optional[np.ndarray]) -> np.ndarray:
    Om = OMEGA if omega is None else np.asarray(omega, dtype=float)
    if Om.shape != (2, 2) or float(np.abs(Om + Om.T).max()) > 1e-12 or abs(Om[0, 1]) < 1e-12:
        raise SchemaError("area form must be a nonzero antisymmetric 2×2 matrix", {"omega": Om.tolist()})
    return Om


def to_de_sitter(g: Product, omega: Optional[np.ndarray] = None) -> DeSitterPoint:
    g = as_product(g)
    if g.n != 2:
        raise DimensionMismatchError("the de Sitter picture is two-dimensional", {"n": g.n})
    Om = _area_form(omega)
    if abs(abs(g.det) - float(np.linalg.det(Om))) > _UNIMODULAR_TOL * float(np.linalg.det(Om)):
        raise VolumeMismatchError("volume form of g differs from ω; normalize first",
                                  {"det_g": g.det, "det_omega": float(np.linalg.det(Om))})
    return DeSitterPoint(matrix=np.linalg.solve(Om, g.matrix), omega=Om)


def from_de_sitter(point: Union[DeSitterPoint, np.ndarray], omega: Optional[np.ndarray] = None) -> LorentzProduct:
    if isinstance(point, DeSitterPoint):
        I, Om = point.matrix, point.omega
    else:
        I, Om = np.asarray(point, dtype=float), _area_form(omega)
    return LorentzProduct.from_matrix(Om @ I)


def de_sitter_product(I: Union[DeSitterPoint, np.ndarray], J: Union[DeSitterPoint, np.ndarray]) -> float:
    """⟨I, J⟩ = ½ tr(IJ)"""
    I = I.matrix if isinstance(I, DeSitterPoint) else np.asarray(I)
    J = J.matrix if isinstance(J, DeSitterPoint) else np.asarray(J)
    return 0.5 * float(np.trace(I @ J))


def light_cone(I: Union[DeSitterPoint, np.ndarray]) -> Dict[int, np.ndarray]:
    """The two null lines of g, as the ±1 eigenlines of I_g"""
    I = I.matrix if isinstance(I, DeSitterPoint) else np.asarray(I, dtype=float)
    values, vectors = np.linalg.eig(I)
    out: Dict[int, np.ndarray] = {}
    for value, vec in zip(values.real, vectors.T.real):
        out[1 if value > 0 else -1] = vec / np.linalg.norm(vec)
    return out


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

class VerdictKind(str, Enum):
    UNIQUE_TIMELIKE = "UniqueTimelike"
    UNIQUE_NULL = "UniqueNull"
    UNIQUE_SPACELIKE = "UniqueSpacelike"
    UNIQUE_NILPOTENT_NULL = "UniqueNilpotentNull"
    NO_GEODESIC = "NoGeodesic"
    INFINITELY_MANY_SPACELIKE = "InfinitelyManySpacelike"


UNIQUE_KINDS = (VerdictKind.UNIQUE_TIMELIKE, VerdictKind.UNIQUE_NULL, VerdictKind.UNIQUE_SPACELIKE,
                VerdictKind.UNIQUE_NILPOTENT_NULL)

Family = Callable[[float, int], np.ndarray]


@dataclass
class ConnectionVerdict:
    """
    📊 Outcome of a connectivity question between g₀ and g₁.

    ``generator`` is present for unique verdicts. The antipodal verdict
    carries ``family`` instead, mapping (s, branch) to a generator; the
    nilpotent verdict carries its block data in ``nilpotent``.
    """

    kind: VerdictKind
    g0: np.ndarray
    g1: np.ndarray
    generator: Optional[np.ndarray] = None
    family: Optional[Family] = None
    nilpotent: Optional[Dict[str, Any]] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def unique(self) -> bool:
        return self.kind in UNIQUE_KINDS

    @property
    def connected(self) -> bool:
        return self.kind != VerdictKind.NO_GEODESIC

    def member(self, s: float = 0.0, branch: int = 1) -> np.ndarray:
        """Generator of one geodesic of the antipodal family"""
        if self.family is None:
            raise NoGeneratorError(f"verdict {self.kind.value} has no geodesic family")
        return self.family(float(s), 1 if branch >= 0 else -1)

    def residuals(self) -> Dict[str, float]:
        """exp(a) against A and g₀-symmetry of a, for the carried generator"""
        a = self.generator if self.generator is not None else (self.member() if self.family else None)
        if a is None:
            return {}
        A = np.linalg.solve(self.g0, self.g1)
        return {"exp": float(np.abs(expm(a) - A).max()), "symmetry": symmetry_residual(self.g0, a),
                "trace": abs(float(np.trace(a)) - float(np.log(abs(np.linalg.det(A)))))}

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"verdict": self.kind.value, "diagnostics": self.diagnostics}
        if self.generator is not None:
            out["generator"] = self.generator.tolist()
        if self.family is not None:
            out["family"] = {"parameter": "s ∈ ℝ, branch ∈ {+1, -1}",
                             "sample": self.member(0.0, 1).tolist()}
        if self.nilpotent is not None:
            out["nilpotent"] = {"k": self.nilpotent["k"], "x": np.asarray(self.nilpotent["x"]).tolist()}
        out["residuals"] = self.residuals()
        return out


def _antipodal_family(G0: np.ndarray, log_scale: float) -> Family:
    """
    Generators c·Id + πK with K g₀-symmetric and K² = -Id. In a
    pseudo-orthonormal basis K = [[sinh s, cosh s], [-cosh s, -sinh s]] up to
    sign.
    """
    B = lorentz_gauge(G0)
    Binv = np.linalg.inv(B)

    def member(s: float, branch: int) -> np.ndarray:
        K = branch * np.array([[np.sinh(s), np.cosh(s)], [-np.cosh(s), -np.sinh(s)]])
        return log_scale * np.eye(2) + np.pi * (B @ K @ Binv)

    return member


def classify_2d(g0: Product, g1: Product, fixed_volume: bool = True, tau_tr: Optional[float] = None) -> ConnectionVerdict:
    """
    Decide by tr(A) for unimodular A. With ``fixed_volume`` both inputs
    must have |det| = 1; otherwise the homothety ½ log det A · Id is split
    off first and added back to the generator.
    """
    tau = resolve("tau_tr", tau_tr)
    g0, g1 = as_product(g0), as_product(g1)
    if g0.n != 2 or g1.n != 2:
        raise DimensionMismatchError("classify_2d needs 2×2 products", {"g0": g0.n, "g1": g1.n})
    if fixed_volume:
        for label, g in (("g0", g0), ("g1", g1)):
            if abs(abs(g.det) - 1.0) > _UNIMODULAR_TOL:
                raise VolumeMismatchError(f"{label} is not unimodular (det {g.det:.6g}); normalize first",
                                          {label: g.det})
    G0, G1 = g0.matrix, g1.matrix
    A = relating_endomorphism(g0, g1)
    d = float(np.linalg.det(A))
    c = 0.5 * np.log(d)
    U = A / np.sqrt(d)
    tr = float(np.trace(U))
    I2 = np.eye(2)
    diagnostics: Dict[str, Any] = {"trace": tr, "det": d}
    verdict = ConnectionVerdict(kind=VerdictKind.NO_GEODESIC, g0=G0, g1=G1, diagnostics=diagnostics)

    if tr > 2.0 + tau:
        s = float(np.arccosh(0.5 * tr))
        verdict.kind = VerdictKind.UNIQUE_TIMELIKE
        verdict.generator = c * I2 + (s / np.sinh(s)) * (U - np.cosh(s) * I2)
    elif tr >= 2.0 - tau:
        N = U - I2
        size = float(np.abs(N).max())
        if size <= np.sqrt(tau):
            verdict.kind = VerdictKind.UNIQUE_TIMELIKE
            verdict.generator = c * I2
        else:
            square = float(np.abs(N @ N).max())
            if square > 1e-6 * (1.0 + size ** 2):
                raise ConditioningError("parabolic relating endomorphism is not unipotent",
                                        {"trace": tr, "nilpotency_defect": square})
            verdict.kind = VerdictKind.UNIQUE_NULL
            verdict.generator = c * I2 + N - 0.5 * N @ N
    elif tr > -2.0 + tau:
        theta = float(np.arccos(0.5 * tr))
        verdict.kind = VerdictKind.UNIQUE_SPACELIKE
        verdict.generator = c * I2 + (theta / np.sin(theta)) * (U - np.cos(theta) * I2)
    elif tr >= -2.0 - tau:
        defect = float(np.abs(U + I2).max())
        diagnostics["antipodal_defect"] = defect
        if defect <= np.sqrt(tau):
            verdict.kind = VerdictKind.INFINITELY_MANY_SPACELIKE
            verdict.family = _antipodal_family(G0, c)
    logger.debug("🔍 2D verdict %s at tr(A) = %.12g", verdict.kind.value, tr)
    return verdict


# ---------------------------------------------------------------------------
# geodesics
# ---------------------------------------------------------------------------

def nilpotent_path(k: float, x: np.ndarray, t: float) -> np.ndarray:
    """B_t = k^t (Id + t x + ½ t(t-1) x²) for x³ = 0"""
    x = np.asarray(x, dtype=float)
    return k ** t * (np.eye(x.shape[0]) + t * x + 0.5 * t * (t - 1.0) * x @ x)


def geodesic_endomorphism(verdict: ConnectionVerdict, t: float, member: Optional[Tuple[float, int]] = None) -> np.ndarray:
    """B_t with g_t = g₀(B_t·,·)"""
    nil = verdict.nilpotent
    if nil is not None:
        C = nil["basis"]
        blocks = [nilpotent_path(nil["k"], nil["x"], t)]
        if nil["complement_generator"].size:
            blocks.append(expm(t * nil["complement_generator"]))
        return C @ block_diag(*blocks) @ np.linalg.inv(C)
    if verdict.generator is not None:
        a = verdict.generator
    elif verdict.family is not None:
        s, branch = member if member is not None else (0.0, 1)
        a = verdict.member(s, branch)
    else:
        raise NoGeneratorError(f"no geodesic joins g0 and g1 (verdict {verdict.kind.value})",
                               {"verdict": verdict.kind.value})
    return expm(t * a)


def connecting_geodesic(verdict: ConnectionVerdict, t: float, member: Optional[Tuple[float, int]] = None) -> LorentzProduct:
    """g_t = g₀(exp(t·a)·,·); the signature is checked on construction"""
    B = geodesic_endomorphism(verdict, t, member)
    return LorentzProduct.from_matrix(verdict.g0 @ B, tol=1e-9)


def geodesic_samples(verdict: ConnectionVerdict, samples: int, member: Optional[Tuple[float, int]] = None) -> List[np.ndarray]:
    """g_t at ``samples`` equally spaced t in [0, 1]"""
    return [connecting_geodesic(verdict, float(t), member).matrix for t in np.linspace(0.0, 1.0, samples)]


def definite_log(G0: np.ndarray, G1: np.ndarray) -> np.ndarray:
    """Logarithm of A = G₀⁻¹G₁ for positive definite G₀, G₁ via Cholesky and eigh"""
    L = cholesky(G0, lower=True)
    Linv = np.linalg.inv(L)
    M = Linv @ G1 @ Linv.T
    values, vectors = np.linalg.eigh(0.5 * (M + M.T))
    if np.any(values <= 0):
        raise ConditioningError("relating endomorphism has a non-positive eigenvalue on a definite block",
                                {"eigenvalues": values.tolist()})
    logM = (vectors * np.log(values)) @ vectors.T
    return Linv.T @ logM @ L.T


def definite_geodesic(g0: np.ndarray, g1: np.ndarray, t: float) -> np.ndarray:
    """g₀(A^t·,·) between positive definite inner products"""
    G0 = np.asarray(g0, dtype=float)
    return G0 @ expm(t * definite_log(G0, np.asarray(g1, dtype=float)))


def random_lorentz_pair(rng: np.random.Generator, n: int, scale: float = 0.3) -> Tuple[np.ndarray, np.ndarray]:
    """
    Random Lorentzian g₀ = Mᵀ η M and g₁ = g₀(exp(a)·,·) for a random
    g₀-symmetric a = g₀⁻¹S, so the pair is connected by construction.
    """
    eta = np.diag([1.0] * (n - 1) + [-1.0])
    M = np.eye(n) + 0.2 * rng.standard_normal((n, n))
    G0 = M.T @ eta @ M
    S = rng.standard_normal((n, n))
    S = 0.5 * scale * (S + S.T)
    G1 = G0 @ expm(np.linalg.solve(G0, S))
    return G0, 0.5 * (G1 + G1.T)


# ---------------------------------------------------------------------------
# the symmetric space itself
# ---------------------------------------------------------------------------

def symmetric_space_signature(r: int, s: int) -> Dict[str, Tuple[int, int]]:
    """
    Signature of (a, b) -> tr(ab) on trace-free g₀-symmetric endomorphisms,
    g₀ = diag(1^r, (-1)^s), next to the closed form.
    """
    n = r + s
    eta = np.diag([1.0] * r + [-1.0] * s)
    basis: List[np.ndarray] = []
    for i in range(n):
        for j in range(i, n):
            S = np.zeros((n, n))
            S[i, j] = S[j, i] = 1.0
            basis.append(eta @ S)
    gram = np.array([[np.trace(a @ b) for b in basis] for a in basis])
    traces = np.array([[np.trace(a) for a in basis]])
    N = null_space(traces)
    values = np.linalg.eigvalsh(N.T @ gram @ N)
    numeric = (int(np.sum(values > 1e-9)), int(np.sum(values < -1e-9)))
    expected = ((r * (r + 1) + s * (s + 1)) // 2 - 1, r * s)
    return {"numeric": numeric, "expected": expected}
