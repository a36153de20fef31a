"""
📐 Chart Tensor Calculus
=======================

Numerical tensor calculus on a single coordinate chart: metric evaluation,
Christoffel symbols, Riemann, Ricci and scalar curvature, orthonormal frames
and frame connection coefficients. Every derivative goes through
``utils.numerics.central_diff`` (central differences plus one Richardson
level), so all curvature quantities share one error model.

Conventions: R(X,Y)Z = ∇_X∇_Y Z - ∇_Y∇_X Z - ∇_[X,Y] Z and
ric(Y,Z) = tr(X -> R(X,Y)Z). The array ``R[a,b,c,d]`` is the d-th component
of R(∂_a,∂_b)∂_c.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from algebra.clifford import Signature
from geometry.expressions import ScalarExpr, compile_matrix, expr_grid
from utils.config import resolve
from utils.errors import (BoundaryMarginError, DegenerateMetricError, GaugeFailureError,
                          SchemaError, SignatureMismatchError)
from utils.numerics import central_diff, gradient, make_rng

logger = logging.getLogger(__name__)

Box = Tuple[Tuple[float, float], ...]
MatrixFn = Callable[[np.ndarray], np.ndarray]


def signature_of(matrix: np.ndarray, tol: float = 1e-12) -> Tuple[int, int]:
    """(positive, negative) eigenvalue counts; raises on a (near) zero eigenvalue"""
    values = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
    scale = max(1.0, float(np.abs(values).max()))
    if np.any(np.abs(values) <= tol * scale):
        raise DegenerateMetricError("metric matrix is degenerate", {"eigenvalues": values.tolist()})
    return int(np.sum(values > 0)), int(np.sum(values < 0))


@dataclass(frozen=True, eq=False)
class MetricField:
    """
    A semi-Riemannian metric on a coordinate box.

    ``fn`` maps a point to the symmetric coefficient matrix. Metrics built
    from expressions keep them in ``expressions`` for serialization.
    """

    dim: int
    signature: Signature
    domain: Box
    fn: MatrixFn
    name: str = "custom"
    expressions: Optional[List[List[ScalarExpr]]] = None

    def __call__(self, x: Sequence[float]) -> np.ndarray:
        g = np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)
        return 0.5 * (g + g.T)

    @classmethod
    def from_expressions(cls, entries: Sequence[Sequence[Any]], signature: Signature, domain: Sequence[Sequence[float]],
                         name: str = "custom", t: float = 0.0, validate: bool = True) -> "MetricField":
        """Build from a grid of expressions; the upper triangle is authoritative"""
        grid = expr_grid(entries)
        n = len(grid)
        if any(len(row) != n for row in grid):
            raise SchemaError("metric coefficients must form a square array")
        for i in range(n):
            for j in range(i):
                if not _same(grid[i][j], grid[j][i]):
                    raise SchemaError(f"metric is not symmetric at ({i},{j})")
                grid[i][j] = grid[j][i]
        compiled = compile_matrix(grid, n)
        field_ = cls(dim=n, signature=signature, domain=_box(domain, n), fn=lambda x: compiled(t, x),
                     name=name, expressions=grid)
        if validate:
            field_.validate()
        return field_

    def validate(self, samples: Optional[int] = None, seed: int = 0) -> None:
        """Eigenvalue-count signature check at sample points of the box"""
        if self.signature.n != self.dim:
            raise SignatureMismatchError(f"signature {self.signature} for a {self.dim}-dimensional chart")
        count = resolve("signature_samples", samples)
        rng = make_rng(seed)
        lo = np.array([b[0] for b in self.domain])
        hi = np.array([b[1] for b in self.domain])
        points = [0.5 * (lo + hi)] + list(lo + (hi - lo) * rng.random((count - 1, self.dim)))
        expected = (self.signature.r, self.signature.s)
        for p in points:
            got = signature_of(self(p))
            if got != expected:
                raise SignatureMismatchError(f"metric {self.name} has signature {got} at {p.tolist()}, expected {expected}",
                                             {"point": p.tolist(), "found": list(got)})

    def interior(self, p: Sequence[float], margin: float) -> bool:
        return all(lo + margin <= x <= hi - margin for x, (lo, hi) in zip(p, self.domain))

    def check_margin(self, p: Sequence[float], margin: float) -> None:
        if not self.interior(p, margin):
            raise BoundaryMarginError(f"point {list(p)} closer than {margin} to the boundary of {self.name}",
                                      {"point": list(map(float, p)), "margin": margin})

    def to_json(self) -> Dict[str, Any]:
        if self.expressions is None:
            raise SchemaError(f"metric {self.name} has no expression form")
        return {"dim": self.dim, "signature": [self.signature.r, self.signature.s],
                "domain": [list(b) for b in self.domain],
                "g": [[e.to_json() for e in row] for row in self.expressions]}


def _same(a: ScalarExpr, b: ScalarExpr) -> bool:
    return (a.expr - b.expr).expand() == 0


def _box(domain: Sequence[Sequence[float]], n: int) -> Box:
    box = tuple((float(lo), float(hi)) for lo, hi in domain)
    if len(box) != n or any(lo >= hi for lo, hi in box):
        raise SchemaError(f"domain must be {n} intervals with lo < hi")
    return box


def metric_from_json(obj: Dict[str, Any]) -> MetricField:
    """MetricField JSON: {"dim", "signature", "domain", "g"}"""
    try:
        sig = Signature(*obj["signature"])
        field_ = MetricField.from_expressions(obj["g"], sig, obj["domain"], name=obj.get("name", "custom"))
    except KeyError as e:
        raise SchemaError(f"metric JSON is missing {e}") from e
    if field_.dim != int(obj.get("dim", field_.dim)):
        raise SchemaError("declared dim does not match coefficients")
    return field_


# Christoffel symbols and curvature

def _inverse(G: np.ndarray) -> np.ndarray:
    if np.linalg.cond(G) > 1e12:
        raise DegenerateMetricError("singular metric matrix", {"cond": float(np.linalg.cond(G))})
    return np.linalg.inv(G)


def metric_derivatives(g: MetricField, p: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    """dg[l,i,j] = ∂_l g_ij"""
    return gradient(g, np.asarray(p, dtype=float), h)


def _christoffel_raw(g: MetricField, p: np.ndarray, h: float) -> np.ndarray:
    ginv = _inverse(g(p))
    dg = metric_derivatives(g, p, h)
    lowered = dg.transpose(1, 2, 0) + dg.transpose(2, 1, 0) - dg
    # lowered[i,j,l] = ∂_i g_jl + ∂_j g_il - ∂_l g_ij
    return 0.5 * np.einsum("kl,ijl->kij", ginv, lowered)


def christoffel(g: MetricField, p: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    """Gamma[k,i,j] = Γ^k_ij of the Levi-Civita connection"""
    h = resolve("fd_step", h)
    p = np.asarray(p, dtype=float)
    g.check_margin(p, 2 * h)
    return _christoffel_raw(g, p, h)


def riemann(g: MetricField, p: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    """R[a,b,c,d] = d-component of R(∂_a,∂_b)∂_c"""
    h = resolve("fd_step", h)
    p = np.asarray(p, dtype=float)
    g.check_margin(p, 4 * h)
    gamma = _christoffel_raw(g, p, h)
    dgamma = gradient(lambda x: _christoffel_raw(g, x, h), p, h)  # [a,k,i,j]
    return (np.einsum("adbc->abcd", dgamma) - np.einsum("bdac->abcd", dgamma)
            + np.einsum("dae,ebc->abcd", gamma, gamma) - np.einsum("dbe,eac->abcd", gamma, gamma))


def lower_riemann(R: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Rl[a,b,c,d] = <R(∂_a,∂_b)∂_c, ∂_d>"""
    return np.einsum("abce,ed->abcd", R, G)


def lowered_riemann(g: MetricField, p: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    return lower_riemann(riemann(g, p, h), g(p))


def ricci_from_riemann(R: np.ndarray) -> np.ndarray:
    return np.einsum("abca->bc", R)


def ricci(g: MetricField, p: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    """ric[b,c] = tr(X -> R(X,∂_b)∂_c)"""
    return ricci_from_riemann(riemann(g, p, h))


def scalar(g: MetricField, p: Sequence[float], h: Optional[float] = None) -> float:
    ric = ricci(g, p, h)
    return float(np.einsum("bc,bc", _inverse(g(p)), ric))


def sectional_curvature(g: MetricField, p: Sequence[float], X: np.ndarray, Y: np.ndarray,
                        h: Optional[float] = None) -> float:
    G = g(p)
    Rl = lowered_riemann(g, p, h)
    num = np.einsum("abcd,a,b,c,d", Rl, X, Y, Y, X)
    den = (X @ G @ X) * (Y @ G @ Y) - (X @ G @ Y) ** 2
    if abs(den) < 1e-14:
        raise DegenerateMetricError("degenerate tangent plane for sectional curvature")
    return float(num / den)


def symmetry_residuals(Rl: np.ndarray, R: np.ndarray) -> Dict[str, float]:
    """Defects of the algebraic curvature symmetries and the first Bianchi identity"""
    bianchi = R + np.einsum("bcad->abcd", R) + np.einsum("cabd->abcd", R)
    return {
        "antisym_first": float(np.abs(Rl + Rl.transpose(1, 0, 2, 3)).max()),
        "antisym_last": float(np.abs(Rl + Rl.transpose(0, 1, 3, 2)).max()),
        "pair_symmetry": float(np.abs(Rl - Rl.transpose(2, 3, 0, 1)).max()),
        "bianchi": float(np.abs(bianchi).max()),
    }


# covariant derivatives of tensor fields

def covariant_derivative_bilinear(k: MatrixFn, g: MetricField, p: Sequence[float],
                                  h: Optional[float] = None) -> np.ndarray:
    """nk[a,b,c] = (∇_a k)_bc for a symmetric (0,2) field"""
    p = np.asarray(p, dtype=float)
    gamma = christoffel(g, p, h)
    K = np.asarray(k(p))
    dk = gradient(k, p, h)
    return dk - np.einsum("dab,dc->abc", gamma, K) - np.einsum("dac,bd->abc", gamma, K)


def divergence_bilinear(k: MatrixFn, g: MetricField, p: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    """(div k)_c = g^ab (∇_a k)_bc"""
    nk = covariant_derivative_bilinear(k, g, p, h)
    return np.einsum("ab,abc->c", _inverse(g(p)), nk)


def covariant_derivative_endomorphism(W: MatrixFn, g: MetricField, p: Sequence[float],
                                      h: Optional[float] = None) -> np.ndarray:
    """nW[a,c,b] = (∇_a W)^c_b with W[c,b] the c-component of W(∂_b)"""
    p = np.asarray(p, dtype=float)
    gamma = christoffel(g, p, h)
    Wp = np.asarray(W(p))
    dW = gradient(W, p, h)
    return dW + np.einsum("cad,db->acb", gamma, Wp) - np.einsum("dab,cd->acb", gamma, Wp)


def divergence_endomorphism(W: MatrixFn, g: MetricField, p: Sequence[float], h: Optional[float] = None) -> np.ndarray:
    """(div W)^c = g^ab (∇_a W)^c_b, returned as a coordinate vector"""
    nW = covariant_derivative_endomorphism(W, g, p, h)
    return np.einsum("ab,acb->c", _inverse(g(p)), nW)


# frames

@dataclass(frozen=True, eq=False)
class Frame:
    """Orthonormal frame at a point; columns of ``vectors`` are e_1..e_n"""

    point: np.ndarray
    vectors: np.ndarray
    signs: Tuple[int, ...] = field(default_factory=tuple)

    def residual(self, G: np.ndarray) -> float:
        gram = self.vectors.T @ G @ self.vectors
        return float(np.abs(gram - np.diag(self.signs)).max())

    def components(self, v: np.ndarray) -> np.ndarray:
        """Frame components of a coordinate vector"""
        return np.linalg.solve(self.vectors, v)


def gram_schmidt(G: np.ndarray, tau: Optional[float] = None) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """
    Orthonormalize the coordinate vectors in coordinate order.

    Spacelike vectors are then listed before timelike ones (stable order) and
    the last vector is negated if needed for a positively oriented frame.
    """
    tau = resolve("tau_frame", tau)
    n = G.shape[0]
    vecs: List[np.ndarray] = []
    signs: List[int] = []
    scale = max(1.0, float(np.abs(G).max()))
    for k in range(n):
        v = np.zeros(n)
        v[k] = 1.0
        for e, s in zip(vecs, signs):
            v = v - s * (e @ G @ v) * e
        norm = float(v @ G @ v)
        if abs(norm) <= tau * scale:
            raise GaugeFailureError(f"null intermediate vector at pivot {k}; use an adapted chart",
                                    {"pivot": k, "norm": norm})
        vecs.append(v / np.sqrt(abs(norm)))
        signs.append(1 if norm > 0 else -1)
    order = [i for i in range(n) if signs[i] > 0] + [i for i in range(n) if signs[i] < 0]
    E = np.stack([vecs[i] for i in order], axis=1)
    eps = tuple(signs[i] for i in order)
    if np.linalg.det(E) < 0:
        E[:, -1] = -E[:, -1]
    return E, eps


def orthonormal_frame(g: MetricField, p: Sequence[float], tau: Optional[float] = None) -> Frame:
    p = np.asarray(p, dtype=float)
    G = g(p)
    E, eps = gram_schmidt(G, tau)
    if eps != g.signature.eps:
        raise SignatureMismatchError(f"frame signs {eps} do not match {g.signature}")
    frame = Frame(point=p, vectors=E, signs=eps)
    err = frame.residual(G)
    if err > 1e3 * resolve("tau_frame", tau):
        raise GaugeFailureError(f"frame orthonormality defect {err:.2e}", {"defect": err})
    return frame


def frame_field(g: MetricField) -> MatrixFn:
    """x -> frame matrix of the deterministic orthonormal frame section"""
    return lambda x: gram_schmidt(g(x))[0]


def frame_christoffel(g: MetricField, p: Sequence[float], frame_fn: Optional[MatrixFn] = None,
                      h: Optional[float] = None) -> np.ndarray:
    """
    Connection coefficients C[k,i,j] = eps_k <∇_{e_i} e_j, e_k> of a frame section.

    Metric compatibility makes C[k,i,j] = -eps_k eps_j C[j,i,k].
    """
    p = np.asarray(p, dtype=float)
    frame_fn = frame_fn or frame_field(g)
    gamma = christoffel(g, p, h)
    E = frame_fn(p)
    dE = gradient(frame_fn, p, h)  # [a,c,j]
    G = g(p)
    eps = np.array(np.sign(np.diag(E.T @ G @ E)))
    nabla = np.einsum("ai,acj->cij", E, dE) + np.einsum("ai,cab,bj->cij", E, gamma, E)
    lowered = np.einsum("cij,cd,dk->kij", nabla, G, E)
    return eps[:, None, None] * lowered


def directional_derivative(f: Callable[[np.ndarray], np.ndarray], p: Sequence[float], direction: np.ndarray,
                           h: Optional[float] = None) -> np.ndarray:
    """d_v f at p for a coordinate vector v"""
    p = np.asarray(p, dtype=float)
    return sum(direction[a] * central_diff(f, p, a, h) for a in range(p.size) if direction[a] != 0) \
        if np.any(direction) else np.zeros_like(np.asarray(f(p)))


def sample_points(domain: Box, count: int, rng: np.random.Generator, margin: float = 0.05) -> np.ndarray:
    """Uniform points of the box, kept ``margin`` (relative to each side) away from its faces"""
    lo = np.array([b[0] for b in domain])
    hi = np.array([b[1] for b in domain])
    pad = margin * (hi - lo)
    return lo + pad + (hi - lo - 2 * pad) * rng.random((count, len(domain)))
