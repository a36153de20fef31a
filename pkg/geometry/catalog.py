"""
📚 Builtin Catalog
=================

Named metrics, metric families, endomorphism data and spinor fields used by
the verification workflows and the tests:

- metrics: ``flat``, ``round_sphere``, ``de_sitter_2d``, ``warped:<f>``
- families: ``static``, ``warped:exp``, ``warped:cos``, ``linear``,
  ``conformal_sphere``, ``random_polynomial``
- embedding data: ``sphere_cone``, ``sphere_in_sphere``, ``hyperbolic_sphere``,
  ``flat_negative``
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import sympy

from algebra.clifford import Signature
from geometry.chart_tensor import MetricField
from geometry.cylinder import MetricFamily, warped_family
from geometry.embedding import EndoField
from geometry.expressions import T, ScalarExpr, const, coord, coord_symbol, cos, exp, sin, tparam
from utils.errors import SchemaError
from utils.numerics import make_rng

logger = logging.getLogger(__name__)

SPHERE_MARGIN = 0.3

WARPINGS: Dict[str, ScalarExpr] = {
    "exp": exp(tparam()),
    "cos": cos(tparam()),
    "one": const(1),
}


# metrics

def flat(signature: Signature, half_width: float = 1.0) -> MetricField:
    """Constant diag(ε) on a cube"""
    n = signature.n
    entries = [[const(signature.eps[i] if i == j else 0) for j in range(n)] for i in range(n)]
    return MetricField.from_expressions(entries, signature, [[-half_width, half_width]] * n,
                                        name=f"flat{signature}")


def round_sphere(n: int = 2, radius: Any = 1) -> MetricField:
    """
    Round n-sphere in nested polar coordinates.

    g = r²(dx0² + sin²x0 dx1² + sin²x0 sin²x1 dx2² + ...), the last angle
    ranging over (-3, 3) and the others kept away from the poles.
    """
    if n < 1:
        raise SchemaError("sphere dimension must be at least 1")
    r2 = ScalarExpr.coerce(radius) ** 2
    diag: List[ScalarExpr] = []
    factor = const(1)
    for i in range(n):
        diag.append(r2 * factor)
        factor = factor * sin(coord(i)) ** 2
    entries = [[diag[i] if i == j else const(0) for j in range(n)] for i in range(n)]
    domain = [[SPHERE_MARGIN, np.pi - SPHERE_MARGIN]] * (n - 1) + [[-3.0, 3.0]]
    return MetricField.from_expressions(entries, Signature(n, 0), domain, name=f"round_sphere{n}")


def de_sitter_2d() -> MetricField:
    """dx0² - cosh²(x0) dx1², constant curvature +1"""
    entries = [[const(1), const(0)], [const(0), -ScalarExpr(sympy.cosh(coord_symbol(0)) ** 2)]]
    return MetricField.from_expressions(entries, Signature(1, 1), [[-1.0, 1.0], [-3.0, 3.0]], name="de_sitter_2d")


def warped_metric(f_name: str, leaf: Optional[MetricField] = None) -> MetricField:
    """dx0² + f(x0)² g_leaf as a single metric, the leaf coordinates shifted by one"""
    if f_name not in WARPINGS:
        raise SchemaError(f"unknown warping function {f_name!r}; known: {sorted(WARPINGS)}")
    leaf = leaf or flat(Signature(2, 0))
    n = leaf.dim
    shift = {coord_symbol(i): coord_symbol(i + 1) for i in range(n)}
    f2 = WARPINGS[f_name].expr.subs(T, coord_symbol(0)) ** 2
    entries: List[List[Any]] = [[const(1)] + [const(0)] * n]
    for row in leaf.expressions:
        entries.append([const(0)] + [ScalarExpr(f2 * e.expr.subs(shift, simultaneous=True)) for e in row])
    domain = [[-0.5, 0.5]] + [list(b) for b in leaf.domain]
    sig = Signature(leaf.signature.r + 1, leaf.signature.s)
    return MetricField.from_expressions(entries, sig, domain, name=f"warped:{f_name}")


METRICS: Dict[str, Callable[[], MetricField]] = {
    "flat": lambda: flat(Signature(2, 0)),
    "minkowski": lambda: flat(Signature(1, 1)),
    "round_sphere": round_sphere,
    "de_sitter_2d": de_sitter_2d,
}


def metric(name: str) -> MetricField:
    """Resolve a builtin metric name"""
    if name.startswith("warped:"):
        return warped_metric(name.split(":", 1)[1])
    if name not in METRICS:
        raise SchemaError(f"unknown catalog metric {name!r}")
    return METRICS[name]()


# families

def static_family(leaf: Optional[MetricField] = None, t_interval: Sequence[float] = (-0.5, 0.5)) -> MetricFamily:
    leaf = leaf or flat(Signature(2, 0))
    return MetricFamily.from_expressions(leaf.expressions, leaf.signature, leaf.domain, t_interval,
                                         name=f"static({leaf.name})")


def linear_family(g0: Optional[Sequence[Sequence[float]]] = None, k: Optional[Sequence[Sequence[float]]] = None,
                  t_interval: Sequence[float] = (-0.5, 0.5)) -> MetricFamily:
    """g_t = g0 + t·k with constant coefficients"""
    g0 = np.eye(2) if g0 is None else np.asarray(g0, dtype=float)
    k = np.array([[0.3, 0.1], [0.1, -0.2]]) if k is None else np.asarray(k, dtype=float)
    n = g0.shape[0]
    t = tparam()
    entries = [[ScalarExpr(float(g0[i, j])) + float(k[i, j]) * t for j in range(n)] for i in range(n)]
    positive = int(np.sum(np.linalg.eigvalsh(g0) > 0))
    return MetricFamily.from_expressions(entries, Signature(positive, n - positive), [[-1.0, 1.0]] * n,
                                         t_interval, name="linear")


def random_polynomial_family(seed: Optional[int] = None, scale: float = 0.1) -> MetricFamily:
    """
    Identity plus small random polynomials in (x0, x1, t) on a 2D chart.

    With coefficients bounded by ``scale`` on the unit-half box the family
    stays positive definite.
    """
    rng = make_rng(seed)
    x0, x1, t = coord(0), coord(1), tparam()
    monomials = [x0, x1, t, x0 * t, x1 * x1, t * t, x0 * x1]
    entries: List[List[ScalarExpr]] = [[const(0)] * 2 for _ in range(2)]
    for i in range(2):
        for j in range(i, 2):
            coefs = rng.uniform(-scale, scale, len(monomials))
            poly = const(1 if i == j else 0)
            for c, m in zip(coefs, monomials):
                poly = poly + float(round(c, 6)) * m
            entries[i][j] = entries[j][i] = poly
    return MetricFamily.from_expressions(entries, Signature(2, 0), [[-0.5, 0.5]] * 2, (-0.5, 0.5),
                                         name="random_polynomial")


FAMILIES: Dict[str, Callable[[], MetricFamily]] = {
    "static": static_family,
    "warped:exp": lambda: warped_family(WARPINGS["exp"], flat(Signature(2, 0)), (-0.5, 0.5), name="warped:exp"),
    "warped:cos": lambda: warped_family(WARPINGS["cos"], round_sphere(2), (-1.0, 1.0), name="warped:cos"),
    "linear": linear_family,
    "conformal_sphere": lambda: warped_family(WARPINGS["exp"], round_sphere(2), (-0.5, 0.5), name="conformal_sphere"),
    "random_polynomial": random_polynomial_family,
}


def family(name: str, seed: Optional[int] = None) -> MetricFamily:
    """Resolve a builtin family name"""
    if name == "random_polynomial":
        return random_polynomial_family(seed)
    if name not in FAMILIES:
        raise SchemaError(f"unknown catalog family {name!r}")
    return FAMILIES[name]()


# embedding data (g, A, κ)

@dataclass(frozen=True, eq=False)
class EmbeddingDatum:
    """Hypersurface data for the constant-curvature construction"""

    name: str
    metric: MetricField
    endomorphism: EndoField
    kappa: float
    valid: bool = True


def embedding_datum(name: str) -> EmbeddingDatum:
    if name == "sphere_cone":
        g = round_sphere(2)
        return EmbeddingDatum(name, g, EndoField.scalar(g, 1.0), 0.0)
    if name == "sphere_in_sphere":
        g = round_sphere(2)
        return EmbeddingDatum(name, g, EndoField.scalar(g, 0.0), 1.0)
    if name == "hyperbolic_sphere":
        # geodesic sphere of radius 1 in hyperbolic space
        g = round_sphere(2, radius=ScalarExpr(sympy.sinh(1)))
        return EmbeddingDatum(name, g, EndoField.scalar(g, float(1 / np.tanh(1.0))), -1.0)
    if name == "flat_negative":
        g = flat(Signature(2, 0))
        return EmbeddingDatum(name, g, EndoField.scalar(g, 0.0), 1.0, valid=False)
    raise SchemaError(f"unknown embedding datum {name!r}")


EMBEDDINGS = ("sphere_cone", "sphere_in_sphere", "hyperbolic_sphere", "flat_negative")


# spinors

def sphere_killing_spinor_value(gamma1: np.ndarray, gamma2: np.ndarray, sigma0: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """
    Closed-form Killing spinor on the polar unit 2-sphere, ∇_X ψ = ½ X·ψ.

    σ(θ, φ) = exp(½θ γ1) exp(-½φ γ1γ2) σ0 in the frame (∂θ, ∂φ / sinθ); both
    exponents square to -1, so exp(aJ) = cos a + sin a J.
    """
    eye = np.eye(gamma1.shape[0])
    J = gamma1 @ gamma2

    def value(x: np.ndarray) -> np.ndarray:
        theta, phi = float(x[0]), float(x[1])
        first = np.cos(theta / 2) * eye + np.sin(theta / 2) * gamma1
        second = np.cos(phi / 2) * eye - np.sin(phi / 2) * J
        return first @ second @ sigma0

    return value


def catalog_names() -> Dict[str, List[str]]:
    """Every builtin name, grouped"""
    return {
        "metrics": sorted(METRICS) + [f"warped:{f}" for f in sorted(WARPINGS)],
        "families": sorted(FAMILIES),
        "embeddings": list(EMBEDDINGS),
        "spinors": ["sphere_killing"],
    }
