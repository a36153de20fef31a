"""
🛢️ Generalized Cylinder Engine
=============================

A one-parameter family of metrics g_t on a chart defines the generalized
cylinder dt² + g_t. This module evaluates the closed-form curvature identities
of such cylinders (Weingarten map, Gauss, Codazzi and Riccati equations,
Ricci and scalar curvature) from leafwise data and cross-checks each one
against the brute-force curvature of the (n+1)-dimensional metric.

It also integrates the parallel-transport ODE of vectors along the normal
geodesics t -> (t, x).
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag

from algebra.clifford import Signature
from geometry.chart_tensor import (Box, MetricField, _box, christoffel, divergence_endomorphism,
                                   covariant_derivative_bilinear, lower_riemann, lowered_riemann,
                                   ricci, ricci_from_riemann, riemann, scalar)
from geometry.expressions import ScalarExpr, compile_matrix, expr_grid
from utils.config import resolve
from utils.errors import SchemaError
from utils.numerics import gradient, rk4, scalar_diff

logger = logging.getLogger(__name__)

FamilyFn = Callable[[float, np.ndarray], np.ndarray]

IDENTITIES = ("weingarten", "gauss", "codazzi", "riccati", "ric_nn", "ric_tn", "ric_tt", "scal")


@dataclass(frozen=True, eq=False)
class MetricFamily:
    """
    A smooth family t -> g_t of metrics on one chart.

    Families built from expressions differentiate exactly in t; families
    given by a plain callable fall back to central differences.
    """

    dim: int
    signature: Signature
    domain: Box
    t_interval: Tuple[float, float]
    fn: FamilyFn
    name: str = "custom"
    expressions: Optional[List[List[ScalarExpr]]] = None
    dot_fn: Optional[FamilyFn] = None
    ddot_fn: Optional[FamilyFn] = None

    @classmethod
    def from_expressions(cls, entries: Sequence[Sequence[Any]], signature: Signature,
                         domain: Sequence[Sequence[float]], t_interval: Sequence[float],
                         name: str = "custom", validate: bool = True) -> "MetricFamily":
        grid = expr_grid(entries)
        n = len(grid)
        for i in range(n):
            for j in range(i):
                if (grid[i][j].expr - grid[j][i].expr).expand() != 0:
                    raise SchemaError(f"family {name} is not symmetric at ({i},{j})")
                grid[i][j] = grid[j][i]
        lo, hi = (float(v) for v in t_interval)
        if lo >= hi:
            raise SchemaError("t_interval must satisfy a < b")
        family = cls(
            dim=n, signature=signature, domain=_box(domain, n), t_interval=(lo, hi),
            fn=compile_matrix(grid, n), name=name, expressions=grid,
            dot_fn=compile_matrix([[e.diff_t() for e in row] for row in grid], n),
            ddot_fn=compile_matrix([[e.diff_t(2) for e in row] for row in grid], n),
        )
        if validate:
            family.validate()
        return family

    # evaluation

    def g(self, t: float, x: Sequence[float]) -> np.ndarray:
        G = np.asarray(self.fn(float(t), np.asarray(x, dtype=float)), dtype=float)
        return 0.5 * (G + G.T)

    def gdot(self, t: float, x: Sequence[float], h: Optional[float] = None) -> np.ndarray:
        if self.dot_fn is not None:
            return np.asarray(self.dot_fn(float(t), np.asarray(x, dtype=float)), dtype=float)
        return scalar_diff(lambda s: self.g(s, x), t, h)

    def gddot(self, t: float, x: Sequence[float], h: Optional[float] = None) -> np.ndarray:
        if self.ddot_fn is not None:
            return np.asarray(self.ddot_fn(float(t), np.asarray(x, dtype=float)), dtype=float)
        return scalar_diff(lambda s: self.gdot(s, x, h), t, h)

    def slice(self, t: float) -> MetricField:
        """The leaf metric g_t as a MetricField"""
        exprs = None
        if self.expressions is not None:
            exprs = [[e.subs_t(t) for e in row] for row in self.expressions]
        return MetricField(dim=self.dim, signature=self.signature, domain=self.domain,
                           fn=lambda x: self.g(t, x), name=f"{self.name}@t={t:g}", expressions=exprs)

    @cached_property
    def cylinder(self) -> MetricField:
        """dt² + g_t on the box t_interval × domain, coordinates (t, x)"""
        sig = Signature(self.signature.r + 1, self.signature.s)
        domain = (self.t_interval,) + tuple(self.domain)
        return MetricField(dim=self.dim + 1, signature=sig, domain=domain,
                           fn=lambda y: block_diag(1.0, self.g(y[0], y[1:])), name=f"cyl[{self.name}]")

    def validate(self, t_samples: int = 5, samples: Optional[int] = None) -> None:
        """Signature check of several slices across the t-interval"""
        lo, hi = self.t_interval
        for t in np.linspace(lo, hi, t_samples):
            self.slice(float(t)).validate(samples)

    def to_json(self) -> Dict[str, Any]:
        if self.expressions is None:
            raise SchemaError(f"family {self.name} has no expression form")
        return {"dim": self.dim, "signature": [self.signature.r, self.signature.s],
                "domain": [list(b) for b in self.domain], "t_interval": list(self.t_interval),
                "g": [[e.to_json() for e in row] for row in self.expressions]}


def family_from_json(obj: Dict[str, Any]) -> MetricFamily:
    """Family JSON: MetricField JSON plus "t_interval": [a, b]"""
    try:
        return MetricFamily.from_expressions(obj["g"], Signature(*obj["signature"]), obj["domain"],
                                             obj["t_interval"], name=obj.get("name", "custom"))
    except KeyError as e:
        raise SchemaError(f"family JSON is missing {e}") from e


# Weingarten map and the curvature report

def weingarten(fam: MetricFamily, t: float, p: Sequence[float]) -> np.ndarray:
    """W = -½ g_t⁻¹ ġ_t; W[c,b] is the c-component of W(∂_b)"""
    return -0.5 * np.linalg.solve(fam.g(t, p), fam.gdot(t, p))


def mean_curvature(fam: MetricFamily, t: float, p: Sequence[float]) -> float:
    return float(np.trace(weingarten(fam, t, p))) / fam.dim


def symmetry_defect(G: np.ndarray, W: np.ndarray) -> float:
    """max |<WX,Y> - <X,WY>| on coordinate vectors"""
    GW = G @ W
    return float(np.abs(GW - GW.T).max())


@dataclass
class CurvatureReport:
    """📊 Closed-form cylinder curvature next to its independent evaluation"""

    t: float
    point: List[float]
    weingarten: np.ndarray
    mean_curvature: float
    formula: Dict[str, Any] = field(default_factory=dict)
    oracle: Dict[str, Any] = field(default_factory=dict)
    residuals: Dict[str, float] = field(default_factory=dict)
    symmetry_defect: float = 0.0

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def passed(self, tol: Optional[float] = None) -> bool:
        return self.max_residual <= resolve("curvature_tol", tol)

    def to_dict(self) -> Dict[str, Any]:
        return {"t": self.t, "point": self.point, "weingarten": self.weingarten,
                "mean_curvature": self.mean_curvature, "residuals": dict(self.residuals),
                "symmetry_defect": self.symmetry_defect, "max_residual": self.max_residual}


def _residuals(formula: Dict[str, Any], oracle: Dict[str, Any]) -> Dict[str, float]:
    return {k: float(np.max(np.abs(np.asarray(formula[k]) - np.asarray(oracle[k]))))
            for k in formula if k in oracle}


def cylinder_formulas(fam: MetricFamily, t: float, p: Sequence[float],
                      h: Optional[float] = None) -> Dict[str, Any]:
    """Curvature of dt² + g_t expressed through leaf curvature, ġ and g̈"""
    p = np.asarray(p, dtype=float)
    n = fam.dim
    leaf = fam.slice(t)
    G = fam.g(t, p)
    Ginv = np.linalg.inv(G)
    gd = fam.gdot(t, p)
    gdd = fam.gddot(t, p)
    W = -0.5 * Ginv @ gd

    def w_field(x: np.ndarray) -> np.ndarray:
        return weingarten(fam, t, x)

    trW = float(np.trace(W))
    W2 = float(np.trace(W @ W))
    tr_gdd = float(np.trace(Ginv @ gdd))

    nk = covariant_derivative_bilinear(lambda x: fam.gdot(t, x), leaf, p, h)
    dtrW = gradient(lambda x: np.trace(w_field(x)), p, h)
    divW = divergence_endomorphism(w_field, leaf, p, h)
    ric_m = ricci(leaf, p, h)

    return {
        "weingarten": W,
        "gauss": lowered_riemann(leaf, p, h) + 0.25 * (np.einsum("ac,bd->abcd", gd, gd)
                                                      - np.einsum("ad,bc->abcd", gd, gd)),
        "codazzi": 0.5 * (nk.transpose(1, 0, 2) - nk),
        "riccati": -0.5 * (gdd + np.einsum("ca,cb->ab", W, gd)),
        "ric_nn": W2 - 0.5 * tr_gdd,
        "ric_tn": dtrW - G @ divW,
        "ric_tt": ric_m + 2.0 * W.T @ G @ W - trW * (G @ W) - 0.5 * gdd,
        "scal": scalar(leaf, p, h) + 3.0 * W2 - trW ** 2 - tr_gdd,
    }


def cylinder_oracle(fam: MetricFamily, t: float, p: Sequence[float], h: Optional[float] = None) -> Dict[str, Any]:
    """The same quantities read off the (n+1)-dimensional curvature of dt² + g_t"""
    Z = fam.cylinder
    y = np.concatenate([[float(t)], np.asarray(p, dtype=float)])
    gamma = christoffel(Z, y, h)
    R = riemann(Z, y, h)
    Rl = lower_riemann(R, Z(y))
    ric = ricci_from_riemann(R)
    return {
        "weingarten": -gamma[1:, 1:, 0],
        "gauss": Rl[1:, 1:, 1:, 1:],
        "codazzi": Rl[1:, 1:, 1:, 0],
        "riccati": Rl[1:, 0, 0, 1:],
        "ric_nn": ric[0, 0],
        "ric_tn": ric[1:, 0],
        "ric_tt": ric[1:, 1:],
        "scal": float(np.einsum("bc,bc", np.linalg.inv(Z(y)), ric)),
    }


def cylinder_curvature(fam: MetricFamily, t: float, p: Sequence[float], h: Optional[float] = None) -> CurvatureReport:
    """Every cylinder identity evaluated twice with per-identity residuals"""
    formula = cylinder_formulas(fam, t, p, h)
    oracle = cylinder_oracle(fam, t, p, h)
    W = formula["weingarten"]
    return CurvatureReport(
        t=float(t), point=[float(v) for v in p], weingarten=W,
        mean_curvature=float(np.trace(W)) / fam.dim, formula=formula, oracle=oracle,
        residuals=_residuals(formula, oracle), symmetry_defect=symmetry_defect(fam.g(t, p), W),
    )


def orthonormal_view(report: CurvatureReport, frame: np.ndarray) -> Dict[str, Any]:
    """Formula side of a report in the components of an orthonormal leaf frame"""
    E = frame
    Einv = np.linalg.inv(E)
    f = report.formula
    return {
        "weingarten": Einv @ f["weingarten"] @ E,
        "gauss": np.einsum("abcd,ai,bj,ck,dl->ijkl", f["gauss"], E, E, E, E),
        "codazzi": np.einsum("abc,ai,bj,ck->ijk", f["codazzi"], E, E, E),
        "riccati": E.T @ f["riccati"] @ E,
        "ric_nn": f["ric_nn"],
        "ric_tn": E.T @ f["ric_tn"],
        "ric_tt": E.T @ f["ric_tt"] @ E,
        "scal": f["scal"],
    }


def normal_geodesic_residual(fam: MetricFamily, t: float, p: Sequence[float], h: Optional[float] = None) -> float:
    """max |∇_ν ν| = max_k |Γ^k_00| of the cylinder metric"""
    y = np.concatenate([[float(t)], np.asarray(p, dtype=float)])
    return float(np.abs(christoffel(fam.cylinder, y, h)[:, 0, 0]).max())


# warped products dt² + f(t)² g

def warped_family(f: ScalarExpr, leaf: MetricField, t_interval: Sequence[float],
                  name: Optional[str] = None) -> MetricFamily:
    if leaf.expressions is None:
        raise SchemaError("warped families need a leaf metric with an expression form")
    f = ScalarExpr.coerce(f)
    entries = [[f * f * e for e in row] for row in leaf.expressions]
    return MetricFamily.from_expressions(entries, leaf.signature, leaf.domain, t_interval,
                                         name=name or f"warped[{f.expr}]({leaf.name})")


def warped_closed_forms(f: ScalarExpr, leaf: MetricField, t: float, p: Sequence[float],
                        t_interval: Optional[Sequence[float]] = None, h: Optional[float] = None) -> CurvatureReport:
    """
    Warped-product closed forms for dt² + f(t)² g, checked against the
    general cylinder formulas for the same family.
    """
    f = ScalarExpr.coerce(f)
    fv = f.evaluate([], t)
    if fv <= 0:
        raise SchemaError(f"warping function must be positive, f({t}) = {fv}")
    fd = f.diff_t().evaluate([], t)
    fdd = f.diff_t(2).evaluate([], t)
    p = np.asarray(p, dtype=float)
    n = leaf.dim
    G = fv ** 2 * leaf(p)
    Rl = lowered_riemann(leaf, p, h)
    closed = {
        "weingarten": -(fd / fv) * np.eye(n),
        "gauss": fv ** 2 * Rl + (fd / fv) ** 2 * (np.einsum("ac,bd->abcd", G, G) - np.einsum("ad,bc->abcd", G, G)),
        "codazzi": np.zeros((n, n, n)),
        "riccati": -(fdd / fv) * G,
        "ric_nn": -n * fdd / fv,
        "ric_tn": np.zeros(n),
        "ric_tt": ricci(leaf, p, h) - ((n - 1) * (fd / fv) ** 2 + fdd / fv) * G,
        "scal": scalar(leaf, p, h) / fv ** 2 - 2 * n * fdd / fv - n * (n - 1) * (fd / fv) ** 2,
    }
    interval = tuple(t_interval) if t_interval is not None else (t - 0.5, t + 0.5)
    fam = warped_family(f, leaf, interval)
    formula = cylinder_formulas(fam, t, p, h)
    W = closed["weingarten"]
    return CurvatureReport(t=float(t), point=p.tolist(), weingarten=W, mean_curvature=float(np.trace(W)) / n,
                           formula=closed, oracle=formula, residuals=_residuals(closed, formula),
                           symmetry_defect=symmetry_defect(G, W))


# parallel transport along t-lines

def transport_vector(fam: MetricFamily, x: Sequence[float], t0: float, t1: float, v: Sequence[float],
                     h: Optional[float] = None, tol: float = 1e-9) -> np.ndarray:
    """Solve ξ' = -½ g⁻¹ ġ ξ along t -> (t, x) with ξ(t0) = v"""
    x = np.asarray(x, dtype=float)

    def rhs(t: float, xi: np.ndarray) -> np.ndarray:
        return -0.5 * np.linalg.solve(fam.g(t, x), fam.gdot(t, x) @ xi)

    return rk4(rhs, np.asarray(v, dtype=float), t0, t1, h, tol=tol)
