"""
🔬 Spectral Classification of Lorentzian Pairs
==============================================

For g₀, g₁ of signature (n-1, 1) pick a basis that is g₀-pseudo-orthonormal
and declare it Euclidean-orthonormal. Then g₀ = (·, I·) with
I = Id - 2(u,·)u for the unit timelike basis vector u, and the relating
endomorphism is A = I·S with S Euclidean-symmetric of signature (n-1, 1).

With S = Σ λ_j Π_j (λ₀ < 0 < λ₁ < …), u_j = Π_j u and Δ = {j : u_j ≠ 0}, the
space splits A-invariantly into W = span{u_j : j ∈ Δ} and its orthogonal Ẽ,
where A = S. On W the characteristic polynomial is

    P(t) = Π_Δ (t - λ_j) + 2 Σ_Δ λ_j |u_j|² Π_{k≠j} (t - λ_k),

a real root μ has the eigenvector v_μ = Σ u_j/(μ - λ_j), and
g₁(v_μ, v_μ) = -½ P'(μ)/Q(μ) with Q = Π_Δ (t - λ_j). The root pattern of P
isolates a 2-dimensional Lorentzian block (or a 3-dimensional nilpotent
one) carrying the whole question; the rest is positive definite.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as npoly
from scipy.linalg import block_diag, null_space

from lorentz.lorentz_space import (ConnectionVerdict, Product, VerdictKind, as_product, classify_2d, definite_log,
                                   lorentz_gauge, relating_endomorphism)
from utils.config import resolve
from utils.errors import ConditioningError, NotARootError, RootClusterError

logger = logging.getLogger(__name__)

# spread of numerically computed roots around a triple root is ~ eps^(1/3)
_ROOT_RADIUS = 10.0 * np.finfo(float).eps ** (1.0 / 3.0)


@dataclass
class RootCluster:
    """A root of P after merging numerically coincident roots"""

    value: complex
    multiplicity: int
    members: List[complex] = field(default_factory=list)
    is_real: bool = False

    @property
    def real(self) -> float:
        return float(self.value.real)

    def to_dict(self) -> Dict[str, Any]:
        return {"value": [float(self.value.real), float(self.value.imag)], "multiplicity": self.multiplicity,
                "real": self.is_real}


def _abs_eval(poly: Polynomial, z: complex) -> float:
    """Σ |c_i| |z|^i: the backward-error scale of a polynomial evaluation"""
    return float(npoly.polyval(abs(z), np.abs(poly.coef))) + 1e-300


def cluster_roots(P: Polynomial, tau_cluster: Optional[float] = None) -> List[RootCluster]:
    """
    Roots of P with multiplicities. Roots closer than the triple-root spread
    form a candidate cluster; it is merged when P and its derivatives up to
    the cluster size vanish at the centroid, split into simple roots when
    P' does not vanish there, and rejected otherwise.
    """
    tau = resolve("tau_cluster", tau_cluster)
    radius = max(tau, _ROOT_RADIUS)
    raw = sorted((complex(z) for z in P.roots()), key=lambda z: (z.real, z.imag))
    groups: List[List[complex]] = []
    for z in raw:
        for grp in groups:
            if any(abs(z - w) <= radius * (1.0 + abs(w)) for w in grp):
                grp.append(z)
                break
        else:
            groups.append([z])

    clusters: List[RootCluster] = []
    for grp in groups:
        size = len(grp)
        centre = complex(np.mean(grp))
        mult = 1
        if size > 1 and abs(P(centre)) <= tau * _abs_eval(P, centre):
            for order in range(1, size):
                d = P.deriv(order)
                if abs(d(centre)) > tau * _abs_eval(d, centre):
                    break
                mult = order + 1
        if mult == size:
            clusters.append(RootCluster(value=centre, multiplicity=size, members=grp))
        elif mult == 1:
            clusters.extend(RootCluster(value=z, multiplicity=1, members=[z]) for z in grp)
        else:
            raise RootClusterError(f"root cluster of size {size} only vanishes to order {mult}",
                                   {"members": [[z.real, z.imag] for z in grp], "order": mult})
    for c in clusters:
        if abs(c.value.imag) <= radius * (1.0 + abs(c.value)):
            c.is_real = True
            c.value = complex(c.value.real, 0.0)
    return sorted(clusters, key=lambda c: (c.value.real, c.value.imag))


@dataclass
class LorentzSpectralData:
    """
    📊 Spectral data of a Lorentzian pair in the Euclidean gauge.

    Vectors and bases are in gauge coordinates; ``gauge`` maps them to the
    original coordinates.
    """

    g0: np.ndarray
    g1: np.ndarray
    gauge: np.ndarray
    S: np.ndarray
    eigenvalues: List[float]
    eigenspaces: List[np.ndarray]
    u_components: List[np.ndarray]
    delta: List[int]
    W: np.ndarray
    E_tilde: List[np.ndarray]
    A_W: np.ndarray
    P: Polynomial
    Q: Polynomial
    roots: List[RootCluster]
    brute_force_residual: float
    invariance_residual: float
    ambiguous: List[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @property
    def m(self) -> int:
        return len(self.delta)

    @property
    def case(self) -> int:
        """1 when u has no component along the negative eigenline of S, else 2"""
        return 2 if 0 in self.delta else 1

    @property
    def eta(self) -> np.ndarray:
        return np.diag([1.0] * (self.n - 1) + [-1.0])

    @property
    def u(self) -> np.ndarray:
        e = np.zeros(self.n)
        e[-1] = 1.0
        return e

    @property
    def A(self) -> np.ndarray:
        """Relating endomorphism I·S in gauge coordinates"""
        return self.eta @ self.S

    @property
    def u_norms(self) -> List[float]:
        return [float(np.linalg.norm(c)) for c in self.u_components]

    def E_tilde_basis(self, exclude: Tuple[int, ...] = ()) -> np.ndarray:
        cols = [b for j, b in enumerate(self.E_tilde) if j not in exclude and b.size]
        return np.hstack(cols) if cols else np.zeros((self.n, 0))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n, "case": self.case, "m": self.m, "delta": self.delta,
            "eigenvalues": self.eigenvalues,
            "multiplicities": [int(b.shape[1]) for b in self.eigenspaces],
            "u_norms": self.u_norms,
            "P": self.P.coef.tolist(),
            "roots": [r.to_dict() for r in self.roots],
            "brute_force_residual": self.brute_force_residual,
            "invariance_residual": self.invariance_residual,
            "ambiguous": self.ambiguous,
        }


def characteristic_polynomial(eigenvalues: List[float], u_norms: List[float]) -> Tuple[Polynomial, Polynomial]:
    """(P, Q) from the eigenvalues λ_j and |u_j| over Δ"""
    Q = Polynomial.fromroots(eigenvalues)
    P = Q.copy()
    for j, (lam, norm) in enumerate(zip(eigenvalues, u_norms)):
        others = eigenvalues[:j] + eigenvalues[j + 1:]
        P = P + 2.0 * lam * norm ** 2 * Polynomial.fromroots(others)
    return P, Q


def _group_eigenvalues(values: np.ndarray, vectors: np.ndarray, tol: float) -> Tuple[List[float], List[np.ndarray]]:
    scale = max(1.0, float(np.abs(values).max()))
    groups: List[List[int]] = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[groups[-1][-1]] <= tol * scale:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [float(values[g].mean()) for g in groups], [vectors[:, g] for g in groups]


def spectral_split(g0: Product, g1: Product, tau_u: Optional[float] = None,
                   tau_cluster: Optional[float] = None) -> LorentzSpectralData:
    tau_u = resolve("tau_u", tau_u)
    tau_c = resolve("tau_cluster", tau_cluster)
    g0, g1 = as_product(g0), as_product(g1)
    relating_endomorphism(g0, g1)
    B = lorentz_gauge(g0.matrix)
    S = B.T @ g1.matrix @ B
    S = 0.5 * (S + S.T)
    n = S.shape[0]
    try:
        values, vectors = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise ConditioningError(f"eigen-solver failed: {exc}") from exc
    eigenvalues, eigenspaces = _group_eigenvalues(values, vectors, tau_c)
    if eigenvalues[0] >= 0 or eigenspaces[0].shape[1] != 1:
        raise ConditioningError("S must have exactly one negative eigenvalue",
                                {"eigenvalues": values.tolist()})

    u = np.zeros(n)
    u[-1] = 1.0
    u_components = [V @ (V.T @ u) for V in eigenspaces]
    norms = [float(np.linalg.norm(c)) for c in u_components]
    delta = [j for j, r in enumerate(norms) if r > tau_u]
    ambiguous = [j for j, r in enumerate(norms) if tau_u / 10.0 <= r <= tau_u]
    for j in ambiguous:
        logger.warning("⚠️ |u_%d| = %.2e is near the Δ threshold %.1e", j, norms[j], tau_u)

    E_tilde: List[np.ndarray] = []
    for j, V in enumerate(eigenspaces):
        if j in delta:
            E_tilde.append(V @ null_space((V.T @ u)[None, :]))
        else:
            E_tilde.append(V)

    W = np.stack([u_components[j] / norms[j] for j in delta], axis=1)
    A = np.diag([1.0] * (n - 1) + [-1.0]) @ S
    A_W = W.T @ A @ W
    invariance = float(np.abs(A @ W - W @ A_W).max())

    P, Q = characteristic_polynomial([eigenvalues[j] for j in delta], [norms[j] for j in delta])
    brute = np.poly(A_W)[::-1]
    brute_residual = float(np.abs(P.coef - brute).max()) / max(1.0, float(np.abs(brute).max()))
    roots = cluster_roots(P, tau_c)
    data = LorentzSpectralData(g0=g0.matrix, g1=g1.matrix, gauge=B, S=S, eigenvalues=eigenvalues,
                               eigenspaces=eigenspaces, u_components=u_components, delta=delta, W=W,
                               E_tilde=E_tilde, A_W=A_W, P=P, Q=Q, roots=roots,
                               brute_force_residual=brute_residual, invariance_residual=invariance,
                               ambiguous=ambiguous)
    logger.debug("🔍 spectral split: case %d, m = %d, roots %s", data.case, data.m,
                 [(r.value, r.multiplicity) for r in roots])
    return data


@dataclass(eq=False)
class EigenvectorCheck:
    """v_μ with its eigen-residual and the norm identity for g₁(v_μ, v_μ)"""

    mu: float
    vector: np.ndarray
    gauge_vector: np.ndarray
    g_norm: float
    g0_norm: float
    predicted_norm: float
    eigen_residual: float

    @property
    def normv_residual(self) -> float:
        return abs(self.g_norm - self.predicted_norm)

    @property
    def spacelike(self) -> bool:
        return self.g0_norm > 0

    def to_dict(self) -> Dict[str, Any]:
        return {"mu": self.mu, "vector": self.vector.tolist(), "g_norm": self.g_norm, "g0_norm": self.g0_norm,
                "predicted_norm": self.predicted_norm, "eigen_residual": self.eigen_residual,
                "normv_residual": self.normv_residual}


def eigvec_vmu(data: LorentzSpectralData, mu: float, tau_root: Optional[float] = None) -> EigenvectorCheck:
    tau = resolve("tau_root", tau_root)
    mu = float(np.real(mu))
    if abs(data.P(mu)) > tau * _abs_eval(data.P, mu):
        raise NotARootError(f"μ = {mu:.12g} is not a root of P", {"mu": mu, "P(mu)": float(data.P(mu))})
    v = sum(data.u_components[j] / (mu - data.eigenvalues[j]) for j in data.delta)
    A = data.A
    eigen_residual = float(np.linalg.norm(A @ v - mu * v) / np.linalg.norm(v))
    return EigenvectorCheck(mu=mu, vector=data.gauge @ v, gauge_vector=v, g_norm=float(v @ data.S @ v),
                            g0_norm=float(v @ data.eta @ v),
                            predicted_norm=float(-0.5 * data.P.deriv()(mu) / data.Q(mu)),
                            eigen_residual=eigen_residual)


def sign_pattern(data: LorentzSpectralData) -> Dict[str, Any]:
    """
    Signs of P at λ₀, 0 and λ_j (j ∈ Δ, relabelled from 1) against
    the expected pattern. In case 1 the sign at λ₀ is only forced when the
    negative root μ₀ lies above λ₀; that entry is reported as conditional.
    """
    m = data.m
    P = data.P
    lam0 = data.eigenvalues[0]
    positive = [data.eigenvalues[j] for j in data.delta if j != 0]
    entries: List[Dict[str, Any]] = []

    def add(label: str, t: float, expected: int, required: bool = True) -> None:
        observed = int(np.sign(P(t)))
        entries.append({"point": label, "t": t, "sign": observed, "expected": expected, "required": required,
                        "match": observed == expected})

    if data.case == 1:
        mu0 = min(r.real for r in data.roots if r.is_real)
        add("lambda_0", lam0, (-1) ** m, required=mu0 > lam0)
        add("zero", 0.0, (-1) ** (m - 1))
        for j, lam in enumerate(positive, start=1):
            add(f"lambda_{j}", lam, (-1) ** (m - j))
    else:
        add("lambda_0", lam0, (-1) ** m)
        add("zero", 0.0, (-1) ** m)
        for j, lam in enumerate(positive, start=1):
            add(f"lambda_{j}", lam, (-1) ** (m - j - 1))
    holds = all(e["match"] for e in entries if e["required"])
    return {"case": data.case, "m": m, "entries": entries, "holds": holds}


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def _g0_complement(eta: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Basis of the g₀-orthogonal complement of span C"""
    if C.shape[1] == 0:
        return np.eye(eta.shape[0])
    return null_space(C.T @ eta)


def _interlacing_roots(data: LorentzSpectralData, checks: List[EigenvectorCheck]) -> List[EigenvectorCheck]:
    """One spacelike simple root in each gap (λ_i, λ_{i+1}) of the positive λ_j, j ∈ Δ"""
    positive = sorted(data.eigenvalues[j] for j in data.delta if j != 0)
    chosen: List[EigenvectorCheck] = []
    for lo, hi in zip(positive[:-1], positive[1:]):
        candidates = [c for c in checks if lo < c.mu < hi and c.spacelike and c not in chosen]
        if not candidates:
            raise ConditioningError("no spacelike root of P between consecutive eigenvalues",
                                    {"interval": [lo, hi], "roots": [c.mu for c in checks]})
        chosen.append(candidates[0])
    return chosen


def _near_equal(a: float, b: float) -> bool:
    return abs(a - b) <= 1e-4 * (1.0 + max(abs(a), abs(b)))


def classify_nd(g0: Product, g1: Product, tau_u: Optional[float] = None, tau_cluster: Optional[float] = None,
                tau_tr: Optional[float] = None) -> ConnectionVerdict:
    """
    Reduce the pair to an E_{1,1} or a nilpotent E_{2,1} block plus a
    positive definite complement and decide on the block.
    """
    g0, g1 = as_product(g0), as_product(g1)
    if g0.n == 2:
        return classify_2d(g0, g1, fixed_volume=False, tau_tr=tau_tr)
    tau_c = resolve("tau_cluster", tau_cluster)
    data = spectral_split(g0, g1, tau_u, tau_cluster)
    eta, S = data.eta, data.S
    warnings: List[str] = []
    checks = [eigvec_vmu(data, r.real) for r in data.roots if r.is_real and r.multiplicity == 1]
    multiple = [r for r in data.roots if r.multiplicity > 1]

    block: np.ndarray
    complement: np.ndarray
    nilpotent_root: Optional[float] = None

    if data.case == 1:
        if multiple or any(not r.is_real for r in data.roots):
            raise RootClusterError("P must have only simple real roots when u ⟂ E₀",
                                   {"roots": [r.to_dict() for r in data.roots]})
        negative = [c for c in checks if c.mu < 0]
        if len(negative) != 1:
            raise ConditioningError("expected exactly one negative root of P", {"roots": [c.mu for c in checks]})
        mu0 = negative[0]
        lam0 = data.eigenvalues[0]
        if _near_equal(mu0.mu, lam0) and abs(mu0.mu - lam0) > tau_c * (1.0 + abs(lam0)):
            warnings.append(f"negative eigenvalues {lam0:.9g} and {mu0.mu:.9g} nearly coincide")
        block = np.hstack([data.eigenspaces[0], mu0.gauge_vector[:, None]])
        positives = [c.gauge_vector[:, None] for c in checks if c.mu > 0]
        complement = np.hstack([data.E_tilde_basis(exclude=(0,))] + positives)
    else:
        doubles = [r for r in multiple if r.multiplicity == 2]
        triples = [r for r in multiple if r.multiplicity == 3]
        if len(doubles) > 1 or any(r.multiplicity > 3 for r in multiple) or (doubles and triples):
            raise RootClusterError("root configuration would need an orthogonal pair of null vectors",
                                   {"roots": [r.to_dict() for r in data.roots]})
        for r in multiple:
            nullity = eigvec_vmu(data, r.real)
            scale = float(nullity.gauge_vector @ nullity.gauge_vector)
            if abs(nullity.g0_norm) > 1e-6 * scale:
                raise RootClusterError("merged root has a non-null eigenvector",
                                       {"root": r.real, "g0_norm": nullity.g0_norm})
        if data.m == 1:
            block = data.W
            complement = data.E_tilde_basis()
        elif triples:
            nilpotent_root = triples[0].real
            if nilpotent_root <= 0 or len(checks) != data.m - 3 or not all(c.spacelike for c in checks):
                raise RootClusterError("triple root must be positive with spacelike simple roots beside it",
                                       {"roots": [r.to_dict() for r in data.roots]})
            fixed = np.hstack([data.E_tilde_basis()] + [c.gauge_vector[:, None] for c in checks])
            block = _g0_complement(eta, fixed)
            complement = fixed
        else:
            chosen = _interlacing_roots(data, checks)
            fixed = np.hstack([data.E_tilde_basis()] + [c.gauge_vector[:, None] for c in chosen])
            block = _g0_complement(eta, fixed)
            complement = fixed
            residual = [c.mu for c in checks if c not in chosen]
            if len(residual) == 2 and max(residual) < 0 and _near_equal(*residual):
                warnings.append(f"residual negative roots {residual[0]:.9g} and {residual[1]:.9g} nearly coincide")

    for w in warnings:
        logger.warning("⚠️ %s", w)

    verdict = _assemble(data, block, complement, nilpotent_root, tau_tr)
    verdict.diagnostics.update({
        "case": data.case, "delta": data.delta, "m": data.m,
        "roots": [r.to_dict() for r in data.roots],
        "multiplicities": [r.multiplicity for r in data.roots],
        "blocks": {"lorentzian": int(block.shape[1]), "definite": int(complement.shape[1])},
        "brute_force_residual": data.brute_force_residual,
        "warnings": warnings,
    })
    if verdict.unique:
        res = verdict.residuals()
        if res["exp"] > 1e-9 * max(1.0, float(np.abs(np.linalg.solve(data.g0, data.g1)).max())):
            logger.warning("⚠️ exp(a) misses A by %.2e", res["exp"])
    logger.info("📊 %d-dim Lorentzian pair: %s (case %d, m = %d)", data.n, verdict.kind.value, data.case, data.m)
    return verdict


def _assemble(data: LorentzSpectralData, block: np.ndarray, complement: np.ndarray,
              nilpotent_root: Optional[float], tau_tr: Optional[float]) -> ConnectionVerdict:
    """Generator (or family) on the block ⊕ complement, mapped back to original coordinates"""
    eta, S, B = data.eta, data.S, data.gauge
    C = np.hstack([block, complement])
    to_orig = B @ C
    back = np.linalg.inv(to_orig)
    G0c, G1c = complement.T @ eta @ complement, complement.T @ S @ complement
    a_c = definite_log(G0c, G1c) if complement.shape[1] else np.zeros((0, 0))
    verdict = ConnectionVerdict(kind=VerdictKind.UNIQUE_TIMELIKE, g0=data.g0, g1=data.g1)

    def assemble(a_b: np.ndarray) -> np.ndarray:
        return to_orig @ block_diag(a_b, a_c) @ back

    if block.shape[1] == 1:
        mu = float(data.A_W[0, 0])
        if mu <= 0:
            raise ConditioningError("relating endomorphism is negative on the timelike line W", {"mu": mu})
        verdict.generator = assemble(np.array([[np.log(mu)]]))
        return verdict

    G0b, G1b = block.T @ eta @ block, block.T @ S @ block
    if nilpotent_root is not None:
        k = nilpotent_root
        Ab = np.linalg.solve(G0b, G1b)
        x = Ab / k - np.eye(3)
        x2 = x @ x
        cube = float(np.abs(x2 @ x).max())
        if cube > 1e-6 * max(1.0, float(np.abs(x).max())) ** 3 or float(np.abs(x2).max()) <= 1e-8:
            raise RootClusterError("triple-root block is not k(Id + x) with x regular nilpotent",
                                   {"x_cubed": cube, "x_squared": float(np.abs(x2).max())})
        verdict.kind = VerdictKind.UNIQUE_NILPOTENT_NULL
        verdict.generator = assemble(np.log(k) * np.eye(3) + x - 0.5 * x2)
        verdict.nilpotent = {"k": float(k), "x": x, "basis": to_orig, "complement_generator": a_c}
        return verdict

    planar = classify_2d(G0b, G1b, fixed_volume=False, tau_tr=tau_tr)
    verdict.kind = planar.kind
    verdict.diagnostics["block"] = planar.diagnostics
    if planar.generator is not None:
        verdict.generator = assemble(planar.generator)
    elif planar.family is not None:
        family = planar.family
        verdict.family = lambda s, branch: assemble(family(s, branch))
    return verdict

