"""
🌀 Spinor Representations
========================

Concrete complex matrix realizations of the spinor module of Cl(r,s):
gamma matrices built recursively from Pauli matrices, the volume element and
its chirality splitting, an invariant Hermitian form, and the restriction of
an ambient representation of Cl(r+1,s) to a hypersurface representation of
Cl(r,s) via v -> e_0·v.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from algebra.clifford import CliffordElement, Signature
from utils.errors import DimensionMismatchError, SignatureMismatchError

logger = logging.getLogger(__name__)

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)

MATRIX_TOL = 1e-12


def volume_phase(sig: Signature) -> complex:
    """i^(s + n(n+1)/2), the volume eigenvalue on the positive module"""
    return 1j ** ((sig.s + sig.n * (sig.n + 1) // 2) % 4)


def _chirality(gammas: Sequence[np.ndarray]) -> np.ndarray:
    """Hermitian involution anticommuting with an even number of Euclidean gammas"""
    m = len(gammas)
    product = reduce(np.matmul, gammas, np.eye(gammas[0].shape[0], dtype=complex))
    return (1j ** ((m * (m + 1) // 2) % 4)) * product


def euclidean_gammas(n: int) -> List[np.ndarray]:
    """
    Anti-Hermitian unitary matrices with G_k^2 = -1 generating Cl(n,0).

    Seeded at n = 1 by (i) and at n = 2 by (i sigma_x, i sigma_y); each further
    pair of generators is added by tensoring with a Pauli pair through the
    chirality operator, and odd n appends i times the chirality.
    """
    if n == 1:
        return [np.array([[1j]])]
    gammas = [1j * SIGMA_X, 1j * SIGMA_Y]
    while len(gammas) + 2 <= n:
        chirality = _chirality(gammas)
        eye2 = np.eye(2, dtype=complex)
        gammas = [np.kron(g, eye2) for g in gammas] + [
            np.kron(chirality, 1j * SIGMA_X),
            np.kron(chirality, 1j * SIGMA_Y),
        ]
    if len(gammas) < n:
        gammas.append(1j * _chirality(gammas))
    return gammas


def _product(mats: Sequence[np.ndarray], dim: int) -> np.ndarray:
    return reduce(np.matmul, mats, np.eye(dim, dtype=complex))


def _skew_defect(gammas: Sequence[np.ndarray], beta: np.ndarray) -> float:
    return max(float(np.abs(g.conj().T @ beta + beta @ g).max()) for g in gammas)


def invariant_form(gammas: Sequence[np.ndarray], sig: Signature,
                   volume: np.ndarray) -> Tuple[np.ndarray, bool]:
    """
    Hermitian form for which every gamma matrix is skew.

    Candidates are the product of the timelike gammas, the product of the
    spacelike gammas and, in even dimension, the timelike product times the
    volume element. The first candidate passing the skew test is normalized
    to be Hermitian. When none passes (n odd, r even, s odd) the timelike
    product is returned with ``skew=False``; vectors are then self-adjoint.
    """
    dim = gammas[0].shape[0]
    timelike = _product(gammas[sig.r:], dim)
    spacelike = _product(gammas[:sig.r], dim)
    candidates = [timelike, spacelike]
    if sig.n % 2 == 0:
        candidates.append(timelike @ volume)
    chosen, skew = timelike, False
    for beta in candidates:
        if _skew_defect(gammas, beta) <= MATRIX_TOL:
            chosen, skew = beta, True
            break
    if np.abs(chosen.conj().T - chosen).max() > MATRIX_TOL:
        chosen = 1j * chosen
    if not skew:
        logger.warning("⚠️ no skew invariant form exists for signature %s; using the symmetric one", sig)
    return chosen, skew


@dataclass(frozen=True, eq=False)
class SpinorRep:
    """Matrix realization of the spinor module for a signature"""

    signature: Signature
    gamma: Tuple[np.ndarray, ...]
    volume: np.ndarray
    beta: np.ndarray
    beta_skew: bool = True
    module_label: Optional[str] = None
    projectors: Optional[Tuple[np.ndarray, np.ndarray]] = None
    ambient: Optional["SpinorRep"] = None
    embedding: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return self.gamma[0].shape[0]

    @property
    def n(self) -> int:
        return self.signature.n

    def matrix(self, a: CliffordElement) -> np.ndarray:
        """Image of a Clifford element"""
        if a.signature != self.signature:
            raise SignatureMismatchError(f"element in {a.signature}, representation of {self.signature}")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for blade, coef in a.coefficients.items():
            out += complex(coef) * _product([self.gamma[i - 1] for i in blade], self.dim)
        return out

    def vector(self, components: Sequence[complex]) -> np.ndarray:
        """Clifford multiplication by the vector sum_k c_k e_k"""
        comps = np.asarray(components)
        if comps.shape != (self.n,):
            raise DimensionMismatchError(f"expected {self.n} frame components, got {comps.shape}")
        return np.tensordot(comps, np.stack(self.gamma), axes=1)

    def pair(self, j: int, k: int) -> np.ndarray:
        """gamma_j gamma_k for 0-based frame indices"""
        return self.gamma[j] @ self.gamma[k]

    def inner(self, sigma1: np.ndarray, sigma2: np.ndarray) -> complex:
        """<sigma1, sigma2> = sigma1^H beta sigma2"""
        return complex(np.vdot(sigma1, self.beta @ sigma2))

    def restrict(self, ambient_operator: np.ndarray) -> np.ndarray:
        """Compress an ambient even operator onto this representation's space"""
        if self.embedding is None:
            return ambient_operator
        return self.embedding.conj().T @ ambient_operator @ self.embedding

    def chirality(self, sigma: np.ndarray) -> Optional[int]:
        """+1 or -1 for a chiral spinor (n even), None otherwise"""
        if self.projectors is None:
            return None
        plus, minus = self.projectors
        if np.allclose(plus @ sigma, sigma, atol=1e-10):
            return 1
        if np.allclose(minus @ sigma, sigma, atol=1e-10):
            return -1
        return None

    def invariant_residuals(self) -> Dict[str, float]:
        """Largest defects of the defining invariants"""
        eye = np.eye(self.dim)
        eps = self.signature.eps
        cliff = 0.0
        for i, gi in enumerate(self.gamma):
            for j, gj in enumerate(self.gamma):
                metric = 2 * eps[i] if i == j else 0
                cliff = max(cliff, float(np.abs(gi @ gj + gj @ gi + metric * eye).max()))
        phase = volume_phase(self.signature)
        vol2 = float(np.abs(self.volume @ self.volume - phase ** 2 * eye).max())
        out = {"clifford": cliff, "volume_square": vol2,
               "beta_hermitian": float(np.abs(self.beta.conj().T - self.beta).max())}
        if self.beta_skew:
            out["beta_skew"] = _skew_defect(self.gamma, self.beta)
        if self.projectors is not None:
            plus, minus = self.projectors
            out["chirality_balance"] = abs(float(np.trace(plus).real - np.trace(minus).real))
        elif self.module_label == "Sigma0":
            out["volume_scalar"] = float(np.abs(self.volume - phase * eye).max())
        return out


@dataclass(frozen=True, eq=False)
class SpinorVector:
    """Spinor components together with their representation"""

    components: np.ndarray
    rep: SpinorRep

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=complex)
        if comps.shape != (self.rep.dim,):
            raise DimensionMismatchError(
                f"spinor of length {comps.shape} for representation of dimension {self.rep.dim}")
        object.__setattr__(self, "components", comps)


def _finish_rep(sig: Signature, gammas: List[np.ndarray], **extra) -> SpinorRep:
    dim = gammas[0].shape[0]
    volume = _product(gammas, dim)
    phase = volume_phase(sig)
    projectors = None
    label = None
    if sig.n % 2 == 0:
        scaled = volume / phase
        eye = np.eye(dim)
        projectors = (0.5 * (eye + scaled), 0.5 * (eye - scaled))
    else:
        label = "Sigma0" if np.allclose(volume, phase * np.eye(dim), atol=1e-10) else "Sigma1"
    beta, skew = invariant_form(gammas, sig, volume)
    return SpinorRep(signature=sig, gamma=tuple(gammas), volume=volume, beta=beta, beta_skew=skew,
                     module_label=label, projectors=projectors, **extra)


@lru_cache(maxsize=None)
def build_spinor_rep(sig: Signature) -> SpinorRep:
    """
    Deterministic spinor representation of Cl(r,s).

    Timelike generators are i times the Euclidean ones. For odd n the module
    Sigma0 is built: all gammas are negated if the volume element came out
    as -i^(s+n(n+1)/2).
    """
    base = euclidean_gammas(sig.n)
    gammas = [g if k < sig.r else 1j * g for k, g in enumerate(base)]
    if sig.n % 2 == 1:
        dim = gammas[0].shape[0]
        volume = _product(gammas, dim)
        if not np.allclose(volume, volume_phase(sig) * np.eye(dim), atol=1e-10):
            gammas = [-g for g in gammas]
    return _finish_rep(sig, gammas)


def act(rep: SpinorRep, a: CliffordElement, sigma: SpinorVector) -> SpinorVector:
    """Clifford multiplication of a spinor by an algebra element"""
    if sigma.rep.dim != rep.dim:
        raise DimensionMismatchError(f"spinor of dimension {sigma.rep.dim} for rep of dimension {rep.dim}")
    return SpinorVector(rep.matrix(a) @ sigma.components, rep)


def spin_element_matrix(rep: SpinorRep, vectors: Sequence[CliffordElement]) -> np.ndarray:
    """Matrix of the product v_1···v_k of vectors acting on spinors"""
    mats = [rep.matrix(v) for v in vectors]
    return _product(mats, rep.dim)


@lru_cache(maxsize=None)
def hypersurface_restriction(rep_big: SpinorRep) -> SpinorRep:
    """
    Representation of Cl(r,s) induced by e_0 from one of Cl(r+1,s).

    Frame vector e_k of the hypersurface acts by gamma(e_0) gamma(e_{k+1}).
    When the ambient dimension is even the result lives on the positive
    chirality subspace; ``embedding`` holds an orthonormal basis of it.
    """
    big = rep_big.signature
    if big.r < 1 or big.n < 2:
        raise SignatureMismatchError(f"ambient signature {big} has no spacelike normal and leaf")
    sig = Signature(big.r - 1, big.s)
    g0 = rep_big.gamma[0]
    raw = [g0 @ g for g in rep_big.gamma[1:]]
    if big.n % 2 == 0:
        plus = rep_big.projectors[0]
        values, vectors = np.linalg.eigh(0.5 * (plus + plus.conj().T))
        embedding = vectors[:, values > 0.5]
    else:
        embedding = np.eye(rep_big.dim, dtype=complex)
    gammas = [embedding.conj().T @ g @ embedding for g in raw]
    return _finish_rep(sig, gammas, ambient=rep_big, embedding=embedding)
