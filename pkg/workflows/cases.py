"""
🗂️ Verification Cases
====================

Pydantic models for the JSON case files accepted by ``run`` and the builtin
acceptance suites. A case names the module it targets (``kind``), carries a
module-specific ``payload`` and the shared knobs: tolerance, sample count and
the seed of every randomized choice.
"""

import logging
from typing import Any, Dict, List, Literal, Optional, Sequence, Type, Union

import numpy as np
import orjson
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from algebra.clifford import Signature
from geometry.catalog import EMBEDDINGS, FAMILIES
from lorentz.lorentz_space import VerdictKind
from utils.errors import SchemaError
from utils.formatting import loads

logger = logging.getLogger(__name__)

Kind = Literal["clifford", "cylinder", "embed", "spin", "lorentz"]
SCOPES = ("clifford", "cylinder", "embed", "spin", "lorentz")


class CliffordPayload(BaseModel):
    """Signature as "r,s"; the matrix checks can be switched off for blade-only runs"""

    signature: str
    matrices: bool = True

    @field_validator("signature")
    @classmethod
    def _parse(cls, value: str) -> str:
        try:
            Signature.parse(value)
        except SchemaError as e:
            raise ValueError(e.message) from e
        return value

    @property
    def parsed(self) -> Signature:
        return Signature.parse(self.signature)


class CylinderPayload(BaseModel):
    """A catalog family name (optionally with a leaf for ``warped:<f>``) or a family JSON"""

    family: Union[str, Dict[str, Any]]
    leaf: Optional[str] = None
    t_values: Optional[List[float]] = None


class EmbedPayload(BaseModel):
    datum: Optional[str] = None
    metric: Optional[Union[str, Dict[str, Any]]] = None
    endomorphism: Optional[Any] = None
    kappa: Optional[float] = None
    expect_fail: bool = Field(default=False, description="negative control: pass means a large residual")

    @model_validator(mode="after")
    def _complete(self) -> "EmbedPayload":
        if self.datum is None:
            if self.metric is None or self.endomorphism is None or self.kappa is None:
                raise ValueError("either 'datum' or all of 'metric', 'endomorphism', 'kappa' are required")
        elif self.datum not in EMBEDDINGS:
            raise ValueError(f"unknown embedding datum {self.datum!r}; known: {list(EMBEDDINGS)}")
        return self


SpinCheck = Literal["variation", "commutator", "lagrangian", "killing", "energy"]


class SpinPayload(BaseModel):
    """
    Spinor identities on a family (variation, commutator, lagrangian) or on
    Killing data (killing, energy). ``datum`` picks the Killing data:
    ``flat`` (A = 0, constant ψ), ``sphere_cone`` (round S², A = Id) or
    ``non_codazzi`` (flat, A = diag(x1, 0), expected to be rejected).
    """

    check: SpinCheck
    family: Union[str, Dict[str, Any]] = "linear"
    spinor: Optional[Dict[str, Any]] = None
    datum: Literal["flat", "sphere_cone", "non_codazzi"] = "sphere_cone"
    points: Optional[List[List[float]]] = Field(default=None, min_length=1)
    lam: float = 0.0
    t0: float = 0.0
    convergence: bool = False


class LorentzPayload(BaseModel):
    """
    An explicit pair (g0, g1) with an optional expected verdict, or
    ``random`` seeded connectable pairs of dimension ``dim``.
    """

    g0: Optional[List[List[float]]] = None
    g1: Optional[List[List[float]]] = None
    expect: Optional[VerdictKind] = None
    samples: int = Field(default=5, ge=2)
    random: Optional[int] = Field(default=None, ge=1)
    dim: int = Field(default=3, ge=2)

    @model_validator(mode="after")
    def _pair_or_random(self) -> "LorentzPayload":
        if self.random is None and (self.g0 is None or self.g1 is None):
            raise ValueError("either both 'g0' and 'g1' or 'random' are required")
        return self


PAYLOADS: Dict[str, Type[BaseModel]] = {
    "clifford": CliffordPayload,
    "cylinder": CylinderPayload,
    "embed": EmbedPayload,
    "spin": SpinPayload,
    "lorentz": LorentzPayload,
}

_CASE_FIELDS = {"kind", "name", "payload", "tol", "samples", "seed"}


class CaseSpec(BaseModel):
    kind: Kind
    name: str = ""
    payload: Dict[str, Any] = Field(default_factory=dict)
    tol: Optional[float] = Field(default=None, gt=0)
    samples: int = Field(default=20, ge=1)
    seed: int = 0

    @model_validator(mode="before")
    @classmethod
    def _flat_payload(cls, data: Any) -> Any:
        # {"kind": "lorentz", "g0": ..., "g1": ...} is accepted as shorthand
        if isinstance(data, dict) and "payload" not in data:
            extra = {k: v for k, v in data.items() if k not in _CASE_FIELDS}
            if extra:
                data = {k: v for k, v in data.items() if k in _CASE_FIELDS}
                data["payload"] = extra
        return data

    @model_validator(mode="after")
    def _validate_payload(self) -> "CaseSpec":
        PAYLOADS[self.kind].model_validate(self.payload)
        if not self.name:
            self.name = f"{self.kind}:{_default_name(self.payload)}"
        return self

    @property
    def typed(self) -> BaseModel:
        return PAYLOADS[self.kind].model_validate(self.payload)


def _default_name(payload: Dict[str, Any]) -> str:
    for key in ("signature", "datum", "family", "check"):
        if isinstance(payload.get(key), str):
            return payload[key]
    return "custom"


def validation_details(error: ValidationError) -> List[Dict[str, Any]]:
    return loads(error.json(include_url=False))


def parse_case(obj: Any) -> CaseSpec:
    try:
        return CaseSpec.model_validate(obj)
    except ValidationError as e:
        raise SchemaError(f"invalid case: {e.error_count()} validation error(s)",
                          {"errors": validation_details(e)}) from e


def load_case(text: str) -> CaseSpec:
    """Parse a JSON case file; every failure surfaces as a SchemaError"""
    try:
        obj = loads(text)
    except orjson.JSONDecodeError as e:
        raise SchemaError(f"malformed JSON: {e}") from e
    return parse_case(obj)


# ---------------------------------------------------------------------------
# builtin suites
# ---------------------------------------------------------------------------

def _diag(*values: float) -> List[List[float]]:
    return np.diag(values).tolist()


def clifford_cases(seed: int = 0) -> List[CaseSpec]:
    """Every signature with 1 <= n <= 6"""
    return [CaseSpec(kind="clifford", name=f"clifford:{r},{n - r}", payload={"signature": f"{r},{n - r}"}, seed=seed)
            for n in range(1, 7) for r in range(n, -1, -1)]


def cylinder_cases(seed: int = 0) -> List[CaseSpec]:
    return [CaseSpec(kind="cylinder", name=f"cylinder:{name}", payload={"family": name}, samples=20, seed=seed)
            for name in FAMILIES]


def embed_cases(seed: int = 0) -> List[CaseSpec]:
    return [CaseSpec(kind="embed", name=f"embed:{name}",
                     payload={"datum": name, "expect_fail": name == "flat_negative"}, samples=20, seed=seed)
            for name in EMBEDDINGS]


def spin_cases(seed: int = 0) -> List[CaseSpec]:
    payloads: Sequence[Dict[str, Any]] = (
        {"check": "variation", "family": "linear", "convergence": True},
        {"check": "variation", "family": "conformal_sphere"},
        {"check": "commutator", "family": "linear"},
        {"check": "commutator", "family": "conformal_sphere"},
        {"check": "lagrangian", "family": "linear", "lam": 0.5},
        {"check": "killing", "datum": "flat"},
        {"check": "killing", "datum": "sphere_cone"},
        {"check": "killing", "datum": "non_codazzi"},
        {"check": "energy", "datum": "sphere_cone"},
    )
    cases = []
    for payload in payloads:
        target = payload.get("family") if payload["check"] in ("variation", "commutator", "lagrangian") \
            else payload["datum"]
        cases.append(CaseSpec(kind="spin", name=f"spin:{payload['check']}:{target}", payload=dict(payload),
                              samples=2, seed=seed))
    return cases


def lorentz_cases(seed: int = 0) -> List[CaseSpec]:
    s = float(np.arccosh(1.5))
    pairs = {
        "hyperbolic": (_diag(1, -1), _diag(4, -0.25), VerdictKind.UNIQUE_TIMELIKE),
        "parabolic": (_diag(1, -1), [[2, -1], [-1, 0]], VerdictKind.UNIQUE_NULL),
        "elliptic": (_diag(1, -1), [[np.cos(1.0), np.sin(1.0)], [np.sin(1.0), -np.cos(1.0)]],
                     VerdictKind.UNIQUE_SPACELIKE),
        "antipodal": (_diag(1, -1), _diag(-1, 1), VerdictKind.INFINITELY_MANY_SPACELIKE),
        "beyond_antipodal": (_diag(1, -1), _diag(-np.exp(s), np.exp(-s)), VerdictKind.NO_GEODESIC),
        "parabolic_negative": (_diag(1, -1), [[-2, 1], [1, 0]], VerdictKind.NO_GEODESIC),
        "nilpotent": (_diag(1, 1, -1), [[2, 2, 0], [2, 2, -2], [0, -2, -2]], VerdictKind.UNIQUE_NILPOTENT_NULL),
        "negative_pair": (_diag(1, 1, -1), _diag(1, -2, 0.5), VerdictKind.NO_GEODESIC),
        "antipodal_3d": (_diag(1, 1, -1), _diag(-1, 1, 1), VerdictKind.INFINITELY_MANY_SPACELIKE),
    }
    cases = [CaseSpec(kind="lorentz", name=f"lorentz:{name}",
                      payload={"g0": g0, "g1": g1, "expect": expect.value}, seed=seed)
             for name, (g0, g1, expect) in pairs.items()]
    for dim, count in ((2, 50), (3, 20), (4, 10), (5, 5)):
        cases.append(CaseSpec(kind="lorentz", name=f"lorentz:random{dim}",
                              payload={"random": count, "dim": dim}, seed=seed))
    return cases


SUITES = {
    "clifford": clifford_cases,
    "cylinder": cylinder_cases,
    "embed": embed_cases,
    "spin": spin_cases,
    "lorentz": lorentz_cases,
}


def builtin_cases(scope: str = "all", seed: int = 0) -> List[CaseSpec]:
    """The acceptance suite of one module, or of all of them"""
    if scope == "all":
        return [case for name in SCOPES for case in SUITES[name](seed)]
    if scope not in SUITES:
        raise SchemaError(f"unknown suite {scope!r}; known: all, {', '.join(SCOPES)}")
    return SUITES[scope](seed)
