"""
➕ Clifford Algebra Cl(r,s)
==========================

Exact blade arithmetic in Clifford algebras of arbitrary signature with the
convention v·w + w·v + 2<v,w> = 0, so e_i·e_i = -eps_i.

Blades are strictly increasing index tuples (1-based); coefficients are
``fractions.Fraction`` for exact identity checks or floats when mixed with
numerical data.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from numbers import Number
from typing import Dict, Iterable, List, Tuple, Union

from utils.errors import NullVectorError, SchemaError, SignatureMismatchError

Blade = Tuple[int, ...]
Scalar = Union[Fraction, float, int]


@dataclass(frozen=True)
class Signature:
    """Counts of +1 and -1 directions of a nondegenerate inner product"""

    r: int
    s: int

    def __post_init__(self):
        if self.r < 0 or self.s < 0 or self.r + self.s < 1:
            raise SignatureMismatchError(f"invalid signature ({self.r},{self.s})",
                                         {"r": self.r, "s": self.s})

    @property
    def n(self) -> int:
        return self.r + self.s

    @property
    def eps(self) -> Tuple[int, ...]:
        """Diagonal signs, spacelike first"""
        return tuple([1] * self.r + [-1] * self.s)

    def epsilon(self, i: int) -> int:
        """Sign of the 1-based basis vector e_i"""
        return 1 if i <= self.r else -1

    @classmethod
    def parse(cls, text: str) -> "Signature":
        try:
            r, s = (int(part) for part in text.split(","))
        except ValueError as e:
            raise SchemaError(f"signature must read 'r,s', got {text!r}") from e
        return cls(r, s)

    def __str__(self) -> str:
        return f"({self.r},{self.s})"


def blade_product(a: Blade, b: Blade, sig: Signature) -> Tuple[int, Blade]:
    """
    Product of two basis blades.

    Returns (sign, blade). The reordering parity is the number of inversions
    between the two sorted words; each repeated generator contracts to -eps_i.
    """
    swaps = sum(1 for y in b for x in a if x > y)
    sign = -1 if swaps % 2 else 1
    common = set(a) & set(b)
    for i in common:
        sign *= -sig.epsilon(i)
    return sign, tuple(sorted(set(a) ^ set(b)))


@dataclass(frozen=True)
class CliffordElement:
    """A finite combination of basis blades"""

    signature: Signature
    coefficients: Dict[Blade, Scalar] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for blade, coef in self.coefficients.items():
            blade = tuple(blade)
            if list(blade) != sorted(set(blade)) or any(i < 1 or i > self.signature.n for i in blade):
                raise SignatureMismatchError(f"invalid blade {blade} for signature {self.signature}")
            if coef != 0:
                clean[blade] = coef
        object.__setattr__(self, "coefficients", clean)

    # construction

    @classmethod
    def scalar(cls, sig: Signature, value: Scalar = 1) -> "CliffordElement":
        return cls(sig, {(): value})

    @classmethod
    def basis(cls, sig: Signature, i: int) -> "CliffordElement":
        return cls(sig, {(i,): Fraction(1)})

    @classmethod
    def vector(cls, sig: Signature, components: Iterable[Scalar]) -> "CliffordElement":
        comps = list(components)
        if len(comps) != sig.n:
            raise SignatureMismatchError(f"vector needs {sig.n} components, got {len(comps)}")
        return cls(sig, {(i + 1,): c for i, c in enumerate(comps)})

    @classmethod
    def blade(cls, sig: Signature, indices: Iterable[int], value: Scalar = 1) -> "CliffordElement":
        word = list(indices)
        out = cls.scalar(sig, value)
        for i in word:
            out = out * cls.basis(sig, i)
        return out

    # algebra

    def _check(self, other: "CliffordElement") -> None:
        if self.signature != other.signature:
            raise SignatureMismatchError(
                f"signature mismatch {self.signature} vs {other.signature}")

    def __add__(self, other: "CliffordElement") -> "CliffordElement":
        self._check(other)
        out = dict(self.coefficients)
        for blade, coef in other.coefficients.items():
            out[blade] = out.get(blade, 0) + coef
        return CliffordElement(self.signature, out)

    def __neg__(self) -> "CliffordElement":
        return CliffordElement(self.signature, {b: -c for b, c in self.coefficients.items()})

    def __sub__(self, other: "CliffordElement") -> "CliffordElement":
        return self + (-other)

    def __mul__(self, other: Union["CliffordElement", Scalar]) -> "CliffordElement":
        if isinstance(other, Number):
            return CliffordElement(self.signature, {b: c * other for b, c in self.coefficients.items()})
        return geometric_product(self, other)

    def __rmul__(self, other: Scalar) -> "CliffordElement":
        return self * other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CliffordElement):
            return NotImplemented
        return self.signature == other.signature and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash((self.signature, tuple(sorted(self.coefficients.items()))))

    # structure

    def grades(self) -> List[int]:
        return sorted({len(b) for b in self.coefficients})

    def grade_part(self, k: int) -> "CliffordElement":
        return CliffordElement(self.signature,
                               {b: c for b, c in self.coefficients.items() if len(b) == k})

    def is_even(self) -> bool:
        return all(len(b) % 2 == 0 for b in self.coefficients)

    def is_vector(self) -> bool:
        return all(len(b) == 1 for b in self.coefficients)

    def reverse(self) -> "CliffordElement":
        """Reverse the order of generators in every blade"""
        out = {}
        for blade, coef in self.coefficients.items():
            k = len(blade)
            out[blade] = coef if (k * (k - 1) // 2) % 2 == 0 else -coef
        return CliffordElement(self.signature, out)

    def vector_components(self) -> List[Scalar]:
        if not self.is_vector():
            raise SignatureMismatchError("element is not grade-1")
        return [self.coefficients.get((i,), 0) for i in range(1, self.signature.n + 1)]

    def __repr__(self) -> str:
        if not self.coefficients:
            return "0"
        parts = []
        for blade in sorted(self.coefficients, key=lambda b: (len(b), b)):
            name = "e" + "".join(str(i) for i in blade) if blade else "1"
            parts.append(f"{self.coefficients[blade]}*{name}")
        return " + ".join(parts)


def geometric_product(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    """Bilinear extension of ``blade_product``"""
    a._check(b)
    sig = a.signature
    out: Dict[Blade, Scalar] = {}
    for ba, ca in a.coefficients.items():
        for bb, cb in b.coefficients.items():
            sign, blade = blade_product(ba, bb, sig)
            out[blade] = out.get(blade, 0) + sign * ca * cb
    return CliffordElement(sig, out)


def inner(v: CliffordElement, w: CliffordElement) -> Scalar:
    """Diagonal inner product of two grade-1 elements"""
    v._check(w)
    sig = v.signature
    cv, cw = v.vector_components(), w.vector_components()
    return sum(sig.epsilon(i + 1) * x * y for i, (x, y) in enumerate(zip(cv, cw)))


def adjoint_action(v: CliffordElement, w: CliffordElement) -> CliffordElement:
    """
    Reflection of w across the hyperplane orthogonal to v.

    Equals v^-1 w v = -w + 2 <v,w>/<v,v> v.
    """
    v._check(w)
    norm = inner(v, v)
    if norm == 0:
        raise NullVectorError("adjoint action needs a non-null vector", {"v": repr(v)})
    factor = Fraction(2) * inner(v, w) / norm if isinstance(norm, (int, Fraction)) else 2.0 * inner(v, w) / norm
    return -w + v * factor


def inverse_vector(v: CliffordElement) -> CliffordElement:
    """v^-1 = -v / <v,v> for a non-null vector"""
    norm = inner(v, v)
    if norm == 0:
        raise NullVectorError("null vector has no inverse", {"v": repr(v)})
    factor = Fraction(-1) / norm if isinstance(norm, (int, Fraction)) else -1.0 / norm
    return v * factor


def all_blades(sig: Signature) -> List[Blade]:
    """Every basis blade ordered by grade, then lexicographically"""
    idx = range(1, sig.n + 1)
    return [c for k in range(sig.n + 1) for c in combinations(idx, k)]


def volume_element(sig: Signature) -> CliffordElement:
    return CliffordElement(sig, {tuple(range(1, sig.n + 1)): Fraction(1)})


def multiplication_table(sig: Signature) -> Dict[str, object]:
    """Full blade product table as plain data"""
    blades = all_blades(sig)
    products = []
    for a in blades:
        row = []
        for b in blades:
            sign, blade = blade_product(a, b, sig)
            row.append({"blade": list(blade), "coef": sign})
        products.append(row)
    return {"blades": [list(b) for b in blades], "products": products}
