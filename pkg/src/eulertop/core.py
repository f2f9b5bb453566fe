"""Shared parameter types for the reduced free rigid body.

The reduced dynamics lives on a momentum sphere of radius sqrt(2*l) and is
controlled by four numbers: the reciprocal moments of inertia a = 1/I1,
b = 1/I2, c = 1/I3 and the energy ratio d = h/l.  Everything downstream
(periods, quadratures, monodromy loops) is parameterized by the quadruple
(a, b, c, d) together with the Casimir level l, so those live here as small
immutable value types, with the two cross-ratio conventions attached.

Two cross-ratios of (a, b, c, d) appear in the period formulas and they are
easy to mix up, so both get a name:

    mu_main(m)      = (d-a)(b-c) / ((d-c)(b-a))      (argument of K)
    lambda_proof(m) = (d-a)(c-b) / ((d-b)(c-a))      (classical normalization)

They are related by mu = lam/(lam - 1); every downstream formula states which
one it uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations as _permutations

__all__ = [
    "CoincidentModuliError",
    "DomainError",
    "InertiaSpec",
    "LABELS",
    "ModuliPoint",
    "Permutation4",
    "all_permutations",
    "apply_permutation",
    "lambda_proof",
    "moduli_from_mechanics",
    "mu_main",
]

LABELS = ("a", "b", "c", "d")

# Scale-aware coincidence threshold: pairs closer than this (relative to the
# largest coordinate) are treated as sitting on the discriminant.
DEGENERACY_RTOL = 1e-12


class DomainError(ValueError):
    """Parameter combination outside an operation's domain."""


class CoincidentModuliError(DomainError):
    """Two moduli coordinates coincide (the point is on the discriminant)."""

    def __init__(self, pair: tuple[str, str], message: str | None = None):
        self.pair = tuple(sorted(pair))
        if message is None:
            message = f"moduli coordinates {self.pair[0]} = {self.pair[1]}: point is on the discriminant"
        super().__init__(message)


@dataclass(frozen=True)
class InertiaSpec:
    """Principal moments of inertia, pairwise distinct and positive.

    Attributes
    ----------
    I1, I2, I3 : float
        Moments of inertia in arbitrary mass * length**2 units.
    """

    I1: float
    I2: float
    I3: float

    def __post_init__(self) -> None:
        for name in ("I1", "I2", "I3"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)) or value <= 0.0:
                raise DomainError(f"{name} must be positive and finite, got {value!r}")
        if self.I1 == self.I2 or self.I2 == self.I3 or self.I1 == self.I3:
            raise DomainError("moments of inertia must be pairwise distinct")

    @property
    def canonical(self) -> bool:
        """Whether I1 < I2 < I3, the ordering the period formulas assume."""
        return self.I1 < self.I2 < self.I3

    def reciprocals(self) -> tuple[float, float, float]:
        """The parameters (a, b, c) = (1/I1, 1/I2, 1/I3)."""
        return 1.0 / self.I1, 1.0 / self.I2, 1.0 / self.I3

    @staticmethod
    def from_reciprocals(a: float, b: float, c: float) -> "InertiaSpec":
        return InertiaSpec(1.0 / a, 1.0 / b, 1.0 / c)


@dataclass(frozen=True)
class ModuliPoint:
    """A point (a, b, c, d) of the parameter space with its Casimir level l.

    Coordinates are affine and complex; the Casimir level l > 0 enters only
    through prefactors (the mechanics fixes an affine chart, so no projective
    bookkeeping happens here).  The original energy is recovered as h = d * l.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    l: float = 1.0

    def __post_init__(self) -> None:
        if not (isinstance(self.l, (int, float)) and math.isfinite(self.l)) or self.l <= 0.0:
            raise DomainError(f"Casimir level l must be positive, got {self.l!r}")
        for name in LABELS:
            z = complex(getattr(self, name))
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise DomainError(f"coordinate {name} must be finite, got {z!r}")

    @property
    def h(self) -> complex:
        return self.d * self.l

    def coords(self) -> tuple[complex, complex, complex, complex]:
        return (complex(self.a), complex(self.b), complex(self.c), complex(self.d))

    def scale(self) -> float:
        return max(1.0, *(abs(complex(getattr(self, n))) for n in LABELS))

    def coincident_pairs(self, rtol: float = DEGENERACY_RTOL) -> list[tuple[str, str]]:
        """All label pairs closer than rtol * scale, in a fixed order."""
        tol = rtol * self.scale()
        found = []
        for x, y in (("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")):
            if abs(complex(getattr(self, x)) - complex(getattr(self, y))) < tol:
                found.append((x, y))
        return found

    def distance_to_discriminant(self) -> float:
        return min(
            abs(complex(getattr(self, x)) - complex(getattr(self, y)))
            for x, y in (("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d"))
        )

    def is_real(self, atol: float = 0.0) -> bool:
        return all(abs(complex(getattr(self, n)).imag) <= atol for n in LABELS)

    def replace(self, **kw) -> "ModuliPoint":
        data = {n: getattr(self, n) for n in LABELS}
        data["l"] = self.l
        data.update(kw)
        return ModuliPoint(**data)

    # JSON field names are fixed; the CLI round-trips through this format.
    def to_json_dict(self) -> dict:
        out: dict = {}
        for n in LABELS:
            z = complex(getattr(self, n))
            out[n] = [z.real, z.imag]
        out["l"] = float(self.l)
        return out

    @staticmethod
    def from_json_dict(data: dict) -> "ModuliPoint":
        kw = {}
        for n in LABELS:
            v = data[n]
            kw[n] = complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
        return ModuliPoint(l=float(data.get("l", 1.0)), **kw)


def moduli_from_mechanics(inertia: InertiaSpec, l: float, h: float) -> ModuliPoint:
    """Map mechanical data (inertia, Casimir level l, energy h) to moduli.

    Returns (a, b, c, d) = (1/I1, 1/I2, 1/I3, h/l) with the level l attached.
    Coincidences such as d = a are allowed here; they are detected by
    ``coincident_pairs`` and rejected only by operations that are actually
    singular there.
    """
    if not (isinstance(l, (int, float)) and math.isfinite(l)) or l <= 0.0:
        raise DomainError(f"Casimir level l must be positive, got {l!r}")
    a, b, c = inertia.reciprocals()
    return ModuliPoint(a, b, c, h / l, l=float(l))


def _cross_ratio(m: ModuliPoint, num_pairs, den_pairs) -> complex:
    vals = {n: complex(getattr(m, n)) for n in LABELS}
    tol = DEGENERACY_RTOL * m.scale()
    den = 1.0 + 0.0j
    for x, y in den_pairs:
        diff = vals[x] - vals[y]
        if abs(diff) < tol:
            raise CoincidentModuliError((x, y))
        den *= diff
    num = 1.0 + 0.0j
    for x, y in num_pairs:
        num *= vals[x] - vals[y]
    return num / den


def mu_main(m: ModuliPoint) -> complex:
    """The cross-ratio (d-a)(b-c) / ((d-c)(b-a)), the K argument."""
    return _cross_ratio(m, (("d", "a"), ("b", "c")), (("d", "c"), ("b", "a")))


def lambda_proof(m: ModuliPoint) -> complex:
    """The cross-ratio (d-a)(c-b) / ((d-b)(c-a)).

    Related to ``mu_main`` by mu = lam/(lam - 1); in the real chamber
    a > d > b > c this variant is negative while mu lies in (0, 1).
    """
    return _cross_ratio(m, (("d", "a"), ("c", "b")), (("d", "b"), ("c", "a")))


@dataclass(frozen=True)
class Permutation4:
    """A bijection of the coordinate labels {a, b, c, d}.

    ``images`` lists the images of (a, b, c, d) in that order, so
    ``Permutation4(("b", "a", "c", "d"))`` is the transposition (ab).
    """

    images: tuple[str, str, str, str]

    def __post_init__(self) -> None:
        if sorted(self.images) != sorted(LABELS):
            raise ValueError(f"not a permutation of {LABELS}: {self.images}")

    def __call__(self, label: str) -> str:
        return self.images[LABELS.index(label)]

    def compose(self, other: "Permutation4") -> "Permutation4":
        """self after other: (self * other)(x) = self(other(x))."""
        return Permutation4(tuple(self(other(x)) for x in LABELS))

    def inverse(self) -> "Permutation4":
        inv = {self(x): x for x in LABELS}
        return Permutation4(tuple(inv[x] for x in LABELS))

    @property
    def is_identity(self) -> bool:
        return self.images == LABELS

    @staticmethod
    def identity() -> "Permutation4":
        return Permutation4(LABELS)

    @staticmethod
    def from_cycles(notation: str) -> "Permutation4":
        """Parse cycle notation such as "(ac)" or "(abd)(c)" or "(abdc)"."""
        mapping = {x: x for x in LABELS}
        text = notation.replace(" ", "")
        if text in ("", "()", "e", "id"):
            return Permutation4.identity()
        depth = 0
        cycles: list[str] = []
        current = ""
        for ch in text:
            if ch == "(":
                if depth:
                    raise ValueError(f"bad cycle notation: {notation!r}")
                depth, current = 1, ""
            elif ch == ")":
                depth = 0
                if current:
                    cycles.append(current)
            else:
                if not depth or ch not in LABELS:
                    raise ValueError(f"bad cycle notation: {notation!r}")
                current += ch
        if depth:
            raise ValueError(f"bad cycle notation: {notation!r}")
        for cyc in cycles:
            for i, x in enumerate(cyc):
                mapping[x] = cyc[(i + 1) % len(cyc)]
        return Permutation4(tuple(mapping[x] for x in LABELS))

    def cycle_notation(self) -> str:
        seen: set[str] = set()
        parts = []
        for start in LABELS:
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self(start)
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self(nxt)
            if len(cyc) > 1:
                parts.append("(" + "".join(cyc) + ")")
        return "".join(parts) or "e"


def all_permutations() -> list[Permutation4]:
    """The 24 elements of the label group, in a fixed deterministic order."""
    return [Permutation4(images) for images in sorted(_permutations(LABELS))]


def apply_permutation(m: ModuliPoint, p: Permutation4) -> ModuliPoint:
    """Relabel coordinates: the value at label x moves to label p(x).

    The Casimir level is untouched.  For the swap (ac) applied to
    (3, 2, 1, 2.5) this yields (1, 2, 3, 2.5).
    """
    new = {p(x): getattr(m, x) for x in LABELS}
    return ModuliPoint(new["a"], new["b"], new["c"], new["d"], l=m.l)
