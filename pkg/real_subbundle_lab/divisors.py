"""
Divisors on a real hyperelliptic curve.

Effective divisors as canonical multisets of curve points, the
tolerance-aware multiset matcher behind every equality question, reality
testing and the odd-circle signature of real divisors.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.settings import get_settings
from real_subbundle_lab.curve import (
    CurvePoint,
    Involution,
    RealHyperellipticCurve,
    RegionKind,
    locate,
)
from real_subbundle_lab.errors import AmbiguousMatch, BadParity, NotReal

logger = logging.getLogger(__name__)


class DivisorTransform(str, Enum):
    TAU = "tau"
    IOTA = "iota"
    IOTA_ON_SUBSET = "iota_on_subset"


@dataclass(frozen=True)
class DivisorEntry:
    point: CurvePoint
    multiplicity: int


def _order_key(point: CurvePoint) -> Tuple[float, ...]:
    if point.is_infinity:
        return (1.0, float(-point.branch), 0.0, 0.0, 0.0)
    return (0.0, point.x.real, point.x.imag, point.y.real, point.y.imag)


@dataclass(frozen=True, eq=False)
class Divisor:
    """
    An effective divisor: points with positive multiplicities.

    Entries are merged (points equal to tolerance add their multiplicities)
    and sorted by (Re x, Im x, y) with the points at infinity last. Use
    :meth:`matches` for equality of divisors.
    """

    curve: RealHyperellipticCurve
    entries: Tuple[DivisorEntry, ...]

    @classmethod
    def from_entries(
        cls, curve: RealHyperellipticCurve, entries: Iterable[DivisorEntry]
    ) -> "Divisor":
        merged: List[List] = []
        for entry in entries:
            if entry.multiplicity <= 0:
                raise ValueError("multiplicities must be positive")
            curve.check_point(entry.point)
            for slot in merged:
                if curve.same_point(slot[0], entry.point):
                    slot[1] += entry.multiplicity
                    break
            else:
                merged.append([entry.point, entry.multiplicity])
        ordered = sorted(merged, key=lambda slot: _order_key(slot[0]))
        return cls(curve, tuple(DivisorEntry(p, m) for p, m in ordered))

    @classmethod
    def from_points(
        cls, curve: RealHyperellipticCurve, points: Iterable[CurvePoint]
    ) -> "Divisor":
        return cls.from_entries(curve, (DivisorEntry(p, 1) for p in points))

    @property
    def degree(self) -> int:
        return sum(e.multiplicity for e in self.entries)

    def points(self) -> List[CurvePoint]:
        """Points repeated by multiplicity, in canonical order."""
        return [e.point for e in self.entries for _ in range(e.multiplicity)]

    @property
    def near_branch_point(self) -> bool:
        return any(
            self.curve.weierstrass_index(e.point) is not None for e in self.entries
        )

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor.from_entries(self.curve, self.entries + other.entries)

    def matches(self, other: "Divisor") -> bool:
        """Multiset equality within the curve tolerance."""
        return match_multisets(self, other)

    def to_literal(self) -> List[Dict[str, object]]:
        out = []
        for entry in self.entries:
            item = entry.point.to_literal()
            item["mult"] = entry.multiplicity
            out.append(item)
        return out

    def __str__(self) -> str:
        parts = [
            (f"{e.multiplicity}*" if e.multiplicity > 1 else "") + str(e.point)
            for e in self.entries
        ]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class LineBundleTopType:
    """Topological type of a real line bundle: degree and odd-circle bits."""

    degree: int
    odd_circles: Tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.odd_circles):
            raise BadParity(f"odd_circles must be bits, got {self.odd_circles}")
        if (self.degree - sum(self.odd_circles)) % 2 != 0:
            raise BadParity(
                f"degree {self.degree} does not match the parity of {self.bits}"
            )

    @classmethod
    def from_bits(cls, bits: str, degree: Optional[int] = None) -> "LineBundleTopType":
        """Parse a bit string such as ``"101"``; degree defaults to its parity."""
        vector = tuple(int(c) for c in bits.strip())
        if any(b not in (0, 1) for b in vector) or not vector:
            raise BadParity(f"not a bit string: {bits!r}")
        return cls(sum(vector) % 2 if degree is None else degree, vector)

    @property
    def bits(self) -> str:
        return "".join(str(b) for b in self.odd_circles)

    @property
    def odd_count(self) -> int:
        return sum(self.odd_circles)


def match_multisets(
    left: Divisor,
    right: Divisor,
    tol: Optional[float] = None,
    ratio: Optional[float] = None,
) -> bool:
    """
    Compare two divisors as multisets by greedy nearest-neighbour matching.

    Args:
        left: First divisor
        right: Second divisor on the same curve
        tol: Point-equality tolerance; defaults to the curve's
        ratio: A match is ambiguous when the second-nearest candidate lies
            within ``ratio`` times the nearest distance

    Returns:
        bool: True when every entry pairs with an equal entry of equal
        multiplicity

    Raises:
        AmbiguousMatch: If a pairing cannot be decided at this tolerance
    """
    curve = left.curve
    tol = curve.tolerance if tol is None else tol
    ratio = get_settings().tolerances.ambiguity_ratio if ratio is None else ratio
    if left.degree != right.degree or len(left.entries) != len(right.entries):
        return False
    unused = list(right.entries)
    for entry in left.entries:
        distances = sorted(
            ((curve.distance(entry.point, other.point), k) for k, other in enumerate(unused)),
            key=lambda item: item[0],
        )
        nearest, k = distances[0]
        if nearest > tol:
            return False
        if len(distances) > 1:
            second = distances[1][0]
            if second <= tol or (nearest > 0.0 and second <= ratio * nearest):
                raise AmbiguousMatch(
                    f"{entry.point} has two candidates at {nearest:.3e} and {second:.3e}"
                )
        if unused[k].multiplicity != entry.multiplicity:
            return False
        unused.pop(k)
    return True


def transform(
    divisor: Divisor,
    which: Union[DivisorTransform, str],
    subset: Optional[Sequence[int]] = None,
) -> Divisor:
    """
    Apply an involution pointwise.

    ``iota_on_subset`` applies iota only at the given positions of
    :meth:`Divisor.points`.

    Raises:
        OffCurve: If a point is off the curve
    """
    which = DivisorTransform(which)
    curve = divisor.curve
    if which is DivisorTransform.IOTA_ON_SUBSET:
        chosen = set(subset or ())
        points = [
            curve.involute(p, Involution.IOTA) if i in chosen else p
            for i, p in enumerate(divisor.points())
        ]
        return Divisor.from_points(curve, points)
    involution = Involution.TAU if which is DivisorTransform.TAU else Involution.IOTA
    return Divisor.from_entries(
        curve,
        (
            DivisorEntry(curve.involute(e.point, involution), e.multiplicity)
            for e in divisor.entries
        ),
    )


def is_real(divisor: Divisor) -> bool:
    """True when tau(D) = D as multisets."""
    return match_multisets(transform(divisor, DivisorTransform.TAU), divisor)


def signature(divisor: Divisor) -> LineBundleTopType:
    """
    Odd-circle signature of a real divisor.

    Raises:
        NotReal: If the divisor is not tau-stable
    """
    if not is_real(divisor):
        raise NotReal(f"divisor {divisor} is not real")
    curve = divisor.curve
    counts = [0] * len(curve.fixed_circles)
    for entry in divisor.entries:
        region = locate(curve, entry.point)
        if region.kind is RegionKind.FIXED_CIRCLE and region.index is not None:
            counts[region.index] += entry.multiplicity
    return LineBundleTopType(divisor.degree, tuple(c % 2 for c in counts))


def enumerate_line_bundle_types(n: int, d: int) -> List[LineBundleTopType]:
    """
    The 2^(n-1) topological types of degree-d real line bundles on n circles.

    Ordered by number of odd circles, then lexicographically with set bits
    first.

    Example:
        >>> [t.bits for t in enumerate_line_bundle_types(3, 1)]
        ['100', '010', '001', '111']
    """
    if n < 1:
        raise ValueError("at least one fixed circle is required")
    vectors = [
        v for v in itertools.product((0, 1), repeat=n) if (sum(v) - d) % 2 == 0
    ]
    vectors.sort(key=lambda v: (sum(v), tuple(-b for b in v)))
    return [LineBundleTopType(d, tuple(v)) for v in vectors]


class PointLiteral(BaseModel):
    """One entry of a divisor literal."""

    model_config = ConfigDict(extra="forbid")

    x: Optional[List[float]] = Field(default=None, min_length=2, max_length=2)
    y: Optional[List[float]] = Field(default=None, min_length=2, max_length=2)
    branch: Literal[1, -1] = 1
    inf: Optional[Literal["+", "-"]] = None
    mult: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _one_kind(self) -> "PointLiteral":
        if (self.inf is None) == (self.x is None):
            raise ValueError("give either x (with optional y) or inf")
        return self

    def to_point(self, curve: RealHyperellipticCurve) -> CurvePoint:
        if self.inf is not None:
            return CurvePoint.at_infinity(1 if self.inf == "+" else -1)
        assert self.x is not None
        x = complex(self.x[0], self.x[1])
        if self.y is None:
            return curve.point_at(x.real if x.imag == 0.0 else x, self.branch)
        return curve.check_point(CurvePoint.affine(x, complex(self.y[0], self.y[1])))


def parse_divisor(
    curve: RealHyperellipticCurve, literal: Sequence[Dict[str, object]]
) -> Divisor:
    """
    Build a divisor from its literal form.

    Entries are ``{"x": [re, im], "y": [re, im], "mult": k}`` or
    ``{"inf": "+"|"-", "mult": k}``. When ``y`` is omitted, ``branch``
    (default +1) picks y = branch * sqrt(f(x)).

    Raises:
        pydantic.ValidationError: On malformed entries
        OffCurve: If a given y does not fit f(x)
    """
    entries = []
    for raw in literal:
        item = PointLiteral.model_validate(raw)
        entries.append(DivisorEntry(item.to_point(curve), item.mult))
    return Divisor.from_entries(curve, entries)
