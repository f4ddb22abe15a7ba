"""
Atiyah orbits of degree-3 divisors.

The divisors A+B+C, A+iB+iC, iA+B+iC and iA+iB+C define projectively
equivalent extensions. The module builds that orbit, decides projective
reality, counts the real members (the real degree-0 line subbundles of the
generic bundle of the orbit) and flags configurations that sit on the
degeneracy locus.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Tuple

from config.settings import get_settings
from real_subbundle_lab.curve import CurvePoint, Involution, RealHyperellipticCurve
from real_subbundle_lab.divisors import (
    Divisor,
    DivisorTransform,
    LineBundleTopType,
    is_real,
    match_multisets,
    signature,
    transform,
)
from real_subbundle_lab.errors import BadParity, DegreeMismatch

logger = logging.getLogger(__name__)

ORBIT_DEGREE = 3

# Positions of Divisor.points() flipped by iota for each orbit member.
FLIPS: Tuple[Tuple[int, ...], ...] = ((), (1, 2), (0, 2), (0, 1))
BRANCH_NAMES: Tuple[str, ...] = ("identity", "flip_BC", "flip_AC", "flip_AB")


class CaseLabel(str, Enum):
    REAL_BASE = "real_base"
    TAU_FIXES_ONE_SWAPS_REST = "tau_fixes_one_swaps_rest"
    NONE = "none"


class DegeneracyFlag(str, Enum):
    COINCIDENT_MEMBERS = "coincident_members"
    WEIERSTRASS_POINT = "weierstrass_point"
    IOTA_PAIRED_POINTS = "iota_paired_points"
    NEAR_TOLERANCE = "near_tolerance"


@dataclass(frozen=True)
class AtiyahOrbit:
    base: Divisor
    members: Tuple[Divisor, ...]
    members_distinct: bool


@dataclass(frozen=True)
class OrbitReport:
    """
    Outcome of analyzing one orbit.

    Counts are those of the generic bundle of the orbit; the genericity of
    the bundle itself is not certified.
    """

    projectively_real: bool
    case_label: CaseLabel
    fired_branch: Optional[str]
    real_member_count: int
    common_signature: Optional[LineBundleTopType]
    member_signatures: Tuple[Tuple[int, LineBundleTopType], ...]
    flags: FrozenSet[DegeneracyFlag] = field(default_factory=frozenset)
    members_distinct: bool = True

    @property
    def is_generic(self) -> bool:
        return not self.flags

    @property
    def parity_ok(self) -> bool:
        return not self.members_distinct or self.real_member_count % 2 == 0

    @property
    def signatures_agree(self) -> bool:
        return self.real_member_count == 0 or self.common_signature is not None

    def to_dict(self) -> Dict[str, object]:
        return {
            "projectively_real": self.projectively_real,
            "case": self.case_label.value,
            "fired_branch": self.fired_branch,
            "count": self.real_member_count,
            "signature": (
                list(self.common_signature.odd_circles)
                if self.common_signature is not None
                else None
            ),
            "member_signatures": {
                str(index): list(sig.odd_circles) for index, sig in self.member_signatures
            },
            "flags": sorted(f.value for f in self.flags),
        }


def _require_degree(divisor: Divisor) -> None:
    if divisor.degree != ORBIT_DEGREE:
        raise DegreeMismatch(f"orbits need a degree-3 divisor, got {divisor.degree}")


def orbit(divisor: Divisor) -> AtiyahOrbit:
    """
    The four even iota-flips of a degree-3 divisor, in canonical order.

    Raises:
        DegreeMismatch: If the degree is not 3
    """
    _require_degree(divisor)
    members = tuple(
        transform(divisor, DivisorTransform.IOTA_ON_SUBSET, subset) if subset else divisor
        for subset in FLIPS
    )
    distinct = all(
        not match_multisets(members[i], members[j])
        for i in range(len(members))
        for j in range(i + 1, len(members))
    )
    return AtiyahOrbit(base=divisor, members=members, members_distinct=distinct)


def degeneracy_flags(divisor: Divisor, members_distinct: bool = True) -> FrozenSet[DegeneracyFlag]:
    """
    Flags marking divisors on or near the degeneracy locus.

    ``near_tolerance`` is raised when a point lies within
    ``near_factor * tol`` but beyond ``tol`` of another entry, an involution
    image of an entry, or a Weierstrass point.
    """
    curve: RealHyperellipticCurve = divisor.curve
    tol = curve.tolerance
    near = get_settings().tolerances.near_factor * tol
    flags = set()
    if not members_distinct:
        flags.add(DegeneracyFlag.COINCIDENT_MEMBERS)
    if divisor.near_branch_point:
        flags.add(DegeneracyFlag.WEIERSTRASS_POINT)

    points = [e.point for e in divisor.entries]
    iota = [curve.involute(p, Involution.IOTA) for p in points]
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if curve.same_point(points[j], iota[i]):
                flags.add(DegeneracyFlag.IOTA_PAIRED_POINTS)

    references: List[CurvePoint] = list(points) + iota + curve.weierstrass_points()
    for p in points:
        references.extend(
            [
                curve.involute(p, Involution.TAU),
                curve.involute(p, Involution.TAU_IOTA),
            ]
        )
    for i, p in enumerate(points):
        for k, q in enumerate(references):
            if k == i:
                continue
            if tol < curve.distance(p, q) <= near:
                flags.add(DegeneracyFlag.NEAR_TOLERANCE)
    return frozenset(flags)


def analyze(divisor: Divisor) -> OrbitReport:
    """
    Projective reality, real-member count and signatures of an orbit.

    Raises:
        DegreeMismatch: If the degree is not 3
        AmbiguousMatch: If a multiset comparison is undecidable at this tolerance
    """
    atiyah = orbit(divisor)
    tau_d = transform(divisor, DivisorTransform.TAU)

    fired: Optional[int] = None
    for index, member in enumerate(atiyah.members):
        if match_multisets(tau_d, member):
            fired = index
            break
    if fired is None:
        case = CaseLabel.NONE
    elif fired == 0:
        case = CaseLabel.REAL_BASE
    else:
        case = CaseLabel.TAU_FIXES_ONE_SWAPS_REST

    member_signatures: List[Tuple[int, LineBundleTopType]] = []
    for index, member in enumerate(atiyah.members):
        if is_real(member):
            member_signatures.append((index, signature(member)))
    distinct_sigs = {sig for _, sig in member_signatures}
    common = next(iter(distinct_sigs)) if len(distinct_sigs) == 1 else None

    return OrbitReport(
        projectively_real=fired is not None,
        case_label=case,
        fired_branch=BRANCH_NAMES[fired] if fired is not None else None,
        real_member_count=len(member_signatures),
        common_signature=common,
        member_signatures=tuple(member_signatures),
        flags=degeneracy_flags(divisor, atiyah.members_distinct),
        members_distinct=atiyah.members_distinct,
    )


def is_projectively_real(divisor: Divisor) -> bool:
    """Whether some member of the orbit of ``divisor`` is real."""
    return analyze(divisor).projectively_real


def matches_determinant(divisor: Divisor, lambda_type: LineBundleTopType) -> bool:
    """
    Whether a real divisor's odd circles agree with those of the determinant.

    The canonical class is even on every circle, so a degree-3 divisor and a
    degree-1 determinant must have the same odd circles.

    Raises:
        NotReal: If the divisor is not real
        BadParity: If the circle counts differ
    """
    sig = signature(divisor)
    if len(sig.odd_circles) != len(lambda_type.odd_circles):
        raise BadParity(
            f"determinant has {len(lambda_type.odd_circles)} circles, curve has "
            f"{len(sig.odd_circles)}"
        )
    return sig.odd_circles == lambda_type.odd_circles


def antireal_obstruction(curve: RealHyperellipticCurve) -> bool:
    """True when the anti-real locus is empty."""
    return not curve.anti_real_components
