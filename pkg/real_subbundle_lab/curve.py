"""
Real genus-2 hyperelliptic curves.

A curve is the sextic model y^2 = f(x) with real coefficients, the
hyperelliptic involution iota(x, y) = (x, -y) and a real structure
tau(x, y) = (conj x, s * conj y) for a lift sign s in {+1, -1}. This module
finds the Weierstrass points, splits the real line into fixed circles and
anti-real arcs, classifies the topological type and samples points.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P
from pydantic import BaseModel, ConfigDict, Field, field_validator

from config.settings import get_settings
from real_subbundle_lab.errors import (
    DegreeError,
    EmptyRealLocus,
    EmptyRegion,
    InvariantViolation,
    NonRealCoefficient,
    NotSquarefree,
    OffCurve,
)

logger = logging.getLogger(__name__)

GENUS = 2
MAX_TOLERANCE = 1e-4
_SAMPLE_ATTEMPTS = 1000

# Genus-2 realized (n, a) indexed by m, the number of real root pairs.
TYPE_TABLE: Dict[int, Tuple[int, int]] = {0: (1, 0), 1: (1, 1), 2: (2, 1), 3: (3, 0)}


class PointKind(str, Enum):
    AFFINE = "affine"
    INFINITY = "infinity"


class Involution(str, Enum):
    TAU = "tau"
    IOTA = "iota"
    TAU_IOTA = "tau_iota"


class RegionKind(str, Enum):
    FIXED_CIRCLE = "fixed_circle"
    ANTI_REAL = "anti_real"
    GENERIC = "generic"


@dataclass(frozen=True)
class CurvePoint:
    """
    A point of the curve: affine (x, y) or one of the two points at infinity.

    The infinity branch is the sign s with y / x^3 -> s * sqrt(a6), the square
    root taken on the principal branch.
    """

    kind: PointKind
    x: complex = 0j
    y: complex = 0j
    branch: int = 0

    @classmethod
    def affine(cls, x: complex, y: complex) -> "CurvePoint":
        return cls(PointKind.AFFINE, complex(x), complex(y), 0)

    @classmethod
    def at_infinity(cls, branch: int) -> "CurvePoint":
        if branch not in (1, -1):
            raise OffCurve(f"infinity branch must be +1 or -1, got {branch}")
        return cls(PointKind.INFINITY, 0j, 0j, branch)

    @property
    def is_infinity(self) -> bool:
        return self.kind is PointKind.INFINITY

    def to_literal(self) -> Dict[str, object]:
        if self.is_infinity:
            return {"inf": "+" if self.branch > 0 else "-"}
        return {
            "x": [self.x.real, self.x.imag],
            "y": [self.y.real, self.y.imag],
        }

    def __str__(self) -> str:
        if self.is_infinity:
            return "inf+" if self.branch > 0 else "inf-"
        return f"({self.x:.6g}, {self.y:.6g})"


@dataclass(frozen=True)
class IntervalSupport:
    """
    An x-support on the real line.

    Bounded supports are ``[left, right]``. A support through infinity is the
    pair of rays ``x <= left`` and ``x >= right`` together with the infinity
    points; with ``left`` and ``right`` both None it is the whole line.
    """

    left: Optional[float]
    right: Optional[float]
    through_infinity: bool = False

    @property
    def is_whole_line(self) -> bool:
        return self.through_infinity and self.left is None

    def contains(self, x: float, slack: float = 0.0) -> bool:
        if self.is_whole_line:
            return True
        assert self.left is not None and self.right is not None
        if self.through_infinity:
            return x <= self.left + slack or x >= self.right - slack
        return self.left - slack <= x <= self.right + slack

    def gap(self, x: float) -> float:
        """Distance from ``x`` to the support (0 inside)."""
        if self.contains(x):
            return 0.0
        assert self.left is not None and self.right is not None
        if self.through_infinity:
            return min(x - self.left, self.right - x)
        return max(self.left - x, x - self.right)

    def sample_x(self, rng: np.random.Generator) -> float:
        if self.is_whole_line:
            return float(math.tan(rng.uniform(-math.pi / 2, math.pi / 2)))
        assert self.left is not None and self.right is not None
        if not self.through_infinity:
            return float(rng.uniform(self.left, self.right))
        center = 0.5 * (self.left + self.right)
        half = 0.5 * (self.right - self.left)
        t = 0.0
        while t == 0.0:
            t = float(rng.uniform(-1.0, 1.0))
        return center + half / t

    def to_dict(self) -> Dict[str, object]:
        return {
            "left": self.left,
            "right": self.right,
            "through_infinity": self.through_infinity,
        }


@dataclass(frozen=True)
class FixedCircle:
    index: int
    support: IntervalSupport


@dataclass(frozen=True)
class AntiRealComponent:
    index: int
    support: IntervalSupport


@dataclass(frozen=True)
class Region:
    kind: RegionKind
    index: Optional[int] = None

    @classmethod
    def fixed_circle(cls, index: int) -> "Region":
        return cls(RegionKind.FIXED_CIRCLE, index)

    @classmethod
    def anti_real(cls, index: int) -> "Region":
        return cls(RegionKind.ANTI_REAL, index)

    @classmethod
    def generic(cls) -> "Region":
        return cls(RegionKind.GENERIC, None)

    def __str__(self) -> str:
        if self.kind is RegionKind.GENERIC:
            return "generic"
        return f"{self.kind.value}({self.index})"


@dataclass(frozen=True)
class TopologicalType:
    """Topological type (n, a) of the real curve plus m, the real root pairs."""

    n: int
    a: int
    m: int
    note: Optional[str] = None

    def to_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {"n": self.n, "a": self.a, "m": self.m}
        if self.note:
            out["note"] = self.note
        return out


class CurveSpec(BaseModel):
    """Curve record as stored in a curve spec file."""

    model_config = ConfigDict(extra="forbid")

    coeffs: List[float] = Field(min_length=7, max_length=7)
    lift_sign: int = 1
    tol: float = Field(default=1e-9, gt=0.0, le=MAX_TOLERANCE)

    @field_validator("lift_sign")
    @classmethod
    def _check_lift(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError("lift_sign must be 1 or -1")
        return value


@dataclass(frozen=True)
class RealHyperellipticCurve:
    """
    The curve y^2 = f(x), f = a0 + a1 x + ... + a6 x^6, with a chosen lift.

    Build instances with :func:`build_curve`; the constructor does not
    validate. ``roots`` lists the real roots in ascending order followed by
    the conjugate pairs, each pair adjacent with the upper half-plane member
    first.
    """

    coefficients: Tuple[float, ...]
    lift_sign: int
    tolerance: float
    roots: Tuple[complex, ...]
    real_root_count: int
    fixed_circles: Tuple[FixedCircle, ...] = field(compare=False)
    anti_real_components: Tuple[AntiRealComponent, ...] = field(compare=False)
    root_gate: float = field(default=1e3, compare=False)

    @property
    def m(self) -> int:
        return self.real_root_count // 2

    @property
    def leading(self) -> float:
        return self.coefficients[6]

    @property
    def sqrt_leading(self) -> complex:
        return complex(np.sqrt(complex(self.leading)))

    def f(self, x: Union[float, complex]) -> Union[float, complex]:
        if isinstance(x, (float, int, np.floating, np.integer)):
            return float(P.polyval(float(x), self.coefficients))
        return complex(P.polyval(complex(x), self.coefficients))

    def df(self, x: complex) -> complex:
        return complex(P.polyval(complex(x), P.polyder(self.coefficients)))

    def gate(self, *scales: float) -> float:
        """Separation threshold used for root and real-axis decisions."""
        return self.root_gate * self.tolerance * max([1.0, *scales])

    def is_real_root(self, index: int) -> bool:
        return index < self.real_root_count

    def conjugate_index(self, index: int) -> int:
        if self.is_real_root(index):
            return index
        offset = index - self.real_root_count
        return index + 1 if offset % 2 == 0 else index - 1

    def weierstrass_points(self) -> List[CurvePoint]:
        """The six points (r, 0), in root order."""
        return [CurvePoint.affine(r, 0j) for r in self.roots]

    def spec(self) -> Dict[str, object]:
        return {
            "coeffs": [float(c) for c in self.coefficients],
            "lift_sign": self.lift_sign,
            "tol": self.tolerance,
        }

    def content_hash(self) -> str:
        """SHA-256 of the canonical JSON curve record."""
        text = json.dumps(self.spec(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    # Points

    def residual(self, point: CurvePoint) -> float:
        """Relative residual |y^2 - f(x)| / (1 + |f(x)|); zero at infinity."""
        if point.is_infinity:
            return 0.0
        fx = complex(self.f(point.x))
        return abs(point.y * point.y - fx) / (1.0 + abs(fx))

    def check_point(self, point: CurvePoint) -> CurvePoint:
        """Return ``point`` unchanged, or raise OffCurve."""
        if point.is_infinity:
            if point.branch not in (1, -1):
                raise OffCurve(f"bad infinity branch {point.branch}")
            return point
        if self.residual(point) > self.tolerance:
            raise OffCurve(
                f"point {point} is off the curve (residual {self.residual(point):.3e})"
            )
        return point

    def point_at(self, x: Union[float, complex], branch: int = 1) -> CurvePoint:
        """The point over ``x`` with y = branch * sqrt(f(x)) (principal root)."""
        if isinstance(x, complex) and x.imag == 0.0:
            x = x.real
        fx = self.f(x)
        y = complex(np.sqrt(complex(fx)))
        return CurvePoint.affine(x, branch * y)

    def snap_point(self, x: complex, y: complex) -> CurvePoint:
        """
        Project a numerically computed point onto the curve.

        Near-real ``x`` is made real and ``y`` is replaced by the nearer of
        the two square roots of f(x).

        Args:
            x: Approximate x-coordinate
            y: Approximate y-coordinate, used only to pick the branch

        Returns:
            CurvePoint: A point satisfying the curve equation to rounding
        """
        x = complex(x)
        if abs(x.imag) <= self.gate(abs(x)):
            x = complex(x.real, 0.0)
        on = self.point_at(x.real if x.imag == 0.0 else x, 1)
        if abs(complex(y) - on.y) <= abs(complex(y) + on.y):
            return on
        return CurvePoint.affine(on.x, -on.y)

    def involute(self, point: CurvePoint, which: Union[Involution, str]) -> CurvePoint:
        """
        Apply tau, iota or their composition.

        Args:
            point: A point on the curve
            which: ``tau``, ``iota`` or ``tau_iota``

        Returns:
            CurvePoint: The image point

        Raises:
            OffCurve: If ``point`` does not lie on the curve
        """
        which = Involution(which)
        self.check_point(point)
        if which is Involution.IOTA:
            return self._iota(point)
        if which is Involution.TAU:
            return self._tau(point)
        return self._tau(self._iota(point))

    def _iota(self, point: CurvePoint) -> CurvePoint:
        if point.is_infinity:
            return CurvePoint.at_infinity(-point.branch)
        return CurvePoint.affine(point.x, -point.y)

    def _tau(self, point: CurvePoint) -> CurvePoint:
        if point.is_infinity:
            sign_a6 = 1 if self.leading > 0 else -1
            return CurvePoint.at_infinity(point.branch * self.lift_sign * sign_a6)
        return CurvePoint.affine(
            point.x.conjugate(), self.lift_sign * point.y.conjugate()
        )

    def distance(self, p: CurvePoint, q: CurvePoint) -> float:
        """Componentwise relative distance; infinite across kinds or branches."""
        if p.is_infinity or q.is_infinity:
            if p.is_infinity and q.is_infinity and p.branch == q.branch:
                return 0.0
            return math.inf
        dx = abs(p.x - q.x) / max(1.0, abs(p.x), abs(q.x))
        dy = abs(p.y - q.y) / max(1.0, abs(p.y), abs(q.y))
        return max(dx, dy)

    def same_point(
        self, p: CurvePoint, q: CurvePoint, tol: Optional[float] = None
    ) -> bool:
        return self.distance(p, q) <= (self.tolerance if tol is None else tol)

    def is_real_point(self, point: CurvePoint) -> bool:
        return self.same_point(self._tau(point), point)

    def is_antireal_point(self, point: CurvePoint) -> bool:
        return self.same_point(self._tau(point), self._iota(point))

    def weierstrass_index(self, point: CurvePoint, tol: Optional[float] = None) -> Optional[int]:
        """Index of the Weierstrass point ``point`` sits on, if any."""
        if point.is_infinity:
            return None
        for i, w in enumerate(self.weierstrass_points()):
            if self.same_point(point, w, tol):
                return i
        return None

    def near_root_x(self, x: complex) -> bool:
        return any(abs(x - r) <= self.gate(abs(r)) for r in self.roots)


def _polish(coeffs: Sequence[float], root: complex) -> complex:
    value = complex(P.polyval(root, coeffs))
    slope = complex(P.polyval(root, P.polyder(coeffs)))
    if slope == 0:
        return root
    candidate = root - value / slope
    if abs(complex(P.polyval(candidate, coeffs))) < abs(value):
        return candidate
    return root


def _partition_roots(
    raw: Sequence[complex], gate_factor: float, tol: float
) -> Tuple[List[complex], int]:
    def gate(*scales: float) -> float:
        return gate_factor * tol * max([1.0, *scales])

    for i in range(len(raw)):
        for j in range(i + 1, len(raw)):
            ri, rj = raw[i], raw[j]
            if abs(ri - rj) <= gate(abs(ri), abs(rj)):
                raise NotSquarefree(
                    f"roots {ri:.6g} and {rj:.6g} are closer than the squarefree gate"
                )

    real = sorted(r.real for r in raw if abs(r.imag) <= gate(abs(r)))
    upper = [r for r in raw if r.imag > gate(abs(r))]
    lower = [r for r in raw if r.imag < -gate(abs(r))]
    if len(upper) != len(lower):
        raise NotSquarefree("root set is not stable under conjugation")

    pairs: List[complex] = []
    remaining = list(lower)
    for z in upper:
        k = int(np.argmin([abs(z.conjugate() - w) for w in remaining]))
        w = remaining.pop(k)
        mean = 0.5 * (z + w.conjugate())
        if abs(mean.real) <= gate(abs(mean)):
            mean = complex(0.0, mean.imag)
        pairs.append(mean)
    pairs.sort(key=lambda z: (z.real, z.imag))

    ordered: List[complex] = [complex(r, 0.0) for r in real]
    for z in pairs:
        ordered.extend([z, z.conjugate()])
    return ordered, len(real)


def _components(
    coeffs: Sequence[float], real_roots: Sequence[float], lift_sign: int
) -> Tuple[Tuple[FixedCircle, ...], Tuple[AntiRealComponent, ...]]:
    # The fixed locus lies over lift_sign * f >= 0, the anti-real locus over <= 0.
    outer_positive = lift_sign * coeffs[6] > 0
    fixed: List[IntervalSupport] = []
    anti: List[IntervalSupport] = []
    for left, right in zip(real_roots[:-1], real_roots[1:]):
        mid = 0.5 * (left + right)
        support = IntervalSupport(float(left), float(right))
        if lift_sign * float(P.polyval(mid, coeffs)) > 0:
            fixed.append(support)
        else:
            anti.append(support)
    if real_roots:
        outer = IntervalSupport(float(real_roots[0]), float(real_roots[-1]), True)
    else:
        outer = IntervalSupport(None, None, True)
    (fixed if outer_positive else anti).append(outer)
    return (
        tuple(FixedCircle(i, s) for i, s in enumerate(fixed)),
        tuple(AntiRealComponent(i, s) for i, s in enumerate(anti)),
    )


def _coerce_coefficient(value: object) -> float:
    if isinstance(value, (complex, np.complexfloating)):
        if complex(value).imag != 0.0:
            raise NonRealCoefficient(f"coefficient {value} is not real")
        value = complex(value).real
    try:
        number = float(value)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise NonRealCoefficient(f"coefficient {value!r} is not a number") from exc
    if not math.isfinite(number):
        raise NonRealCoefficient(f"coefficient {value} is not finite")
    return number


def build_curve(
    coefficients: Sequence[object],
    lift_sign: int = 1,
    tolerance: Optional[float] = None,
) -> RealHyperellipticCurve:
    """
    Build and validate a real genus-2 hyperelliptic curve.

    Args:
        coefficients: a0..a6 of f(x) = sum a_i x^i
        lift_sign: +1 or -1, the sign in tau(x, y) = (conj x, s * conj y)
        tolerance: Relative point-equality tolerance in (0, 1e-4];
            defaults to the active settings

    Returns:
        RealHyperellipticCurve: The validated curve

    Raises:
        DegreeError: If a6 = 0 or the coefficient count is not 7
        NonRealCoefficient: If a coefficient is complex or not finite
        NotSquarefree: If two roots fall within the squarefree gate

    Example:
        >>> curve = build_curve([-36, 0, 49, 0, -14, 0, 1])
        >>> [round(r.real) for r in curve.roots]
        [-3, -2, -1, 1, 2, 3]
    """
    tolerances = get_settings().tolerances
    tol = tolerances.equality if tolerance is None else float(tolerance)
    if not 0.0 < tol <= MAX_TOLERANCE:
        raise ValueError(f"tolerance must lie in (0, {MAX_TOLERANCE}], got {tol}")
    if lift_sign not in (1, -1):
        raise ValueError(f"lift_sign must be 1 or -1, got {lift_sign}")
    if len(coefficients) != 7:
        raise DegreeError(f"expected 7 coefficients a0..a6, got {len(coefficients)}")
    coeffs = tuple(_coerce_coefficient(c) for c in coefficients)
    if coeffs[6] == 0.0:
        raise DegreeError("leading coefficient a6 must be nonzero")

    raw = [_polish(coeffs, complex(r)) for r in P.polyroots(coeffs)]
    roots, real_count = _partition_roots(raw, tolerances.real_root, tol)
    real_roots = [r.real for r in roots[:real_count]]
    fixed, anti = _components(coeffs, real_roots, lift_sign)

    logger.debug(
        "curve built: %d real roots, %d conjugate pairs, %d fixed circles, %d anti-real arcs",
        real_count,
        (6 - real_count) // 2,
        len(fixed),
        len(anti),
    )
    return RealHyperellipticCurve(
        coefficients=coeffs,
        lift_sign=lift_sign,
        tolerance=tol,
        roots=tuple(roots),
        real_root_count=real_count,
        fixed_circles=fixed,
        anti_real_components=anti,
        root_gate=tolerances.real_root,
    )


def curve_from_spec(spec: CurveSpec) -> RealHyperellipticCurve:
    """Build a curve from a validated spec record."""
    return build_curve(spec.coeffs, spec.lift_sign, spec.tol)


def load_curve(path: Union[str, Path]) -> RealHyperellipticCurve:
    """Read a curve spec file and build the curve."""
    text = Path(path).read_text(encoding="utf-8")
    return curve_from_spec(CurveSpec.model_validate_json(text))


def check_real_curve_constraints(n: int, a: int, g: int = GENUS) -> List[str]:
    """
    Return the violated bullets of the (n, a) constraint set, empty if none.

    Example:
        >>> check_real_curve_constraints(1, 0)
        []
    """
    violations: List[str] = []
    if not 0 <= n <= g + 1:
        violations.append("0 <= n <= g+1")
    if a not in (0, 1):
        violations.append("a in {0, 1}")
    if n == 0 and a != 1:
        violations.append("n = 0 implies a = 1")
    if n == g + 1 and a != 0:
        violations.append("n = g+1 implies a = 0")
    if a == 0 and (n - (g + 1)) % 2 != 0:
        violations.append("a = 0 implies n = g+1 mod 2")
    return violations


def classify(curve: RealHyperellipticCurve) -> TopologicalType:
    """
    Topological type of the real curve.

    Raises:
        EmptyRealLocus: If the chosen lift has no fixed points
    """
    if not curve.fixed_circles:
        raise EmptyRealLocus(
            "no fixed circles: f has no real roots and lift_sign * f < 0 on the real line"
        )
    n = len(curve.fixed_circles)
    n_expected, a = TYPE_TABLE[curve.m]
    if n != n_expected:
        raise InvariantViolation(f"found {n} fixed circles, expected {n_expected}")
    violations = check_real_curve_constraints(n, a)
    if violations:
        raise InvariantViolation(f"type ({n},{a}) violates: {', '.join(violations)}")
    note = None
    if curve.lift_sign == -1:
        note = "classified through the isomorphic model y'^2 = -f(x) with lift +1"
    return TopologicalType(n=n, a=a, m=curve.m, note=note)


def fixed_and_antireal_components(
    curve: RealHyperellipticCurve,
) -> Tuple[List[FixedCircle], List[AntiRealComponent]]:
    """Fixed circles and anti-real arcs, each in index order."""
    return list(curve.fixed_circles), list(curve.anti_real_components)


def involute(
    curve: RealHyperellipticCurve, point: CurvePoint, which: Union[Involution, str]
) -> CurvePoint:
    """Apply iota, tau or tau_iota to a point of ``curve``."""
    return curve.involute(point, which)


def _nearest_component(
    components: Sequence[Union[FixedCircle, AntiRealComponent]], x: float, slack: float
) -> Optional[int]:
    for comp in components:
        if comp.support.contains(x, slack):
            return comp.index
    if not components:
        return None
    return min(components, key=lambda c: c.support.gap(x)).index


def locate(curve: RealHyperellipticCurve, point: CurvePoint) -> Region:
    """
    Region of a point: fixed circle, anti-real arc or generic.

    Weierstrass points on the boundary of an arc are assigned to the fixed
    circle.

    Raises:
        OffCurve: If ``point`` is not on the curve
    """
    curve.check_point(point)
    fixed_at_inf = curve.lift_sign * curve.leading > 0
    if point.is_infinity:
        components: Sequence = (
            curve.fixed_circles if fixed_at_inf else curve.anti_real_components
        )
        outer = [c for c in components if c.support.through_infinity]
        if fixed_at_inf:
            return Region.fixed_circle(outer[0].index)
        return Region.anti_real(outer[0].index)

    x = point.x.real
    slack = curve.gate(abs(x))
    if curve.is_real_point(point):
        index = _nearest_component(curve.fixed_circles, x, slack)
        if index is not None:
            return Region.fixed_circle(index)
    if curve.is_antireal_point(point):
        index = _nearest_component(curve.anti_real_components, x, slack)
        if index is not None:
            return Region.anti_real(index)
    return Region.generic()


def sample(
    curve: RealHyperellipticCurve,
    region: Region,
    rng: np.random.Generator,
    radius: Optional[float] = None,
) -> CurvePoint:
    """
    Draw a random point from a region, away from the Weierstrass x-values.

    Fixed circles and anti-real arcs are sampled uniformly in x (rays through
    infinity by x = c + h/t); generic points uniformly in x over a complex
    disk. The y-branch is a fair coin.

    Raises:
        EmptyRegion: If the region does not exist on this curve
    """
    if region.kind is RegionKind.GENERIC:
        r = get_settings().sample_radius if radius is None else radius
        draw = lambda: complex(  # noqa: E731
            r * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        )
    else:
        pool: Sequence = (
            curve.fixed_circles
            if region.kind is RegionKind.FIXED_CIRCLE
            else curve.anti_real_components
        )
        if region.index is None or not 0 <= region.index < len(pool):
            raise EmptyRegion(f"region {region} does not exist on this curve")
        support = pool[region.index].support
        draw = lambda: support.sample_x(rng)  # noqa: E731

    for _ in range(_SAMPLE_ATTEMPTS):
        x = draw()
        if curve.near_root_x(complex(x)):
            continue
        branch = 1 if rng.uniform() < 0.5 else -1
        return curve.point_at(x, branch)
    raise EmptyRegion(f"could not sample region {region} away from branch points")
