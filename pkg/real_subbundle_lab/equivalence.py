"""
Linear equivalence of effective divisors by interpolation.

For effective divisors D, D' of degree d <= 4 we have D ~ D' exactly when
D + iota(D') is cut out by a function in L(dH), H the class of a fiber of x.
L(kH) is spanned by 1, x, ..., x^k and x^j y for j <= k - 3, so the question
is a rank test on an evaluation matrix. The module also enumerates the
sixteen two-torsion classes O(w_i - w_j) with their reality flags.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.linalg import null_space, svd

from config.settings import Tolerances, get_settings
from real_subbundle_lab.curve import (
    CurvePoint,
    RealHyperellipticCurve,
    Region,
    sample,
)
from real_subbundle_lab.divisors import Divisor, DivisorTransform, is_real, transform
from real_subbundle_lab.errors import (
    DegreeMismatch,
    DegreeTooLarge,
    IllConditioned,
    InvariantViolation,
)

logger = logging.getLogger(__name__)

MAX_DEGREE = 4
_NEWTON_STEPS = 6


def riemann_roch_dimension(k: int) -> int:
    """dim L(kH) on a genus-2 hyperelliptic curve."""
    return k + 1 + max(0, k - 2)


def basis_labels(k: int) -> List[str]:
    """Monomial labels of the basis of L(kH): powers of x first, then x^j * y."""
    monomials = ["1", "x"] + [f"x^{i}" for i in range(2, k + 1)]
    with_y = ["y", "x*y"] + [f"x^{j}*y" for j in range(2, k - 2)]
    return monomials[: k + 1] + with_y[: max(0, k - 2)]


@dataclass(frozen=True)
class InterpolationSystem:
    """Evaluation conditions at the points of a divisor against the basis of L(kH)."""

    matrix: np.ndarray
    k: int
    jittered: bool

    @property
    def labels(self) -> List[str]:
        return basis_labels(self.k)


@dataclass(frozen=True)
class EquivalenceVerdict:
    equivalent: bool
    relative_sigma: float
    gap: float
    jittered: bool

    def to_dict(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "relative_sigma": self.relative_sigma,
            "gap": self.gap,
            "jittered": self.jittered,
        }


def _affine_row(x: complex, y: complex, k: int) -> np.ndarray:
    powers = x ** np.arange(k + 1)
    return np.concatenate([powers, y * powers[: max(0, k - 2)]]).astype(complex)


def _infinity_row(
    curve: RealHyperellipticCurve, t: complex, branch: int, k: int
) -> np.ndarray:
    # Chart t = 1/x: x^i -> t^(k-i), x^j y -> (y/x^3) t^(k-3-j).
    big_f = complex(P.polyval(t, curve.coefficients[::-1]))
    root = complex(np.sqrt(big_f))
    anchor = branch * curve.sqrt_leading
    if abs(root - anchor) > abs(root + anchor):
        root = -root
    monomials = t ** np.arange(k, -1, -1)
    with_y = root * t ** np.arange(k - 3, -1, -1) if k >= 3 else np.zeros(0)
    return np.concatenate([monomials, with_y]).astype(complex)


def _local_row(
    curve: RealHyperellipticCurve, center: CurvePoint, t: complex, k: int
) -> np.ndarray:
    """Basis evaluated at the point with local parameter t around ``center``."""
    if center.is_infinity:
        return _infinity_row(curve, t, center.branch, k)
    index = curve.weierstrass_index(center)
    if index is not None:
        r = curve.roots[index]
        x = r + t * t / curve.df(r)
        for _ in range(_NEWTON_STEPS):
            x -= (complex(curve.f(x)) - t * t) / curve.df(x)
        return _affine_row(x, t, k)
    x = center.x + t
    y = center.y * complex(np.sqrt(complex(curve.f(x)) / complex(curve.f(center.x))))
    return _affine_row(x, y, k)


def _local_radius(curve: RealHyperellipticCurve, center: CurvePoint) -> float:
    """Radius in the local parameter within which the expansion stays analytic."""
    if center.is_infinity:
        return 1.0 / max(1.0, max(abs(r) for r in curve.roots))
    index = curve.weierstrass_index(center)
    if index is not None:
        r = curve.roots[index]
        spacing = min(abs(r - s) for j, s in enumerate(curve.roots) if j != index)
        return 0.5 * math.sqrt(abs(curve.df(r)) * spacing)
    return min(abs(center.x - r) for r in curve.roots)


def _group(
    curve: RealHyperellipticCurve, points: Sequence[CurvePoint]
) -> List[Tuple[CurvePoint, int]]:
    groups: List[List] = []
    for p in points:
        for slot in groups:
            if curve.same_point(slot[0], p):
                slot[1] += 1
                break
        else:
            groups.append([p, 1])
    return [(p, m) for p, m in groups]


def build_system(
    curve: RealHyperellipticCurve,
    points: Sequence[CurvePoint],
    k: int,
    tolerances: Optional[Tolerances] = None,
) -> InterpolationSystem:
    """
    Evaluation matrix of the L(kH) basis at a list of points.

    A point repeated m times is replaced by 4m jittered copies on a circle
    of radius rho * jitter^(1/(2m)) in its local parameter (x - x0, y at a
    Weierstrass point, 1/x at infinity; rho the local analytic radius). A
    discrete Fourier transform turns the copies back into the first m Taylor
    conditions. Conditions that vanish identically at that order are dropped.
    """
    tol = get_settings().tolerances if tolerances is None else tolerances
    rows: List[np.ndarray] = []
    jittered = False
    for center, mult in _group(curve, points):
        if mult == 1:
            rows.append(_local_row(curve, center, 0j, k))
            continue
        jittered = True
        samples = 4 * mult
        eps = _local_radius(curve, center) * tol.jitter ** (1.0 / (2 * mult))
        params = eps * np.exp(2j * math.pi * np.arange(samples) / samples)
        block = np.array([_local_row(curve, center, t, k) for t in params])
        coeffs = (np.fft.fft(block, axis=0) / samples)[:mult]
        coeffs /= (eps ** np.arange(mult))[:, None]
        value_norm = float(np.linalg.norm(coeffs[0]))
        for order, row in enumerate(coeffs):
            if order > 0 and np.linalg.norm(row) <= tol.svd_threshold * value_norm:
                continue
            rows.append(row)
    width = riemann_roch_dimension(k)
    matrix = np.array(rows, dtype=complex).reshape(len(rows), width)
    if jittered:
        logger.warning(
            "repeated points replaced by jittered copies (jitter %.1e, k=%d)",
            tol.jitter,
            k,
        )
    return InterpolationSystem(matrix=matrix, k=k, jittered=jittered)


def _normalized(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    row_norms = np.linalg.norm(matrix, axis=1)
    row_norms[row_norms == 0.0] = 1.0
    scaled = matrix / row_norms[:, None]
    col_norms = np.linalg.norm(scaled, axis=0)
    col_norms[col_norms == 0.0] = 1.0
    return scaled / col_norms[None, :], col_norms


def interpolation_system(left: Divisor, right: Divisor) -> InterpolationSystem:
    """The system for D + iota(D') against L(dH), d = deg D."""
    _check_degrees(left, right)
    iota_right = transform(right, DivisorTransform.IOTA)
    return build_system(left.curve, left.points() + iota_right.points(), left.degree)


def _check_degrees(left: Divisor, right: Divisor) -> None:
    if left.degree != right.degree:
        raise DegreeMismatch(f"degrees differ: {left.degree} vs {right.degree}")
    if left.degree > MAX_DEGREE:
        raise DegreeTooLarge(f"degree {left.degree} exceeds {MAX_DEGREE}")


def check_linear_equivalence(left: Divisor, right: Divisor) -> EquivalenceVerdict:
    """
    Decide D ~ D' by the smallest singular value of the interpolation system.

    Returns:
        EquivalenceVerdict: Decision, sigma_min / sigma_max, decision gap
        and whether repeated points were jittered

    Raises:
        DegreeMismatch: If the degrees differ
        DegreeTooLarge: If the degree exceeds 4
        IllConditioned: If sigma_min / sigma_max is within the decision gap
            of the threshold
    """
    _check_degrees(left, right)
    if left.degree == 0:
        return EquivalenceVerdict(True, 0.0, math.inf, False)
    tol = get_settings().tolerances
    system = interpolation_system(left, right)
    scaled, _ = _normalized(system.matrix)
    sigma = svd(scaled, compute_uv=False)
    rows, cols = scaled.shape
    smallest = 0.0 if rows < cols else float(sigma[-1])
    rel = smallest / float(sigma[0])
    equivalent = rel < tol.svd_threshold
    if rel == 0.0:
        gap = math.inf
    elif equivalent:
        gap = tol.svd_threshold / rel
    else:
        gap = rel / tol.svd_threshold
    if gap < tol.decision_gap:
        raise IllConditioned(
            f"relative sigma_min {rel:.3e} is within a factor {gap:.1f} of the threshold"
        )
    return EquivalenceVerdict(equivalent, rel, gap, system.jittered)


def is_linearly_equivalent(left: Divisor, right: Divisor) -> bool:
    """Shorthand for ``check_linear_equivalence(left, right).equivalent``."""
    return check_linear_equivalence(left, right).equivalent


def _trim(coeffs: np.ndarray, rel: float = 1e-12) -> np.ndarray:
    scale = float(np.max(np.abs(coeffs))) if coeffs.size else 0.0
    if scale == 0.0:
        return coeffs[:1]
    last = len(coeffs) - 1
    while last > 0 and abs(coeffs[last]) <= rel * scale:
        last -= 1
    return coeffs[: last + 1]


def _zero_divisor_points(
    curve: RealHyperellipticCurve, a: np.ndarray, b: np.ndarray, k: int
) -> List[CurvePoint]:
    """Zeros of a(x) + b(x) y in L(kH), counted with multiplicity."""
    zeros: List[CurvePoint] = []
    if b.size == 0 or not np.any(b):
        a_trim = _trim(a)
        for x in P.polyroots(a_trim) if len(a_trim) > 1 else []:
            p = curve.snap_point(x, 0j)
            zeros.extend([p, CurvePoint.affine(p.x, -p.y)])
        missing = k - (len(a_trim) - 1)
        zeros.extend([CurvePoint.at_infinity(1), CurvePoint.at_infinity(-1)] * missing)
        return zeros

    norm_poly = _trim(P.polysub(P.polymul(a, a), P.polymul(P.polymul(b, b), curve.coefficients)))
    for x in P.polyroots(norm_poly) if len(norm_poly) > 1 else []:
        y = -complex(P.polyval(x, a)) / complex(P.polyval(x, b))
        zeros.append(curve.snap_point(x, y))
    missing = 2 * k - (len(norm_poly) - 1)
    if missing > 0:
        lead = complex(a[k]) if len(a) > k else 0j
        top_b = complex(b[k - 3]) if len(b) > k - 3 else 0j
        ratio = -lead / (top_b * curve.sqrt_leading) if top_b != 0 else 1.0
        branch = 1 if abs(ratio - 1) <= abs(ratio + 1) else -1
        zeros.extend([CurvePoint.at_infinity(branch)] * missing)
    return zeros


def complementary_divisor(divisor: Divisor, rng: np.random.Generator) -> Divisor:
    """
    Residual divisor E of a random member of |dH| through D.

    A random function phi in L(dH) vanishing on D is chosen (real when D is
    real and the lift sign is +1) and its zero divisor D + E is computed from
    the norm polynomial a^2 - b^2 f.

    Args:
        divisor: Effective divisor of degree 2..4
        rng: Random generator

    Returns:
        Divisor: E with D + E in |dH|

    Raises:
        DegreeTooLarge: If the degree is outside 2..4
    """
    curve = divisor.curve
    d = divisor.degree
    if not 2 <= d <= MAX_DEGREE:
        raise DegreeTooLarge(f"complementary divisor needs degree 2..4, got {d}")
    system = build_system(curve, divisor.points(), d)
    scaled, col_norms = _normalized(system.matrix)
    kernel = null_space(scaled)
    weights = rng.standard_normal(kernel.shape[1])
    vector = kernel @ weights
    if curve.lift_sign == 1 and is_real(divisor):
        real_part = vector.real
        vector = real_part if np.linalg.norm(real_part) > 1e-3 else vector.imag
        vector = vector.astype(complex)
    else:
        vector = vector + 1j * (kernel @ rng.standard_normal(kernel.shape[1]))
    coeffs = vector / col_norms
    a, b = coeffs[: d + 1], coeffs[d + 1 :]

    zeros = _zero_divisor_points(curve, a, b, d)
    for p in divisor.points():
        k = int(np.argmin([curve.distance(p, z) for z in zeros]))
        zeros.pop(k)
    return Divisor.from_points(curve, zeros)


def equivalent_divisor(divisor: Divisor, rng: np.random.Generator) -> Divisor:
    """A random effective divisor linearly equivalent to ``divisor``."""
    return transform(complementary_divisor(divisor, rng), DivisorTransform.IOTA)


@dataclass(frozen=True)
class TwoTorsionClass:
    """O(w_i - w_j) for a pair of Weierstrass indices, or the identity."""

    pair: Optional[Tuple[int, int]]
    is_real: bool

    @property
    def is_identity(self) -> bool:
        return self.pair is None

    @property
    def label(self) -> str:
        return "O" if self.pair is None else f"w{self.pair[0]}-w{self.pair[1]}"

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair) if self.pair else None,
            "is_real": self.is_real,
        }


def _pair_is_real(curve: RealHyperellipticCurve, i: int, j: int) -> bool:
    return {curve.conjugate_index(i), curve.conjugate_index(j)} == {i, j}


def tau_image(curve: RealHyperellipticCurve, cls: TwoTorsionClass) -> TwoTorsionClass:
    """The class tau sends ``cls`` to; the pair comes back sorted."""
    if cls.pair is None:
        return cls
    i, j = sorted((curve.conjugate_index(cls.pair[0]), curve.conjugate_index(cls.pair[1])))
    return TwoTorsionClass((i, j), _pair_is_real(curve, i, j))


def generic_fiber(curve: RealHyperellipticCurve, rng: np.random.Generator) -> Divisor:
    """p + iota(p) for a random generic p: a representative of H."""
    p = sample(curve, Region.generic(), rng)
    return Divisor.from_points(curve, [p, curve.involute(p, "iota")])


def representative(
    curve: RealHyperellipticCurve,
    cls: TwoTorsionClass,
    rng: Optional[np.random.Generator] = None,
) -> Divisor:
    """
    Effective degree-2 divisor in the class H + cls: w_i + w_j, or a fiber.
    """
    if cls.pair is None:
        return generic_fiber(curve, rng if rng is not None else np.random.default_rng(0))
    w = curve.weierstrass_points()
    return Divisor.from_points(curve, [w[cls.pair[0]], w[cls.pair[1]]])


def two_torsion(
    curve: RealHyperellipticCurve, rng: Optional[np.random.Generator] = None
) -> List[TwoTorsionClass]:
    """
    The 16 two-torsion classes, identity first, with reality flags.

    Consecutive nontrivial representatives are checked to be inequivalent.

    Raises:
        InvariantViolation: If two listed classes test equivalent
    """
    classes = [TwoTorsionClass(None, True)]
    for i, j in itertools.combinations(range(6), 2):
        classes.append(TwoTorsionClass((i, j), _pair_is_real(curve, i, j)))
    for first, second in zip(classes[1:-1], classes[2:]):
        if is_linearly_equivalent(
            representative(curve, first, rng), representative(curve, second, rng)
        ):
            raise InvariantViolation(f"classes {first.label} and {second.label} coincide")
    return classes


def real_two_torsion_count(curve: RealHyperellipticCurve) -> int:
    """Number of the sixteen two-torsion classes fixed by tau."""
    return sum(1 for c in two_torsion(curve) if c.is_real)


def doubling_holds(
    curve: RealHyperellipticCurve, cls: TwoTorsionClass, rng: np.random.Generator
) -> EquivalenceVerdict:
    """Test 2 * representative ~ 2H against two random fibers."""
    rep = representative(curve, cls, rng)
    twice = rep + rep
    fibers = generic_fiber(curve, rng) + generic_fiber(curve, rng)
    return check_linear_equivalence(twice, fibers)


__all__ = [
    "EquivalenceVerdict",
    "InterpolationSystem",
    "TwoTorsionClass",
    "basis_labels",
    "build_system",
    "complementary_divisor",
    "doubling_holds",
    "equivalent_divisor",
    "generic_fiber",
    "interpolation_system",
    "is_linearly_equivalent",
    "real_two_torsion_count",
    "representative",
    "riemann_roch_dimension",
    "tau_image",
    "check_linear_equivalence",
    "two_torsion",
]
