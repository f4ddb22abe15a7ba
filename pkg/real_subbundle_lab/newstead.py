"""
Quadric-pencil model of the moduli space and its real forms.

For a genus-2 curve with Weierstrass x-coordinates lambda_1..lambda_6, the
moduli space of stable rank-2 bundles with fixed odd determinant is the
intersection of Q0 = sum x_i^2 and Q1 = sum lambda_i x_i^2 in P^5. Real
forms are antiholomorphic involutions x -> eps * conj(x o sigma), with sigma
the permutation pairing conjugate lambdas. The sampler intersects the real
locus of a form with random real projective planes, which reduces to
intersecting two conics.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import eig, eigh, null_space
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from config.settings import get_settings
from real_subbundle_lab.curve import RealHyperellipticCurve
from real_subbundle_lab.errors import CoincidentLambda, NoRealPointsFound, SingularPoint

logger = logging.getLogger(__name__)

DIMENSION = 6
_POLISH_STEPS = 4
_IMAG_GATE = 1e-9


@dataclass(frozen=True)
class QuadricPencil:
    """The pencil spanned by Q0 = sum x_i^2 and Q1 = sum lambda_i x_i^2."""

    lambdas: Tuple[complex, ...]
    permutation: Tuple[int, ...]

    @property
    def q0(self) -> np.ndarray:
        return np.ones(DIMENSION, dtype=complex)

    @property
    def q1(self) -> np.ndarray:
        return np.array(self.lambdas, dtype=complex)

    @classmethod
    def from_lambdas(cls, lambdas: Sequence[complex], tol: float = 1e-9) -> "QuadricPencil":
        """
        Pencil from six parameters closed under conjugation.

        Raises:
            CoincidentLambda: If two parameters agree to tolerance
        """
        values = tuple(complex(v) for v in lambdas)
        if len(values) != DIMENSION:
            raise ValueError(f"need {DIMENSION} parameters, got {len(values)}")
        for i, j in itertools.combinations(range(DIMENSION), 2):
            if abs(values[i] - values[j]) <= tol * max(1.0, abs(values[i]), abs(values[j])):
                raise CoincidentLambda(f"lambda_{i} and lambda_{j} coincide ({values[i]:.6g})")
        permutation = []
        for v in values:
            k = int(np.argmin([abs(v.conjugate() - w) for w in values]))
            if abs(v.conjugate() - values[k]) > 1e3 * tol * max(1.0, abs(v)):
                raise ValueError("parameters are not closed under conjugation")
            permutation.append(k)
        return cls(values, tuple(permutation))

    def evaluate(self, x: np.ndarray) -> Tuple[complex, complex]:
        squares = np.asarray(x, dtype=complex) ** 2
        return complex(np.sum(squares)), complex(np.sum(self.q1 * squares))


def build_pencil(curve: RealHyperellipticCurve) -> QuadricPencil:
    """
    Pencil of the curve, parameters in root order (conjugate pairs adjacent).

    Raises:
        CoincidentLambda: If two Weierstrass x-coordinates coincide
    """
    return QuadricPencil.from_lambdas(curve.roots, curve.tolerance)


@dataclass(frozen=True)
class RealForm:
    """
    The involution x -> eps * conj(x o sigma) on the pencil.

    ``quaternionic`` forms square to -1 and have no fixed points.
    """

    pencil: QuadricPencil
    epsilon: Tuple[int, ...]
    quaternionic: bool = False

    @property
    def label(self) -> str:
        return "".join("+" if e > 0 else "-" for e in self.epsilon)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        sigma = list(self.pencil.permutation)
        return np.array(self.epsilon) * np.conj(x[sigma])

    def preserves_pencil(self, tol: float = 1e-9) -> bool:
        """Whether conjugation through the permutation fixes every eigenvalue."""
        lam = self.pencil.lambdas
        return all(
            abs(lam[self.pencil.permutation[i]].conjugate() - lam[i]) <= tol * max(1.0, abs(lam[i]))
            for i in range(DIMENSION)
        )

    def _slots(self) -> List[Tuple[int, Optional[int]]]:
        slots: List[Tuple[int, Optional[int]]] = []
        for i, j in enumerate(self.pencil.permutation):
            if i == j:
                slots.append((i, None))
            elif i < j:
                slots.append((i, j))
        return slots

    def real_quadrics(self) -> Tuple[np.ndarray, np.ndarray]:
        """
        Real symmetric matrices of Q0 and Q1 in real coordinates u of the
        fixed locus. A real index contributes eps_i u_i^2; a conjugate pair
        (i, j) with x_i = u_i + i u_j contributes a 2x2 block.
        """
        if self.quaternionic:
            raise NoRealPointsFound(f"form {self.label} is quaternionic")
        s0 = np.zeros((DIMENSION, DIMENSION))
        s1 = np.zeros((DIMENSION, DIMENSION))
        lam = self.pencil.lambdas
        for i, j in self._slots():
            if j is None:
                s0[i, i] = self.epsilon[i]
                s1[i, i] = self.epsilon[i] * lam[i].real
                continue
            re, im = lam[i].real, lam[i].imag
            s0[i, i], s0[j, j] = 2.0, -2.0
            s1[i, i], s1[j, j] = 2.0 * re, -2.0 * re
            s1[i, j] = s1[j, i] = -2.0 * im
        return s0, s1

    def embed(self, u: np.ndarray) -> np.ndarray:
        """Complex coordinates of the fixed point with real coordinates u."""
        x = np.zeros(DIMENSION, dtype=complex)
        for i, j in self._slots():
            if j is None:
                x[i] = u[i] if self.epsilon[i] > 0 else 1j * u[i]
            else:
                x[i] = complex(u[i], u[j])
                x[j] = self.epsilon[j] * complex(u[i], -u[j])
        return x


def enumerate_real_forms(pencil: QuadricPencil) -> List[RealForm]:
    """
    Involutive sign classes eps (eps_0 = +1) for the pencil's permutation.

    A class is kept when eps_i * eps_sigma(i) is the same sign c for every i:
    c = +1 gives a real form, c = -1 a quaternionic one.
    """
    forms: List[RealForm] = []
    sigma = pencil.permutation
    for tail in itertools.product((1, -1), repeat=DIMENSION - 1):
        eps = (1,) + tail
        products = {eps[i] * eps[sigma[i]] for i in range(DIMENSION)}
        if len(products) != 1:
            continue
        form = RealForm(pencil, eps, quaternionic=products == {-1})
        if form.preserves_pencil():
            forms.append(form)
    return forms


def _has_definite_member(s0: np.ndarray, s1: np.ndarray) -> bool:
    values = eig(s0, -s1, right=False)
    finite = sorted(
        v.real for v in values if np.isfinite(v) and abs(v.imag) <= _IMAG_GATE * (1 + abs(v))
    )
    shifts = [0.0]
    if finite:
        shifts += [finite[0] - 1.0, finite[-1] + 1.0]
        shifts += [0.5 * (a + b) for a, b in zip(finite[:-1], finite[1:])]
    candidates = [s0 + t * s1 for t in shifts] + [s1, -s1]
    for matrix in candidates:
        w = np.linalg.eigvalsh(matrix)
        scale = max(1.0, float(np.max(np.abs(w))))
        if np.all(w > 1e-12 * scale) or np.all(w < -1e-12 * scale):
            return True
    return False


@dataclass(frozen=True)
class SampledPoint:
    u: np.ndarray
    residual_q0: float
    residual_q1: float

    @property
    def residual(self) -> float:
        return max(self.residual_q0, self.residual_q1)


def normalized_residuals(s0: np.ndarray, s1: np.ndarray, u: np.ndarray) -> Tuple[float, float]:
    """|u^T S u| / (||S|| |u|^2) for both quadrics."""
    norm_u = float(u @ u)
    return (
        abs(float(u @ s0 @ u)) / (np.linalg.norm(s0, 2) * norm_u),
        abs(float(u @ s1 @ u)) / (np.linalg.norm(s1, 2) * norm_u),
    )


def _polish(s0: np.ndarray, s1: np.ndarray, u: np.ndarray) -> np.ndarray:
    for _ in range(_POLISH_STEPS):
        values = np.array([u @ s0 @ u, u @ s1 @ u])
        jac = np.vstack([2.0 * s0 @ u, 2.0 * s1 @ u])
        step = np.linalg.lstsq(jac, -values, rcond=None)[0]
        u = u + step
        u = u / np.linalg.norm(u)
    return u


def _canonical_sign(u: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(u)))
    return u if u[k] >= 0 else -u


def _line_conic(line: np.ndarray, conic: np.ndarray) -> List[np.ndarray]:
    basis = null_space(line[None, :])
    p, q = basis[:, 0], basis[:, 1]
    a, b, c = q @ conic @ q, 2.0 * (p @ conic @ q), p @ conic @ p
    points = []
    for t in np.roots([a, b, c]):
        if abs(t.imag) <= _IMAG_GATE * (1.0 + abs(t)):
            points.append(p + t.real * q)
    if abs(a) <= 1e-14 * (abs(b) + abs(c) + 1.0):
        points.append(q)
    return points


def _split_degenerate(conic: np.ndarray) -> List[np.ndarray]:
    """Real lines whose product is a rank-2 indefinite conic."""
    w, vecs = eigh(conic)
    order = np.argsort(np.abs(w))
    w1, w2 = w[order[1]], w[order[2]]
    if w1 * w2 >= 0:
        return []
    q1, q2 = vecs[:, order[1]], vecs[:, order[2]]
    a, b = math.sqrt(abs(w1)), math.sqrt(abs(w2))
    return [a * q1 + b * q2, a * q1 - b * q2]


def _plane_points(
    s0: np.ndarray, s1: np.ndarray, rng: np.random.Generator
) -> List[np.ndarray]:
    frame, _ = np.linalg.qr(rng.standard_normal((DIMENSION, 3)))
    a = frame.T @ s0 @ frame
    b = frame.T @ s1 @ frame
    found: List[np.ndarray] = []
    for mu in eig(a, -b, right=False):
        if not np.isfinite(mu):
            degenerate, other = b, a
        elif abs(mu.imag) <= _IMAG_GATE * (1.0 + abs(mu)):
            degenerate = a + mu.real * b
            other = a if abs(mu.real) > 1e-12 else b
        else:
            continue
        for line in _split_degenerate(degenerate):
            for z in _line_conic(line, other):
                u = frame @ z
                found.append(u / np.linalg.norm(u))
        if found:
            break
    return found


def sample_real_points(
    form: RealForm,
    count: int,
    rng: np.random.Generator,
    plane_budget: Optional[int] = None,
) -> List[SampledPoint]:
    """
    Sample real points of the form by random plane sections.

    Each real projective plane meets the real locus in the real solutions of
    two conics; these are found from a real degenerate member of the conic
    pencil, split into lines, each line cut with a conic by a quadratic.
    Points are polished by Gauss-Newton on the sphere and kept when both
    normalized residuals are within tolerance.

    Args:
        form: A real form
        count: Points wanted
        rng: Random generator
        plane_budget: Planes tried per requested point

    Returns:
        list of SampledPoint: Up to ``count`` points

    Raises:
        NoRealPointsFound: If no point is found within the budget, or at once
            for quaternionic forms and forms whose pencil has a definite member
    """
    settings = get_settings()
    budget = settings.newstead_plane_budget if plane_budget is None else plane_budget
    limit = settings.tolerances.residual
    s0, s1 = form.real_quadrics()
    if _has_definite_member(s0, s1):
        raise NoRealPointsFound(f"form {form.label} has a definite member")

    points: List[SampledPoint] = []
    for _ in range(count * budget):
        for u in _plane_points(s0, s1, rng):
            u = _canonical_sign(_polish(s0, s1, u))
            r0, r1 = normalized_residuals(s0, s1, u)
            if max(r0, r1) <= limit:
                points.append(SampledPoint(u, r0, r1))
        if len(points) >= count:
            return points[:count]
    if not points:
        raise NoRealPointsFound(f"form {form.label}: no real points in {count * budget} planes")
    return points


def quadric_gradient(s: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Gradient 2 S u of the quadratic form u^T S u."""
    return 2.0 * s @ u


def finite_difference_gradient(s: np.ndarray, u: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient of u^T S u, used to check ``quadric_gradient``."""
    grad = np.zeros_like(u, dtype=float)
    for i in range(len(u)):
        e = np.zeros_like(u, dtype=float)
        e[i] = h
        grad[i] = ((u + e) @ s @ (u + e) - (u - e) @ s @ (u - e)) / (2.0 * h)
    return grad


@dataclass(frozen=True)
class SmoothnessVerdict:
    rank: int
    sigma2: float


def smoothness_check(form: RealForm, u: np.ndarray) -> SmoothnessVerdict:
    """
    Rank of the derivative of (Q0, Q1) at a real point.

    Raises:
        SingularPoint: If the second normalized singular value is not above
            the smoothness tolerance
    """
    s0, s1 = form.real_quadrics()
    scale = float(np.linalg.norm(u))
    rows = np.vstack(
        [
            quadric_gradient(s0, u) / (np.linalg.norm(s0, 2) * scale),
            quadric_gradient(s1, u) / (np.linalg.norm(s1, 2) * scale),
        ]
    )
    sigma = np.linalg.svd(rows, compute_uv=False)
    if sigma[1] <= get_settings().tolerances.smoothness:
        raise SingularPoint(f"derivative rank drops at {u} (sigma2 {sigma[1]:.3e})")
    return SmoothnessVerdict(rank=2, sigma2=float(sigma[1]))


def connectivity_estimate(points: Sequence[np.ndarray], factor: Optional[float] = None) -> int:
    """
    Number of components of a nearest-neighbour graph on sampled points.

    Distances are projective, sqrt(2 - 2|u.v|) for unit vectors; the edge
    threshold is ``factor`` times the largest nearest-neighbour distance.
    Weak evidence only.
    """
    if not points:
        return 0
    factor = get_settings().connectivity_factor if factor is None else factor
    u = np.array([p / np.linalg.norm(p) for p in points])
    dist = np.sqrt(np.clip(2.0 - 2.0 * np.abs(u @ u.T), 0.0, None))
    np.fill_diagonal(dist, np.inf)
    if len(points) == 1:
        return 1
    threshold = factor * float(np.max(np.min(dist, axis=1)))
    adjacency = csr_matrix(dist <= threshold)
    n_components, _ = connected_components(adjacency, directed=False)
    return int(n_components)


def _form_report(form: RealForm, count: int, seed: int) -> Dict[str, object]:
    row: Dict[str, object] = {
        "epsilon": form.label,
        "quaternionic": form.quaternionic,
        "points_found": 0,
        "residual_max": None,
        "rank2": None,
        "components_estimate": None,
    }
    try:
        points = sample_real_points(form, count, np.random.default_rng(seed))
    except NoRealPointsFound as exc:
        logger.info("no real points: %s", exc)
        return row
    ranks = []
    for point in points:
        try:
            ranks.append(smoothness_check(form, point.u).rank == 2)
        except SingularPoint:
            ranks.append(False)
    row.update(
        points_found=len(points),
        residual_max=max(p.residual for p in points),
        rank2=all(ranks),
        components_estimate=connectivity_estimate([p.u for p in points]),
    )
    return row


def survey_forms(
    pencil: QuadricPencil,
    count: int,
    rng: np.random.Generator,
    threads: Optional[int] = None,
) -> List[Dict[str, object]]:
    """One report row per enumerated form; forms run in parallel, seeded per form."""
    forms = enumerate_real_forms(pencil)
    seeds = rng.integers(0, 2**63 - 1, size=len(forms))
    workers = get_settings().threads if threads is None else threads
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(
            pool.map(lambda pair: _form_report(pair[0], count, int(pair[1])), zip(forms, seeds))
        )
