"""
Parity bookkeeping for real maximal subbundles.

A real divisor of the degree-3 system attached to a determinant with
odd-circle vector s has, on each circle, a number of real points of parity
s_i. Each real point p yields a real subbundle whose type relative to the
base one is s XOR e_circle(p). Everything here is bit-vector arithmetic.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import itertools
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from real_subbundle_lab.errors import BadParity, InvalidAssignment

FIBER_DEGREE = 3


@dataclass(frozen=True)
class CircleAssignment:
    """Circle index of each real point of a real fiber, plus its conjugate pairs."""

    circles: Tuple[int, ...]
    conjugate_pairs: int

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "CircleAssignment":
        total = sum(counts)
        if total > FIBER_DEGREE or (FIBER_DEGREE - total) % 2:
            raise InvalidAssignment(f"count vector {tuple(counts)} cannot fill a degree-3 fiber")
        circles = tuple(c for c, r in enumerate(counts) for _ in range(r))
        return cls(circles, (FIBER_DEGREE - total) // 2)

    def counts(self, n: int) -> Tuple[int, ...]:
        out = [0] * n
        for c in self.circles:
            out[c] += 1
        return tuple(out)

    def to_dict(self) -> Dict[str, object]:
        return {"circles": list(self.circles), "conjugate_pairs": self.conjugate_pairs}


@dataclass(frozen=True)
class SubbundleTypeReport:
    relative_types: Tuple[Tuple[int, ...], ...]
    distinct_count: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "relative_types": ["".join(map(str, t)) for t in self.relative_types],
            "distinct_count": self.distinct_count,
        }


def _check_signature(n: int, lambda_sig: Sequence[int]) -> Tuple[int, ...]:
    sig = tuple(int(b) for b in lambda_sig)
    if n < 1:
        raise BadParity("at least one circle is required")
    if len(sig) != n or any(b not in (0, 1) for b in sig):
        raise BadParity(f"signature {sig} is not a bit vector of length {n}")
    if sum(sig) % 2 != 1:
        raise BadParity(f"signature {sig} has even parity; a degree-1 determinant is odd")
    return sig


def real_fiber_configs(n: int, lambda_sig: Sequence[int]) -> List[CircleAssignment]:
    """
    Admissible per-circle counts of real points in a real degree-3 fiber.

    Counts r_i have total 1 or 3 and r_i = s_i mod 2. Ordered by total,
    then lexicographically with larger counts first.

    Raises:
        BadParity: If the signature is not an odd bit vector of length n

    Example:
        >>> [a.counts(3) for a in real_fiber_configs(3, (1, 1, 1))]
        [(1, 1, 1)]
    """
    sig = _check_signature(n, lambda_sig)
    vectors = [
        counts
        for counts in itertools.product(range(FIBER_DEGREE + 1), repeat=n)
        if sum(counts) in (1, 3)
        and all(r % 2 == s for r, s in zip(counts, sig))
    ]
    vectors.sort(key=lambda v: (sum(v), tuple(-r for r in v)))
    return [CircleAssignment.from_counts(v) for v in vectors]


def relative_types(
    n: int, lambda_sig: Sequence[int], assignment: CircleAssignment
) -> SubbundleTypeReport:
    """
    Relative types of the real subbundles of one real fiber.

    The base subbundle contributes the zero vector; the subbundle through a
    real point on circle c contributes s XOR e_c.

    Raises:
        InvalidAssignment: If the assignment is not admissible for the signature
    """
    sig = _check_signature(n, lambda_sig)
    admissible = {a.counts(n) for a in real_fiber_configs(n, sig)}
    if any(not 0 <= c < n for c in assignment.circles) or assignment.counts(n) not in admissible:
        raise InvalidAssignment(f"assignment {assignment.circles} is not admissible for {sig}")
    types: List[Tuple[int, ...]] = [tuple(0 for _ in range(n))]
    for c in assignment.circles:
        types.append(tuple(b ^ (1 if i == c else 0) for i, b in enumerate(sig)))
    return SubbundleTypeReport(tuple(types), len(set(types)))


def max_distinct_over_configs(n: int, lambda_sig: Sequence[int]) -> int:
    """Largest number of distinct relative types over all admissible fiber configurations."""
    return max(
        relative_types(n, lambda_sig, a).distinct_count
        for a in real_fiber_configs(n, lambda_sig)
    )


def lange_narasimhan_table(max_circles: int = 3) -> List[Dict[str, object]]:
    """
    Every odd signature on up to ``max_circles`` circles with its admissible
    assignments, relative-type reports and maximal distinct count.
    """
    rows: List[Dict[str, object]] = []
    for n in range(1, max_circles + 1):
        for sig in itertools.product((0, 1), repeat=n):
            if sum(sig) % 2 != 1:
                continue
            configs = real_fiber_configs(n, sig)
            rows.append(
                {
                    "n": n,
                    "lambda": "".join(map(str, sig)),
                    "odd_circles": sum(sig),
                    "assignments": [
                        {
                            "counts": list(a.counts(n)),
                            **relative_types(n, sig, a).to_dict(),
                        }
                        for a in configs
                    ],
                    "max_distinct": max_distinct_over_configs(n, sig),
                }
            )
    return rows
