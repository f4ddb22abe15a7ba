"""
Seeded Monte Carlo survey of real subbundle counts.

Each recipe builds projectively real degree-3 divisors by one of the
constructions behind the three count theorems. A survey analyzes the Atiyah
orbit of every generated divisor, discards degenerate trials with a reason,
and bins the real-member counts. The trichotomy verdict compares the union
of supports of a battery of recipes with the case expected for the curve
type and the number of odd circles of the determinant.

Trials are pure functions of (seed, recipe, index), so results do not depend
on the number of worker threads.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config.settings import get_settings
from real_subbundle_lab.atiyah import analyze, matches_determinant
from real_subbundle_lab.curve import (
    CurvePoint,
    Involution,
    RealHyperellipticCurve,
    Region,
    TopologicalType,
    sample,
)
from real_subbundle_lab.divisors import Divisor, LineBundleTopType, is_real
from real_subbundle_lab.errors import (
    AllTrialsDegenerate,
    AmbiguousMatch,
    BadParity,
    InsufficientData,
    RecipeUnavailable,
)
from real_subbundle_lab.subbundles import real_fiber_configs

logger = logging.getLogger(__name__)

COUNT0_CAVEAT = (
    "Orbits with no real member are keyed by construction recipe; that the "
    "underlying real bundle has the requested determinant type is not checked "
    "at divisor level."
)

EXPECTED_SUPPORT: Dict[str, Tuple[int, ...]] = {
    "case1": (2, 4),
    "case2": (4,),
    "case3": (0, 2, 4),
}
_OFFENDER_LIMIT = 20


class RecipeName(str, Enum):
    ALL_REAL = "all_real"
    REAL_PLUS_CONJUGATE_PAIR = "real_plus_conjugate_pair"
    ANTIREAL_PAIR = "antireal_pair"
    IOTA_TAU_PAIR = "iota_tau_pair"
    UNIFORM_PROJECTIVELY_REAL = "uniform_projectively_real"


RECIPE_CODES: Dict[RecipeName, int] = {name: code for code, name in enumerate(RecipeName)}
BATTERY: Tuple[RecipeName, ...] = tuple(RecipeName)


class DiscardReason(str, Enum):
    DEGENERATE = "degenerate"
    DETERMINANT_MISMATCH = "determinant_mismatch"
    AMBIGUOUS_MATCH = "ambiguous_match"


@dataclass(frozen=True)
class Recipe:
    """
    A divisor construction with its parameters.

    ``configs`` are the admissible per-circle counts of real points the
    recipe draws from; ``arcs`` the anti-real arcs used by ``antireal_pair``.
    """

    name: RecipeName
    curve: RealHyperellipticCurve
    configs: Tuple[Tuple[int, ...], ...] = ()
    arcs: Tuple[int, ...] = ()
    parts: Tuple["Recipe", ...] = ()

    def generate(self, rng: np.random.Generator) -> Divisor:
        if self.name is RecipeName.UNIFORM_PROJECTIVELY_REAL:
            return self.parts[int(rng.integers(len(self.parts)))].generate(rng)
        counts = self.configs[int(rng.integers(len(self.configs)))]
        points = _real_points(self.curve, counts, rng)
        if self.name is RecipeName.ALL_REAL:
            return Divisor.from_points(self.curve, points)
        if self.name is RecipeName.ANTIREAL_PAIR:
            b, c = self._antireal_pair(rng)
            return Divisor.from_points(self.curve, points + [b, c])
        b = sample(self.curve, Region.generic(), rng)
        involution = (
            Involution.TAU
            if self.name is RecipeName.REAL_PLUS_CONJUGATE_PAIR
            else Involution.TAU_IOTA
        )
        return Divisor.from_points(
            self.curve, points + [b, self.curve.involute(b, involution)]
        )

    def _antireal_pair(self, rng: np.random.Generator) -> Tuple[CurvePoint, CurvePoint]:
        curve = self.curve
        b = sample(curve, Region.anti_real(self.arcs[int(rng.integers(len(self.arcs)))]), rng)
        while True:
            c = sample(curve, Region.anti_real(self.arcs[int(rng.integers(len(self.arcs)))]), rng)
            if not (
                curve.same_point(c, b)
                or curve.same_point(c, curve.involute(b, Involution.IOTA))
            ):
                return b, c


def _real_points(
    curve: RealHyperellipticCurve, counts: Sequence[int], rng: np.random.Generator
) -> List[CurvePoint]:
    return [
        sample(curve, Region.fixed_circle(circle), rng)
        for circle, r in enumerate(counts)
        for _ in range(r)
    ]


def _check_lambda(curve: RealHyperellipticCurve, lambda_type: LineBundleTopType) -> None:
    n = len(curve.fixed_circles)
    if len(lambda_type.odd_circles) != n:
        raise BadParity(
            f"determinant type {lambda_type.bits} does not match {n} fixed circles"
        )


def make_recipe(
    curve: RealHyperellipticCurve,
    lambda_type: LineBundleTopType,
    name: RecipeName,
) -> Recipe:
    """
    Bind a recipe to a curve and determinant type.

    Raises:
        RecipeUnavailable: If no admissible configuration exists, or the
            anti-real locus is empty for ``antireal_pair``
        BadParity: If the determinant type does not fit the curve
    """
    name = RecipeName(name)
    _check_lambda(curve, lambda_type)
    n = len(curve.fixed_circles)
    configs = real_fiber_configs(n, lambda_type.odd_circles)
    triples = tuple(a.counts(n) for a in configs if len(a.circles) == 3)
    singles = tuple(a.counts(n) for a in configs if len(a.circles) == 1)

    if name is RecipeName.UNIFORM_PROJECTIVELY_REAL:
        parts = []
        for sub in BATTERY:
            if sub is RecipeName.UNIFORM_PROJECTIVELY_REAL:
                continue
            try:
                parts.append(make_recipe(curve, lambda_type, sub))
            except RecipeUnavailable:
                continue
        if not parts:
            raise RecipeUnavailable(f"no construction is available for {lambda_type.bits}")
        return Recipe(name, curve, parts=tuple(parts))
    if name is RecipeName.ALL_REAL:
        if not triples:
            raise RecipeUnavailable(f"no all-real configuration for {lambda_type.bits}")
        return Recipe(name, curve, configs=triples)
    if not singles:
        raise RecipeUnavailable(
            f"{name.value} needs a single odd circle, determinant is {lambda_type.bits}"
        )
    if name is RecipeName.ANTIREAL_PAIR:
        arcs = tuple(c.index for c in curve.anti_real_components)
        if not arcs:
            raise RecipeUnavailable("antireal_pair needs a nonempty anti-real locus")
        return Recipe(name, curve, configs=singles, arcs=arcs)
    return Recipe(name, curve, configs=singles)


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    recipe: str
    count: Optional[int]
    flags: Tuple[str, ...]
    signature: Optional[str]
    divisor: Tuple[Dict[str, object], ...] = field(compare=False, default=())
    discard: Optional[DiscardReason] = None
    problems: Tuple[str, ...] = ()

    def csv_row(self) -> List[object]:
        return [
            self.trial,
            self.recipe,
            "" if self.count is None else self.count,
            ";".join(self.flags),
            self.signature or "",
        ]


@dataclass
class SurveyResult:
    """Histogram of real-member counts for one recipe."""

    recipe: str
    seed: int
    trial_count: int
    histogram: Dict[int, int]
    discards: Dict[str, int]
    records: List[TrialRecord]
    violations: List[Dict[str, object]]
    caveat: str = COUNT0_CAVEAT

    @property
    def degenerate_discard_count(self) -> int:
        return sum(self.discards.values())

    @property
    def nondegenerate(self) -> int:
        return sum(self.histogram.values())

    @property
    def support(self) -> List[int]:
        return sorted(k for k, v in self.histogram.items() if v > 0)

    def to_dict(self) -> Dict[str, object]:
        return {
            "recipe": self.recipe,
            "seed": self.seed,
            "trials": self.trial_count,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "discards": dict(sorted(self.discards.items())),
            "discard_total": self.degenerate_discard_count,
            "support": self.support,
            "violations": self.violations,
            "caveat": self.caveat,
        }


def _run_trial(
    recipe: Recipe, lambda_type: LineBundleTopType, seed: int, trial: int
) -> TrialRecord:
    rng = np.random.default_rng([seed, RECIPE_CODES[recipe.name], trial])
    divisor = recipe.generate(rng)
    literal = tuple(divisor.to_literal())
    name = recipe.name.value

    def discarded(reason: DiscardReason, flags: Tuple[str, ...]) -> TrialRecord:
        return TrialRecord(trial, name, None, flags, None, literal, reason)

    try:
        report = analyze(divisor)
        if not report.is_generic:
            flags = tuple(sorted(f.value for f in report.flags))
            return discarded(DiscardReason.DEGENERATE, flags)
        if is_real(divisor) and not matches_determinant(divisor, lambda_type):
            return discarded(DiscardReason.DETERMINANT_MISMATCH, ("determinant_mismatch",))
    except AmbiguousMatch:
        return discarded(DiscardReason.AMBIGUOUS_MATCH, ("ambiguous_match",))

    common = report.common_signature
    if common is not None and common.odd_circles != lambda_type.odd_circles:
        return discarded(DiscardReason.DETERMINANT_MISMATCH, ("determinant_mismatch",))

    problems = []
    if not report.projectively_real:
        problems.append("not_projectively_real")
    if not report.parity_ok:
        problems.append("odd_count")
    if not report.signatures_agree:
        problems.append("signature_disagreement")
    return TrialRecord(
        trial,
        name,
        report.real_member_count,
        (),
        common.bits if common is not None else None,
        literal,
        None,
        tuple(problems),
    )


def run_survey(
    curve: RealHyperellipticCurve,
    lambda_type: LineBundleTopType,
    recipe: RecipeName,
    trials: int,
    seed: int,
    threads: Optional[int] = None,
) -> SurveyResult:
    """
    Run one recipe for a number of trials.

    Args:
        curve: The curve
        lambda_type: Topological type of the determinant (degree 1)
        recipe: Recipe name
        trials: Number of trials, at least 1
        seed: Base seed; trial i uses default_rng([seed, recipe code, i])
        threads: Worker threads; defaults to the active settings

    Returns:
        SurveyResult: Histogram, discards per reason and per-trial records

    Raises:
        RecipeUnavailable: If the recipe cannot run on this curve
        AllTrialsDegenerate: If every trial was discarded
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    bound = make_recipe(curve, lambda_type, recipe)
    workers = get_settings().threads if threads is None else threads
    with ThreadPoolExecutor(max_workers=workers) as pool:
        records = list(
            pool.map(lambda i: _run_trial(bound, lambda_type, seed, i), range(trials))
        )

    histogram: Counter = Counter()
    discards: Counter = Counter()
    violations: List[Dict[str, object]] = []
    for record in records:
        if record.discard is not None:
            discards[record.discard.value] += 1
            continue
        histogram[record.count] += 1
        if record.problems:
            violations.append(
                {
                    "trial": record.trial,
                    "recipe": record.recipe,
                    "problems": list(record.problems),
                    "divisor": list(record.divisor),
                }
            )
    for reason, count in sorted(discards.items()):
        logger.info("%s: discarded %d trials (%s)", bound.name.value, count, reason)
    if not histogram:
        raise AllTrialsDegenerate(f"all {trials} trials of {bound.name.value} were discarded")
    return SurveyResult(
        recipe=bound.name.value,
        seed=seed,
        trial_count=trials,
        histogram=dict(sorted(histogram.items())),
        discards=dict(sorted(discards.items())),
        records=records,
        violations=violations,
    )


def run_battery(
    curve: RealHyperellipticCurve,
    lambda_type: LineBundleTopType,
    trials: int,
    seed: int,
    threads: Optional[int] = None,
) -> Dict[str, SurveyResult]:
    """Run every recipe available for (curve, determinant) in fixed order."""
    results: Dict[str, SurveyResult] = {}
    for name in BATTERY:
        try:
            make_recipe(curve, lambda_type, name)
        except RecipeUnavailable as exc:
            logger.info("skipping %s: %s", name.value, exc)
            continue
        results[name.value] = run_survey(curve, lambda_type, name, trials, seed, threads)
    return results


def expected_case(curve_type: TopologicalType, lambda_type: LineBundleTopType) -> Optional[str]:
    """Case predicted by the curve type and the number of odd circles."""
    k = lambda_type.odd_count
    key = (curve_type.n, curve_type.a)
    if key == (1, 0) and k == 1:
        return "case1"
    if key == (3, 0) and k == 3:
        return "case2"
    if key in {(1, 1), (2, 1), (3, 0)} and k == 1:
        return "case3"
    return None


def _case_of(support: Sequence[int]) -> Optional[str]:
    for case, expected in EXPECTED_SUPPORT.items():
        if tuple(support) == expected:
            return case
    return None


@dataclass(frozen=True)
class TrichotomyVerdict:
    verdict: str
    observed: Optional[str]
    expected: Optional[str]
    support: Tuple[int, ...]
    cell_counts: Dict[str, int]
    offending: Tuple[Dict[str, object], ...] = ()

    @property
    def is_violation(self) -> bool:
        return self.verdict == "violation"

    def to_dict(self) -> Dict[str, object]:
        return {
            "verdict": self.verdict,
            "observed": self.observed,
            "expected": self.expected,
            "support": list(self.support),
            "cells": dict(sorted(self.cell_counts.items())),
            "offending": list(self.offending),
        }


def trichotomy_verdict(
    curve_type: TopologicalType,
    lambda_type: LineBundleTopType,
    results: Mapping[str, SurveyResult],
    min_trials: Optional[int] = None,
) -> TrichotomyVerdict:
    """
    Classify the union of supports as case1, case2, case3 or violation.

    case1 is support {2, 4}, case2 is {4}, case3 is {0, 2, 4}. Odd counts,
    signature disagreements, a support matching no case, or a case other
    than the one expected for the curve type give ``violation``.

    Raises:
        InsufficientData: If any recipe has fewer than ``min_trials``
            nondegenerate trials
    """
    floor = get_settings().min_trials if min_trials is None else min_trials
    cells = {name: result.nondegenerate for name, result in results.items()}
    if not cells or any(count < floor for count in cells.values()):
        raise InsufficientData(f"need {floor} nondegenerate trials per recipe, have {cells}")

    support = tuple(sorted({k for r in results.values() for k in r.support}))
    expected = expected_case(curve_type, lambda_type)
    observed = _case_of(support)
    offending: List[Dict[str, object]] = [v for r in results.values() for v in r.violations]

    if not offending and expected is not None and observed != expected:
        allowed = set(EXPECTED_SUPPORT[expected])
        for result in results.values():
            for record in result.records:
                if record.count is not None and record.count not in allowed:
                    offending.append(
                        {
                            "trial": record.trial,
                            "recipe": record.recipe,
                            "problems": [f"unexpected_count_{record.count}"],
                            "divisor": list(record.divisor),
                        }
                    )

    violated = bool(offending) or observed is None or (
        expected is not None and observed != expected
    )
    return TrichotomyVerdict(
        verdict="violation" if violated else str(observed),
        observed=observed,
        expected=expected,
        support=support,
        cell_counts=cells,
        offending=tuple(offending[:_OFFENDER_LIMIT]),
    )
