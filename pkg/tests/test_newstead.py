"""
Tests for the quadric-pencil model and its real forms.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import math

import numpy as np
import pytest

from real_subbundle_lab.errors import CoincidentLambda, NoRealPointsFound, SingularPoint
from real_subbundle_lab.newstead import (
    QuadricPencil,
    RealForm,
    build_pencil,
    connectivity_estimate,
    enumerate_real_forms,
    finite_difference_gradient,
    quadric_gradient,
    sample_real_points,
    smoothness_check,
    survey_forms,
)


def _first_sampling_form(pencil, rng, count=20):
    for form in enumerate_real_forms(pencil):
        if form.quaternionic:
            continue
        try:
            return form, sample_real_points(form, count, rng, plane_budget=20)
        except NoRealPointsFound:
            continue
    raise AssertionError("no real form produced points")


@pytest.mark.unit
def test_pencil_of_m_curve(c4):
    """The pencil of an M-curve has six real eigenvalues."""
    pencil = build_pencil(c4)
    assert [v.real for v in pencil.lambdas] == pytest.approx([-3, -2, -1, 1, 2, 3])
    assert pencil.permutation == (0, 1, 2, 3, 4, 5)


@pytest.mark.unit
def test_pencil_without_real_roots(c1):
    """Conjugate roots give conjugate eigenvalue pairs."""
    pencil = build_pencil(c1)
    assert pencil.permutation == (1, 0, 3, 2, 5, 4)
    assert sorted(abs(v.imag) for v in pencil.lambdas) == pytest.approx(
        [1, 1, math.sqrt(2), math.sqrt(2), math.sqrt(3), math.sqrt(3)]
    )


@pytest.mark.unit
def test_coincident_lambda():
    """Coincident eigenvalues are rejected."""
    with pytest.raises(CoincidentLambda):
        QuadricPencil.from_lambdas([1, 1, 2, 3, 4, 5])


@pytest.mark.unit
def test_forms_of_m_curve(c4):
    """An M-curve has thirty-two real forms, none quaternionic."""
    forms = enumerate_real_forms(build_pencil(c4))
    assert len(forms) == 32
    assert all(f.epsilon[0] == 1 and not f.quaternionic for f in forms)


@pytest.mark.unit
def test_forms_without_real_roots(c1):
    """A rootless curve has eight real forms, half of them quaternionic."""
    forms = enumerate_real_forms(build_pencil(c1))
    assert len(forms) == 8
    assert sum(f.quaternionic for f in forms) == 4
    assert all(f.preserves_pencil() for f in forms)
    identity = next(f for f in forms if f.label == "++++++")
    assert not identity.quaternionic


@pytest.mark.unit
def test_definite_form_has_no_real_points(c4, rng):
    """A definite form has no real points."""
    plus = RealForm(build_pencil(c4), (1,) * 6)
    with pytest.raises(NoRealPointsFound):
        sample_real_points(plus, 5, rng)


@pytest.mark.unit
def test_quaternionic_form_has_no_real_points(c1, rng):
    """Quaternionic forms have no real points."""
    form = next(f for f in enumerate_real_forms(build_pencil(c1)) if f.quaternionic)
    with pytest.raises(NoRealPointsFound):
        sample_real_points(form, 5, rng)


@pytest.mark.unit
@pytest.mark.parametrize("name", ["c1", "c2", "c3", "c4"])
def test_sampled_points_lie_on_both_quadrics(fixtures, name, rng):
    """Sampled points satisfy both quadrics."""
    pencil = build_pencil(fixtures[name])
    form, points = _first_sampling_form(pencil, rng)
    assert points
    for point in points:
        assert point.residual <= 1e-9
        assert smoothness_check(form, point.u).rank == 2
        x = form.embed(point.u)
        q0, q1 = pencil.evaluate(x)
        scale = float(np.sum(np.abs(x) ** 2)) * max(1.0, float(np.max(np.abs(pencil.q1))))
        assert abs(q0) <= 1e-8 * scale
        assert abs(q1) <= 1e-8 * scale
        image = form.apply(x)
        assert np.allclose(image, x, atol=1e-12 * np.linalg.norm(x))


@pytest.mark.unit
def test_gradient_matches_finite_differences(c4, rng):
    """The analytic gradient matches finite differences."""
    form = RealForm(build_pencil(c4), (1, -1, 1, -1, 1, -1))
    s0, s1 = form.real_quadrics()
    for _ in range(10):
        u = rng.standard_normal(6)
        for s in (s0, s1):
            assert np.allclose(quadric_gradient(s, u), finite_difference_gradient(s, u), atol=1e-6)


@pytest.mark.unit
def test_singular_point_detected(c4):
    """A point with dependent gradients is flagged."""
    form = RealForm(build_pencil(c4), (1, -1, 1, -1, 1, -1))
    with pytest.raises(SingularPoint):
        smoothness_check(form, np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]))


@pytest.mark.unit
def test_connectivity_of_clusters():
    """Separated clusters count as separate components."""
    rng = np.random.default_rng(0)
    center_a = np.array([1.0, 0, 0, 0, 0, 0])
    center_b = np.array([0, 0, 0, 0, 0, 1.0])
    cluster = [c + 1e-3 * rng.standard_normal(6) for c in (center_a, center_b) for _ in range(30)]
    assert connectivity_estimate(cluster, factor=2.0) == 2
    assert connectivity_estimate(cluster[:30], factor=2.0) == 1
    assert connectivity_estimate([]) == 0


# Forms of the M-curve pencil whose real locus splits into two pieces
# separated by a gap far wider than the sampling density.
TWO_COMPONENT_FORMS = ("++++-+", "+++-+-", "+-++++")


@pytest.mark.slow
@pytest.mark.parametrize("name", ["c1", "c2", "c3", "c4"])
def test_survey_forms_at_full_density(fixtures, name):
    """500 points per form: clean residuals, smooth points, stable component counts."""
    rows = survey_forms(build_pencil(fixtures[name]), 500, np.random.default_rng(1), threads=4)
    nonempty = {row["epsilon"]: row for row in rows if row["points_found"]}
    assert nonempty
    for row in nonempty.values():
        assert row["points_found"] == 500
        assert row["residual_max"] <= 1e-9
        assert row["rank2"]
    if name == "c4":
        for label in TWO_COMPONENT_FORMS:
            assert nonempty[label]["components_estimate"] == 2
        assert all(row["components_estimate"] in (1, 2) for row in nonempty.values())
    else:
        assert all(row["components_estimate"] == 1 for row in nonempty.values())
