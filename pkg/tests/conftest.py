"""
Pytest configuration and fixtures.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import numpy as np
import pytest

from config import CURVES_DIR, use_settings
from real_subbundle_lab.curve import RealHyperellipticCurve, load_curve


@pytest.fixture(autouse=True)
def reset_settings(monkeypatch):
    """Each test starts from default settings, untouched by the environment."""
    monkeypatch.delenv("REAL_SUBBUNDLE_LAB_THREADS", raising=False)
    use_settings(None)
    yield
    use_settings(None)


@pytest.fixture(scope="session")
def curves_dir():
    return CURVES_DIR


@pytest.fixture(scope="session")
def c1() -> RealHyperellipticCurve:
    """(x^2+1)(x^2+2)(x^2+3): no real roots, one fixed circle."""
    return load_curve(CURVES_DIR / "c1.json")


@pytest.fixture(scope="session")
def c2() -> RealHyperellipticCurve:
    """(x^2-1)(x^2+1)(x^2+4): type (1,1)."""
    return load_curve(CURVES_DIR / "c2.json")


@pytest.fixture(scope="session")
def c3() -> RealHyperellipticCurve:
    """(x^2-1)(x^2-2)(x^2+1): type (2,1)."""
    return load_curve(CURVES_DIR / "c3.json")


@pytest.fixture(scope="session")
def c4() -> RealHyperellipticCurve:
    """(x^2-1)(x^2-4)(x^2-9): type (3,0), M-curve."""
    return load_curve(CURVES_DIR / "c4.json")


@pytest.fixture(scope="session")
def fixtures(c1, c2, c3, c4):
    return {"c1": c1, "c2": c2, "c3": c3, "c4": c4}


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240617)
