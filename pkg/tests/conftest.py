"""Shared fixtures: the worked priors used across the suites."""

from pathlib import Path

import pytest

from dsmbcr.belief import Bba
from dsmbcr.formula import parse_formula, read_bba
from dsmbcr.frame import Frame, Model

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def free3() -> Model:
    return Model.free(Frame(("A", "B", "C")))


@pytest.fixture
def shafer3() -> Model:
    return Model.shafer(Frame(("A", "B", "C")))


@pytest.fixture
def example1() -> Bba:
    """Non-Bayesian prior on the free model, with mass on A & B and A | (B & C)."""
    return read_bba(FIXTURES / "example1_free.bba")


@pytest.fixture
def example2() -> Bba:
    return read_bba(FIXTURES / "example2_shafer.bba")


@pytest.fixture
def example3() -> Bba:
    return read_bba(FIXTURES / "example3_bayesian.bba")


@pytest.fixture
def commute1() -> tuple[Bba, Bba]:
    return read_bba(FIXTURES / "commute1_m1.bba"), read_bba(FIXTURES / "commute1_m2.bba")


@pytest.fixture
def commute2() -> tuple[Bba, Bba]:
    return read_bba(FIXTURES / "commute2_m1.bba"), read_bba(FIXTURES / "commute2_m2.bba")


@pytest.fixture
def check_masses():
    """Assert a bba equals {formula: mass}, parsing the formulas under its model."""

    def check(bba: Bba, expected: dict[str, float], tol: float = 1e-9) -> None:
        wanted = {parse_formula(bba.model, formula): mass for formula, mass in expected.items()}
        assert set(bba) <= set(wanted), f"unexpected focal elements in {bba!r}"
        for element, mass in wanted.items():
            assert bba.mass_of(element) == pytest.approx(mass, abs=tol), element

    return check
