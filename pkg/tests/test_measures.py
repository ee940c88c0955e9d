import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gyp import fixtures as fx
from gyp.divergences import power_integral
from gyp.measures import (
    Cell,
    MismatchedReference,
    NegativeDensity,
    NotAbsolutelyContinuous,
    NotNormalized,
    beta,
    cell_mass,
    check_absolute_continuity,
    density,
    discrete,
    rn_derivative,
    truncated_normal,
    uniform,
    validate_measure,
)


def test_uniform_pmf_accepted():
    m = validate_measure(discrete([0.25] * 4))
    assert m.total_mass() == 1.0


def test_short_pmf_rejected_with_actual_mass():
    with pytest.raises(NotNormalized) as info:
        validate_measure(discrete([1 / 2, 1 / 3]))
    assert info.value.actual_mass == pytest.approx(5 / 6, abs=1e-15)


def test_negative_mass_and_density_rejected():
    with pytest.raises(NegativeDensity):
        validate_measure(discrete([1.5, -0.5]))
    with pytest.raises(NegativeDensity):
        validate_measure(density([(0.0, 1.0, [-1.0, 4.0])]))


def test_parabola_density_accepted():
    m = validate_measure(density([(0.0, 1.0, [0.0, 6.0, -6.0])]))
    assert m.total_mass() == pytest.approx(1.0, abs=1e-15)


def test_cell_mass_examples():
    assert cell_mass(uniform(), Cell.interval(0.0, 0.5)) == 0.5
    assert cell_mass(beta(2, 2), Cell.interval(0.25, 0.75)) == pytest.approx(11 / 16, abs=1e-15)
    assert cell_mass(discrete([0.5, 0.5], ["a", "b"]), Cell.of_atoms(["a"])) == 0.5


def test_cell_mass_outside_support_is_zero():
    assert cell_mass(uniform(0.0, 0.5), Cell.interval(0.5, 1.0)) == 0.0


def test_truncated_normal_matches_gaussian():
    t = truncated_normal(0.5, 0.2, 0.0, 1.0)
    z = 0.2 * math.sqrt(2 * math.pi) * math.erf(2.5 / math.sqrt(2))
    for x in np.linspace(0.0, 1.0, 101):
        assert t.pdf(x) == pytest.approx(math.exp(-0.5 * ((x - 0.5) / 0.2) ** 2) / z, rel=1e-12)


def test_rn_derivative_examples():
    phi = rn_derivative(uniform(0.0, 0.5), uniform())
    assert phi(0.25) == 2.0
    assert phi(0.75) == 0.0
    one = rn_derivative(beta(2, 2), beta(2, 2))
    assert one(0.3) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(NotAbsolutelyContinuous) as info:
        rn_derivative(uniform(0.0, 2.0), uniform())
    assert info.value.witness.intervals == ((1.0, 2.0),)


def test_absolute_continuity_examples():
    P = discrete([0.5, 0.5, 0.0], ["a", "b", "c"])
    R = discrete([1 / 3, 1 / 3, 1 / 3], ["a", "b", "c"])
    assert check_absolute_continuity(P, R) is None
    P = discrete([0.5, 0.25, 0.25], ["a", "b", "c"])
    R = discrete([0.5, 0.5, 0.0], ["a", "b", "c"])
    assert check_absolute_continuity(P, R) == Cell.of_atoms(["c"])
    assert check_absolute_continuity(beta(2, 2), uniform()) is None


def test_mixed_references_rejected():
    with pytest.raises(MismatchedReference):
        check_absolute_continuity(discrete([1.0]), uniform())


def test_rn_derivative_integrates_back_to_p():
    rng = np.random.default_rng(7)
    pairs = fx.continuous_pairs()
    worst = 0.0
    for t in range(1000):
        fp = pairs[t % len(pairs)]
        cell = fx.random_cell(rng, fp.P, fp.R)
        worst = max(worst, abs(power_integral(fp.P, fp.R, 1.0, cell=cell) - cell_mass(fp.P, cell)))
    assert worst <= 1e-9


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_finite_additivity(a, b, c):
    x0, x1, x2 = sorted((a, b, c))
    for m in (beta(2, 3), density([(0.0, 0.5, [0.0, 4.0]), (0.5, 1.0, [4.0, -4.0])])):
        whole = cell_mass(m, Cell.interval(x0, x2))
        parts = cell_mass(m, Cell.interval(x0, x1)) + cell_mass(m, Cell.interval(x1, x2))
        assert whole == pytest.approx(parts, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=8), st.data())
def test_discrete_additivity(weights, data):
    w = np.array(weights) / sum(weights)
    m = discrete(w)
    split = data.draw(st.integers(1, len(w) - 1))
    left = Cell.of_atoms(m.labels[:split])
    right = Cell.of_atoms(m.labels[split:])
    assert cell_mass(m, left) + cell_mass(m, right) == pytest.approx(1.0, abs=1e-12)
