import math

import numpy as np
import pytest

from gyp.measures import Cell, beta, discrete, rn_derivative, uniform
from gyp.simple_approx import (
    dyadic_level,
    induced_measure,
    quantize_rn_derivative,
    simple_divergence,
    simple_divergence_mass_form,
)

B22, U = beta(2, 2), uniform()


def _upper_mass(t):
    """R-mass of {6x(1-x) >= t} under the uniform reference."""
    return math.sqrt(max(1.0 - 2.0 * t / 3.0, 0.0))


def _beta_oracle(n, alpha=2.0):
    """Level-set sum for 6x(1-x), with level sets solved from the quadratic."""
    step = 2.0 ** -n
    top = int(1.5 / step)
    total = math.fsum((k * step) ** alpha * (_upper_mass(k * step) - _upper_mass((k + 1) * step))
                      for k in range(1, top + 1))
    return math.log(total) / (alpha - 1.0)


def test_dyadic_level():
    assert dyadic_level(0.3, 1) == 0.0
    assert dyadic_level(0.6, 1) == 0.5
    assert dyadic_level(0.6, 3) == 0.5
    assert dyadic_level(0.7, 3) == 0.625
    assert dyadic_level(7.0, 3) == 3.0


def test_simple_phi_is_recovered():
    s = quantize_rn_derivative(rn_derivative(uniform(0.0, 0.5), U), 2)
    assert s.levels == (0.0, 2.0)
    assert [c.intervals for c in s.cells.cells] == [((0.5, 1.0),), ((0.0, 0.5),)]
    assert simple_divergence(s, U, 2.0) == pytest.approx(math.log(2), abs=1e-15)
    pn = induced_measure(s, U)
    assert pn.total_mass() == pytest.approx(1.0, abs=1e-15)
    assert pn.mass(Cell.interval(0.1, 0.3)) == pytest.approx(0.4, abs=1e-15)


def test_identity_phi():
    for n in (1, 4, 9):
        s = quantize_rn_derivative(rn_derivative(B22, B22), n)
        assert s.levels == (1.0,)
        assert simple_divergence(s, B22, 2.0) == pytest.approx(0.0, abs=1e-14)
        pn = induced_measure(s, B22)
        assert pn.mass(Cell.interval(0.2, 0.7)) == pytest.approx(B22.cdf(0.7) - B22.cdf(0.2), abs=1e-14)


def test_parabola_first_level():
    s = quantize_rn_derivative(rn_derivative(B22, U), 1)
    assert s.levels == (0.0, 0.5, 1.0)
    x_half = (1 - math.sqrt(1 - 1 / 3)) / 2
    x_one = (1 - math.sqrt(1 - 2 / 3)) / 2
    zero, half, one = s.cells.cells
    assert np.ravel(zero.intervals) == pytest.approx(np.ravel(((0.0, x_half), (1 - x_half, 1.0))), abs=1e-12)
    assert np.ravel(half.intervals) == pytest.approx(np.ravel(((x_half, x_one), (1 - x_one, 1 - x_half))), abs=1e-12)
    assert np.ravel(one.intervals) == pytest.approx(np.ravel(((x_one, 1 - x_one),)), abs=1e-12)
    mass = 0.5 * 2 * (x_one - x_half) + 1.0 * (1 - 2 * x_one)
    assert induced_measure(s, U).total_mass() == pytest.approx(mass, abs=1e-12)
    assert mass < 1


@pytest.mark.parametrize("n", [1, 2, 3, 6, 12])
def test_divergence_of_quantized_parabola(n):
    s = quantize_rn_derivative(rn_derivative(B22, U), n)
    assert simple_divergence(s, U, 2.0) == pytest.approx(_beta_oracle(n), abs=1e-11)
    assert simple_divergence(s, U, 2.0) <= math.log(1.2)


def test_level_and_mass_forms_agree():
    for P, R in ((B22, U), (beta(2, 3), beta(2, 2)), (beta(3, 3), U)):
        phi = rn_derivative(P, R)
        for n in (2, 5, 8):
            s = quantize_rn_derivative(phi, n)
            for alpha in (1.5, 2.0, 3.0):
                assert simple_divergence(s, R, alpha) == pytest.approx(
                    simple_divergence_mass_form(s, R, alpha), abs=1e-12)


def test_pointwise_monotone():
    phi = rn_derivative(beta(2, 3), U)
    xs = np.linspace(0.0, 1.0, 10_000, endpoint=False)
    truth = np.array([phi(x) for x in xs])
    prev = np.zeros_like(xs)
    for n in range(1, 9):
        vals = quantize_rn_derivative(phi, n).evaluate(xs)
        assert np.all(prev <= vals)
        assert np.all(vals <= truth)
        prev = vals


def test_induced_measure_converges():
    phi = rn_derivative(B22, U)
    cell = Cell.interval(0.3, 0.45)
    exact = B22.cdf(0.45) - B22.cdf(0.3)
    errs = [abs(induced_measure(quantize_rn_derivative(phi, n), U).mass(cell) - exact) for n in (4, 8, 16)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-5


def test_discrete_quantization():
    P, R = discrete([0.5, 0.5], "ab"), discrete([0.25, 0.75], "ab")
    s = quantize_rn_derivative(rn_derivative(P, R), 3)
    assert s.atom_levels == {"a": 2.0, "b": 0.625}
    assert simple_divergence(s, R, 2.0) == pytest.approx(math.log(4 * 0.25 + 0.625 ** 2 * 0.75), abs=1e-15)


def test_order_checks():
    s = quantize_rn_derivative(rn_derivative(B22, U), 2)
    with pytest.raises(ValueError):
        simple_divergence(s, U, 1.0)
    with pytest.raises(ValueError):
        quantize_rn_derivative(rn_derivative(B22, U), 0)
