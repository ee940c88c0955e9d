import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gyp import fixtures as fx
from gyp.divergences import (
    DomainError,
    NonPositiveArgument,
    OrderError,
    OrderParam,
    divergence,
    entropy,
    entropy_divergence_identity_check,
    kl_divergence,
    q_log,
    renyi_divergence,
    renyi_entropy,
    renyi_to_tsallis,
    shannon_entropy,
    tsallis_divergence,
    tsallis_entropy,
    tsallis_entropy_qlog,
    tsallis_to_renyi,
)
from gyp.extended import INF
from gyp.measures import beta, discrete, uniform
from gyp.quadrature import QuadratureConfig

COIN = discrete([0.5, 0.5], ["a", "b"])
SKEW = discrete([0.25, 0.75], ["a", "b"])
UNIFORM4 = discrete([0.25] * 4)
SIMPSON = QuadratureConfig(method="adaptive-simpson")


# closed-form oracles


def test_shannon_entropy_examples():
    assert shannon_entropy(UNIFORM4) == pytest.approx(math.log(4), abs=1e-15)
    assert shannon_entropy(uniform(0.0, 0.5)) == pytest.approx(-math.log(2), abs=1e-15)
    assert shannon_entropy(beta(2, 2)) == pytest.approx(5 / 3 - math.log(6), abs=1e-12)


def test_kl_examples():
    assert kl_divergence(COIN, SKEW) == pytest.approx(0.5 * math.log(4 / 3), abs=1e-15)
    assert kl_divergence(beta(2, 3), beta(2, 3)) == 0.0
    assert kl_divergence(uniform(0.0, 2.0), uniform()) == INF
    assert kl_divergence(beta(2, 2), uniform()) == pytest.approx(math.log(6) - 5 / 3, abs=1e-12)


def test_kl_forms_agree():
    for fp in fx.all_pairs():
        a = kl_divergence(fp.P, fp.R, form="dP")
        b = kl_divergence(fp.P, fp.R, form="dR")
        assert a == pytest.approx(b, abs=1e-10), fp.name


def test_renyi_entropy_examples():
    assert renyi_entropy(UNIFORM4, 2.0) == pytest.approx(math.log(4), abs=1e-15)
    assert renyi_entropy(uniform(0.0, 0.5), 2.0) == pytest.approx(-math.log(2), abs=1e-15)
    assert renyi_entropy(beta(2, 2), 2.0) == pytest.approx(-math.log(1.2), abs=1e-14)


def test_renyi_divergence_examples():
    assert renyi_divergence(COIN, SKEW, 2.0) == pytest.approx(math.log(4 / 3), abs=1e-15)
    for alpha in (1.5, 2.0, 3.0, 5.0):
        assert renyi_divergence(uniform(0.0, 0.5), uniform(), alpha) == pytest.approx(math.log(2), abs=1e-14)
    assert renyi_divergence(beta(2, 2), uniform(), 2.0) == pytest.approx(math.log(1.2), abs=1e-14)
    assert renyi_divergence(beta(2, 2), uniform(), 3.0) == pytest.approx(0.5 * math.log(216 / 140), abs=1e-14)
    assert renyi_divergence(uniform(0.0, 2.0), uniform(), 2.0) == INF


def test_fractional_order_uses_quadrature():
    # int (6x(1-x))^1.5 dx = 6^1.5 B(2.5, 2.5)
    b = math.gamma(2.5) ** 2 / math.gamma(5.0)
    exact = 2.0 * math.log(6 ** 1.5 * b)
    assert renyi_divergence(beta(2, 2), uniform(), 1.5) == pytest.approx(exact, abs=1e-9)


def test_tsallis_examples():
    assert tsallis_entropy(UNIFORM4, 2.0) == pytest.approx(0.75, abs=1e-15)
    assert tsallis_entropy(discrete([1.0, 0.0]), 2.0) == 0.0
    assert tsallis_entropy(uniform(0.0, 0.5), 2.0) == pytest.approx(-1.0, abs=1e-15)
    assert tsallis_divergence(COIN, SKEW, 2.0) == pytest.approx(1 / 3, abs=1e-15)
    assert tsallis_divergence(beta(2, 2), beta(2, 2), 2.0) == pytest.approx(0.0, abs=1e-14)
    assert tsallis_divergence(uniform(0.0, 0.5), uniform(), 2.0) == pytest.approx(1.0, abs=1e-15)


def test_tsallis_entropy_qlog_form():
    for P in (UNIFORM4, beta(2, 3), uniform(0.0, 0.5)):
        for q in (1.5, 2.0, 3.0):
            assert tsallis_entropy(P, q) == pytest.approx(tsallis_entropy_qlog(P, q), abs=1e-10)


def test_q_log():
    assert q_log(1.0, 3.0) == 0.0
    assert q_log(2.5, 1.0) == math.log(2.5)
    assert q_log(2.0, 2.0) == 0.5
    with pytest.raises(NonPositiveArgument):
        q_log(0.0, 2.0)


def test_transform_examples():
    assert renyi_to_tsallis(math.log(4 / 3), 2.0) == pytest.approx(1 / 3, abs=1e-15)
    assert renyi_to_tsallis(0.0, 1.7) == 0.0
    assert tsallis_to_renyi(1.0, 2.0) == pytest.approx(math.log(2), abs=1e-15)
    assert renyi_to_tsallis(INF, 2.0) == INF
    with pytest.raises(DomainError):
        tsallis_to_renyi(-2.0, 2.0)


def test_order_validation():
    for bad in (1.0, 0.0, -1.0, math.inf):
        with pytest.raises(OrderError):
            OrderParam.renyi(bad)
    with pytest.raises(OrderError):
        OrderParam("shannon", 2.0)
    with pytest.raises(OrderError):
        OrderParam("tsallis")
    assert OrderParam.kl().order is None


def test_simpson_matches_exact_paths():
    for fp in fx.continuous_pairs():
        for o in (OrderParam.kl(), OrderParam.renyi(2.0), OrderParam.tsallis(3.0)):
            exact = divergence(fp.P, fp.R, o)
            assert divergence(fp.P, fp.R, o, SIMPSON) == pytest.approx(exact, abs=1e-9), (fp.name, o)


def test_identity_examples():
    P, mu = discrete([0.5, 0.5]), discrete([0.5, 0.5])
    assert entropy_divergence_identity_check(P, mu, OrderParam.kl()) == 0.0
    P = discrete([0.75, 0.25])
    assert entropy_divergence_identity_check(P, mu, OrderParam.renyi(2.0)) <= 1e-12
    assert entropy_divergence_identity_check(beta(2, 2), uniform(), OrderParam.tsallis(2.0)) <= 1e-8


def test_relative_entropy_has_opposite_sign():
    # S_2(P) against mu=(1/2,1/2) by direct summation: -ln sum p (p/mu) = -ln 1.25
    P, mu = discrete([0.75, 0.25]), discrete([0.5, 0.5])
    s = entropy(P, OrderParam.renyi(2.0), base=mu)
    assert s == pytest.approx(-math.log(1.25), abs=1e-15)
    assert renyi_divergence(P, mu, 2.0) == pytest.approx(math.log(1.25), abs=1e-15)


# properties


pmf = st.lists(st.floats(1e-3, 1.0), min_size=2, max_size=12).map(lambda w: list(np.array(w) / sum(w)))


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_divergences_nonnegative(data):
    p = data.draw(pmf)
    r = data.draw(st.lists(st.floats(1e-3, 1.0), min_size=len(p), max_size=len(p)))
    r = list(np.array(r) / sum(r))
    P, R = discrete(p), discrete(r)
    assert kl_divergence(P, R) >= -1e-12
    assert kl_divergence(P, P) <= 1e-12
    q = data.draw(st.sampled_from([1.5, 2.0, 3.0]))
    assert renyi_divergence(P, R, q) >= -1e-12
    assert tsallis_divergence(P, R, q) == pytest.approx(renyi_to_tsallis(renyi_divergence(P, R, q), q), abs=1e-10)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, 10.0), st.floats(1.01, 6.0))
def test_transform_round_trip(v, q):
    assert tsallis_to_renyi(renyi_to_tsallis(v, q), q) == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_renyi_tends_to_kl():
    for fp in fx.random_discrete_pairs(count=50):
        kl = kl_divergence(fp.P, fp.R)
        assert abs(renyi_divergence(fp.P, fp.R, 1.001) - kl) <= 10 * 1e-3
