import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gyp.measures import NotNormalized, beta
from gyp.partitions import InvalidPartition
from gyp.serialize import (
    SchemaError,
    dumps,
    load_measure,
    measure_from_dict,
    measure_to_dict,
    partition_from_dict,
    partition_to_dict,
)

json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10**6, 10**6) | st.text(max_size=8)
    | st.floats(allow_nan=False),
    lambda kids: st.lists(kids, max_size=4) | st.dictionaries(st.text(max_size=5), kids, max_size=4),
    max_leaves=20)


@given(json_values)
def test_canonical_json_round_trips(value):
    text = dumps(value)
    assert dumps(json.loads(text)) == text


def test_infinity_is_a_string():
    assert dumps({"value": math.inf}) == '{"value":"inf"}'
    assert dumps({"order": 2.0, "v": 0.1}) == '{"order":2.0,"v":0.10000000000000001}'


def test_measure_schemas(fixture_path):
    d = load_measure(fixture_path("coin_fair.json"))
    assert d.as_dict() == {"a": 0.5, "b": 0.5}
    b = load_measure(fixture_path("beta22.json"))
    assert b.cdf(0.5) == pytest.approx(0.5, abs=1e-15)
    named = load_measure(fixture_path("beta23.json"))
    assert named.cdf(0.4) == pytest.approx(beta(2, 3).cdf(0.4), abs=1e-15)
    with pytest.raises(NotNormalized):
        load_measure(fixture_path("coin_corrupted.json"))


def test_measure_dict_round_trip():
    m = beta(3, 2)
    again = measure_from_dict(json.loads(dumps(measure_to_dict(m))))
    assert again.cdf(0.37) == pytest.approx(m.cdf(0.37), abs=1e-15)


@pytest.mark.parametrize("bad", [
    {}, {"kind": "cauchy"}, {"kind": "discrete", "atoms": []},
    {"kind": "named", "name": "gamma"}, {"kind": "named", "name": "beta", "params": [2]},
    {"kind": "density", "pieces": [{"interval": [1.0, 0.0], "coeffs": [1.0]}]},
])
def test_malformed_specs(bad):
    with pytest.raises(SchemaError):
        measure_from_dict(bad)


def test_partition_schemas():
    P = measure_from_dict({"kind": "named", "name": "uniform"})
    pi = partition_from_dict({"breakpoints": [0.25, 0.75]}, P, P)
    assert pi.breakpoints() == [0.25, 0.75]
    assert partition_to_dict(pi) == {"cells": [[[0.0, 0.25]], [[0.25, 0.75]], [[0.75, 1.0]]]}
    D = measure_from_dict({"kind": "discrete", "atoms": [{"label": "a", "mass": 1.0}]})
    assert partition_to_dict(partition_from_dict({"groups": [["a"]]}, D, D)) == {"groups": [["a"]]}
    with pytest.raises(InvalidPartition):
        partition_from_dict({"groups": [["a"]]}, P, P)
    with pytest.raises(InvalidPartition):
        partition_from_dict({"breakpoints": [2.0]}, P, P)
