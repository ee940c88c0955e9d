"""JSON loading of measures and partitions, and canonical JSON output."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .extended import format_ext, parse_ext
from .measures import (
    DEFAULT_TOLERANCE,
    DensityMeasure,
    DiscreteMeasure,
    beta,
    density,
    discrete,
    truncated_normal,
    uniform,
    validate_measure,
)
from .partitions import InvalidPartition, Partition


class SchemaError(ValueError):
    """Malformed measure or partition JSON."""


# ---------------------------------------------------------------------------
# canonical output


def _encode(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if math.isfinite(obj):
            return format_ext(obj)
        return json.dumps(format_ext(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    """Compact JSON, keys in insertion order, floats with 17 significant digits.

    Infinities become the strings ``"inf"`` / ``"-inf"``. Output re-parsed
    with :func:`json.loads` re-serializes to the same bytes.
    """
    return _encode(obj)


def ext_value(x) -> float:
    """Read a JSON number or ``"inf"``-style string back as a float."""
    return parse_ext(x)


# ---------------------------------------------------------------------------
# measures


def _interval(v) -> tuple[float, float]:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise SchemaError(f"interval must be a pair, got {v!r}")
    a, b = float(v[0]), float(v[1])
    if not b > a:
        raise SchemaError(f"empty interval [{a}, {b}]")
    return a, b


def measure_from_dict(d: dict):
    if not isinstance(d, dict) or "kind" not in d:
        raise SchemaError("measure JSON needs a 'kind'")
    tol = float(d.get("tolerance", DEFAULT_TOLERANCE))
    kind = d["kind"]
    if kind == "discrete":
        atoms = d.get("atoms")
        if not atoms:
            raise SchemaError("discrete measure needs non-empty 'atoms'")
        labels = [str(a["label"]) for a in atoms]
        if len(set(labels)) != len(labels):
            raise SchemaError("duplicate atom labels")
        m = discrete([float(a["mass"]) for a in atoms], labels, tol)
    elif kind == "density":
        pieces = [(*_interval(p["interval"]), [float(c) for c in p["coeffs"]]) for p in d.get("pieces", [])]
        if not pieces:
            raise SchemaError("density needs at least one piece")
        support = [_interval(iv) for iv in d["support"]] if "support" in d else None
        m = density(pieces, support, tol)
    elif kind == "named":
        name = d.get("name")
        params = list(d.get("params", []))
        support = d.get("support", [[0.0, 1.0]])
        if len(support) != 1:
            raise SchemaError("named measures live on a single interval")
        lo, hi = _interval(support[0])
        if name == "uniform":
            m = uniform(lo, hi, tol)
        elif name == "beta":
            if len(params) != 2:
                raise SchemaError("beta needs two shape parameters")
            m = beta(params[0], params[1], lo, hi, tol)
        elif name == "truncnorm":
            if len(params) != 2:
                raise SchemaError("truncnorm needs [mu, sigma]")
            m = truncated_normal(float(params[0]), float(params[1]), lo, hi, tolerance=tol)
        else:
            raise SchemaError(f"unknown named measure {name!r}")
    else:
        raise SchemaError(f"unknown measure kind {kind!r}")
    return validate_measure(m)


def measure_to_dict(m) -> dict:
    if isinstance(m, DiscreteMeasure):
        return {"kind": "discrete",
                "atoms": [{"label": x, "mass": w} for x, w in zip(m.labels, m.masses)]}
    if isinstance(m, DensityMeasure):
        return {"kind": "density",
                "support": [list(iv) for iv in m.support],
                "pieces": [{"interval": [pc.a, pc.b],
                            "coeffs": [float(c) for c in pc.poly.convert().coef]}
                           for pc in m.pieces]}
    raise TypeError(f"not a measure: {m!r}")


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise SchemaError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None


def load_measure(path):
    try:
        return measure_from_dict(load_json(path))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"{path}: malformed measure JSON ({exc})") from None


# ---------------------------------------------------------------------------
# partitions


def partition_from_dict(d: dict, P, R) -> Partition:
    """``{"breakpoints": [...]}`` over the pair's hull, or ``{"groups": [[...], ...]}``."""
    discrete_pair = isinstance(P, DiscreteMeasure)
    if "groups" in d:
        if not discrete_pair:
            raise InvalidPartition("atom groups given for a continuous pair")
        return Partition.from_groups(d["groups"])
    if "breakpoints" in d:
        if discrete_pair:
            raise InvalidPartition("breakpoints given for a discrete pair")
        lo = min(P.lo, R.lo)
        hi = max(P.hi, R.hi)
        return Partition.from_breakpoints(lo, hi, [float(x) for x in d["breakpoints"]])
    raise SchemaError("partition JSON needs 'breakpoints' or 'groups'")


def partition_to_dict(pi: Partition) -> dict:
    if pi.is_discrete:
        return {"groups": [sorted(c.atoms) for c in pi.ordered().cells]}
    return {"cells": [[list(iv) for iv in c.intervals] for c in pi.ordered().cells]}

