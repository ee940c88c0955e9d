"""Seeded property suites behind ``gyp verify``.

Each suite draws its trials from a ``numpy`` generator seeded with the
requested seed (plus a fixed per-suite offset), so reports are reproducible
and independent of which other suites ran.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import fixtures as fx
from .divergences import (
    OrderParam,
    divergence,
    entropy,
    kl_divergence,
    renyi_divergence,
    renyi_to_tsallis,
    tsallis_divergence,
    tsallis_to_renyi,
)
from .engine import supremum_estimate
from .extended import INF
from .measures import DiscreteMeasure, cell_mass, check_absolute_continuity, rn_derivative
from .partitions import (
    Partition,
    PartitionStats,
    holder_cell_check,
    partition_stats,
    partition_value,
    split_cell,
    trivial_partition,
)
from .quadrature import DEFAULT, QuadratureConfig
from .serialize import measure_to_dict, partition_to_dict
from .simple_approx import quantize_rn_derivative, simple_divergence

ALPHAS = (1.5, 2.0, 3.0)
SUITES = ("holder", "lower-bound", "monotonicity", "transform", "order-monotonicity",
          "quantization", "identity", "limits", "nonac", "discrete")


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    max_violation: float = -INF
    tolerance: float = 0.0
    counterexample: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.counterexample is None

    def observe(self, violation: float, details) -> None:
        """Record one trial; ``details`` is a dict or a thunk building one."""
        self.trials += 1
        if math.isnan(violation):
            violation = INF
        self.max_violation = max(self.max_violation, violation)
        if violation > self.tolerance and self.counterexample is None:
            self.counterexample = details() if callable(details) else details

    def report(self) -> dict:
        out = {"name": self.name, "passed": self.passed, "trials": self.trials,
               "max_violation": self.max_violation, "tolerance": self.tolerance}
        out.update(self.extra)
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def _rng(seed: int, suite: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(suite.encode())])


def _pair_dict(fp) -> dict:
    return {"pair": fp.name, "P": measure_to_dict(fp.P), "R": measure_to_dict(fp.R)}


def _cell_dict(c) -> dict:
    if c.is_discrete:
        return {"atoms": sorted(c.atoms)}
    return {"intervals": [list(iv) for iv in c.intervals]}


def _random_partition(rng, P, R) -> Partition:
    if isinstance(P, DiscreteMeasure):
        return Partition.from_groups(fx.random_groups(rng, sorted(set(P.labels) | set(R.labels))))
    lo, hi = min(P.lo, R.lo), max(P.hi, R.hi)
    return Partition.from_breakpoints(lo, hi, fx.random_breakpoints(rng, lo, hi))


# ---------------------------------------------------------------------------
# suites


def suite_holder(pairs, seed: int, trials: int = 1000, cfg: QuadratureConfig = DEFAULT) -> SuiteResult:
    """Cell inequality ``P(E)^a / R(E)^(a-1) <= int_E phi^a dR`` on random cells."""
    res = SuiteResult("holder", tolerance=1e-9)
    rng = _rng(seed, res.name)
    for t in range(trials):
        fp = pairs[t % len(pairs)]
        cell = fx.random_cell(rng, fp.P, fp.R)
        for alpha in ALPHAS:
            lhs, rhs = holder_cell_check(fp.P, fp.R, cell, alpha, cfg)
            res.observe(lhs - rhs, lambda: {**_pair_dict(fp), "cell": _cell_dict(cell),
                                            "alpha": alpha, "lhs": lhs, "rhs": rhs})
    return res


def suite_lower_bound(pairs, seed: int, trials: int = 1000, cfg: QuadratureConfig = DEFAULT) -> SuiteResult:
    """Random partitions never exceed the integral divergence."""
    res = SuiteResult("lower-bound", tolerance=1e-9)
    rng = _rng(seed, res.name)
    orders = [OrderParam.kl()] + [OrderParam.renyi(a) for a in ALPHAS] + [OrderParam.tsallis(2.0)]
    for fp in pairs:
        oracles = [divergence(fp.P, fp.R, o, cfg) for o in orders]
        for _ in range(trials):
            pi = _random_partition(rng, fp.P, fp.R)
            stats = partition_stats(fp.P, fp.R, pi)
            for o, oracle in zip(orders, oracles):
                v = partition_value(stats, o)
                res.observe(v - oracle, lambda: {**_pair_dict(fp), "partition": partition_to_dict(pi),
                                                 "family": o.family, "order": o.order,
                                                 "partition_value": v, "oracle": oracle})
    res.trials //= len(orders)
    return res


def _random_split(rng, pi: Partition) -> Partition | None:
    k = int(rng.integers(pi.m))
    cell = pi.cells[k]
    if cell.is_discrete:
        if len(cell.atoms) < 2:
            return None
        atoms = sorted(cell.atoms)
        size = int(rng.integers(1, len(atoms)))
        return split_cell(pi, k, rng.choice(atoms, size=size, replace=False).tolist())
    a, b = cell.intervals[0]
    return split_cell(pi, k, float(rng.uniform(a, b)))


def suite_monotonicity(pairs, seed: int, chains: int = 500, length: int = 20) -> SuiteResult:
    """Partition functionals never decrease along random split chains."""
    res = SuiteResult("monotonicity", tolerance=1e-12)
    rng = _rng(seed, res.name)
    orders = [OrderParam.kl()] + [OrderParam.renyi(a) for a in ALPHAS]
    for c in range(chains):
        fp = pairs[c % len(pairs)]
        memo = {}

        def values(part):
            for cell in part.cells:
                if cell not in memo:
                    memo[cell] = (cell_mass(fp.P, cell), cell_mass(fp.R, cell))
            stats = PartitionStats(*zip(*(memo[cell] for cell in part.cells)))
            return [partition_value(stats, o) for o in orders]

        pi = trivial_partition(fp.P, fp.R)
        prev = values(pi)
        for _ in range(length):
            nxt = _random_split(rng, pi)
            if nxt is None:
                continue
            cur = values(nxt)
            drop = max(a - b for a, b in zip(prev, cur))
            res.observe(drop, lambda: {**_pair_dict(fp), "before": partition_to_dict(pi),
                                       "after": partition_to_dict(nxt), "values_before": prev,
                                       "values_after": cur})
            pi, prev = nxt, cur
    return res


def suite_transform(pairs, seed: int, trials: int = 1000, cfg: QuadratureConfig = DEFAULT) -> SuiteResult:
    """Tsallis against the transformed Renyi value, and the map's round trip."""
    res = SuiteResult("transform", tolerance=1e-10)
    rng = _rng(seed, res.name)
    for fp in pairs:
        for q in ALPHAS:
            ts = tsallis_divergence(fp.P, fp.R, q, cfg)
            via = renyi_to_tsallis(renyi_divergence(fp.P, fp.R, q, cfg), q)
            res.observe(abs(ts - via), {**_pair_dict(fp), "q": q, "tsallis": ts, "from_renyi": via})
    for _ in range(trials):
        q = float(rng.uniform(1.01, 5.0))
        v = float(rng.uniform(0.0, 3.0))
        back = tsallis_to_renyi(renyi_to_tsallis(v, q), q)
        res.observe(abs(back - v), {"q": q, "value": v, "round_trip": back})
    return res


def suite_order_monotonicity(pairs, seed: int, cfg: QuadratureConfig = DEFAULT) -> SuiteResult:
    """The Renyi divergence is nondecreasing in its order."""
    res = SuiteResult("order-monotonicity", tolerance=1e-12)
    alphas = np.round(np.arange(1.1, 3.0 + 1e-9, 0.1), 10)
    for fp in pairs:
        vals = [renyi_divergence(fp.P, fp.R, float(a), cfg) for a in alphas]
        for a0, a1, v0, v1 in zip(alphas, alphas[1:], vals, vals[1:]):
            res.observe(v0 - v1, {**_pair_dict(fp), "orders": [float(a0), float(a1)], "values": [v0, v1]})
    return res


def suite_quantization(pairs, seed: int, max_n: int = 12, monotone_n: int = 8,
                       grid: int = 10_000, cfg: QuadratureConfig = DEFAULT) -> SuiteResult:
    """Dyadic approximations increase pointwise and in divergence towards the oracle."""
    res = SuiteResult("quantization", tolerance=1e-12)
    for fp in pairs:
        if isinstance(fp.P, DiscreteMeasure) or check_absolute_continuity(fp.P, fp.R) is not None:
            continue
        phi = rn_derivative(fp.P, fp.R)
        lo, hi = min(fp.P.lo, fp.R.lo), max(fp.P.hi, fp.R.hi)
        xs = np.linspace(lo, hi, grid, endpoint=False)
        truth = np.array([phi(x) for x in xs])
        oracle = renyi_divergence(fp.P, fp.R, 2.0, cfg)
        prev_vals, prev_div = np.zeros_like(xs), -INF
        for n in range(1, max_n + 1):
            s = quantize_rn_derivative(phi, n)
            if n <= monotone_n:
                vals = s.evaluate(xs)
                worst = max(float(np.max(prev_vals - vals)), float(np.max(vals - truth)))
                res.observe(worst, {**_pair_dict(fp), "n": n, "check": "pointwise"})
                prev_vals = vals
            d = simple_divergence(s, fp.R, 2.0)
            res.observe(max(prev_div - d, d - oracle), {**_pair_dict(fp), "n": n, "check": "divergence",
                                                          "value": d, "previous": prev_div, "oracle": oracle})
            prev_div = d
        res.extra.setdefault("final_gaps", {})[fp.name] = oracle - prev_div
    return res


def suite_identity(pairs, seed: int, cfg: QuadratureConfig = DEFAULT) -> SuiteResult:
    """Entropy relative to a probability reference is minus the divergence, per family."""
    res = SuiteResult("identity", tolerance=1e-8)
    orders = [OrderParam.kl()] + [OrderParam.renyi(a) for a in ALPHAS] + [OrderParam.tsallis(q) for q in ALPHAS]
    for fp in pairs:
        if check_absolute_continuity(fp.P, fp.R) is not None:
            continue
        for o in orders:
            s = entropy(fp.P, o, cfg, base=fp.R)
            i = divergence(fp.P, fp.R, o, cfg)
            res.observe(abs(s + i), {**_pair_dict(fp), "family": o.family, "order": o.order,
                                     "entropy": s, "divergence": i})
    return res


def suite_limits(seed: int, h: float = 1e-3, bound: float = 10.0) -> SuiteResult:
    """``|I_(1+h) - KL| <= C h`` over the seeded discrete corpus."""
    res = SuiteResult("limits", tolerance=bound)
    for fp in fx.random_discrete_pairs(seed):
        kl = kl_divergence(fp.P, fp.R)
        near = renyi_divergence(fp.P, fp.R, 1.0 + h)
        res.observe(abs(near - kl) / h, {**_pair_dict(fp), "h": h, "kl": kl, "renyi": near})
    return res


def suite_nonac(seed: int) -> SuiteResult:
    """Non-absolutely-continuous pairs give +inf with a genuine witness."""
    res = SuiteResult("nonac", tolerance=0.0)
    for fp in [fx.non_ac_continuous()] + fx.random_non_ac_pairs(seed):
        w = check_absolute_continuity(fp.P, fp.R)
        bad = w is None or not cell_mass(fp.P, w) > 0 or cell_mass(fp.R, w) != 0
        for o in [OrderParam.kl()] + [OrderParam.renyi(a) for a in ALPHAS] + [OrderParam.tsallis(2.0)]:
            v = divergence(fp.P, fp.R, o)
            est = supremum_estimate(fp.P, fp.R, o)
            ok = not bad and v == INF and est.lower_bound == INF
            res.observe(0.0 if ok else 1.0, lambda: {**_pair_dict(fp), "family": o.family, "order": o.order,
                                                     "value": v, "witness": None if w is None else _cell_dict(w)})
    return res


def suite_discrete(seed: int) -> SuiteResult:
    """Refinement of discrete pairs reaches the direct sum at the singleton partition."""
    res = SuiteResult("discrete", tolerance=1e-12)
    orders = [OrderParam.kl()] + [OrderParam.renyi(a) for a in ALPHAS]
    for fp in fx.random_discrete_pairs(seed):
        for o in orders:
            est = supremum_estimate(fp.P, fp.R, o)
            direct = divergence(fp.P, fp.R, o)
            single = est.cells == len(set(fp.P.labels) | set(fp.R.labels))
            err = abs(est.lower_bound - direct) if single else INF
            res.observe(err, lambda: {**_pair_dict(fp), "family": o.family, "order": o.order,
                                      "lower_bound": est.lower_bound, "direct": direct, "cells": est.cells})
    return res


# ---------------------------------------------------------------------------


def run_suites(names, seed: int = fx.DEFAULT_SEED, pairs=None,
               cfg: QuadratureConfig = DEFAULT) -> dict:
    """Run the named suites; ``pairs`` replaces the fixture pairs where a suite uses them."""
    if pairs is None:
        pairs = fx.all_pairs()
    ac_pairs = [fp for fp in pairs if check_absolute_continuity(fp.P, fp.R) is None]
    table = {
        "holder": lambda: suite_holder(ac_pairs, seed, cfg=cfg),
        "lower-bound": lambda: suite_lower_bound(ac_pairs, seed, cfg=cfg),
        "monotonicity": lambda: suite_monotonicity(ac_pairs, seed),
        "transform": lambda: suite_transform(ac_pairs, seed, cfg=cfg),
        "order-monotonicity": lambda: suite_order_monotonicity(ac_pairs, seed, cfg=cfg),
        "quantization": lambda: suite_quantization(ac_pairs, seed, cfg=cfg),
        "identity": lambda: suite_identity(ac_pairs, seed, cfg=cfg),
        "limits": lambda: suite_limits(seed),
        "nonac": lambda: suite_nonac(seed),
        "discrete": lambda: suite_discrete(seed),
    }
    results = []
    for name in names:
        if name not in table:
            raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
        if name in ("holder", "lower-bound", "monotonicity", "transform", "order-monotonicity",
                    "identity") and not ac_pairs:
            results.append(SuiteResult(name).report() | {"skipped": "no absolutely continuous pair"})
            continue
        results.append(table[name]().report())
    return {"seed": seed, "passed": all(r["passed"] for r in results), "suites": results}
