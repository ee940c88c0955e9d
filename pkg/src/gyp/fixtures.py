"""Named measure pairs with closed-form values, and seeded random corpora."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import Cell, beta, density, discrete, uniform

DEFAULT_SEED = 42


@dataclass(frozen=True)
class FixturePair:
    name: str
    P: object
    R: object


def continuous_pairs() -> list[FixturePair]:
    """Absolutely continuous piecewise-polynomial pairs on ``[0, 1]``."""
    triangle = density([(0.0, 0.5, [0.0, 4.0]), (0.5, 1.0, [4.0, -4.0])])
    step = density([(0.0, 0.25, [0.4]), (0.25, 0.75, [1.6]), (0.75, 1.0, [0.4])])
    return [
        FixturePair("half-uniform", uniform(0.0, 0.5), uniform(0.0, 1.0)),
        FixturePair("beta22-uniform", beta(2, 2), uniform()),
        FixturePair("beta23-uniform", beta(2, 3), uniform()),
        FixturePair("beta33-beta22", beta(3, 3), beta(2, 2)),
        FixturePair("triangle-uniform", triangle, uniform()),
        FixturePair("beta22-step", beta(2, 2), step),
    ]


def discrete_pairs() -> list[FixturePair]:
    return [
        FixturePair("coin-skew", discrete([0.5, 0.5], ["a", "b"]), discrete([0.25, 0.75], ["a", "b"])),
        FixturePair("three-atoms", discrete([0.5, 0.25, 0.25], ["a", "b", "c"]),
                    discrete([0.25, 0.25, 0.5], ["a", "b", "c"])),
        FixturePair("zero-atom", discrete([0.0, 0.5, 0.5], ["a", "b", "c"]),
                    discrete([0.2, 0.3, 0.5], ["a", "b", "c"])),
    ]


def all_pairs() -> list[FixturePair]:
    return continuous_pairs() + discrete_pairs()


def non_ac_continuous() -> FixturePair:
    return FixturePair("wide-uniform", uniform(0.0, 2.0), uniform(0.0, 1.0))


# ---------------------------------------------------------------------------
# random corpora


def _labels(n: int) -> list[str]:
    return [f"x{i}" for i in range(n)]


def _pmf(rng: np.random.Generator, n: int) -> np.ndarray:
    w = rng.dirichlet(np.ones(n))
    return w / w.sum()


def random_discrete_pairs(seed: int = DEFAULT_SEED, count: int = 200,
                          max_atoms: int = 12) -> list[FixturePair]:
    """``P << R`` pairs; about a third of them give ``P`` a zero atom."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(2, max_atoms + 1))
        p, r = _pmf(rng, n), _pmf(rng, n)
        if rng.random() < 0.3:
            p[int(rng.integers(n))] = 0.0
            p /= p.sum()
        out.append(FixturePair(f"random-{i}", discrete(p, _labels(n)), discrete(r, _labels(n))))
    return out


def random_non_ac_pairs(seed: int = DEFAULT_SEED, count: int = 20,
                        max_atoms: int = 12) -> list[FixturePair]:
    """Pairs where ``R`` misses at least one atom that ``P`` charges."""
    rng = np.random.default_rng(seed + 1)
    out = []
    for i in range(count):
        n = int(rng.integers(2, max_atoms + 1))
        p, r = _pmf(rng, n), _pmf(rng, n)
        holes = rng.choice(n, size=int(rng.integers(1, n)), replace=False)
        r[holes] = 0.0
        r /= r.sum()
        out.append(FixturePair(f"non-ac-{i}", discrete(p, _labels(n)), discrete(r, _labels(n))))
    return out


def random_cell(rng: np.random.Generator, P, R) -> Cell:
    """An interval inside the pair's hull, or a non-empty atom subset."""
    if hasattr(P, "labels"):
        labels = sorted(set(P.labels) | set(R.labels))
        k = int(rng.integers(1, len(labels) + 1))
        return Cell.of_atoms(rng.choice(labels, size=k, replace=False).tolist())
    lo, hi = min(P.lo, R.lo), max(P.hi, R.hi)
    a, b = np.sort(rng.uniform(lo, hi, size=2))
    if b - a < 1e-9:
        b = min(a + 1e-3, hi)
    return Cell.interval(float(a), float(b))


def random_breakpoints(rng: np.random.Generator, lo: float, hi: float, max_cells: int = 30) -> list[float]:
    k = int(rng.integers(0, max_cells))
    return sorted(set(rng.uniform(lo, hi, size=k).tolist()) - {lo, hi})


def random_groups(rng: np.random.Generator, labels) -> list[list[str]]:
    labels = list(labels)
    k = int(rng.integers(1, len(labels) + 1))
    tags = rng.integers(0, k, size=len(labels))
    groups = [[x for x, t in zip(labels, tags) if t == j] for j in range(k)]
    return [g for g in groups if g]
