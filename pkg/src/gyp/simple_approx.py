"""Dyadic simple-function approximations of a Radon-Nikodym derivative.

``quantize_rn_derivative(phi, n)`` builds ``phi_n = min(floor(2^n phi) / 2^n, n)``
exactly on interval level sets, so that ``0 <= phi_n <= phi_{n+1} <= phi``.
The induced measures ``P_n(E) = int_E phi_n dR`` and the Renyi integral of
``phi_n`` are then finite sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _poly
from .extended import ext_log
from .measures import Cell, DensityEvaluator, Segment
from .partitions import Partition

MERGE_MASS = 1e-15
_pv = np.polynomial.polynomial.polyval


class LevelSetResolutionFailure(ArithmeticError):
    pass


def dyadic_level(value: float, n: int) -> float:
    if value >= n:
        return float(n)
    return math.floor(value * 2.0 ** n) / 2.0 ** n


@dataclass(frozen=True)
class SimpleFunction:
    """``s = sum_k a_k 1_{E_k}``.

    Continuous simple functions are stored as consecutive intervals
    ``[edges[i], edges[i+1])`` with one level each; cells group equal levels.
    Discrete ones map every atom to its level.
    """

    edges: np.ndarray | None = None
    interval_levels: np.ndarray | None = None
    atom_levels: dict | None = None
    _cells: list = field(default_factory=list, compare=False, repr=False)

    @property
    def is_discrete(self) -> bool:
        return self.atom_levels is not None

    @property
    def levels(self) -> tuple:
        if self.is_discrete:
            return tuple(sorted(set(self.atom_levels.values())))
        return tuple(float(v) for v in np.unique(self.interval_levels))

    @property
    def cells(self) -> Partition:
        """Level sets ``E_k`` in increasing level order."""
        if not self._cells:
            if self.is_discrete:
                groups = {}
                for atom, lv in self.atom_levels.items():
                    groups.setdefault(lv, []).append(atom)
                cells = [Cell.of_atoms(groups[lv]) for lv in self.levels]
            else:
                cells = []
                for lv in self.levels:
                    idx = np.nonzero(self.interval_levels == lv)[0]
                    cells.append(Cell(intervals=tuple(
                        (float(self.edges[i]), float(self.edges[i + 1])) for i in idx)))
            self._cells.append(Partition(tuple(cells)))
        return self._cells[0]

    def __call__(self, x) -> float:
        if self.is_discrete:
            return self.atom_levels[x]
        return float(self.evaluate(np.array([x]))[0])

    def evaluate(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        i = np.searchsorted(self.edges, xs, side="right") - 1
        i = np.clip(i, 0, len(self.interval_levels) - 1)
        out = self.interval_levels[i].astype(float)
        outside = (xs < self.edges[0]) | (xs > self.edges[-1])
        out[outside] = 0.0
        return out

    def r_masses(self, R) -> np.ndarray:
        """R-mass of every stored interval (continuous) or atom (discrete)."""
        if self.is_discrete:
            return np.array([R.as_dict().get(a, 0.0) for a in self.atom_levels])
        cdf = R.cdf_many(self.edges)
        return np.maximum(np.diff(cdf), 0.0)

    def level_array(self) -> np.ndarray:
        if self.is_discrete:
            return np.array(list(self.atom_levels.values()), dtype=float)
        return self.interval_levels


# ---------------------------------------------------------------------------
# quantization


def _phi_limit(seg: Segment, u: float, inward: float) -> float:
    p, r = _poly.horner(seg.p, u), _poly.horner(seg.r, u)
    if r <= 0 and p <= 0:
        u = u + inward
        p, r = _poly.horner(seg.p, u), _poly.horner(seg.r, u)
    p, r = max(p, 0.0), max(r, 0.0)
    if r == 0:
        return 0.0 if p == 0 else math.inf
    return p / r


def _crossings(seg: Segment, u0: float, u1: float, thresholds: np.ndarray, increasing: bool,
               tol: float = 1e-12, grid: int = 4096) -> np.ndarray:
    """Solve ``p(u) = t r(u)`` for every ``t`` on a monotone stretch, by vectorised bisection.

    Brackets are seeded from ``phi`` sampled on a uniform grid of the stretch.
    """
    p, r = np.asarray(seg.p), np.asarray(seg.r)
    sign = 1.0 if increasing else -1.0
    us = np.linspace(u0, u1, grid + 1)
    pu, ru = _pv(us, p), _pv(us, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        key = sign * np.where(ru > 0, pu / ru, np.where(pu > 0, np.inf, 0.0))
    key = np.maximum.accumulate(key)
    j = np.clip(np.searchsorted(key, sign * thresholds, side="left"), 1, grid)
    lo, hi = us[j - 1].copy(), us[j].copy()
    for _ in range(200):
        if hi.size == 0 or float(np.max(hi - lo)) <= tol:
            break
        mid = 0.5 * (lo + hi)
        g = sign * (_pv(mid, p) - thresholds * _pv(mid, r))
        below = g < 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    else:
        raise LevelSetResolutionFailure("bisection did not reach tolerance")
    return 0.5 * (lo + hi)


def _segment_levels(seg: Segment, n: int):
    """Breakpoints (local coordinate) and levels of ``phi_n`` on one segment."""
    if _poly.is_zero(seg.p) or _poly.is_zero(seg.r):
        return np.array([-1.0, 1.0]), np.array([0.0])
    dp = np.polynomial.polynomial.polyder(seg.p)
    dr = np.polynomial.polynomial.polyder(seg.r)
    num = np.polynomial.polynomial.polysub(
        np.polynomial.polynomial.polymul(dp, seg.r), np.polynomial.polynomial.polymul(seg.p, dr))
    crit = _poly.sign_change_roots(num)
    knots = [-1.0] + crit + [1.0]
    step = 2.0 ** -n
    xs, levels = [-1.0], []
    for u0, u1 in zip(knots[:-1], knots[1:]):
        eps = 1e-9 * (u1 - u0)
        v0 = _phi_limit(seg, u0, eps)
        v1 = _phi_limit(seg, u1, -eps)
        lo_v, hi_v = min(v0, v1), max(v0, v1)
        thresholds = np.empty(0)
        if lo_v < n:
            top = min(hi_v, float(n))
            ks = np.arange(math.floor(lo_v / step) + 1, math.ceil(top / step), dtype=float)
            thresholds = ks * step
            thresholds = thresholds[(thresholds > lo_v) & (thresholds < top)]
            if hi_v > n:
                thresholds = np.append(thresholds, float(n))
        increasing = v1 >= v0
        if not increasing:
            thresholds = thresholds[::-1]
        roots = _crossings(seg, u0, u1, thresholds, increasing) if thresholds.size else np.empty(0)
        # phi lies in [t_j, t_j+1) between crossings; the stretch end with no
        # threshold beyond it takes the floored end value
        if increasing:
            seg_levels = np.concatenate([[dyadic_level(v0, n)], thresholds])
        else:
            seg_levels = np.concatenate([thresholds, [dyadic_level(v1, n)]])
        xs.extend([roots, [u1]])
        levels.append(seg_levels)
    return np.concatenate([np.atleast_1d(np.asarray(x, dtype=float)) for x in xs]), np.concatenate(levels)


def quantize_rn_derivative(phi: DensityEvaluator, n: int) -> SimpleFunction:
    """Dyadic approximation ``phi_n`` with levels capped at ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if phi.discrete:
        return SimpleFunction(atom_levels={x: dyadic_level(v, n) for x, v in phi.values.items()})
    edges, levels = [], []
    for seg in phi.segments:
        us, lv = _segment_levels(seg, n)
        xs = 0.5 * (seg.a + seg.b) + 0.5 * (seg.b - seg.a) * us
        xs[0], xs[-1] = seg.a, seg.b
        edges.append(xs if not edges else xs[1:])
        levels.append(lv)
    edges = np.concatenate(edges)
    levels = np.concatenate(levels)
    edges, levels = _tidy(edges, levels, phi.R)
    return SimpleFunction(edges=edges, interval_levels=levels)


def _tidy(edges: np.ndarray, levels: np.ndarray, R) -> tuple[np.ndarray, np.ndarray]:
    """Drop empty intervals, fold negligible-mass ones into a lower neighbour, fuse equal levels."""
    keep = np.diff(edges) > 0
    edges = np.concatenate([edges[:1], edges[1:][keep]])
    levels = levels[keep]
    masses = np.diff(R.cdf_many(edges))
    tiny = np.nonzero((masses < MERGE_MASS) & (masses > 0))[0]
    for i in tiny:
        nb = [levels[j] for j in (i - 1, i + 1) if 0 <= j < len(levels)]
        low = min(nb) if nb else levels[i]
        if low <= levels[i]:
            levels[i] = low
    same = np.concatenate([[False], levels[1:] == levels[:-1]])
    edges = np.concatenate([edges[:1], edges[1:][~np.concatenate([same[1:], [False]])]])
    levels = levels[~same]
    return edges, levels


# ---------------------------------------------------------------------------
# induced measure and exact divergence of a simple function


class InducedMeasure:
    """``P_n(E) = int_E s dR``; sub-normalised, not a probability measure."""

    def __init__(self, s: SimpleFunction, R):
        self.s, self.R = s, R
        if not s.is_discrete:
            self._cdf_edges = R.cdf_many(s.edges)
            pieces = s.interval_levels * np.maximum(np.diff(self._cdf_edges), 0.0)
            self._prefix = np.concatenate([[0.0], np.cumsum(pieces)])

    def _cum(self, x: float) -> float:
        """``P_n((-inf, x))``."""
        s = self.s
        i = int(np.searchsorted(s.edges, x, side="right")) - 1
        if i < 0:
            return 0.0
        if i >= len(s.interval_levels):
            return float(self._prefix[-1])
        return float(self._prefix[i] + s.interval_levels[i] * max(self.R.cdf(x) - self._cdf_edges[i], 0.0))

    def mass(self, cell: Cell) -> float:
        s, R = self.s, self.R
        if s.is_discrete:
            return math.fsum(s.atom_levels.get(a, 0.0) * R.mass_of(a) for a in sorted(cell.atoms))
        return math.fsum(self._cum(b) - self._cum(a) for a, b in cell.intervals)

    def total_mass(self) -> float:
        return math.fsum(self.s.level_array() * self.s.r_masses(self.R))

    def cell_masses(self) -> tuple[np.ndarray, np.ndarray]:
        """``(P_n(E_k), R(E_k))`` for the level cells, in increasing level order."""
        lv, rm = self.s.level_array(), self.s.r_masses(self.R)
        levels = np.array(self.s.levels)
        idx = np.searchsorted(levels, lv)
        order = np.argsort(idx, kind="stable")
        bounds = np.searchsorted(idx[order], np.arange(len(levels) + 1))
        r_cells = np.array([math.fsum(rm[order[bounds[k]:bounds[k + 1]]]) for k in range(len(levels))])
        return levels * r_cells, r_cells


def induced_measure(s: SimpleFunction, R) -> InducedMeasure:
    return InducedMeasure(s, R)


def _check_alpha(alpha: float):
    if not alpha > 0 or alpha == 1:
        raise ValueError("order must be positive and different from 1")


def simple_divergence(s: SimpleFunction, R, alpha: float) -> float:
    """``1/(alpha-1) ln sum_k a_k^alpha R(E_k)``."""
    _check_alpha(alpha)
    lv, rm = s.level_array(), s.r_masses(R)
    terms = np.where(lv > 0, lv ** alpha, 0.0) * rm
    return ext_log(math.fsum(terms)) / (alpha - 1.0)


def simple_divergence_mass_form(s: SimpleFunction, R, alpha: float) -> float:
    """Same value from cell masses: ``1/(alpha-1) ln sum_k P_n(E_k)^alpha / R(E_k)^(alpha-1)``."""
    _check_alpha(alpha)
    pn, rk = induced_measure(s, R).cell_masses()
    terms = [p ** alpha / r ** (alpha - 1.0) for p, r in zip(pn, rk) if p > 0 and r > 0]
    return ext_log(math.fsum(terms)) / (alpha - 1.0)
