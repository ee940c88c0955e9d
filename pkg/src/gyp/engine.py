"""Certified lower bounds for relative entropies by greedy partition refinement.

Every partition functional is a lower bound on the integral divergence
(Hoelder on each cell, or the log-sum inequality for KL). Starting from the
one-cell partition, the engine repeatedly applies the single split with the
largest gain until the gap to the quadrature value closes, the gain becomes
negligible, or the cell budget runs out.
"""

from __future__ import annotations

import bisect
import csv
import heapq
import io
import itertools
import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from . import _poly
from .divergences import OrderParam, divergence, renyi_to_tsallis
from .extended import INF, ext_log, format_ext
from .measures import (
    Cell,
    DiscreteMeasure,
    aligned_masses,
    check_absolute_continuity,
    common_segments,
    domain_of,
    merge_intervals,
)
from .partitions import OrderOutOfRange, Partition, kl_term, power_term
from .quadrature import DEFAULT, QuadratureConfig

STRATEGIES = ("midpoint", "phi-level", "mass-median")
CERTIFICATE_SLACK = 1e-9
GAP_FLOOR = 1e-14  # absolute slack so that exact zeros count as converged


class NoValidSplit(ValueError):
    pass


@dataclass(frozen=True)
class RefinementConfig:
    max_cells: int = 4096
    rel_gap_tol: float = 1e-4
    min_gain: float = 1e-13
    split_strategy: str = "phi-level"
    candidate_count: int = 4
    quad: QuadratureConfig = DEFAULT

    def __post_init__(self):
        if self.max_cells < 2:
            raise ValueError("max_cells must be >= 2")
        if not (self.rel_gap_tol > 0 and self.min_gain > 0):
            raise ValueError("tolerances must be positive")
        if self.split_strategy not in STRATEGIES:
            raise ValueError(f"unknown split strategy {self.split_strategy!r}")
        if self.candidate_count < 1:
            raise ValueError("candidate_count must be >= 1")


@dataclass(frozen=True)
class TraceStep:
    step: int
    cells: int
    partition_value: float
    oracle_value: float
    gap: float


@dataclass
class RefinementTrace:
    steps: list = field(default_factory=list)
    final_partition: Partition | None = None

    COLUMNS = ("step", "cells", "partition_value", "oracle_value", "gap")

    def values(self) -> list[float]:
        return [s.partition_value for s in self.steps]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for s in self.steps:
            w.writerow([s.step, s.cells, format_ext(s.partition_value),
                        format_ext(s.oracle_value), format_ext(s.gap)])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


@dataclass
class CertifiedEstimate:
    order: OrderParam
    lower_bound: float
    oracle: float
    gap: float
    converged: bool
    trace: RefinementTrace
    witness: Cell | None = None
    budget_exhausted: bool = False
    slack: float = CERTIFICATE_SLACK

    @property
    def cells(self) -> int:
        return self.trace.final_partition.m

    def summary(self) -> dict:
        return {
            "family": self.order.family,
            "order": self.order.order,
            "lower_bound": self.lower_bound,
            "oracle": self.oracle,
            "gap": self.gap,
            "converged": self.converged,
            "cells": self.cells,
        }


# ---------------------------------------------------------------------------
# the functional being maximised, in additive "term" form


class _Objective:
    """Cell term and the map from the term sum to the reported value."""

    def __init__(self, order: OrderParam):
        self.order = order
        if order.family == "kl":
            self.alpha = None
        else:
            if not order.order > 1:
                raise OrderOutOfRange(f"certified refinement needs order > 1, got {order.order}")
            self.alpha = order.order

    def term(self, p: float, r: float) -> float:
        if self.alpha is None:
            return kl_term(p, r)
        return power_term(p, r, self.alpha)

    def renyi_value(self, total: float) -> float:
        if self.alpha is None:
            return total
        return ext_log(total) / (self.alpha - 1.0)

    def value(self, total: float) -> float:
        v = self.renyi_value(total)
        if self.order.family == "tsallis":
            return renyi_to_tsallis(v, self.alpha)
        return v

    def value_gain(self, total: float, gain: float) -> float:
        """Increase of the (Renyi or KL) value when the term sum grows by ``gain``."""
        if self.alpha is None:
            return gain
        if total <= 0:
            return INF if gain > 0 else 0.0
        return math.log1p(gain / total) / (self.alpha - 1.0)


# ---------------------------------------------------------------------------
# candidate generation


class _Context:
    def __init__(self, P, R, order: OrderParam, cfg: RefinementConfig):
        self.P, self.R, self.cfg = P, R, cfg
        self.obj = _Objective(order)
        self.discrete = isinstance(P, DiscreteMeasure)
        if self.discrete:
            self.labels, p, r = aligned_masses(P, R)
            self.p = dict(zip(self.labels, p))
            self.r = dict(zip(self.labels, r))
            self.rank = {x: i for i, x in enumerate(self.labels)}
        else:
            self.segments = common_segments(P, R)
            self._seg_starts = [s.a for s in self.segments]

    # masses ---------------------------------------------------------------

    def masses(self, cell) -> tuple[float, float]:
        if self.discrete:
            atoms = sorted(cell, key=self.rank.get)
            return math.fsum(self.p[a] for a in atoms), math.fsum(self.r[a] for a in atoms)
        a, b = cell
        return max(self.P.cdf(b) - self.P.cdf(a), 0.0), max(self.R.cdf(b) - self.R.cdf(a), 0.0)

    def term(self, cell) -> float:
        return self.obj.term(*self.masses(cell))

    # splits ---------------------------------------------------------------

    def children(self, cell, at):
        if self.discrete:
            return frozenset([at]), cell - {at}
        a, b = cell
        return (a, at), (at, b)

    def candidates(self, cell) -> list:
        if self.discrete:
            if len(cell) < 2:
                raise NoValidSplit("cell is a single atom")
            return sorted(cell, key=self.rank.get)
        a, b = cell
        if not b > a:
            raise NoValidSplit("cell has zero length")
        k = self.cfg.candidate_count
        strategy = self.cfg.split_strategy
        pts: list[float] = []
        if strategy == "phi-level":
            pts = self._level_crossings(a, b)[:k]
        elif strategy == "mass-median":
            pts = self._mass_quantiles(a, b, k)
        if not pts:
            pts = [a + (b - a) * j / (k + 1) for j in range(1, k + 1)]
        return sorted({x for x in pts if a < x < b})

    def _mass_quantiles(self, a: float, b: float, k: int) -> list[float]:
        F = self.R.cdf
        fa, fb = F(a), F(b)
        if not fb > fa:
            return []
        out = []
        for j in range(1, k + 1):
            target = fa + (fb - fa) * j / (k + 1)
            out.append(brentq(lambda x: F(x) - target, a, b, xtol=1e-15))
        return out

    def _level_crossings(self, a: float, b: float) -> list[float]:
        """Points in ``(a, b)`` where ``phi`` crosses its mean level on the cell."""
        pm, rm = self.masses((a, b))
        if rm <= 0:
            return []
        c = pm / rm
        out = []
        prev_sign = None
        i = max(bisect.bisect_right(self._seg_starts, a) - 1, 0)
        for seg in self.segments[i:]:
            if seg.a >= b:
                break
            lo, hi = max(seg.a, a), min(seg.b, b)
            if hi <= lo:
                continue
            coef = [pc - c * rc for pc, rc in
                    itertools.zip_longest(seg.p, seg.r, fillvalue=0.0)]
            ulo, uhi = _poly.to_u(lo, seg.a, seg.b), _poly.to_u(hi, seg.a, seg.b)
            # a jump of phi across a segment boundary counts as a crossing
            first = _poly.horner(coef, ulo + 1e-12 * (uhi - ulo))
            if prev_sign is not None and first != 0 and (first > 0) != prev_sign and lo > a:
                out.append(lo)
            for u in _poly.sign_change_roots(coef, ulo, uhi):
                out.append(seg.a + (u + 1.0) * 0.5 * (seg.b - seg.a))
            last = _poly.horner(coef, uhi - 1e-12 * (uhi - ulo))
            if last != 0:
                prev_sign = last > 0
        return out

    def best_split(self, cell, cell_term: float):
        """``(gain, at)`` of the best candidate; ties go to the smallest coordinate."""
        best = None
        for at in self.candidates(cell):
            left, right = self.children(cell, at)
            gain = self.term(left) + self.term(right) - cell_term
            if best is None or gain > best[0]:
                best = (gain, at)
        return best


def _order_key(ctx: _Context, cell):
    if ctx.discrete:
        return min(ctx.rank[a] for a in cell)
    return cell[0]


def _coord_key(ctx: _Context, at):
    return ctx.rank[at] if ctx.discrete else at


def propose_splits(P, R, pi: Partition, k: int, order: OrderParam,
                   cfg: RefinementConfig = RefinementConfig()) -> list[tuple[object, float]]:
    """Ranked ``(split, gain)`` candidates for cell ``k`` of ``pi``.

    Gains are measured on the reported functional (KL, Renyi or Tsallis) of
    the refined partition relative to ``pi``.
    """
    ctx = _Context(P, R, order, cfg)
    cell = pi.cells[k]
    if cell.is_discrete:
        key = frozenset(cell.atoms)
    else:
        if len(cell.intervals) != 1:
            raise NoValidSplit("only single-interval cells are split")
        key = cell.intervals[0]
    if ctx.masses(key)[1] <= 0:
        raise NoValidSplit("cell has zero reference mass")
    terms = [ctx.term(frozenset(c.atoms) if c.is_discrete else c.intervals[0]) for c in pi.cells]
    total = math.fsum(terms)
    base = ctx.obj.value(total)
    out = []
    for at in ctx.candidates(key):
        left, right = ctx.children(key, at)
        new_total = math.fsum(terms[:k] + terms[k + 1:] + [ctx.term(left), ctx.term(right)])
        out.append((_coord_key(ctx, at), at, ctx.obj.value(new_total) - base))
    out.sort(key=lambda t: (-t[2], t[0]))
    return [(frozenset([at]) if ctx.discrete else at, gain) for _, at, gain in out]


# ---------------------------------------------------------------------------
# driver


def _to_partition(ctx: _Context, cells) -> Partition:
    if ctx.discrete:
        cells = sorted(cells, key=lambda c: _order_key(ctx, c))
        return Partition(tuple(Cell.of_atoms(sorted(c, key=ctx.rank.get)) for c in cells))
    return Partition(tuple(Cell.interval(a, b) for a, b in sorted(cells)))


def _witness_estimate(P, R, order: OrderParam, witness: Cell) -> CertifiedEstimate:
    dom = domain_of(P, R)
    if witness.is_discrete:
        rest = [x for x in dom if x not in witness.atoms]
        cells = [witness] + ([Cell.of_atoms(rest)] if rest else [])
    else:
        lo, hi = dom
        gaps, cur = [], lo
        for a, b in witness.intervals:
            if a > cur:
                gaps.append((cur, a))
            cur = max(cur, b)
        if cur < hi:
            gaps.append((cur, hi))
        cells = [witness] + ([Cell(intervals=tuple(merge_intervals(gaps)))] if gaps else [])
    part = Partition(tuple(cells))
    trace = RefinementTrace([TraceStep(0, part.m, INF, INF, 0.0)], part)
    return CertifiedEstimate(order, INF, INF, 0.0, True, trace, witness=witness)


def supremum_estimate(P, R, order: OrderParam,
                      cfg: RefinementConfig = RefinementConfig()) -> CertifiedEstimate:
    """Greedy refinement from ``{X}`` towards the supremum of the partition functional."""
    ctx = _Context(P, R, order, cfg)
    witness = check_absolute_continuity(P, R)
    if witness is not None:
        return _witness_estimate(P, R, order, witness)

    oracle = divergence(P, R, order, cfg.quad)
    slack = CERTIFICATE_SLACK + (0.0 if ctx.discrete else cfg.quad.abs_tol)
    target = cfg.rel_gap_tol * abs(oracle) + GAP_FLOOR
    obj = ctx.obj

    if ctx.discrete:
        root = frozenset(ctx.labels)
    else:
        root = domain_of(P, R)
    terms = {root: ctx.term(root)}
    heap: list = []
    counter = itertools.count()

    def push(cell):
        try:
            best = ctx.best_split(cell, terms[cell])
        except NoValidSplit:
            return
        if best is None:
            return
        gain, at = best
        heapq.heappush(heap, (-gain, _order_key(ctx, cell), _coord_key(ctx, at), next(counter), cell, at))

    push(root)
    trace = RefinementTrace()

    def record(step):
        total = math.fsum(terms[c] for c in sorted(terms, key=lambda c: _order_key(ctx, c)))
        value = obj.value(total)
        trace.steps.append(TraceStep(step, len(terms), value, oracle, oracle - value))
        return total, value

    total, value = record(0)
    converged = oracle - value <= target
    exhausted = False
    step = 0
    while heap:
        must_finish = ctx.discrete
        if converged and not must_finish:
            break
        if len(terms) >= cfg.max_cells:
            exhausted = True
            break
        neg_gain, _, _, _, cell, at = heapq.heappop(heap)
        if not must_finish and obj.value_gain(total, -neg_gain) < cfg.min_gain:
            break
        left, right = ctx.children(cell, at)
        del terms[cell]
        terms[left] = ctx.term(left)
        terms[right] = ctx.term(right)
        push(left)
        push(right)
        step += 1
        total, value = record(step)
        converged = oracle - value <= target
    if ctx.discrete and heap:
        exhausted = exhausted or len(terms) >= cfg.max_cells
    trace.final_partition = _to_partition(ctx, terms)
    gap = oracle - value
    return CertifiedEstimate(order, value, oracle, gap, gap <= target, trace,
                             budget_exhausted=exhausted, slack=slack)


def run_alpha_sweep(P, R, alphas, cfg: RefinementConfig = RefinementConfig(),
                    family: str = "renyi") -> list[CertifiedEstimate]:
    """One estimate per order, sorted by order."""
    orders = sorted(float(a) for a in alphas)
    for a in orders:
        if not a > 1:
            raise OrderOutOfRange(f"sweep orders must exceed 1, got {a}")
    return [supremum_estimate(P, R, OrderParam(family, a), cfg) for a in orders]
