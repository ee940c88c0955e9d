"""Finite measurable partitions and the partition-level divergence functionals."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .divergences import power_integral
from .extended import INF, ext_log, xlogx_ratio
from .measures import (
    Cell,
    DiscreteMeasure,
    MismatchedReference,
    NotAbsolutelyContinuous,
    cell_mass,
    check_absolute_continuity,
    domain_of,
    intersect_intervals,
    merge_intervals,
)
from .quadrature import DEFAULT, QuadratureConfig

MASS_TOL = 1e-9


class InvalidSplit(ValueError):
    pass


class InvalidPartition(ValueError):
    pass


class OrderOutOfRange(ValueError):
    """The certified partition functional needs order > 1."""


@dataclass(frozen=True)
class Partition:
    cells: tuple

    def __post_init__(self):
        if len(self.cells) < 1:
            raise InvalidPartition("a partition needs at least one cell")
        kinds = {c.is_discrete for c in self.cells}
        if len(kinds) != 1:
            raise InvalidPartition("cannot mix atom cells and interval cells")

    @property
    def m(self) -> int:
        return len(self.cells)

    @property
    def is_discrete(self) -> bool:
        return self.cells[0].is_discrete

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    @classmethod
    def from_breakpoints(cls, lo: float, hi: float, breakpoints: Iterable[float] = ()) -> "Partition":
        pts = sorted(set(float(x) for x in breakpoints))
        if any(not lo < x < hi for x in pts):
            raise InvalidPartition("breakpoints must lie strictly inside the support")
        edges = [lo] + pts + [hi]
        return cls(tuple(Cell.interval(a, b) for a, b in zip(edges[:-1], edges[1:])))

    @classmethod
    def from_groups(cls, groups: Iterable[Iterable[str]]) -> "Partition":
        return cls(tuple(Cell.of_atoms(g) for g in groups))

    @classmethod
    def singletons(cls, labels: Sequence[str]) -> "Partition":
        return cls(tuple(Cell.of_atoms([x]) for x in labels))

    def ordered(self) -> "Partition":
        """Cells in left-to-right support order (atoms: by smallest label)."""
        if self.is_discrete:
            return Partition(tuple(sorted(self.cells, key=lambda c: min(c.atoms))))
        return Partition(tuple(sorted(self.cells, key=lambda c: c.left)))

    def breakpoints(self) -> list[float]:
        """Interior cell boundaries, for interval partitions."""
        cells = self.ordered().cells
        return [c.left for c in cells[1:]]

    def space(self):
        if self.is_discrete:
            return frozenset().union(*(c.atoms for c in self.cells))
        return tuple(_union(self.cells))


def _union(cells) -> list:
    return merge_intervals(iv for c in cells for iv in c.intervals)


def check_partition(pi: Partition, P, R) -> Partition:
    """Disjointness plus full P- and R-coverage within ``MASS_TOL``."""
    if pi.is_discrete:
        seen = set()
        for c in pi.cells:
            if seen & c.atoms:
                raise InvalidPartition("cells overlap")
            seen |= c.atoms
    else:
        ivs = sorted(iv for c in pi.cells for iv in c.intervals)
        for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
            if a1 < b0:
                raise InvalidPartition("cells overlap")
    stats = partition_stats(P, R, pi)
    for name, masses in (("P", stats.p_masses), ("R", stats.r_masses)):
        if abs(math.fsum(masses) - 1.0) > MASS_TOL:
            raise InvalidPartition(f"cells do not cover the {name}-mass")
    return pi


# ---------------------------------------------------------------------------
# functionals


@dataclass(frozen=True)
class PartitionStats:
    p_masses: tuple
    r_masses: tuple


def partition_stats(P, R, pi: Partition) -> PartitionStats:
    return PartitionStats(tuple(cell_mass(P, c) for c in pi.cells),
                          tuple(cell_mass(R, c) for c in pi.cells))


def kl_term(p: float, r: float) -> float:
    return xlogx_ratio(p, r)


def power_term(p: float, r: float, alpha: float) -> float:
    """``p^alpha / r^(alpha-1)``; 0 for an empty cell, +inf when only R vanishes."""
    if p == 0:
        return 0.0
    if r == 0:
        return INF
    return p ** alpha / r ** (alpha - 1.0)


def _check_order(alpha: float):
    if not alpha > 1:
        raise OrderOutOfRange(f"certified partition functional needs order > 1, got {alpha}")


def partition_kl(stats: PartitionStats) -> float:
    return math.fsum(kl_term(p, r) for p, r in zip(stats.p_masses, stats.r_masses))


def power_sum(stats: PartitionStats, alpha: float) -> float:
    return math.fsum(power_term(p, r, alpha) for p, r in zip(stats.p_masses, stats.r_masses))


def partition_renyi(stats: PartitionStats, alpha: float) -> float:
    _check_order(alpha)
    return ext_log(power_sum(stats, alpha)) / (alpha - 1.0)


def partition_tsallis(stats: PartitionStats, q: float) -> float:
    _check_order(q)
    s = power_sum(stats, q)
    return INF if s == INF else (s - 1.0) / (q - 1.0)


def partition_value(stats: PartitionStats, order) -> float:
    """Dispatch on an :class:`~gyp.divergences.OrderParam`."""
    if order.family == "kl":
        return partition_kl(stats)
    if order.family == "renyi":
        return partition_renyi(stats, order.order)
    return partition_tsallis(stats, order.order)


# ---------------------------------------------------------------------------
# lattice operations


def split_cell(pi: Partition, k: int, at) -> Partition:
    """Replace cell ``k`` by two cells; ``at`` is a point or an atom subset."""
    cell = pi.cells[k]
    if cell.is_discrete:
        part = frozenset(at)
        if not part or not part < cell.atoms:
            raise InvalidSplit("split must be a proper non-empty subset of the cell")
        new = (Cell(atoms=part), Cell(atoms=cell.atoms - part))
    else:
        x = float(at)
        left = [(a, min(b, x)) for a, b in cell.intervals if a < x]
        right = [(max(a, x), b) for a, b in cell.intervals if b > x]
        left = [iv for iv in left if iv[1] > iv[0]]
        right = [iv for iv in right if iv[1] > iv[0]]
        if not left or not right:
            raise InvalidSplit(f"split point {x} is not interior to {cell}")
        new = (Cell(intervals=tuple(left)), Cell(intervals=tuple(right)))
    return Partition(pi.cells[:k] + new + pi.cells[k + 1:])


def _same_space(a: Partition, b: Partition):
    if a.is_discrete != b.is_discrete:
        raise MismatchedReference("partitions of different kinds")
    sa, sb = a.space(), b.space()
    if a.is_discrete:
        ok = sa == sb
    else:
        ok = len(sa) == len(sb) and all(
            math.isclose(x, y, rel_tol=0, abs_tol=1e-12) for iv, jv in zip(sa, sb) for x, y in zip(iv, jv))
    if not ok:
        raise MismatchedReference("partitions cover different spaces")


def _overlap(c: Cell, d: Cell) -> float | frozenset:
    if c.is_discrete:
        return c.atoms & d.atoms
    return sum(b - a for a, b in intersect_intervals(list(c.intervals), list(d.intervals)))


def is_refinement(fine: Partition, coarse: Partition) -> bool:
    _same_space(fine, coarse)
    for c in fine.cells:
        hits = [d for d in coarse.cells if _overlap(c, d)]
        if len(hits) != 1:
            return False
        if c.is_discrete:
            if not c.atoms <= hits[0].atoms:
                return False
        elif not math.isclose(_overlap(c, hits[0]), c.length(), rel_tol=1e-12, abs_tol=1e-15):
            return False
    return True


def common_refinement(a: Partition, b: Partition) -> Partition:
    _same_space(a, b)
    cells = []
    for c in a.cells:
        for d in b.cells:
            if c.is_discrete:
                common = c.atoms & d.atoms
                if common:
                    cells.append(Cell(atoms=common))
            else:
                ivs = intersect_intervals(list(c.intervals), list(d.intervals))
                if ivs:
                    cells.append(Cell(intervals=tuple(ivs)))
    return Partition(tuple(cells)).ordered()


def holder_cell_check(P, R, cell: Cell, alpha: float,
                      cfg: QuadratureConfig = DEFAULT) -> tuple[float, float]:
    """``(P(E)^a / R(E)^(a-1), int_E phi^a dR)``; the first never exceeds the second."""
    _check_order(alpha)
    witness = check_absolute_continuity(P, R)
    if witness is not None:
        raise NotAbsolutelyContinuous(witness)
    r = cell_mass(R, cell)
    if r == 0:
        return 0.0, 0.0
    lhs = power_term(cell_mass(P, cell), r, alpha)
    rhs = power_integral(P, R, alpha, cfg, cell)
    return lhs, rhs


def trivial_partition(P, R) -> Partition:
    """The one-cell partition ``{X}`` of the pair's whole space."""
    dom = domain_of(P, R)
    if isinstance(P, DiscreteMeasure):
        return Partition((Cell.of_atoms(dom),))
    return Partition((Cell.interval(*dom),))

