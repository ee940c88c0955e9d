"""Probability measures on a finite atom set or on bounded real intervals.

Two representations are supported:

* :class:`DiscreteMeasure` - a pmf over labelled atoms (counting reference);
* :class:`DensityMeasure` - a piecewise-polynomial density on a finite union
  of bounded intervals (Lebesgue reference).

Cell masses are exact up to floating point: atom sums in one case, closed
form antiderivatives in the other.
"""

from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np
from numpy.polynomial import Chebyshev, Polynomial

from . import _poly

DEFAULT_TOLERANCE = 1e-9


class MeasureError(ValueError):
    """Base class for invalid measure input."""


class NotNormalized(MeasureError):
    def __init__(self, actual_mass: float):
        super().__init__(f"total mass {actual_mass!r} is not 1")
        self.actual_mass = actual_mass


class NegativeDensity(MeasureError):
    def __init__(self, location):
        super().__init__(f"negative density at {location!r}")
        self.location = location


class CellOutsideSupport(MeasureError):
    pass


class MismatchedReference(MeasureError):
    pass


class NotAbsolutelyContinuous(MeasureError):
    def __init__(self, witness: "Cell"):
        super().__init__(f"P is not absolutely continuous w.r.t. R; witness {witness}")
        self.witness = witness


@dataclass(frozen=True)
class ReferenceMeasure:
    """Counting measure on atoms or Lebesgue measure on disjoint bounded intervals."""

    kind: str  # "counting" | "lebesgue"
    support: tuple

    def __post_init__(self):
        if self.kind == "counting":
            if len(set(self.support)) != len(self.support):
                raise MeasureError("atom labels must be unique")
        elif self.kind == "lebesgue":
            prev = -math.inf
            for a, b in self.support:
                if not (math.isfinite(a) and math.isfinite(b) and b > a):
                    raise MeasureError(f"bad support interval [{a}, {b}]")
                if a < prev:
                    raise MeasureError("support intervals must be ordered and disjoint")
                prev = b
        else:
            raise MeasureError(f"unknown reference kind {self.kind!r}")


@dataclass(frozen=True)
class Cell:
    """A set of atoms, or a finite union of half-open intervals ``[x0, x1)``."""

    atoms: frozenset | None = None
    intervals: tuple | None = None

    @classmethod
    def of_atoms(cls, labels: Iterable[str]) -> "Cell":
        return cls(atoms=frozenset(labels))

    @classmethod
    def interval(cls, a: float, b: float) -> "Cell":
        return cls(intervals=((float(a), float(b)),))

    @classmethod
    def of_intervals(cls, intervals: Iterable[tuple[float, float]]) -> "Cell":
        return cls(intervals=tuple(merge_intervals(intervals)))

    @property
    def is_discrete(self) -> bool:
        return self.atoms is not None

    @property
    def left(self) -> float:
        return self.intervals[0][0]

    @property
    def right(self) -> float:
        return self.intervals[-1][1]

    def length(self) -> float:
        return sum(b - a for a, b in self.intervals)

    def __str__(self):
        if self.is_discrete:
            return "{" + ",".join(sorted(self.atoms)) + "}"
        return " U ".join(f"[{a:.17g}, {b:.17g})" for a, b in self.intervals)


def merge_intervals(intervals: Iterable[tuple[float, float]]) -> list[tuple[float, float]]:
    """Sort, drop empty pieces and fuse touching intervals."""
    out: list[list[float]] = []
    for a, b in sorted((float(a), float(b)) for a, b in intervals):
        if b <= a:
            continue
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def intersect_intervals(xs, ys) -> list[tuple[float, float]]:
    out = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        a = max(xs[i][0], ys[j][0])
        b = min(xs[i][1], ys[j][1])
        if b > a:
            out.append((a, b))
        if xs[i][1] < ys[j][1]:
            i += 1
        else:
            j += 1
    return out


# ---------------------------------------------------------------------------
# measures


@dataclass(frozen=True)
class DiscreteMeasure:
    labels: tuple
    masses: tuple
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def reference(self) -> ReferenceMeasure:
        return ReferenceMeasure("counting", self.labels)

    def mass_of(self, label) -> float:
        try:
            return self.masses[self.labels.index(label)]
        except ValueError:
            raise CellOutsideSupport(f"atom {label!r} not in support") from None

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.masses))

    def total_mass(self) -> float:
        return math.fsum(self.masses)


@dataclass(frozen=True)
class Piece:
    a: float
    b: float
    poly: Polynomial = field(compare=False)

    @property
    def coef(self) -> np.ndarray:
        return _poly.local_coef(self.poly, self.a, self.b)


class DensityMeasure:
    """Piecewise-polynomial density; zero off its pieces."""

    def __init__(self, support: Sequence[tuple[float, float]], pieces: Sequence[Piece],
                 tolerance: float = DEFAULT_TOLERANCE):
        self.support = tuple((float(a), float(b)) for a, b in support)
        self.pieces = tuple(sorted(pieces, key=lambda p: p.a))
        self.tolerance = tolerance
        ReferenceMeasure("lebesgue", self.support)
        prev = -math.inf
        for pc in self.pieces:
            if not pc.b > pc.a or pc.a < prev:
                raise MeasureError("density pieces must be ordered, disjoint and non-empty")
            if not any(a <= pc.a and pc.b <= b for a, b in self.support):
                raise MeasureError(f"piece [{pc.a}, {pc.b}] lies outside the support")
            prev = pc.b
        self._starts = [pc.a for pc in self.pieces]
        self._anti = [pc.poly.integ(lbnd=pc.a) for pc in self.pieces]
        cum = [0.0]
        for pc, anti in zip(self.pieces, self._anti):
            cum.append(cum[-1] + float(anti(pc.b)))
        self._cum = cum

    @property
    def reference(self) -> ReferenceMeasure:
        return ReferenceMeasure("lebesgue", self.support)

    @property
    def lo(self) -> float:
        return self.support[0][0]

    @property
    def hi(self) -> float:
        return self.support[-1][1]

    def breakpoints(self) -> list[float]:
        pts = {x for iv in self.support for x in iv}
        pts.update(x for pc in self.pieces for x in (pc.a, pc.b))
        return sorted(pts)

    def cdf(self, x: float) -> float:
        """Mass of ``(-inf, x)``."""
        i = bisect.bisect_right(self._starts, x) - 1
        if i < 0:
            return 0.0
        pc = self.pieces[i]
        if x >= pc.b:
            return self._cum[i + 1]
        return self._cum[i] + float(self._anti[i](x))

    def cdf_many(self, xs) -> np.ndarray:
        """Vectorised :meth:`cdf`."""
        xs = np.asarray(xs, dtype=float)
        out = np.zeros_like(xs)
        idx = np.searchsorted(self._starts, xs, side="right") - 1
        for i, (pc, anti) in enumerate(zip(self.pieces, self._anti)):
            sel = idx == i
            if not np.any(sel):
                continue
            x = xs[sel]
            inside = x < pc.b
            val = np.full(x.shape, self._cum[i + 1])
            val[inside] = self._cum[i] + anti(x[inside])
            out[sel] = val
        return out

    def pdf(self, x: float) -> float:
        i = bisect.bisect_right(self._starts, x) - 1
        if i < 0:
            return 0.0
        pc = self.pieces[i]
        if x > pc.b:
            return 0.0
        return max(float(pc.poly(x)), 0.0)

    def total_mass(self) -> float:
        return self._cum[-1]

    def __repr__(self):
        return f"DensityMeasure(support={self.support}, pieces={len(self.pieces)})"


ProbabilityMeasure = Union[DiscreteMeasure, DensityMeasure]


# ---------------------------------------------------------------------------
# constructors


def discrete(masses: Sequence[float] | dict, labels: Sequence[str] | None = None,
             tolerance: float = DEFAULT_TOLERANCE) -> DiscreteMeasure:
    if isinstance(masses, dict):
        labels, masses = list(masses.keys()), list(masses.values())
    if labels is None:
        labels = [f"a{i + 1}" for i in range(len(masses))]
    if len(labels) != len(masses):
        raise MeasureError("labels and masses differ in length")
    m = DiscreteMeasure(tuple(str(x) for x in labels), tuple(float(x) for x in masses), tolerance)
    ReferenceMeasure("counting", m.labels)
    return m


def density(pieces: Sequence[tuple[float, float, Sequence[float]]],
            support: Sequence[tuple[float, float]] | None = None,
            tolerance: float = DEFAULT_TOLERANCE) -> DensityMeasure:
    """Density from ``(a, b, coeffs)`` triples; ``coeffs`` ascending in ``x``."""
    built = []
    for a, b, coeffs in pieces:
        poly = Polynomial(np.asarray(coeffs, dtype=float)).convert(domain=[a, b])
        built.append(Piece(float(a), float(b), poly))
    if support is None:
        support = merge_intervals((p.a, p.b) for p in built)
    return DensityMeasure(support, built, tolerance)


def uniform(a: float = 0.0, b: float = 1.0, tolerance: float = DEFAULT_TOLERANCE) -> DensityMeasure:
    return density([(a, b, [1.0 / (b - a)])], tolerance=tolerance)


def beta(alpha: int, beta_: int, lo: float = 0.0, hi: float = 1.0,
         tolerance: float = DEFAULT_TOLERANCE) -> DensityMeasure:
    """Beta density with integer shape parameters, rescaled to ``[lo, hi]``."""
    if int(alpha) != alpha or int(beta_) != beta_ or alpha < 1 or beta_ < 1:
        raise MeasureError("beta densities need integer shape parameters >= 1")
    alpha, beta_ = int(alpha), int(beta_)
    norm = math.factorial(alpha + beta_ - 1) / (math.factorial(alpha - 1) * math.factorial(beta_ - 1))
    t = Polynomial([0.0, 1.0], domain=[lo, hi], window=[0.0, 1.0])
    poly = norm / (hi - lo) * t ** (alpha - 1) * (1 - t) ** (beta_ - 1)
    poly = poly.convert(domain=[lo, hi])
    return DensityMeasure([(lo, hi)], [Piece(float(lo), float(hi), poly)], tolerance)


def truncated_normal(mu: float, sigma: float, lo: float, hi: float, degree: int = 16,
                     tolerance: float = DEFAULT_TOLERANCE) -> DensityMeasure:
    """Gaussian truncated to ``[lo, hi]``, compiled to Chebyshev fits of width <= sigma."""
    n = max(1, math.ceil((hi - lo) / sigma))
    edges = np.linspace(lo, hi, n + 1)
    f = lambda x: np.exp(-0.5 * ((x - mu) / sigma) ** 2)
    polys = []
    for a, b in zip(edges[:-1], edges[1:]):
        cheb = Chebyshev.interpolate(f, degree, domain=[a, b])
        polys.append((float(a), float(b), cheb.convert(kind=Polynomial, domain=[a, b])))
    raw = DensityMeasure([(lo, hi)], [Piece(a, b, p.convert(domain=[a, b])) for a, b, p in polys], tolerance)
    total = raw.total_mass()
    pieces = [Piece(pc.a, pc.b, pc.poly / total) for pc in raw.pieces]
    return DensityMeasure([(lo, hi)], pieces, tolerance)


# ---------------------------------------------------------------------------
# operations


def validate_measure(m: ProbabilityMeasure) -> ProbabilityMeasure:
    """Return ``m`` unchanged if it is a probability measure, else raise."""
    if isinstance(m, DiscreteMeasure):
        for label, w in zip(m.labels, m.masses):
            if w < 0 or not math.isfinite(w):
                raise NegativeDensity(label)
    else:
        for pc in m.pieces:
            coef = pc.coef
            grid = np.linspace(-1.0, 1.0, 257)
            vals = np.polynomial.polynomial.polyval(grid, coef)
            scale = max(1.0, float(np.max(np.abs(vals))))
            k = int(np.argmin(vals))
            if vals[k] < -1e-12 * scale:
                x = pc.a + (grid[k] + 1.0) * 0.5 * (pc.b - pc.a)
                raise NegativeDensity(float(x))
    total = m.total_mass()
    if abs(total - 1.0) > m.tolerance:
        raise NotNormalized(total)
    return m


def cell_mass(m: ProbabilityMeasure, c: Cell) -> float:
    if isinstance(m, DiscreteMeasure):
        if not c.is_discrete:
            raise CellOutsideSupport("interval cell applied to a discrete measure")
        return math.fsum(m.mass_of(label) for label in sorted(c.atoms, key=str))
    if c.is_discrete:
        raise CellOutsideSupport("atom cell applied to a density measure")
    total = 0.0
    for a, b in c.intervals:
        if not (math.isfinite(a) and math.isfinite(b)) or b < a:
            raise CellOutsideSupport(f"bad interval [{a}, {b}]")
        total += m.cdf(b) - m.cdf(a)
    return max(total, 0.0)


def _check_shared(P, R):
    if type(P) is not type(R):
        raise MismatchedReference("P and R live on different reference measures")


def aligned_masses(P: DiscreteMeasure, R: DiscreteMeasure) -> tuple[list, list, list]:
    """Labels of both measures (P's order first) with masses, zero where absent."""
    _check_shared(P, R)
    labels = list(P.labels) + [x for x in R.labels if x not in set(P.labels)]
    pd, rd = P.as_dict(), R.as_dict()
    return labels, [pd.get(x, 0.0) for x in labels], [rd.get(x, 0.0) for x in labels]


@dataclass(frozen=True)
class Segment:
    """Interval on which both densities are single polynomials (local coefficients)."""

    a: float
    b: float
    p: tuple
    r: tuple

    def p_at(self, x: float) -> float:
        return max(_poly.horner(self.p, _poly.to_u(x, self.a, self.b)), 0.0)

    def r_at(self, x: float) -> float:
        return max(_poly.horner(self.r, _poly.to_u(x, self.a, self.b)), 0.0)


def _piece_on(m: DensityMeasure, a: float, b: float):
    mid = 0.5 * (a + b)
    i = bisect.bisect_right(m._starts, mid) - 1
    if i >= 0 and m.pieces[i].a <= a and b <= m.pieces[i].b:
        return m.pieces[i]
    return None


def common_segments(P: DensityMeasure, R: DensityMeasure) -> list[Segment]:
    """Split the hull of both supports at every piece boundary of either measure."""
    _check_shared(P, R)
    return list(_segments(P, R))


@functools.lru_cache(maxsize=128)
def _segments(P: DensityMeasure, R: DensityMeasure) -> tuple[Segment, ...]:
    # measures are immutable and hash by identity, so the pair is a safe key
    pts = sorted(set(P.breakpoints()) | set(R.breakpoints()))
    segs = []
    for a, b in zip(pts[:-1], pts[1:]):
        coefs = []
        for m in (P, R):
            pc = _piece_on(m, a, b)
            coefs.append(tuple(_poly.local_coef(pc.poly, a, b)) if pc is not None else (0.0,))
        segs.append(Segment(a, b, coefs[0], coefs[1]))
    return tuple(segs)


def check_absolute_continuity(P: ProbabilityMeasure, R: ProbabilityMeasure) -> Cell | None:
    """``None`` when P << R, otherwise the largest cell with P-mass > 0 and R-mass 0."""
    if isinstance(P, DiscreteMeasure):
        labels, p, r = aligned_masses(P, R)
        bad = [x for x, pw, rw in zip(labels, p, r) if pw > 0 and rw == 0]
        return Cell.of_atoms(bad) if bad else None
    _check_shared(P, R)
    null = []
    for s in common_segments(P, R):
        if _poly.is_zero(s.r):
            null.append((s.a, s.b))
    null = merge_intervals(null)
    witness = [iv for iv in null if cell_mass(P, Cell.interval(*iv)) > 0]
    return Cell.of_intervals(witness) if witness else None


class DensityEvaluator:
    """Pointwise ``phi = dP/dR``; zero where both densities vanish."""

    def __init__(self, P, R):
        self.P, self.R = P, R
        self.discrete = isinstance(P, DiscreteMeasure)
        if self.discrete:
            labels, p, r = aligned_masses(P, R)
            self.labels = labels
            self.values = {x: (pw / rw if rw > 0 else (0.0 if pw == 0 else math.inf))
                           for x, pw, rw in zip(labels, p, r)}
        else:
            self.segments = common_segments(P, R)
            self._starts = [s.a for s in self.segments]
            self.lo = self.segments[0].a
            self.hi = self.segments[-1].b

    def segment_at(self, x: float) -> Segment | None:
        i = bisect.bisect_right(self._starts, x) - 1
        if i < 0 or x > self.hi:
            return None
        return self.segments[i]

    def __call__(self, x) -> float:
        if self.discrete:
            return self.values[x]
        s = self.segment_at(x)
        if s is None:
            return 0.0
        return ratio(s.p_at(x), s.r_at(x))

    def level_of_cell(self, c: Cell) -> float:
        """Mean level ``P(c) / R(c)`` of the cell."""
        rm = cell_mass(self.R, c)
        return cell_mass(self.P, c) / rm if rm > 0 else 0.0


def ratio(p: float, r: float) -> float:
    if r > 0:
        return p / r
    return 0.0 if p == 0 else math.inf


def rn_derivative(P: ProbabilityMeasure, R: ProbabilityMeasure) -> DensityEvaluator:
    _check_shared(P, R)
    witness = check_absolute_continuity(P, R)
    if witness is not None:
        raise NotAbsolutelyContinuous(witness)
    return DensityEvaluator(P, R)


def domain_of(P: ProbabilityMeasure, R: ProbabilityMeasure):
    """Whole space of a pair: atom labels, or the hull interval of both supports."""
    if isinstance(P, DiscreteMeasure):
        return aligned_masses(P, R)[0]
    _check_shared(P, R)
    return (min(P.lo, R.lo), max(P.hi, R.hi))
