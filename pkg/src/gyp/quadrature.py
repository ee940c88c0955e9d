"""Deterministic quadrature over the common segments of a pair of densities."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .measures import Cell, DensityMeasure, Segment, common_segments, intersect_intervals

METHODS = ("exact-piecewise", "adaptive-simpson")


class QuadratureDidNotConverge(ArithmeticError):
    def __init__(self, depth: int, where=None):
        super().__init__(f"adaptive Simpson hit max depth {depth} near {where}")
        self.depth = depth
        self.where = where


@dataclass(frozen=True)
class QuadratureConfig:
    method: str = "exact-piecewise"
    abs_tol: float = 1e-10
    max_depth: int = 40

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")

    @classmethod
    def from_env(cls, **kw) -> "QuadratureConfig":
        tol = os.environ.get("GYP_QUAD_TOL")
        if tol is not None and "abs_tol" not in kw:
            kw["abs_tol"] = float(tol)
        return cls(**kw)

    @property
    def exact(self) -> bool:
        return self.method == "exact-piecewise"


DEFAULT = QuadratureConfig()


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-10, max_depth: int = 40, initial: int = 8) -> float:
    """Integrate ``f`` on ``[a, b]`` to absolute tolerance ``tol``.

    Endpoints are nudged inward by one ulp so integrands with removable
    singularities at the boundary are never sampled there.
    """
    if b <= a:
        return 0.0
    lo, hi = math.nextafter(a, b), math.nextafter(b, a)

    def g(x):
        return f(min(max(x, lo), hi))

    edges = np.linspace(a, b, initial + 1)
    parts = []
    stack = []
    for x0, x1 in zip(edges[:-1], edges[1:]):
        x0, x1 = float(x0), float(x1)
        xm = 0.5 * (x0 + x1)
        f0, fm, f1 = g(x0), g(xm), g(x1)
        whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1)
        stack.append((x0, x1, f0, fm, f1, whole, tol / initial, 0))
    stack.reverse()
    while stack:
        x0, x1, f0, fm, f1, whole, eps, depth = stack.pop()
        xm = 0.5 * (x0 + x1)
        xl, xr = 0.5 * (x0 + xm), 0.5 * (xm + x1)
        fl, fr = g(xl), g(xr)
        left = (xm - x0) / 6.0 * (f0 + 4.0 * fl + fm)
        right = (x1 - xm) / 6.0 * (fm + 4.0 * fr + f1)
        delta = left + right - whole
        if abs(delta) <= 15.0 * eps or xm <= x0 or xm >= x1:
            parts.append(left + right + delta / 15.0)
            continue
        if depth + 1 >= max_depth:
            raise QuadratureDidNotConverge(max_depth, (x0, x1))
        stack.append((xm, x1, fm, fr, f1, right, eps / 2.0, depth + 1))
        stack.append((x0, xm, f0, fl, fm, left, eps / 2.0, depth + 1))
    return math.fsum(parts)


def _clip(segments: list[Segment], cell: Cell | None) -> list[tuple[Segment, float, float]]:
    if cell is None:
        return [(s, s.a, s.b) for s in segments]
    out = []
    for s in segments:
        for a, b in intersect_intervals([(s.a, s.b)], list(cell.intervals)):
            out.append((s, a, b))
    return out


def integrate_pair(P: DensityMeasure, R: DensityMeasure,
                   integrand: Callable[[float, float], float],
                   cfg: QuadratureConfig = DEFAULT, cell: Cell | None = None,
                   exact: Callable[[Segment, float, float], float | None] | None = None) -> float:
    """Integrate ``integrand(p(x), r(x)) dx`` over ``cell`` (default: everywhere).

    ``exact(segment, a, b)`` may return a closed-form value for a sub-interval,
    or ``None`` to fall back to adaptive Simpson.
    """
    pieces = _clip(common_segments(P, R), cell)
    total = []
    n = max(1, len(pieces))
    for seg, a, b in pieces:
        if cfg.exact and exact is not None:
            v = exact(seg, a, b)
            if v is not None:
                total.append(v)
                continue
        f = lambda x, s=seg: integrand(s.p_at(x), s.r_at(x))
        total.append(adaptive_simpson(f, a, b, cfg.abs_tol / n, cfg.max_depth))
    return math.fsum(total)


# closed forms on a segment ---------------------------------------------------


def poly_integral(coef, seg: Segment, a: float, b: float) -> float:
    """Exact integral over ``[a, b]`` of a polynomial given in ``seg``'s local variable."""
    anti = np.polynomial.polynomial.polyint(coef)
    ua = (2.0 * a - seg.a - seg.b) / (seg.b - seg.a)
    ub = (2.0 * b - seg.a - seg.b) / (seg.b - seg.a)
    half = 0.5 * (seg.b - seg.a)
    pv = np.polynomial.polynomial.polyval
    return float(half * (pv(ub, anti) - pv(ua, anti)))


def poly_power(coef, k: int) -> np.ndarray:
    return np.polynomial.polynomial.polypow(np.asarray(coef, dtype=float), k)


def constant_value(coef) -> float | None:
    c = np.trim_zeros(np.asarray(coef, dtype=float), "b")
    if c.size == 0:
        return 0.0
    if c.size == 1:
        return float(c[0])
    return None


def proportional(p, r) -> float | None:
    """``c`` such that ``p == c * r`` coefficientwise, if one exists."""
    p = np.trim_zeros(np.asarray(p, dtype=float), "b")
    r = np.trim_zeros(np.asarray(r, dtype=float), "b")
    if p.size == 0:
        return 0.0
    if r.size == 0 or p.size != r.size:
        return None
    k = int(np.argmax(np.abs(r)))
    c = p[k] / r[k]
    if np.allclose(p, c * r, rtol=1e-14, atol=1e-15 * float(np.max(np.abs(p)))):
        return float(c)
    return None
