"""Small polynomial utilities shared by the measure, quadrature and quantization code.

Polynomials are carried as ascending coefficient arrays in the local variable
``u = (2x - a - b) / (b - a)`` of the interval ``[a, b]`` they live on. That
keeps high-degree fits well conditioned and makes scalar evaluation a plain
Horner loop.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import brentq


def local_coef(poly: Polynomial, a: float, b: float) -> np.ndarray:
    """Coefficients of ``poly`` in the local variable of ``[a, b]``."""
    return np.asarray(poly.convert(domain=[a, b], window=[-1.0, 1.0]).coef, dtype=float)


def to_u(x: float, a: float, b: float) -> float:
    return (2.0 * x - a - b) / (b - a)


def horner(coef, u: float) -> float:
    acc = 0.0
    for c in reversed(coef):
        acc = acc * u + c
    return acc


def is_zero(coef) -> bool:
    return not np.any(np.asarray(coef) != 0.0)


def sign_change_roots(coef, lo: float = -1.0, hi: float = 1.0, xtol: float = 1e-15) -> list[float]:
    """Odd-multiplicity roots of the local polynomial strictly inside ``(lo, hi)``.

    Candidate locations come from the companion-matrix eigenvalues; every
    sign change between consecutive candidates is then polished by bracketing.
    """
    coef = np.trim_zeros(np.asarray(coef, dtype=float), "b")
    if coef.size <= 1:
        return []
    cand = np.polynomial.polynomial.polyroots(coef)
    real = sorted(
        float(z.real) for z in np.atleast_1d(cand)
        if abs(z.imag) <= 1e-7 * max(1.0, abs(z.real)) and lo < z.real < hi
    )
    knots = [lo] + real + [hi]
    samples = [lo]
    for k0, k1 in zip(knots[:-1], knots[1:]):
        if k1 > k0:
            samples.append(0.5 * (k0 + k1))
    samples.append(hi)
    values = [horner(coef, s) for s in samples]
    roots = []
    for (s0, v0), (s1, v1) in zip(zip(samples, values), zip(samples[1:], values[1:])):
        if v0 == 0.0 or v1 == 0.0 or (v0 > 0) == (v1 > 0):
            continue
        roots.append(brentq(lambda t: horner(coef, t), s0, s1, xtol=xtol))
    return roots
