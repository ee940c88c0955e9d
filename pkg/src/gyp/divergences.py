"""Integral definitions of Shannon, Renyi and Tsallis entropies and relative entropies.

Everything is in nats. Continuous integrals use closed forms wherever the
integrand is a polynomial on a segment (or ``dP/dR`` is constant there) and
adaptive Simpson otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


from .extended import INF, ext_log, xlogx_ratio
from .measures import (
    Cell,
    DiscreteMeasure,
    NotAbsolutelyContinuous,
    ProbabilityMeasure,
    Segment,
    aligned_masses,
    check_absolute_continuity,
)
from .quadrature import (
    DEFAULT,
    QuadratureConfig,
    constant_value,
    integrate_pair,
    poly_integral,
    poly_power,
    proportional,
)

FAMILIES = ("kl", "renyi", "tsallis")


class OrderError(ValueError):
    pass


class DomainError(ValueError):
    pass


class NonPositiveArgument(DomainError):
    pass


@dataclass(frozen=True)
class OrderParam:
    """Divergence family and its order (``None`` for KL)."""

    family: str
    order: float | None = None

    def __post_init__(self):
        fam = self.family.lower()
        object.__setattr__(self, "family", fam)
        if fam not in FAMILIES:
            raise OrderError(f"unknown family {self.family!r}")
        if fam == "kl":
            if self.order is not None and self.order != 1:
                raise OrderError("KL takes no order")
            object.__setattr__(self, "order", None)
            return
        if self.order is None:
            raise OrderError(f"{fam} needs an order")
        order = float(self.order)
        if not order > 0 or not math.isfinite(order):
            raise OrderError(f"order must be positive, got {order}")
        if order == 1.0:
            raise OrderError("order 1 is the KL limit; use family 'kl'")
        object.__setattr__(self, "order", order)

    @classmethod
    def kl(cls) -> "OrderParam":
        return cls("kl")

    @classmethod
    def renyi(cls, alpha: float) -> "OrderParam":
        return cls("renyi", alpha)

    @classmethod
    def tsallis(cls, q: float) -> "OrderParam":
        return cls("tsallis", q)


def _order(value, family: str) -> float:
    if isinstance(value, OrderParam):
        if value.family != family:
            raise OrderError(f"expected a {family} order, got {value.family}")
        return value.order
    return OrderParam(family, value).order


def _is_int(x: float) -> bool:
    return float(x).is_integer()


# ---------------------------------------------------------------------------
# q-logarithm and the Renyi <-> Tsallis map


def q_log(x: float, q: float) -> float:
    if not x > 0:
        raise NonPositiveArgument(f"q-logarithm needs x > 0, got {x}")
    if q == 1:
        return math.log(x)
    return (x ** (1.0 - q) - 1.0) / (1.0 - q)


def renyi_to_tsallis(v: float, q: float) -> float:
    q = _order(q, "tsallis")
    if v == INF:
        return INF
    return math.expm1((q - 1.0) * v) / (q - 1.0)


def tsallis_to_renyi(v: float, q: float) -> float:
    q = _order(q, "tsallis")
    if v == INF:
        return INF
    arg = (q - 1.0) * v
    if not 1.0 + arg > 0:
        raise DomainError(f"1 + (q-1) v = {1.0 + arg} is not positive")
    return math.log1p(arg) / (q - 1.0)


# ---------------------------------------------------------------------------
# the power integral int phi^alpha dR, shared by Renyi, Tsallis and Hoelder checks


def _power_term(p: float, r: float, alpha: float) -> float:
    if p == 0:
        return 0.0
    if r == 0:
        return INF
    return p ** alpha * r ** (1.0 - alpha)


def _power_exact(alpha: float):
    def exact(seg: Segment, a: float, b: float):
        c = proportional(seg.p, seg.r)
        if c is not None:
            return c ** alpha * poly_integral(seg.r, seg, a, b) if c > 0 else 0.0
        rc = constant_value(seg.r)
        if _is_int(alpha) and rc is not None and rc > 0:
            return poly_integral(poly_power(seg.p, int(alpha)), seg, a, b) / rc ** (alpha - 1.0)
        return None
    return exact


def power_integral(P: ProbabilityMeasure, R: ProbabilityMeasure, alpha: float,
                   cfg: QuadratureConfig = DEFAULT, cell: Cell | None = None) -> float:
    """``int_cell (dP/dR)^alpha dR`` (whole space when ``cell`` is ``None``)."""
    if isinstance(P, DiscreteMeasure):
        labels, p, r = aligned_masses(P, R)
        keep = cell.atoms if cell is not None else set(labels)
        return math.fsum(_power_term(pw, rw, alpha) for x, pw, rw in zip(labels, p, r) if x in keep)
    return integrate_pair(P, R, lambda p, r: _power_term(p, r, alpha), cfg, cell, _power_exact(alpha))


# ---------------------------------------------------------------------------
# relative entropies


def kl_divergence(P: ProbabilityMeasure, R: ProbabilityMeasure,
                  cfg: QuadratureConfig = DEFAULT, form: str = "dP") -> float:
    """``int ln(dP/dR) dP`` (``form="dP"``) or ``int phi ln phi dR`` (``form="dR"``)."""
    if check_absolute_continuity(P, R) is not None:
        return INF
    if form == "dP":
        term = xlogx_ratio
    elif form == "dR":
        def term(p, r):
            if p == 0:
                return 0.0
            phi = p / r
            return phi * math.log(phi) * r
    else:
        raise ValueError(f"unknown form {form!r}")
    if isinstance(P, DiscreteMeasure):
        _, p, r = aligned_masses(P, R)
        return math.fsum(term(pw, rw) for pw, rw in zip(p, r))

    def exact(seg, a, b):
        c = proportional(seg.p, seg.r)
        if c is None:
            return None
        return c * math.log(c) * poly_integral(seg.r, seg, a, b) if c > 0 else 0.0

    return integrate_pair(P, R, term, cfg, exact=exact)


def renyi_divergence(P: ProbabilityMeasure, R: ProbabilityMeasure, alpha,
                     cfg: QuadratureConfig = DEFAULT) -> float:
    alpha = _order(alpha, "renyi")
    if check_absolute_continuity(P, R) is not None:
        return INF
    return ext_log(power_integral(P, R, alpha, cfg)) / (alpha - 1.0)


def tsallis_divergence(P: ProbabilityMeasure, R: ProbabilityMeasure, q,
                       cfg: QuadratureConfig = DEFAULT) -> float:
    q = _order(q, "tsallis")
    if check_absolute_continuity(P, R) is not None:
        return INF
    return (power_integral(P, R, q, cfg) - 1.0) / (q - 1.0)


def divergence(P, R, order: OrderParam, cfg: QuadratureConfig = DEFAULT) -> float:
    if order.family == "kl":
        return kl_divergence(P, R, cfg)
    if order.family == "renyi":
        return renyi_divergence(P, R, order, cfg)
    return tsallis_divergence(P, R, order, cfg)


# ---------------------------------------------------------------------------
# entropies
#
# Without ``base`` the reference is the measure's own counting / Lebesgue
# measure. With ``base`` (a probability measure) the density is dP/d(base)
# and the integrals are taken against dP.


def _require_ac(P, base):
    witness = check_absolute_continuity(P, base)
    if witness is not None:
        raise NotAbsolutelyContinuous(witness)


def _against_dP(P, base, g, cfg):
    """``int g(dP/d base) dP``."""
    def term(p, m):
        if p == 0:
            return 0.0
        return g(p / m) * p
    if isinstance(P, DiscreteMeasure):
        _, p, m = aligned_masses(P, base)
        return math.fsum(term(pw, mw) for pw, mw in zip(p, m))
    return integrate_pair(P, base, term, cfg)


def _self_integral(P, f, cfg, exact=None):
    """``int f(p) d(counting or Lebesgue)``."""
    if isinstance(P, DiscreteMeasure):
        return math.fsum(f(w) for w in P.masses)
    return integrate_pair(P, P, lambda p, _r: f(p), cfg, exact=exact)


def shannon_entropy(P: ProbabilityMeasure, cfg: QuadratureConfig = DEFAULT,
                    base: ProbabilityMeasure | None = None) -> float:
    if base is not None:
        _require_ac(P, base)
        return -_against_dP(P, base, math.log, cfg)

    def exact(seg, a, b):
        c = constant_value(seg.p)
        if c is None:
            return None
        return -xlogx_ratio(c, 1.0) * (b - a)

    return _self_integral(P, lambda p: -xlogx_ratio(p, 1.0), cfg, exact)


def _moment(P, k: float, cfg) -> float:
    """``int p^k`` against the measure's own reference."""
    def exact(seg, a, b):
        if _is_int(k):
            return poly_integral(poly_power(seg.p, int(k)), seg, a, b)
        c = constant_value(seg.p)
        return None if c is None else max(c, 0.0) ** k * (b - a)

    return _self_integral(P, lambda p: p ** k if p > 0 else 0.0, cfg, exact)


def renyi_entropy(P: ProbabilityMeasure, alpha, cfg: QuadratureConfig = DEFAULT,
                  base: ProbabilityMeasure | None = None) -> float:
    alpha = _order(alpha, "renyi")
    if base is not None:
        _require_ac(P, base)
        s = _against_dP(P, base, lambda phi: phi ** (alpha - 1.0), cfg)
    else:
        s = _moment(P, alpha, cfg)
    return ext_log(s) / (1.0 - alpha)


def tsallis_entropy(P: ProbabilityMeasure, q, cfg: QuadratureConfig = DEFAULT,
                    base: ProbabilityMeasure | None = None) -> float:
    q = _order(q, "tsallis")
    if base is not None:
        _require_ac(P, base)
        return _against_dP(P, base, lambda phi: q_log(1.0 / phi, q), cfg)
    return (1.0 - _moment(P, q, cfg)) / (q - 1.0)


def tsallis_entropy_qlog(P: ProbabilityMeasure, q, cfg: QuadratureConfig = DEFAULT) -> float:
    """Same quantity as :func:`tsallis_entropy`, integrated as ``int p ln_q(1/p)``."""
    q = _order(q, "tsallis")
    return _self_integral(P, lambda p: p * q_log(1.0 / p, q) if p > 0 else 0.0, cfg)


def entropy(P, order: OrderParam, cfg: QuadratureConfig = DEFAULT, base=None) -> float:
    if order.family == "kl":
        return shannon_entropy(P, cfg, base)
    if order.family == "renyi":
        return renyi_entropy(P, order, cfg, base)
    return tsallis_entropy(P, order, cfg, base)


def entropy_divergence_identity_check(P: ProbabilityMeasure, mu: ProbabilityMeasure,
                                      order: OrderParam, cfg: QuadratureConfig = DEFAULT) -> float:
    """Residual of ``S(P) = -I(P||mu)`` for a probability reference ``mu``.

    The entropy side is integrated against ``dP`` with density ``dP/dmu``, the
    divergence side against ``dmu``; the sign relation is the same for all
    three families.
    """
    s = entropy(P, order, cfg, base=mu)
    i = divergence(P, mu, order, cfg)
    return abs(s + i)
