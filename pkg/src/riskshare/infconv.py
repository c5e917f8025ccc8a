"""Inf-convolutions of distortion risk measures over three allocation sets.

* unconstrained: all allocations of the aggregate loss;
* comonotonic: allocations whose pieces move together;
* counter-monotonic: allocations whose pieces move against each other.

Each entry point classifies the group of curves and returns a
:class:`ShareResult` with the value, the regime that produced it, and an
optimal allocation whenever one is known in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .allocation import Composition, DiscreteAllocation, JackpotAllocation, jackpot_allocation
from .convolution import convolution_curve
from .distortion import (
    DistortionCurve,
    Dual,
    EsCap,
    Envelope,
    VarIndicator,
    classify,
    combine,
    is_dually_subadditive,
    is_identity,
    lower_convex_envelope,
    require_in_h,
)
from .errors import ConeError, DivergenceError, DomainError, RegimeError, ShapeError
from .measures import Distribution, es, negate, riskmetric, var

REGIMES = ("all_concave_with_min", "all_concave", "all_convex", "var_family", "es_family", "generic_bound")

Allocation = Union[Composition, JackpotAllocation, int, None]


@dataclass(frozen=True)
class ShareResult:
    value: float
    regime: str
    allocation: Allocation = None
    curve: DistortionCurve | None = None
    bounds: tuple = (-math.inf, math.inf)

    @property
    def exact(self) -> bool:
        return self.regime != "generic_bound"


def _group(hs: Sequence[DistortionCurve]) -> tuple:
    hs = tuple(hs)
    if not hs:
        raise DomainError("need at least one curve")
    for i, h in enumerate(hs):
        require_in_h(h, f"curve {i}")
    return hs


def _one_signed(d: Distribution) -> str:
    if d.lower >= 0:
        return "nonnegative"
    if d.upper <= 0:
        return "nonpositive"
    return "general"


def _all_convex(hs) -> bool:
    return all(h.flags.convex and h.flags.continuous for h in hs)


def _min_curve(hs) -> Envelope:
    return combine(hs, "pointwise_min")


def allocation_risk(hs: Sequence[DistortionCurve], d: Distribution, allocation: Allocation) -> float:
    """``Σ_i ρ_{h_i}(piece_i)`` for an allocation returned by this module."""
    if isinstance(allocation, (int, np.integer)):
        return riskmetric(hs[int(allocation)], d)
    if isinstance(allocation, JackpotAllocation):
        return allocation.total_risk(d)
    if isinstance(allocation, Composition):
        # lottery over a constant loss: piece i is c·1_{A_i}
        c = d.lower
        if d.upper != c:
            raise DomainError("a composition allocates a constant loss only")
        if c >= 0:
            return c * math.fsum(float(h.at(p)) for h, p in zip(hs, allocation.probs))
        return c * math.fsum(float(h.dual().at(p)) for h, p in zip(hs, allocation.probs))
    raise DomainError("no allocation to evaluate")


# -- comonotonic --------------------------------------------------------------


def comonotonic_infconv(hs: Sequence[DistortionCurve], d: Distribution) -> ShareResult:
    """Comonotonic inf-convolution: always ``ρ_{∧h_i}(X)``."""
    hs = _group(hs)
    h = _min_curve(hs)
    value = riskmetric(h, d)
    j = h.attained_by()
    return ShareResult(value, _label(hs, h, j), j, h, (value, value))


def _label(hs, h, j) -> str:
    if all(isinstance(c, VarIndicator) for c in hs):
        return "var_family"
    if all(isinstance(c, EsCap) for c in hs):
        return "es_family"
    if h.flags.concave:
        return "all_concave_with_min" if j is not None else "all_concave"
    if _all_convex(hs):
        return "all_convex"
    return "generic_bound"


# -- counter-monotonic --------------------------------------------------------


def _convex_value(hs, d: Distribution) -> tuple[float, DistortionCurve]:
    """``ρ_g(X)`` for convex continuous curves on a one-signed loss.

    Nonnegative loss: ``g = □ h_i``. Nonpositive loss: ``g`` is the dual of
    ``◊ h~_i`` and ``ρ_g(X) = -ρ_{◊ h~_i}(-X)``.
    """
    cone = _one_signed(d)
    if cone == "nonnegative":
        g = convolution_curve(hs, "inf")
        return riskmetric(g, d), g
    if cone == "nonpositive":
        sup = convolution_curve([c.dual() for c in hs], "sup")
        return -riskmetric(sup, negate(d)), Dual(sup)
    raise ConeError("convex groups need a nonnegative or nonpositive loss")


def _var_value(hs, d: Distribution) -> float:
    total = math.fsum(c.alpha for c in hs)
    if total >= 1.0:
        raise RegimeError(f"VaR levels sum to {total:g}; the closed form needs a sum below 1")
    return var(d, total)


def _lower_bound(hs, d: Distribution) -> float:
    """Unconstrained lower bound from the convexified curves (``-inf`` off the cones)."""
    if _one_signed(d) == "general":
        return -math.inf
    hulls = [lower_convex_envelope(h) for h in hs]
    try:
        return _convex_value(hulls, d)[0]
    except DivergenceError:
        return -math.inf


def countermonotonic_infconv(hs: Sequence[DistortionCurve], d: Distribution) -> ShareResult:
    """Counter-monotonic inf-convolution.

    Dispatch: VaR groups use the summed level; convex continuous groups the
    function inf-convolution (jackpot allocation); a dually subadditive
    pointwise minimum attained by one agent hands that agent everything.
    Anything else gets a bracket whose upper end is the best single-agent
    allocation, itself counter-monotonic.
    """
    hs = _group(hs)
    if all(isinstance(c, VarIndicator) for c in hs):
        v = _var_value(hs, d)
        return ShareResult(v, "var_family", None, VarIndicator(math.fsum(c.alpha for c in hs)), (v, v))
    h = _min_curve(hs)
    j = h.attained_by()
    if all(isinstance(c, EsCap) for c in hs):
        v = riskmetric(hs[j], d)
        return ShareResult(v, "es_family", j, hs[j], (v, v))
    if _all_convex(hs):
        v, g = _convex_value(hs, d)
        return ShareResult(v, "all_convex", jackpot_allocation(hs, d), g, (v, v))
    if j is not None and is_dually_subadditive(h):
        v = riskmetric(h, d)
        return ShareResult(v, "all_concave_with_min", j, hs[j], (v, v))
    singles = [riskmetric(c, d) for c in hs]
    best = int(np.argmin(singles))
    upper = singles[best]
    lower = _lower_bound(hs, d)
    if is_dually_subadditive(h):
        lower = max(lower, riskmetric(h, d))
    return ShareResult(upper, "generic_bound", best, hs[best], (lower, upper))


# -- unconstrained ------------------------------------------------------------


def unconstrained_infconv(hs: Sequence[DistortionCurve], d: Distribution) -> ShareResult:
    """Inf-convolution over all allocations."""
    hs = _group(hs)
    if all(isinstance(c, VarIndicator) for c in hs):
        v = _var_value(hs, d)
        return ShareResult(v, "var_family", None, VarIndicator(math.fsum(c.alpha for c in hs)), (v, v))
    h = _min_curve(hs)
    j = h.attained_by()
    if h.flags.concave or classify(h).concave:
        v = riskmetric(h, d)
        regime = "es_family" if all(isinstance(c, EsCap) for c in hs) else (
            "all_concave_with_min" if j is not None else "all_concave"
        )
        return ShareResult(v, regime, j, h, (v, v))
    if _all_convex(hs):
        if _one_signed(d) == "general":
            raise DivergenceError("convex non-linear groups have inf-convolution -inf on two-sided losses")
        v, g = _convex_value(hs, d)
        return ShareResult(v, "all_convex", jackpot_allocation(hs, d), g, (v, v))
    upper = riskmetric(h, d)
    lower = _lower_bound(hs, d)
    return ShareResult(upper, "generic_bound", j, h, (lower, upper))


def es_group_value(betas: Sequence[float], d: Distribution) -> float:
    """Common value of all three inf-convolutions of ``ES_{β_i}``."""
    return es(d, max(betas))


# -- divergence certificate ---------------------------------------------------


def divergence_certificate(hs: Sequence[DistortionCurve], m: float) -> tuple[DiscreteAllocation, float]:
    """Allocation of the zero loss whose total risk is at most ``n(θ-1)m < 0``.

    ``X_i = n·m·1_{A_i} - m`` over ``n`` equally likely events, ``θ = n·h(1/n)``
    for the pointwise maximum ``h``. Each piece has ``ρ_h(X_i) = (θ - 1)m``, so
    the group total is bounded by ``n(θ - 1)m``, which is unbounded below in ``m``.
    """
    hs = _group(hs)
    for i, h in enumerate(hs):
        if not h.flags.convex:
            raise ShapeError(f"curve {i} must be convex")
        if is_identity(h):
            raise ShapeError(f"curve {i} is the identity; no divergence")
    m = float(m)
    if m < 0:
        raise DomainError("m must be nonnegative")
    n = len(hs)
    theta = n * float(combine(hs, "pointwise_max").at(1.0 / n))
    payoffs = np.full((n, n), -m)
    payoffs[np.arange(n), np.arange(n)] = (n - 1) * m
    alloc = DiscreteAllocation(tuple([1.0 / n] * n), payoffs)
    return alloc, n * (theta - 1.0) * m


def certificate_theta(hs: Sequence[DistortionCurve]) -> float:
    n = len(hs)
    return n * float(combine(tuple(hs), "pointwise_max").at(1.0 / n))
