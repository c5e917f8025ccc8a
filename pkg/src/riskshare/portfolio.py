"""The pooled-investment problem: how much of a group's wealth to put at risk.

A manager invests a proportion ``λ`` in a risky payoff ``X >= 0`` at cost
``c(λ)`` and shares ``W + λX - c(λ)`` among agents with distortion curves
``h_i``. The optimal group risk is ``-λ ρ(X) + c(λ) - W`` for a
representative distortion ``ρ``, so ``λ* = min(c'^{-1}(ρ(X)), budget)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from .convolution import convolution_curve, normalized_sup_dual
from .distortion import DistortionCurve, DualPower, PiecewiseLinear, combine, require_in_h, unit_grid
from .errors import ConeError, DomainError, RegimeError
from .measures import Distribution, Uniform, riskmetric


@dataclass(frozen=True)
class CostFunction:
    """Increasing convex cost ``c`` with derivative and inverse evaluators."""

    c: Callable[[float], float]
    c_prime: Callable[[float], float]
    c_prime_inverse: Callable[[float], float]
    c_inverse: Callable[[float], float] | None = None
    name: str = "custom"

    def inverse(self, w: float) -> float:
        if self.c_inverse is not None:
            return self.c_inverse(w)
        # c is increasing; solve c(λ) = w on a growing bracket
        hi = 1.0
        while self.c(hi) < w:
            hi *= 2.0
        return optimize.brentq(lambda lam: self.c(lam) - w, 0.0, hi, xtol=1e-14)


def quadratic_cost() -> CostFunction:
    """``c(λ) = λ²/2``."""
    return CostFunction(
        c=lambda lam: 0.5 * lam * lam,
        c_prime=lambda lam: lam,
        c_prime_inverse=lambda y: y,
        c_inverse=lambda w: math.sqrt(2.0 * w),
        name="quadratic",
    )


@dataclass(frozen=True)
class PortfolioSolution:
    lambda_star: float
    regime: str  # concave_group | convex_group
    representative: DistortionCurve = field(repr=False)
    rho_value: float
    budget_bound: float
    unclamped: float
    clamped: bool

    def objective(self, cost: CostFunction, wealth: float, lam: float | None = None) -> float:
        lam = self.lambda_star if lam is None else lam
        return -lam * self.rho_value + cost.c(lam) - wealth


def representative_curve(hs: Sequence[DistortionCurve]) -> tuple[str, DistortionCurve]:
    """Group distortion: dual of the pointwise minimum (concave), or the normalized sup-convolution of duals (convex)."""
    hs = tuple(hs)
    if not hs:
        raise DomainError("need at least one curve")
    for i, h in enumerate(hs):
        require_in_h(h, f"curve {i}")
    if all(h.flags.concave for h in hs):
        return "concave_group", combine(hs, "pointwise_min").dual()
    if all(h.flags.convex and h.flags.continuous for h in hs):
        return "convex_group", normalized_sup_dual(hs)
    raise RegimeError("mixed risk-averse and risk-seeking groups are not covered")


def optimal_lambda(
    hs: Sequence[DistortionCurve],
    d: Distribution,
    wealth: float,
    cost: CostFunction | None = None,
    strict_budget: bool = False,
) -> PortfolioSolution:
    """Optimal risky proportion.

    The budget term is ``c'^{-1}(W)`` by default; ``strict_budget=True``
    uses ``c^{-1}(W)``, the largest ``λ`` satisfying ``c(λ) <= W``.
    """
    cost = cost or quadratic_cost()
    if wealth < 0:
        raise DomainError("wealth must be nonnegative")
    if d.lower < 0:
        raise ConeError("the risky payoff must be nonnegative")
    regime, rep = representative_curve(hs)
    rho = riskmetric(rep, d)
    budget = cost.inverse(wealth) if strict_budget else cost.c_prime_inverse(wealth)
    raw = min(cost.c_prime_inverse(rho), budget)
    lam = min(max(raw, 0.0), 1.0)
    return PortfolioSolution(lam, regime, rep, rho, budget, raw, lam != raw)


# -- comparative statics --------------------------------------------------------


def concave_example_family(alpha: float) -> tuple:
    """``1 - (1-x)^{2α}`` and ``1 - (1-x)^{3α}``; concave for ``α >= 1/2``."""
    return (DualPower(2.0 * alpha), DualPower(3.0 * alpha))


def convex_example_family(alpha: float) -> tuple:
    """``1 - (1-x)^{0.2α}`` and ``1 - (1-x)^{0.3α}``; convex for ``0 < α <= 10/3``."""
    return (DualPower(0.2 * alpha), DualPower(0.3 * alpha))


def crossing_example_groups() -> tuple[tuple, tuple]:
    """Two convex pairs of ramps ``(a x - (a - 1)) ∨ 0`` whose normalized sup-convolutions cross."""
    hs = (PiecewiseLinear.ramp(1.24, 0.24), PiecewiseLinear.ramp(1.10, 0.10))
    gs = (PiecewiseLinear.ramp(1.36, 0.36), PiecewiseLinear.ramp(1.21, 0.21))
    return hs, gs


def comparative_sweep(
    family: Callable[[float], Sequence[DistortionCurve]],
    alphas: Sequence[float],
    d: Distribution | None = None,
    wealth: float = 1.0,
    cost: CostFunction | None = None,
) -> list[tuple[float, float]]:
    """Rows ``(alpha, lambda_star)`` in the order of ``alphas``."""
    d = d or Uniform(0.0, 1.0)
    return [(float(a), optimal_lambda(family(a), d, wealth, cost).lambda_star) for a in alphas]


def crossing_points(hs: Sequence[DistortionCurve], gs: Sequence[DistortionCurve], grid_n: int = 1001) -> list[float]:
    """Interior points where ``f_g - f_h`` changes sign, refined to 1e-6 or better."""
    fh, fg = normalized_sup_dual(hs), normalized_sup_dual(gs)
    diff = lambda t: float(fg.at(t)) - float(fh.at(t))  # noqa: E731
    ts = unit_grid(grid_n)
    vals = fg.at(ts) - fh.at(ts)
    sgn = np.where(np.abs(vals) <= 1e-12, 0, np.sign(vals)).astype(int)
    out = []
    last_k, last_s = None, 0
    for k in range(1, grid_n - 1):
        if sgn[k] == 0:
            continue
        if last_s != 0 and sgn[k] != last_s:
            a, b = ts[last_k], ts[k]
            root = optimize.brentq(diff, a, b, xtol=1e-12) if diff(a) * diff(b) < 0 else 0.5 * (a + b)
            out.append(float(root))
        last_k, last_s = k, sgn[k]
    return out


# -- figure data ----------------------------------------------------------------


def _sweep_grid(start: float, stop: float, step: float) -> np.ndarray:
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)


def figure_data(which: int, grid_n: int = 101) -> tuple[list[str], list[tuple]]:
    """Columns and rows for the four figures.

    1: λ* for the concave family over α in [0.5, 3].
    2: λ* for the convex family over α in [0.1, 3].
    3: sup-convolutions of duals and their normalized forms, convex family at α = 2 (h) and α = 1 (g).
    4: the same comparison for the ramp pairs.
    """
    if which == 1:
        rows = comparative_sweep(concave_example_family, _sweep_grid(0.5, 3.0, 0.05))
        return ["alpha", "lambda_star"], rows
    if which == 2:
        rows = comparative_sweep(convex_example_family, _sweep_grid(0.1, 3.0, 0.05))
        return ["alpha", "lambda_star"], rows
    if which in (3, 4):
        if which == 3:
            hs, gs = convex_example_family(2.0), convex_example_family(1.0)
        else:
            hs, gs = crossing_example_groups()
        sh = convolution_curve([h.dual() for h in hs], "sup")
        sg = convolution_curve([g.dual() for g in gs], "sup")
        fh, fg = normalized_sup_dual(hs), normalized_sup_dual(gs)
        ts = unit_grid(grid_n)
        cols = [ts, sh.at(ts), sg.at(ts), fh.at(ts), fg.at(ts)]
        cols.append(cols[4] - cols[3])
        rows = [tuple(float(c[k]) for c in cols) for k in range(grid_n)]
        return ["x", "sup_h", "sup_g", "f_h", "f_g", "f_g_minus_f_h"], rows
    raise DomainError(f"no figure {which!r}")
