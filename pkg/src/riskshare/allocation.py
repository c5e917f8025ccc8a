"""Optimal allocations: probability compositions, jackpot splits, and
counter-monotonic structure of discrete payoff matrices.

A jackpot allocation of ``X >= 0`` hands the whole loss to one agent, chosen
by a lottery whose odds may depend on the loss level. With weight functions
``f_i`` (nondecreasing, ``Σ f_i(t) = t``) the piece ``X·1_{A_i}`` has
survival ``P(X·1_{A_i} >= x) = f_i(P(X >= x))`` for ``x > 0``, so its risk is
``ρ_{h_i ∘ f_i}(X)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import optimize

from .convolution import convolution_weights
from .distortion import (
    GRID_POINTS,
    DistortionCurve,
    GridFunction,
    ShapeFlags,
    _grid_flags,
    require_in_h,
    unit_grid,
)
from .errors import ConeError, DomainError, NotRepresentableError, RegimeError, ShapeError
from .measures import Discrete, Distribution, negate, riskmetric

PROB_TOL = 1e-12


@dataclass(frozen=True)
class Composition:
    """Probabilities ``P(A_1), ..., P(A_n)`` of a partition of the sample space."""

    probs: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if not probs or any(p < -PROB_TOL for p in probs):
            raise DomainError("composition probabilities must be nonnegative")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise DomainError(f"composition probabilities sum to {math.fsum(probs)!r}")
        object.__setattr__(self, "probs", tuple(max(p, 0.0) for p in probs))

    @property
    def n(self) -> int:
        return len(self.probs)


# -- constant payoff ----------------------------------------------------------


def _share_weights(lam: float, alphas: np.ndarray) -> np.ndarray:
    return (lam / alphas) ** (1.0 / (alphas - 1.0))


def constant_share(alphas: Sequence[float]) -> tuple[Composition, float]:
    """Optimal lottery for sharing the constant 1 among agents with ``h_i(t) = t**alpha_i``.

    The first-order condition ``alpha_i w_i**(alpha_i - 1) = λ`` gives
    ``w_i = (λ / alpha_i)**(1 / (alpha_i - 1))``; ``λ`` solves ``Σ w_i = 1``.
    """
    a = np.asarray(alphas, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise DomainError("need a nonempty list of exponents")
    if np.any(a <= 1.0):
        raise DomainError("every exponent must exceed 1")
    if a.size == 1:
        return Composition((1.0,)), 1.0
    top = float(a.min())
    f = lambda lam: float(_share_weights(lam, a).sum()) - 1.0  # noqa: E731
    # f(0+) = -1 and f(min alpha) >= 0 since that agent alone already has weight 1
    lam = optimize.brentq(f, 0.0, top, xtol=1e-300, rtol=1e-15, maxiter=1000)
    w = _share_weights(lam, a)
    w = w / w.sum()
    value = float(np.sum(w**a))
    return Composition(tuple(w)), value


def foc_residual(alphas: Sequence[float], probs: Sequence[float]) -> float:
    """Spread of the marginals ``alpha_i w_i**(alpha_i - 1)`` across agents.

    A weight that is exactly 0 is accepted when the exact optimum
    ``(λ / alpha_i)**(1 / (alpha_i - 1))`` underflows a double; otherwise it
    contributes its full marginal gap ``λ``.
    """
    a = np.asarray(alphas, dtype=float)
    w = np.asarray(probs, dtype=float)
    pos = w > 0
    marg = a[pos] * w[pos] ** (a[pos] - 1.0)
    lam = float(np.median(marg))
    resid = float(np.max(np.abs(marg - lam))) if marg.size else 0.0
    for ai in a[~pos]:
        log_w = math.log(lam / ai) / (ai - 1.0)
        if log_w > math.log(np.finfo(float).tiny):
            resid = max(resid, lam)
    return resid


# -- jackpot allocations -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WeightCurve(DistortionCurve):
    """Weight function ``f_i`` of one agent in a jackpot allocation."""

    curves: tuple
    mode: str
    index: int

    def __post_init__(self):
        self._set_flags(ShapeFlags(True, False, False, True, False))

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        w = convolution_weights(self.curves, np.clip(t.ravel(), 0.0, 1.0), self.mode)
        return w[:, self.index].reshape(t.shape)


@dataclass(frozen=True, eq=False)
class Composite(DistortionCurve):
    """``t -> outer(inner(t))``; the distortion seen by one jackpot piece."""

    outer: DistortionCurve
    inner: DistortionCurve

    def __post_init__(self):
        o, i = self.outer.flags, self.inner.flags
        self._set_flags(ShapeFlags(o.increasing and i.increasing, False, False, o.continuous and i.continuous, False))

    def _eval(self, t):
        return self.outer.at(self.inner._eval(t))

    def kinks(self):
        return self.inner.kinks()


@dataclass(frozen=True, eq=False)
class JackpotAllocation:
    """Level-dependent lottery split of a one-signed loss.

    ``kind="jackpot"`` splits ``X >= 0`` with the inf-convolution weights of
    the agents' curves. ``kind="scapegoat"`` splits ``X <= 0``: the gain
    ``-X`` is split with the sup-convolution weights of the dual curves.
    """

    curves: tuple
    kind: str = "jackpot"
    n_points: int = GRID_POINTS
    weight_fns: tuple = field(init=False)

    def __post_init__(self):
        if self.kind not in ("jackpot", "scapegoat"):
            raise DomainError(f"unknown allocation kind {self.kind!r}")
        object.__setattr__(self, "curves", tuple(self.curves))
        base, mode = self._base()
        grid = unit_grid(self.n_points)
        w = convolution_weights(base, grid, mode)
        fns = tuple(GridFunction(np.maximum.accumulate(w[:, i]), monotone=True) for i in range(len(base)))
        object.__setattr__(self, "weight_fns", fns)

    def _base(self):
        if self.kind == "jackpot":
            return self.curves, "inf"
        return tuple(h.dual() for h in self.curves), "sup"

    @property
    def n(self) -> int:
        return len(self.curves)

    def weight_curve(self, i: int) -> WeightCurve:
        base, mode = self._base()
        return WeightCurve(base, mode, i)

    def weights(self, t) -> np.ndarray:
        """Exact ``(f_1(t), ..., f_n(t))`` rows for each ``t``."""
        base, mode = self._base()
        return convolution_weights(base, np.atleast_1d(t), mode)

    def top_level(self) -> Composition:
        w = self.weights(1.0)[0]
        return Composition(tuple(w / w.sum()))

    def piece_risks(self, d: Distribution) -> list[float]:
        """``ρ_{h_i}(X·1_{A_i})`` for each agent."""
        if self.kind == "jackpot":
            if d.lower < 0:
                raise ConeError("jackpot allocations need a nonnegative loss")
            return [riskmetric(Composite(h, self.weight_curve(i)), d) for i, h in enumerate(self.curves)]
        if d.upper > 0:
            raise ConeError("scapegoat allocations need a nonpositive loss")
        gain = negate(d)
        return [-riskmetric(Composite(h.dual(), self.weight_curve(i)), gain) for i, h in enumerate(self.curves)]

    def total_risk(self, d: Distribution) -> float:
        return math.fsum(self.piece_risks(d))

    def discretize(self, d: Discrete) -> "DiscreteAllocation":
        """Payoff matrix on the product of the loss atoms and the lottery outcomes."""
        if not isinstance(d, Discrete):
            raise DomainError("discretize needs a Discrete loss")
        values = d.values if self.kind == "jackpot" else -d.values[::-1]
        probs = d.probs if self.kind == "jackpot" else d.probs[::-1]
        if np.any(values < 0):
            raise ConeError(f"{self.kind} allocation got a loss of the wrong sign")
        tail = np.minimum(np.cumsum(probs[::-1])[::-1], 1.0)
        tail[0] = 1.0
        nxt = np.append(tail[1:], 0.0)
        f_hi, f_lo = self.weights(tail), self.weights(nxt)
        q = (f_hi - f_lo) / probs[:, None]  # P(agent i wins | atom k)
        sign = 1.0 if self.kind == "jackpot" else -1.0
        atom_probs, rows = [], []
        for k in range(len(values)):
            for i in range(self.n):
                if q[k, i] <= 0:
                    continue
                payoff = np.zeros(self.n)
                payoff[i] = sign * values[k]
                atom_probs.append(probs[k] * q[k, i])
                rows.append(payoff)
        ap = np.array(atom_probs)
        return DiscreteAllocation(tuple(ap / ap.sum()), np.array(rows))


def jackpot_allocation(hs: Sequence[DistortionCurve], d: Distribution) -> JackpotAllocation:
    """Optimal counter-monotonic split for convex continuous curves on a one-signed loss."""
    hs = tuple(hs)
    for i, h in enumerate(hs):
        require_in_h(h, f"curve {i}")
        if not (h.flags.convex and h.flags.continuous):
            raise ShapeError(f"curve {i} must be convex and continuous")
    if d.lower >= 0:
        return JackpotAllocation(hs, "jackpot")
    if d.upper <= 0:
        return JackpotAllocation(hs, "scapegoat")
    raise ConeError("the loss must be nonnegative or nonpositive")


# -- discrete payoff matrices --------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiscreteAllocation:
    """Agents' payoffs on finitely many states: ``payoffs[state, agent]``."""

    atom_probs: tuple
    payoffs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.atom_probs, dtype=float)
        m = np.atleast_2d(np.asarray(self.payoffs, dtype=float))
        if m.shape[0] != p.size:
            raise DomainError("one payoff row per state is required")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise DomainError("state probabilities must be nonnegative and sum to 1")
        m.setflags(write=False)
        object.__setattr__(self, "atom_probs", tuple(p))
        object.__setattr__(self, "payoffs", m)

    @property
    def n_agents(self) -> int:
        return self.payoffs.shape[1]

    @property
    def aggregate(self) -> np.ndarray:
        return self.payoffs.sum(axis=1)

    def piece_law(self, i: int) -> Discrete:
        return Discrete(tuple((v, p) for v, p in zip(self.payoffs[:, i], self.atom_probs) if p > 0))

    def aggregate_law(self) -> Discrete:
        return Discrete(tuple((v, p) for v, p in zip(self.aggregate, self.atom_probs) if p > 0))

    def total_risk(self, hs: Sequence[DistortionCurve]) -> float:
        return math.fsum(riskmetric(h, self.piece_law(i)) for i, h in enumerate(hs))


def pairwise_countermonotonic_check(a: DiscreteAllocation, tol: float = 1e-12) -> bool:
    """True iff every pair of agents moves in opposite directions across every pair of states."""
    m = a.payoffs[np.asarray(a.atom_probs) > 0]
    diff = m[:, None, :] - m[None, :, :]  # state pairs x agents
    for i, j in itertools.combinations(range(m.shape[1]), 2):
        if np.any(diff[:, :, i] * diff[:, :, j] > tol):
            return False
    return True


@dataclass(frozen=True)
class CounterMonotonicForm:
    """``X_i = (X - m)·1_{A_i} + m_i`` with ``m = Σ m_i`` on one side of the aggregate's range."""

    m_consts: tuple
    m_total: float
    composition: Composition
    side: str  # below_essinf | above_esssup

    def reconstruct(self, aggregate: np.ndarray, winners: np.ndarray) -> np.ndarray:
        n = len(self.m_consts)
        out = np.tile(np.asarray(self.m_consts, dtype=float), (len(aggregate), 1))
        out[np.arange(len(aggregate)), winners] += aggregate - self.m_total
        return out


def countermonotonic_form(a: DiscreteAllocation, tol: float = 1e-9) -> CounterMonotonicForm:
    """Recover the constants, event probabilities, and side of a counter-monotonic allocation.

    Each agent sits at a constant level ``m_i`` except on its own event, where
    it absorbs ``X - m``. Below-side forms put ``m_i`` at each agent's minimum
    payoff; above-side forms at its maximum.
    """
    m = a.payoffs[np.asarray(a.atom_probs) > 0]
    probs = np.asarray(a.atom_probs)[np.asarray(a.atom_probs) > 0]
    nondegenerate = int(np.sum(np.ptp(m, axis=0) > tol))
    if nondegenerate < 3:
        raise RegimeError("the representation is only claimed for three or more non-degenerate agents")
    agg = m.sum(axis=1)
    best_dev = math.inf
    for side, levels in (("below_essinf", m.min(axis=0)), ("above_esssup", m.max(axis=0))):
        off = np.abs(m - levels[None, :]) > tol  # agent i away from its constant level
        counts = off.sum(axis=1)
        dev = float(np.max(np.abs(m - levels[None, :]) * (counts[:, None] > 1)))
        best_dev = min(best_dev, dev if np.any(counts > 1) else 0.0)
        if np.any(counts > 1):
            continue
        m_total = float(levels.sum())
        if side == "below_essinf" and m_total > agg.min() + tol:
            continue
        if side == "above_esssup" and m_total < agg.max() - tol:
            continue
        # states where nobody moves have X = m; assign them to the first agent
        winners = np.where(counts == 1, off.argmax(axis=1), 0)
        event_p = np.bincount(winners, weights=probs, minlength=m.shape[1])
        form = CounterMonotonicForm(tuple(float(v) for v in levels), m_total, Composition(tuple(event_p)), side)
        rebuilt = form.reconstruct(agg, winners)
        dev = float(np.max(np.abs(rebuilt - m)))
        if dev <= tol:
            return form
        best_dev = min(best_dev, dev)
    raise NotRepresentableError(
        "payoffs do not have the constant-plus-jackpot structure", max_deviation=best_dev
    )


def independent_split(d: Discrete, probs: Sequence[float]) -> list[Discrete]:
    """Laws of ``X·1_{A_i}`` when ``(A_i)`` is independent of ``X`` with ``P(A_i) = probs[i]``."""
    comp = Composition(tuple(probs))
    out = []
    for p in comp.probs:
        atoms = [(v, q * p) for v, q in zip(d.values, d.probs)]
        if p < 1.0:
            atoms.append((0.0, 1.0 - p))
        out.append(Discrete(tuple(a for a in atoms if a[1] > 0)))
    return out


def scaled_law(d: Discrete, p: float) -> Discrete:
    """Law of ``p·X``."""
    return Discrete(tuple((p * v, q) for v, q in zip(d.values, d.probs)))
