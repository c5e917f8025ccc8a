"""Brute-force verifiers that share no solver code with the main modules.

The level-wise oracle integrates, over loss levels ``x``, the cheapest way to
split the tail probability ``P(X >= x)`` among the agents, found by plain
grid search. Only the survival and quantile evaluators of a law are used.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .distortion import DistortionCurve
from .errors import ConeError, DomainError
from .measures import Discrete, Distribution, Negated

LINE_POINTS = 2001
TAIL_POINTS_PER_DECADE = 40


@dataclass(frozen=True)
class LevelGrid:
    levels: np.ndarray
    survival_values: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        sv = np.asarray(self.survival_values, dtype=float)
        if lv.shape != sv.shape or np.any(np.diff(lv) <= 0):
            raise DomainError("levels must be strictly increasing with one survival value each")
        if np.any(np.diff(sv) > 1e-15) or np.any((sv < 0) | (sv > 1)):
            raise DomainError("survival values must be nonincreasing in [0, 1]")
        object.__setattr__(self, "levels", lv)
        object.__setattr__(self, "survival_values", sv)


def level_grid(d: Distribution, n_levels: int = 2001) -> LevelGrid:
    """Levels at the quantiles ``k / n_levels`` plus a geometric extension into an unbounded tail."""
    u = np.arange(n_levels - 1, 0, -1) / n_levels
    xs = [np.atleast_1d(d.isf(u))]
    if math.isinf(d.upper):
        decades = np.arange(math.log10(n_levels) * TAIL_POINTS_PER_DECADE, 300 * TAIL_POINTS_PER_DECADE)
        tail_u = 10.0 ** (-decades / TAIL_POINTS_PER_DECADE)
        xs.append(np.atleast_1d(d.isf(tail_u)))
    else:
        xs.append(np.array([d.upper]))
    lv = np.concatenate(xs)
    lv = np.unique(lv[np.isfinite(lv) & (lv > max(d.lower, 0.0))])
    sv = np.clip(np.atleast_1d(d.prob_ge(lv)).astype(float), 0.0, 1.0)
    sv = np.minimum.accumulate(sv)
    return LevelGrid(lv, sv)


# -- per-level split -----------------------------------------------------------


def _line_search_two(h1, h2, s: np.ndarray, sign: float) -> np.ndarray:
    """``min_p sign·(h1(p) + h2(s - p))`` per level by a coarse then a fine 2001-point scan."""
    lo = np.maximum(0.0, s - 1.0)
    hi = np.minimum(1.0, s)
    frac = np.linspace(0.0, 1.0, LINE_POINTS)
    out = np.empty_like(s)
    for start in range(0, s.size, 256):
        sl = slice(start, start + 256)
        a, b, ss = lo[sl, None], hi[sl, None], s[sl, None]
        p = a + (b - a) * frac[None, :]
        vals = sign * (h1.at(p) + h2.at(ss - p))
        k = vals.argmin(axis=1)
        step = (b - a)[:, 0] / (LINE_POINTS - 1)
        centre = p[np.arange(p.shape[0]), k]
        a2 = np.maximum(a[:, 0], centre - step)[:, None]
        b2 = np.minimum(b[:, 0], centre + step)[:, None]
        p2 = a2 + (b2 - a2) * frac[None, :]
        vals2 = sign * (h1.at(p2) + h2.at(ss - p2))
        out[sl] = np.minimum(vals.min(axis=1), vals2.min(axis=1))
    return sign * out


def _coordinate_descent(hs, s: float, sign: float, sweeps: int = 60) -> float:
    n = len(hs)
    w = np.full(n, s / n)
    frac = np.linspace(0.0, 1.0, 401)
    cur = sign * sum(float(h.at(t)) for h, t in zip(hs, w))
    for _ in range(sweeps):
        before = cur
        for i, j in itertools.combinations(range(n), 2):
            tot = w[i] + w[j]
            a, b = max(0.0, tot - 1.0), min(1.0, tot)
            for _zoom in range(3):
                p = a + (b - a) * frac
                vals = sign * (hs[i].at(p) + hs[j].at(tot - p))
                k = int(vals.argmin())
                step = (b - a) / 400
                a, b = max(0.0, p[k] - step, tot - 1.0), min(1.0, p[k] + step, tot)
            w[i], w[j] = p[k], tot - p[k]
        cur = sign * sum(float(h.at(t)) for h, t in zip(hs, w))
        if before - cur < 1e-14:
            break
    return sign * cur


def level_split(hs: Sequence[DistortionCurve], s, mode: str = "min") -> np.ndarray:
    """Best total ``Σ h_i(p_i)`` over ``p_i >= 0, Σ p_i = s`` (``mode`` min or max)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    sign = 1.0 if mode == "min" else -1.0
    hs = tuple(hs)
    if len(hs) == 1:
        return hs[0].at(s)
    if len(hs) == 2:
        return _line_search_two(hs[0], hs[1], s, sign)
    return np.array([_coordinate_descent(hs, float(v), sign) for v in s])


# -- integration ---------------------------------------------------------------


def _integrate_nonneg(G, d: Distribution, n_levels: int) -> float:
    """``∫_0^∞ G(P(X >= x)) dx`` for ``X >= 0`` and a per-level value ``G``."""
    if isinstance(d, Discrete):
        vals = d.values
        widths = np.diff(np.concatenate([[0.0], vals]))
        return float(np.dot(widths, G(d.tail)))
    grid = level_grid(d, n_levels)
    lv = np.concatenate([[max(d.lower, 0.0)], grid.levels])
    sv = np.concatenate([[1.0], grid.survival_values])
    gv = G(sv)
    base = max(d.lower, 0.0) * float(G(np.array([1.0]))[0])
    # trapezoid in x near zero; trapezoid of x·G in log x once levels spread geometrically
    dx = np.diff(lv)
    plain = 0.5 * (gv[1:] + gv[:-1]) * dx
    with np.errstate(divide="ignore", invalid="ignore"):
        logw = 0.5 * (gv[1:] * lv[1:] + gv[:-1] * lv[:-1]) * np.log(lv[1:] / lv[:-1])
    geometric = lv[:-1] > 0
    return base + float(np.sum(np.where(geometric, logw, plain)))


def oracle_levelwise(hs: Sequence[DistortionCurve], d: Distribution, n_levels: int = 2001) -> float:
    """Counter-monotonic inf-convolution by level-wise brute force.

    For ``X >= 0`` each level's tail probability is split to minimize
    ``Σ h_i``. For ``X <= 0`` the gain ``-X`` is split to maximize the dual
    curves and the result is negated.
    """
    hs = tuple(hs)
    if d.lower >= 0:
        return _integrate_nonneg(lambda s: level_split(hs, s, "min"), d, n_levels)
    if d.upper <= 0:
        duals = tuple(h.dual() for h in hs)
        gain = _mirror(d)
        return -_integrate_nonneg(lambda s: level_split(duals, s, "max"), gain, n_levels)
    raise ConeError("the level-wise oracle needs a one-signed loss")


@dataclass(frozen=True)
class _Mirror(Distribution):
    inner: Distribution

    @property
    def lower(self):
        return -self.inner.upper

    @property
    def upper(self):
        return -self.inner.lower

    def prob_ge(self, x):
        # continuous laws only: P(-X >= x) = P(X <= -x)
        return self.inner.prob_lt(-np.asarray(x, dtype=float))

    def isf(self, u):
        return -np.asarray(self.inner.ppf(u))


def _mirror(d: Distribution) -> Distribution:
    if isinstance(d, Discrete):
        return Discrete(tuple((-v, p) for v, p in d.atoms))
    if isinstance(d, Negated):
        return d.inner
    return _Mirror(d)


# -- constant payoff ------------------------------------------------------------


def _simplex_min(a: np.ndarray, axes: list) -> tuple[np.ndarray, float]:
    """Minimize ``Σ w_i**a_i`` over the product of ``axes`` (first n-1 coordinates) on the simplex."""
    mesh = np.meshgrid(*axes, indexing="ij")
    head = np.stack([m.ravel() for m in mesh])
    last = 1.0 - head.sum(axis=0)
    ok = last >= -1e-15
    w = np.vstack([head[:, ok], np.clip(last[ok], 0.0, 1.0)])
    v = np.sum(w ** a[:, None], axis=0)
    k = int(np.argmin(v))
    return w[:, k], float(v[k])


def oracle_constant_share(alphas: Sequence[float], grid_n: int = 10000) -> tuple[tuple, float]:
    """Exhaustive simplex grid search for ``min Σ w_i**alpha_i``, refined once at 10x resolution.

    The grid has ``(grid_n + 1)**(n - 1)`` points before the simplex cut, so
    keep ``grid_n`` modest for four or five agents.
    """
    a = np.asarray(alphas, dtype=float)
    if a.size < 2 or a.size > 5:
        raise DomainError("the grid oracle handles two to five agents")
    if np.any(a <= 1.0):
        raise DomainError("every exponent must exceed 1")
    g = np.arange(grid_n + 1) / grid_n
    w, _ = _simplex_min(a, [g] * (a.size - 1))
    fine = [np.clip(np.linspace(c - 1.0 / grid_n, c + 1.0 / grid_n, 21 if a.size <= 3 else 11), 0.0, 1.0)
            for c in w[:-1]]
    w, v = _simplex_min(a, fine)
    return tuple(float(x) for x in w), v


# -- convex order ----------------------------------------------------------------


def stop_loss(d: Discrete, t) -> np.ndarray:
    """``E[(X - t)_+]`` at each ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return np.sum(np.maximum(d.values[None, :] - t[:, None], 0.0) * d.probs[None, :], axis=1)


def convex_order_leq(x: Discrete, y: Discrete, tol: float = 1e-12) -> bool:
    """``X <=_cx Y``: equal means and dominated stop-loss transforms at every atom."""
    mx, my = float(np.dot(x.values, x.probs)), float(np.dot(y.values, y.probs))
    scale = max(1.0, float(np.max(np.abs(x.values))), float(np.max(np.abs(y.values))))
    if abs(mx - my) > 1e-9 * scale:
        return False
    ts = np.union1d(x.values, y.values)
    return bool(np.all(stop_loss(x, ts) <= stop_loss(y, ts) + tol * scale))
