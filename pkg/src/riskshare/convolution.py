"""Inf- and sup-convolutions of distortion functions on [0, 1].

``(□ h_i)(x) = min { Σ h_i(x_i) : x_i in [0, 1], Σ x_i = x }`` and the sup
counterpart ``◊``. For convex summands (inf) or concave summands (sup) the
optimum is characterized by a common multiplier ``λ``: every interior weight
satisfies ``h_i'(x_i) = λ``. Smooth families solve this through their inverse
derivative, piecewise-linear ones through their slope table, and the two mix
freely. Anything else falls back to a multi-start pairwise-transfer search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize

from .distortion import (
    GRID_POINTS,
    DistortionCurve,
    GridFunction,
    PiecewiseLinear,
    Rescaled,
    ShapeFlags,
    _grid_flags,
    require_in_h,
    unit_grid,
)
from .errors import ConvergenceError, DomainError

MODES = ("inf", "sup")
SEARCH_STARTS = 10
SEARCH_SEED = 20240611
_LAM_FLOOR = 1e-300


@dataclass(frozen=True)
class ConvolutionResult:
    value: float
    weights: tuple
    method: str  # closed_form | piecewise_exact | simplex_search


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise DomainError(f"convolution mode must be one of {MODES}, got {mode!r}")
    return mode


def _check_inputs(hs: Sequence[DistortionCurve], mode: str) -> tuple:
    hs = tuple(hs)
    if not hs:
        raise DomainError("need at least one curve")
    for i, h in enumerate(hs):
        if mode == "inf":
            require_in_h(h, f"curve {i}")
        elif not h.flags.increasing or abs(float(h.at(0.0))) > 1e-12:
            raise DomainError(f"curve {i} must be increasing with h(0) = 0")
    return hs


def _check_x(x: float) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"convolution point {x!r} outside [0, 1]")
    return x


# -- multiplier path ----------------------------------------------------------


def _slope_table(h: DistortionCurve, mode: str):
    """``(lengths, slopes)`` if ``h`` is piecewise linear with slopes ordered for ``mode``."""
    pieces = h.linear_pieces()
    if pieces is None:
        return None
    lengths = np.array([p[0] for p in pieces], dtype=float)
    slopes = np.array([p[1] for p in pieces], dtype=float)
    d = np.diff(slopes)
    ok = np.all(d >= -1e-12) if mode == "inf" else np.all(d <= 1e-12)
    return (lengths, slopes) if ok else None


class _Response:
    """Optimal weight of one summand as a function of the multiplier ``λ``.

    For ``inf`` the response is nondecreasing in ``λ``; for ``sup`` it is
    nonincreasing. Piecewise-linear summands respond in jumps.
    """

    def __init__(self, h: DistortionCurve, mode: str):
        self.h = h
        self.mode = mode
        self.table = _slope_table(h, mode)
        if self.table is None:
            shaped = h.flags.convex if mode == "inf" else h.flags.concave
            if not (shaped and h.has_inverse_derivative):
                raise LookupError

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.table is not None:
            lengths, slopes = self.table
            if self.mode == "inf":
                active = slopes[:, None] < lam.reshape(1, -1)
            else:
                active = (slopes[:, None] > lam.reshape(1, -1)) | (
                    (slopes[:, None] >= 0.0) & (lam.reshape(1, -1) <= 0.0)
                )
            out = lengths @ active
            return out.reshape(lam.shape)
        out = np.asarray(self.h.inverse_derivative(lam), dtype=float)
        return np.clip(np.broadcast_to(out, lam.shape), 0.0, 1.0)


def _responses(hs, mode):
    try:
        return [_Response(h, mode) for h in hs]
    except LookupError:
        return None


def _multiplier_weights(responses, xs: np.ndarray, mode: str) -> np.ndarray:
    """Weights ``(len(xs), n)`` solving ``Σ x_i(λ) = x`` by bracketing ``λ``.

    Where the total response jumps over ``x`` the weights are interpolated
    between the one-sided responses; all summands that jump at the same
    multiplier share the same marginal rate, so any such split is optimal.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size <= 8 and all(r.table is None for r in responses):
        return np.array([_root_weights(responses, float(x), mode) for x in xs])
    return _multiplier_weights_bisect(responses, xs, mode)


def _multiplier_weights_bisect(responses, xs: np.ndarray, mode: str) -> np.ndarray:
    total = lambda lam: sum(r(lam) for r in responses)  # noqa: E731

    # the "low-sum" end of the bracket: λ = 0 for inf, λ large for sup
    big = np.full_like(xs, 1.0)
    for _ in range(2100):
        s_big = total(big)
        need = (s_big < xs) if mode == "inf" else (s_big > xs)
        if not np.any(need & (big < 1e300)):
            break
        big = np.where(need, big * 4.0, big)
    small = np.zeros_like(xs)
    # invariant (inf): total(small) <= x <= total(big); (sup): reversed roles
    lo, hi = small.copy(), big.copy()
    for _ in range(4000):
        gap = hi - lo
        if np.all(gap <= 4e-16 * np.maximum(hi, _LAM_FLOOR)):
            break
        geo = np.exp(0.5 * (np.log(np.maximum(lo, _LAM_FLOOR)) + np.log(hi)))
        mid = np.where(hi > 16.0 * np.maximum(lo, _LAM_FLOOR), geo, 0.5 * (lo + hi))
        s_mid = total(mid)
        go_up = (s_mid < xs) if mode == "inf" else (s_mid > xs)
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
        if np.all(lo > 0) and np.all(np.abs(hi - lo) <= 4e-16 * hi):
            break
        if np.all(hi <= _LAM_FLOOR):
            break
    w_lo = np.stack([r(lo) for r in responses], axis=-1)
    w_hi = np.stack([r(hi) for r in responses], axis=-1)
    s_lo, s_hi = w_lo.sum(axis=-1), w_hi.sum(axis=-1)
    denom = s_hi - s_lo
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(np.abs(denom) > 0, (xs - s_lo) / denom, 0.0)
    frac = np.clip(frac, 0.0, 1.0)
    w = w_lo + frac[:, None] * (w_hi - w_lo) if w_lo.ndim == 2 else w_lo + frac * (w_hi - w_lo)
    w = np.clip(w, 0.0, 1.0)
    # push any rounding residue onto the summands with slack
    resid = xs - w.sum(axis=-1)
    return _absorb(w, resid)


def _root_weights(responses, x: float, mode: str) -> np.ndarray:
    """Scalar multiplier solve for continuous responses, in ``u = log λ``."""
    if x <= 0.0:
        return np.zeros(len(responses))
    sign = 1.0 if mode == "inf" else -1.0
    phi = lambda u: sign * (sum(float(r(math.exp(u))) for r in responses) - x)  # noqa: E731
    u_lo, u_hi = math.log(_LAM_FLOOR), 0.0
    while phi(u_hi) < 0.0 and u_hi < 690.0:
        u_hi += 8.0
    if phi(u_lo) >= 0.0 or phi(u_hi) < 0.0:
        # the bound sits at an end of the multiplier range; fall back to bracketing
        return _multiplier_weights_bisect(responses, np.array([x]), mode)[0]
    u = optimize.brentq(phi, u_lo, u_hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    w = np.array([float(r(math.exp(u))) for r in responses])
    return _absorb(w, np.array([x - w.sum()]))[0]


def _absorb(w: np.ndarray, resid: np.ndarray) -> np.ndarray:
    w = np.atleast_2d(w).copy()
    resid = np.atleast_1d(resid).copy()
    for j in range(w.shape[1]):
        if not np.any(np.abs(resid) > 0):
            break
        room = np.where(resid > 0, 1.0 - w[:, j], -w[:, j])
        step = np.where(resid > 0, np.minimum(resid, room), np.maximum(resid, room))
        w[:, j] += step
        resid -= step
    return w


# -- generic search -----------------------------------------------------------


def _pair_step(hs, w, i, j, sign):
    """Best transfer between summands ``i`` and ``j`` keeping their sum fixed."""
    s = w[i] + w[j]
    a, b = max(0.0, s - 1.0), min(1.0, s)
    if b - a <= 1e-15:
        return False
    obj = lambda t: sign * (float(hs[i].at(t)) + float(hs[j].at(s - t)))  # noqa: E731
    grid = np.linspace(a, b, 65)
    vals = sign * (hs[i].at(grid) + hs[j].at(s - grid))
    k = int(np.argmin(vals))
    best_t, best_v = grid[k], vals[k]
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(obj, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
        if res.fun < best_v:
            best_t, best_v = float(res.x), float(res.fun)
    current = obj(w[i])
    if best_v < current - 1e-15:
        w[i], w[j] = best_t, s - best_t
        return True
    return False


def _search(hs, x: float, mode: str, seed: int = SEARCH_SEED):
    n = len(hs)
    sign = 1.0 if mode == "inf" else -1.0
    rng = np.random.default_rng(seed)
    starts = [np.full(n, x / n)]
    for _ in range(SEARCH_STARTS):
        starts.append(rng.dirichlet(np.ones(n)) * x)
    best_w, best_v = None, math.inf
    for w0 in starts:
        w = w0.astype(float)
        for _sweep in range(500):
            moved = False
            for i in range(n):
                for j in range(i + 1, n):
                    moved |= _pair_step(hs, w, i, j, sign)
            if not moved:
                break
        v = sign * sum(float(h.at(t)) for h, t in zip(hs, w))
        if v < best_v - 1e-14:
            best_w, best_v = w.copy(), v
    return best_w


# -- public point / grid operations -------------------------------------------


def convolve(hs: Sequence[DistortionCurve], x: float, mode: str = "inf") -> ConvolutionResult:
    """Inf- (``mode='inf'``) or sup-convolution of ``hs`` at ``x`` with its optimal split."""
    _check_mode(mode)
    hs = _check_inputs(hs, mode)
    x = _check_x(x)
    if len(hs) == 1:
        return ConvolutionResult(float(hs[0].at(x)), (x,), "closed_form")
    responses = _responses(hs, mode)
    if responses is not None:
        w = _multiplier_weights(responses, np.array([x]), mode)[0]
        pwl = all(r.table is not None for r in responses)
        method = "piecewise_exact" if pwl else "closed_form"
    else:
        w = _search(hs, x, mode)
        method = "simplex_search"
    value = math.fsum(float(h.at(t)) for h, t in zip(hs, w))
    return ConvolutionResult(value, tuple(float(t) for t in w), method)


def inf_convolve(hs: Sequence[DistortionCurve], x: float) -> ConvolutionResult:
    return convolve(hs, x, "inf")


def sup_convolve(hs: Sequence[DistortionCurve], x: float) -> ConvolutionResult:
    return convolve(hs, x, "sup")


def convolution_weights(hs: Sequence[DistortionCurve], xs, mode: str = "inf") -> np.ndarray:
    """Optimal splits for every point of ``xs``; shape ``(len(xs), n)``."""
    _check_mode(mode)
    hs = _check_inputs(hs, mode)
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any((xs < 0) | (xs > 1)):
        raise DomainError("convolution points must lie in [0, 1]")
    if len(hs) == 1:
        return xs[:, None].copy()
    responses = _responses(hs, mode)
    if responses is not None:
        return _multiplier_weights(responses, xs, mode)
    return np.array([_search(hs, float(x), mode) for x in xs])


def convolution_values(hs: Sequence[DistortionCurve], xs, mode: str = "inf") -> np.ndarray:
    w = convolution_weights(hs, xs, mode)
    return sum(h.at(w[:, i]) for i, h in enumerate(hs))


def grid_convolve(hs: Sequence[DistortionCurve], mode: str = "inf", n_points: int = GRID_POINTS) -> GridFunction:
    """Samples of the convolution at ``k / (n_points - 1)``."""
    if n_points < 2:
        raise DomainError("need at least two grid points")
    vals = convolution_values(hs, unit_grid(n_points), mode)
    vals = np.maximum.accumulate(vals)  # exact values are monotone; remove rounding wiggles
    return GridFunction(vals, monotone=True)


# -- curve objects ------------------------------------------------------------


def piecewise_convolve(hs: Sequence[DistortionCurve], mode: str = "inf") -> PiecewiseLinear:
    """Exact convolution of piecewise-linear summands by greedy slope ordering.

    Inf fills the cheapest slopes first (summands must be convex); sup fills the
    steepest first (summands must be concave).
    """
    _check_mode(mode)
    hs = _check_inputs(hs, mode)
    segs = []
    for i, h in enumerate(hs):
        table = _slope_table(h, mode)
        if table is None:
            raise DomainError(f"curve {i} is not piecewise linear with {mode}-compatible slopes")
        segs.extend((float(s), i, float(L)) for L, s in zip(*table) if L > 0)
    segs.sort(key=lambda z: (z[0] if mode == "inf" else -z[0], z[1]))
    pts = [(0.0, 0.0)]
    t, v = 0.0, 0.0
    for slope, _i, length in segs:
        if t >= 1.0:
            break
        step = min(length, 1.0 - t)
        t, v = t + step, v + slope * step
        pts.append((min(t, 1.0), v))
    if pts[-1][0] < 1.0:
        pts.append((1.0, v))
    return PiecewiseLinear(tuple(_merge_collinear(pts)))


def _merge_collinear(pts, tol=1e-12):
    out = [pts[0]]
    for p in pts[1:]:
        if abs(p[0] - out[-1][0]) <= 1e-15:
            continue
        if len(out) >= 2:
            (t0, v0), (t1, v1) = out[-2], out[-1]
            s_prev = (v1 - v0) / (t1 - t0)
            s_new = (p[1] - v1) / (p[0] - t1)
            if abs(s_prev - s_new) <= tol:
                out[-1] = p
                continue
        out.append(p)
    return out


@dataclass(frozen=True, eq=False)
class Convolution(DistortionCurve):
    """Lazily evaluated ``□ hs`` or ``◊ hs``, exact at every point."""

    curves: tuple
    mode: str = "inf"

    def __post_init__(self):
        _check_mode(self.mode)
        curves = _check_inputs(self.curves, self.mode)
        object.__setattr__(self, "curves", curves)
        object.__setattr__(self, "_responses", _responses(curves, self.mode))
        object.__setattr__(self, "_mass", float(convolution_values(curves, [1.0], self.mode)[0]))
        grid = _grid_flags(self._eval(unit_grid(201)))
        convex = self.mode == "inf" and self._responses is not None
        concave = self.mode == "sup" and self._responses is not None
        self._set_flags(
            ShapeFlags(
                increasing=True,
                convex=convex or grid.convex,
                concave=concave or grid.concave,
                continuous=all(c.flags.continuous for c in curves),
                normalized=abs(self._mass - 1.0) <= 1e-9,
            )
        )

    @property
    def total_mass(self) -> float:
        return self._mass

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        flat = convolution_values(self.curves, np.clip(t.ravel(), 0.0, 1.0), self.mode)
        return flat.reshape(t.shape)

    def weights(self, t) -> np.ndarray:
        return convolution_weights(self.curves, t, self.mode)

    def kinks(self):
        if self._responses is None:
            return ()
        ks = set()
        for r in self._responses:
            if r.table is not None:
                ks.update(np.cumsum(r.table[0])[:-1].tolist())
        if not ks:
            return ()
        # piecewise summands move the kinks; locate them on a fine grid of the result
        ts = unit_grid(2001)
        d2 = np.abs(np.diff(self._eval(ts), 2))
        idx = np.nonzero(d2 > 1e-9)[0]
        return tuple(float(ts[i + 1]) for i in idx)

    def derivative(self, t):
        # envelope theorem: the derivative is the optimal multiplier
        w = self.weights(np.atleast_1d(t))
        out = []
        for row in w:
            rates = []
            for h, x in zip(self.curves, row):
                if 1e-12 < x < 1 - 1e-12:
                    rates.append(float(h.derivative(x)))
            out.append(np.median(rates) if rates else float("nan"))
        out = np.array(out)
        return float(out[0]) if np.ndim(t) == 0 else out


def convolution_curve(hs: Sequence[DistortionCurve], mode: str = "inf") -> DistortionCurve:
    """Exact convolution as a curve: piecewise linear when possible, else lazy."""
    try:
        return piecewise_convolve(hs, mode)
    except DomainError:
        return Convolution(tuple(hs), mode)


def normalized_sup_dual(hs: Sequence[DistortionCurve]) -> DistortionCurve:
    """``f(x) = (◊ h~_i)(x) / (◊ h~_i)(1)`` for convex continuous ``h_i`` in ℋ."""
    hs = tuple(hs)
    for i, h in enumerate(hs):
        require_in_h(h, f"curve {i}")
        if not (h.flags.convex and h.flags.continuous):
            raise DomainError(f"curve {i} must be convex and continuous")
    sup = convolution_curve([h.dual() for h in hs], "sup")
    denom = sup.total_mass
    if not denom > 0:
        raise ConvergenceError(f"sup-convolution at 1 is {denom!r}; expected a positive value")
    return Rescaled(sup, 1.0 / denom)
