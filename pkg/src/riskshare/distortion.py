"""Distortion functions and riskmetric curves on [0, 1].

Every curve ``h`` satisfies ``h(0) = 0``. Curves are immutable; shape flags
are fixed when the curve is built (analytic for parametric families, grid
based otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import BPoly

from .errors import DomainError, ShapeError

GRID_POINTS = 1001
SHAPE_TOL = 1e-9


@dataclass(frozen=True)
class ShapeFlags:
    increasing: bool
    convex: bool
    concave: bool
    continuous: bool
    normalized: bool

    def as_dict(self) -> dict:
        return {
            "increasing": self.increasing,
            "convex": self.convex,
            "concave": self.concave,
            "continuous": self.continuous,
            "normalized": self.normalized,
        }


@dataclass(frozen=True)
class ShapeReport:
    """Outcome of :func:`classify`: analytic verdicts plus grid disagreements."""

    flags: ShapeFlags
    grid: ShapeFlags
    conflicts: tuple[str, ...] = ()

    def __getattr__(self, name):
        # report.convex etc. read through to the winning (analytic) flags
        if name in ShapeFlags.__dataclass_fields__:
            return getattr(self.flags, name)
        raise AttributeError(name)

    def as_dict(self) -> dict:
        return self.flags.as_dict()


def unit_grid(n_points: int = GRID_POINTS) -> np.ndarray:
    return np.linspace(0.0, 1.0, n_points)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Uniform samples of a curve at ``t_k = k / (n_points - 1)``, linearly interpolated."""

    values: np.ndarray
    monotone: bool = False

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise DomainError("GridFunction needs at least two samples")
        if self.monotone and np.any(np.diff(values) < -SHAPE_TOL):
            raise DomainError("monotone flag set on decreasing samples")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_points(self) -> int:
        return self.values.size

    @property
    def nodes(self) -> np.ndarray:
        return unit_grid(self.n_points)

    def __call__(self, t):
        return _scalar_or_array(np.interp(np.asarray(t, dtype=float), self.nodes, self.values), t)

    def __eq__(self, other):
        return isinstance(other, GridFunction) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


def _scalar_or_array(result, t):
    if np.ndim(t) == 0:
        return float(result)
    return result


class DistortionCurve:
    """Base class. Subclasses implement ``_eval`` on numpy arrays inside [0, 1]."""

    flags: ShapeFlags

    def _set_flags(self, flags: ShapeFlags) -> None:
        object.__setattr__(self, "flags", flags)

    def _eval(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        if np.any(arr < 0.0) or np.any(arr > 1.0) or np.any(np.isnan(arr)):
            raise DomainError(f"distortion argument outside [0, 1]: {t!r}")
        return _scalar_or_array(self._eval(arr), t)

    def at(self, t):
        """Evaluate with the argument clipped into [0, 1] (for internal round-off)."""
        arr = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
        return _scalar_or_array(self._eval(arr), t)

    @property
    def total_mass(self) -> float:
        return float(self._eval(np.array(1.0)))

    @property
    def in_h(self) -> bool:
        """Member of the class of normalized increasing distortion functions."""
        return self.flags.increasing and self.flags.normalized

    def kinks(self) -> tuple[float, ...]:
        """Interior points where the curve is not smooth."""
        return ()

    def linear_pieces(self):
        """``[(length, slope), ...]`` for piecewise-linear curves, else ``None``."""
        return None

    def derivative(self, t):
        raise NotImplementedError(f"{type(self).__name__} has no analytic derivative")

    def inverse_derivative(self, y):
        """Point of [0, 1] where the (monotone) derivative equals ``y``, clamped."""
        return None

    @property
    def has_inverse_derivative(self) -> bool:
        return type(self).inverse_derivative is not DistortionCurve.inverse_derivative

    def dual(self) -> "DistortionCurve":
        return Dual(self)

    def sampled(self, n_points: int = GRID_POINTS) -> GridFunction:
        return GridFunction(self._eval(unit_grid(n_points)), monotone=self.flags.increasing)


# -- parametric families ----------------------------------------------------


@dataclass(frozen=True)
class Identity(DistortionCurve):
    def __post_init__(self):
        self._set_flags(ShapeFlags(True, True, True, True, True))

    def _eval(self, t):
        return np.array(t, dtype=float)

    def derivative(self, t):
        return np.ones_like(np.asarray(t, dtype=float))

    def linear_pieces(self):
        return [(1.0, 1.0)]

    def dual(self):
        return self


@dataclass(frozen=True)
class Power(DistortionCurve):
    """``h(t) = t ** alpha``."""

    alpha: float

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("Power needs alpha > 0")
        a = self.alpha
        self._set_flags(ShapeFlags(True, a >= 1, a <= 1, True, True))

    def _eval(self, t):
        return np.power(t, self.alpha)

    def derivative(self, t):
        with np.errstate(divide="ignore"):
            return self.alpha * np.power(t, self.alpha - 1.0)

    def inverse_derivative(self, y):
        if self.alpha == 1.0:
            return None
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            raw = np.power(np.maximum(y, 0.0) / self.alpha, 1.0 / (self.alpha - 1.0))
        out = np.where(y <= 0.0, 0.0 if self.alpha > 1 else 1.0, np.minimum(raw, 1.0))
        return _scalar_or_array(out, y)

    @property
    def has_inverse_derivative(self):
        return self.alpha != 1.0

    def linear_pieces(self):
        return [(1.0, 1.0)] if self.alpha == 1.0 else None

    def dual(self):
        return DualPower(self.alpha)


@dataclass(frozen=True)
class DualPower(DistortionCurve):
    """``h(t) = 1 - (1 - t) ** beta``."""

    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError("DualPower needs beta > 0")
        b = self.beta
        self._set_flags(ShapeFlags(True, b <= 1, b >= 1, True, True))

    def _eval(self, t):
        return 1.0 - np.power(1.0 - t, self.beta)

    def derivative(self, t):
        with np.errstate(divide="ignore"):
            return self.beta * np.power(1.0 - np.asarray(t, dtype=float), self.beta - 1.0)

    def inverse_derivative(self, y):
        if self.beta == 1.0:
            return None
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            raw = 1.0 - np.power(np.maximum(y, 0.0) / self.beta, 1.0 / (self.beta - 1.0))
        out = np.where(y <= 0.0, 0.0 if self.beta < 1 else 1.0, np.maximum(raw, 0.0))
        return _scalar_or_array(out, y)

    @property
    def has_inverse_derivative(self):
        return self.beta != 1.0

    def linear_pieces(self):
        return [(1.0, 1.0)] if self.beta == 1.0 else None

    def dual(self):
        return Power(self.beta)


@dataclass(frozen=True)
class VarIndicator(DistortionCurve):
    """VaR distortion ``h(t) = 1{t > alpha}``."""

    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise DomainError("VarIndicator needs alpha in [0, 1)")
        at_zero = self.alpha == 0.0
        self._set_flags(ShapeFlags(True, False, at_zero, False, True))

    def _eval(self, t):
        return (t > self.alpha).astype(float)

    def kinks(self):
        return (self.alpha,) if self.alpha > 0 else ()


@dataclass(frozen=True)
class EsCap(DistortionCurve):
    """ES distortion ``h(t) = min(t / alpha, 1)``."""

    alpha: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("EsCap needs alpha in (0, 1)")
        self._set_flags(ShapeFlags(True, False, True, True, True))

    def _eval(self, t):
        return np.minimum(t / self.alpha, 1.0)

    def kinks(self):
        return (self.alpha,)

    def linear_pieces(self):
        return [(self.alpha, 1.0 / self.alpha), (1.0 - self.alpha, 0.0)]

    def dual(self):
        return PiecewiseLinear(((0.0, 0.0), (1.0 - self.alpha, 0.0), (1.0, 1.0)))


@dataclass(frozen=True)
class PiecewiseLinear(DistortionCurve):
    """Linear interpolation through ``breakpoints`` spanning t = 0 .. 1."""

    breakpoints: tuple

    def __post_init__(self):
        pts = tuple((float(a), float(b)) for a, b in self.breakpoints)
        if len(pts) < 2:
            raise DomainError("PiecewiseLinear needs at least two breakpoints")
        ts = [p[0] for p in pts]
        if ts[0] != 0.0 or ts[-1] != 1.0:
            raise DomainError("breakpoints must start at t=0 and end at t=1")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise DomainError("breakpoint abscissae must be strictly increasing")
        if pts[0][1] != 0.0:
            raise DomainError("PiecewiseLinear needs h(0) = 0")
        object.__setattr__(self, "breakpoints", pts)
        slopes = self._slopes()
        dslope = np.diff(slopes)
        self._set_flags(
            ShapeFlags(
                increasing=bool(np.all(slopes >= -SHAPE_TOL)),
                convex=bool(np.all(dslope >= -SHAPE_TOL)),
                concave=bool(np.all(dslope <= SHAPE_TOL)),
                continuous=True,
                normalized=abs(pts[-1][1] - 1.0) <= SHAPE_TOL,
            )
        )

    @classmethod
    def ramp(cls, slope: float, offset: float) -> "PiecewiseLinear":
        """``(slope * t - offset) v 0`` with ``slope - offset = 1``."""
        start = offset / slope
        return cls(((0.0, 0.0), (start, 0.0), (1.0, slope - offset)))

    @classmethod
    def capped(cls, slope: float) -> "PiecewiseLinear":
        """``(slope * t) ^ 1`` for ``slope >= 1``."""
        if slope == 1.0:
            return cls(((0.0, 0.0), (1.0, 1.0)))
        return cls(((0.0, 0.0), (1.0 / slope, 1.0), (1.0, 1.0)))

    def _xy(self):
        xs = np.array([p[0] for p in self.breakpoints])
        ys = np.array([p[1] for p in self.breakpoints])
        return xs, ys

    def _slopes(self):
        xs, ys = self._xy()
        return np.diff(ys) / np.diff(xs)

    def _eval(self, t):
        xs, ys = self._xy()
        lo, hi = ys[0], ys[-1]
        out = np.interp(t, xs, ys)
        if hi >= lo:
            return np.clip(out, lo, hi)
        return out

    def kinks(self):
        return tuple(p[0] for p in self.breakpoints[1:-1])

    def linear_pieces(self):
        xs, _ = self._xy()
        return list(zip(np.diff(xs).tolist(), self._slopes().tolist()))

    def derivative(self, t):
        xs, _ = self._xy()
        idx = np.clip(np.searchsorted(xs, t, side="right") - 1, 0, len(xs) - 2)
        return self._slopes()[idx]

    def dual(self):
        total = self.breakpoints[-1][1]
        pts = tuple((1.0 - a, total - b) for a, b in reversed(self.breakpoints))
        return PiecewiseLinear(pts)


# -- derived curves -----------------------------------------------------------


@dataclass(frozen=True)
class Sampled(DistortionCurve):
    grid: GridFunction

    def __post_init__(self):
        if abs(self.grid.values[0]) > SHAPE_TOL:
            raise DomainError("sampled curve needs h(0) = 0")
        flags = _grid_flags(self.grid.values)
        self._set_flags(
            ShapeFlags(
                increasing=flags.increasing,
                convex=flags.convex,
                concave=flags.concave,
                continuous=True,
                normalized=flags.normalized,
            )
        )

    def _eval(self, t):
        return np.interp(t, self.grid.nodes, self.grid.values)

    def dual(self):
        vals = self.grid.values
        return Sampled(GridFunction(vals[-1] - vals[::-1], monotone=self.grid.monotone))


@dataclass(frozen=True)
class Dual(DistortionCurve):
    """``t -> h(1) - h(1 - t)`` for an arbitrary inner curve."""

    inner: DistortionCurve

    def __post_init__(self):
        f = self.inner.flags
        self._set_flags(
            ShapeFlags(
                increasing=f.increasing,
                convex=f.concave,
                concave=f.convex,
                continuous=f.continuous,
                normalized=f.normalized,
            )
        )

    def _eval(self, t):
        return self.inner.total_mass - self.inner._eval(1.0 - t)

    def kinks(self):
        return tuple(sorted(1.0 - k for k in self.inner.kinks()))

    def derivative(self, t):
        return self.inner.derivative(1.0 - np.asarray(t, dtype=float))

    def inverse_derivative(self, y):
        inv = self.inner.inverse_derivative(y)
        return None if inv is None else 1.0 - np.asarray(inv)

    @property
    def has_inverse_derivative(self):
        return self.inner.has_inverse_derivative

    def dual(self):
        return self.inner


@dataclass(frozen=True)
class Rescaled(DistortionCurve):
    """``t -> factor * h(t)`` with ``factor > 0``."""

    inner: DistortionCurve
    factor: float

    def __post_init__(self):
        if not self.factor > 0:
            raise DomainError("rescaling factor must be positive")
        f = self.inner.flags
        mass = self.factor * self.inner.total_mass
        self._set_flags(
            ShapeFlags(f.increasing, f.convex, f.concave, f.continuous, abs(mass - 1.0) <= SHAPE_TOL)
        )

    def _eval(self, t):
        return self.factor * self.inner._eval(t)

    def kinks(self):
        return self.inner.kinks()

    def derivative(self, t):
        return self.factor * self.inner.derivative(t)

    def inverse_derivative(self, y):
        return self.inner.inverse_derivative(y / self.factor)

    @property
    def has_inverse_derivative(self):
        return self.inner.has_inverse_derivative


@dataclass(frozen=True)
class Envelope(DistortionCurve):
    """Exact pointwise minimum (``mode='min'``) or maximum of several curves."""

    curves: tuple
    mode: str = "min"

    def __post_init__(self):
        curves = tuple(self.curves)
        if not curves:
            raise DomainError("combine needs at least one curve")
        if self.mode not in ("min", "max"):
            raise DomainError(f"unknown envelope mode {self.mode!r}")
        object.__setattr__(self, "curves", curves)
        fl = [c.flags for c in curves]
        grid = _grid_flags(self._eval(unit_grid()))
        if self.mode == "min":
            convex = grid.convex
            concave = all(f.concave for f in fl) or grid.concave
        else:
            convex = all(f.convex for f in fl) or grid.convex
            concave = grid.concave
        self._set_flags(
            ShapeFlags(
                increasing=all(f.increasing for f in fl),
                convex=bool(convex),
                concave=bool(concave),
                continuous=all(f.continuous for f in fl),
                normalized=all(f.normalized for f in fl),
            )
        )

    def _eval(self, t):
        stacked = np.stack([np.asarray(c._eval(t), dtype=float) for c in self.curves])
        return stacked.min(axis=0) if self.mode == "min" else stacked.max(axis=0)

    def kinks(self):
        ks = set()
        for c in self.curves:
            ks.update(c.kinks())
        ts = unit_grid()
        vals = np.stack([c._eval(ts) for c in self.curves])
        winner = vals.argmin(axis=0) if self.mode == "min" else vals.argmax(axis=0)
        for k in np.nonzero(np.diff(winner))[0]:
            ks.add(float(ts[k] + ts[k + 1]) / 2.0)
        return tuple(sorted(k for k in ks if 0.0 < k < 1.0))

    def dual(self):
        masses = [c.total_mass for c in self.curves]
        if max(masses) - min(masses) > 0.0:
            return Dual(self)
        # with a common h(1) the dual of a min is the max of the duals, and vice versa
        return Envelope(tuple(c.dual() for c in self.curves), "max" if self.mode == "min" else "min")

    def attained_by(self, tol: float = SHAPE_TOL, n_points: int = GRID_POINTS):
        """Index of a member equal to the envelope on the grid, or ``None``."""
        ts = unit_grid(n_points)
        env = self._eval(ts)
        for j, c in enumerate(self.curves):
            if np.max(np.abs(c._eval(ts) - env)) <= tol:
                return j
        return None


@dataclass(frozen=True)
class Bernstein(DistortionCurve):
    """Degree-``k`` Bernstein polynomial of a continuous curve."""

    coefficients: tuple
    source_flags: ShapeFlags = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        poly = BPoly(np.array(coeffs).reshape(-1, 1), [0.0, 1.0])
        object.__setattr__(self, "_poly", poly)
        object.__setattr__(self, "_dpoly", poly.derivative())
        src = self.source_flags or _grid_flags(poly(unit_grid()))
        self._set_flags(
            ShapeFlags(src.increasing, src.convex, src.concave, True, abs(coeffs[-1] - 1.0) <= SHAPE_TOL)
        )

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def _eval(self, t):
        return self._poly(t)

    def derivative(self, t):
        return self._dpoly(np.asarray(t, dtype=float))

    def inverse_derivative(self, y):
        y = np.asarray(y, dtype=float)
        out = np.vectorize(lambda v: _bisect_derivative(self, float(v)), otypes=[float])(y)
        return _scalar_or_array(out, y)

    @property
    def has_inverse_derivative(self):
        return self.flags.convex != self.flags.concave


def _bisect_derivative(h: DistortionCurve, y: float, tol: float = 1e-12) -> float:
    """Solve ``h'(t) = y`` on [0, 1] for a curve with monotone derivative."""
    increasing = h.flags.convex
    d0, d1 = float(h.derivative(0.0)), float(h.derivative(1.0))
    if increasing:
        if y <= d0:
            return 0.0
        if y >= d1:
            return 1.0
    else:
        if y >= d0:
            return 0.0
        if y <= d1:
            return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        below = float(h.derivative(mid)) < y
        if below == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _all_equal(curves) -> bool:
    return all(c == curves[0] for c in curves[1:])


def _grid_flags(values: np.ndarray, tol: float = SHAPE_TOL) -> ShapeFlags:
    values = np.asarray(values, dtype=float)
    d1 = np.diff(values)
    d2 = np.diff(values, 2)
    return ShapeFlags(
        increasing=bool(np.all(d1 >= -tol)),
        convex=bool(np.all(d2 >= -tol)),
        concave=bool(np.all(d2 <= tol)),
        continuous=True,
        normalized=abs(values[-1] - 1.0) <= tol and abs(values[0]) <= tol,
    )


def _grid_continuous(h: DistortionCurve, n_points: int) -> bool:
    ts = unit_grid(n_points)
    jumps = np.abs(np.diff(h._eval(ts)))
    k = int(np.argmax(jumps))
    jump = jumps[k]
    if jump <= 1e-6:
        return True
    lo, hi = ts[k], ts[k + 1]
    for _ in range(3):
        fine = np.linspace(lo, hi, 11)
        fj = np.abs(np.diff(h._eval(fine)))
        j = int(np.argmax(fj))
        lo, hi = fine[j], fine[j + 1]
    return bool(np.abs(h._eval(np.array(hi)) - h._eval(np.array(lo))) < 0.5 * jump)


# -- operations -------------------------------------------------------------


def eval_curve(h: DistortionCurve, t):
    """``h(t)``; raises :class:`DomainError` outside [0, 1]."""
    return h(t)


def dual(h: DistortionCurve) -> DistortionCurve:
    return h.dual()


def classify(h: DistortionCurve, n_points: int = GRID_POINTS, tol: float = SHAPE_TOL) -> ShapeReport:
    """Grid-based shape verdicts, reconciled against the analytic flags.

    Analytic flags win; every disagreement is listed in ``conflicts``.
    """
    vals = h._eval(unit_grid(n_points))
    g = _grid_flags(vals, tol)
    grid = ShapeFlags(g.increasing, g.convex, g.concave, _grid_continuous(h, n_points), g.normalized)
    conflicts = tuple(
        name for name in ShapeFlags.__dataclass_fields__ if getattr(grid, name) != getattr(h.flags, name)
    )
    return ShapeReport(flags=h.flags, grid=grid, conflicts=conflicts)


def require_in_h(h: DistortionCurve, what: str = "curve") -> None:
    if not h.in_h:
        raise ShapeError(f"{what} is not a normalized increasing distortion function: {h!r}")


def is_dually_subadditive(h: DistortionCurve, grid_n: int = 200, tol: float = SHAPE_TOL) -> bool:
    """Subadditivity of ``h`` and superadditivity of its dual on an ``x + y <= 1`` grid."""
    require_in_h(h)
    ts = np.arange(grid_n + 1) / grid_n
    hv = h._eval(ts)
    dv = h.dual()._eval(ts)
    i, j = np.triu_indices(grid_n + 1)
    keep = i + j <= grid_n
    i, j = i[keep], j[keep]
    sub = hv[i + j] <= hv[i] + hv[j] + tol
    sup = dv[i + j] >= dv[i] + dv[j] - tol
    return bool(np.all(sub) and np.all(sup))


def bernstein(h: DistortionCurve, k: int) -> Bernstein:
    """``B_k h(x) = sum_r h(r/k) C(k, r) x^r (1-x)^(k-r)``; shape flags carry over from ``h``."""
    if k < 1:
        raise DomainError("Bernstein degree must be >= 1")
    if not h.flags.continuous:
        raise ShapeError("Bernstein approximation needs a continuous curve")
    coeffs = h._eval(np.arange(k + 1) / k)
    f = h.flags
    inherited = ShapeFlags(f.increasing, f.convex, f.concave, True, f.normalized)
    return Bernstein(tuple(coeffs), source_flags=inherited)


def combine(hs: Sequence[DistortionCurve], mode: str = "pointwise_min") -> Envelope:
    """Pointwise min/max of a nonempty list of curves (exact, grid-sampleable)."""
    modes = {"pointwise_min": "min", "min": "min", "pointwise_max": "max", "max": "max"}
    if mode not in modes:
        raise DomainError(f"unknown combine mode {mode!r}")
    return Envelope(tuple(hs), modes[mode])


def is_identity(h: DistortionCurve, n_points: int = GRID_POINTS, tol: float = SHAPE_TOL) -> bool:
    ts = unit_grid(n_points)
    return bool(np.max(np.abs(h._eval(ts) - ts)) <= tol)


def lower_convex_envelope(h: DistortionCurve, n_points: int = GRID_POINTS) -> PiecewiseLinear:
    """Greatest convex piecewise-linear minorant of ``h`` sampled on a grid."""
    ts = unit_grid(n_points)
    vs = h._eval(ts)
    hull: list[int] = []
    for k in range(n_points):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            cross = (ts[b] - ts[a]) * (vs[k] - vs[a]) - (vs[b] - vs[a]) * (ts[k] - ts[a])
            if cross <= 0:
                hull.pop()
            else:
                break
        hull.append(k)
    return PiecewiseLinear(tuple((float(ts[k]), float(vs[k])) for k in hull))


# -- JSON literals ------------------------------------------------------------


def curve_from_dict(literal: dict) -> DistortionCurve:
    """Build a curve from a JSON literal such as ``{"family": "power", "alpha": 1.2}``."""
    try:
        family = literal["family"].lower()
        if family == "power":
            return Power(float(literal["alpha"]))
        if family == "dualpower":
            return DualPower(float(literal["beta"]))
        if family == "pwl":
            return PiecewiseLinear(tuple(tuple(p) for p in literal["points"]))
        if family == "var":
            return VarIndicator(float(literal["alpha"]))
        if family == "es":
            return EsCap(float(literal["alpha"]))
        if family == "identity":
            return Identity()
    except (KeyError, TypeError, AttributeError) as exc:
        raise DomainError(f"malformed curve literal {literal!r}") from exc
    raise DomainError(f"unknown curve family {literal.get('family')!r}")


def curve_to_dict(h: DistortionCurve) -> dict:
    if isinstance(h, Power):
        return {"family": "power", "alpha": h.alpha}
    if isinstance(h, DualPower):
        return {"family": "dualpower", "beta": h.beta}
    if isinstance(h, PiecewiseLinear):
        return {"family": "pwl", "points": [list(p) for p in h.breakpoints]}
    if isinstance(h, VarIndicator):
        return {"family": "var", "alpha": h.alpha}
    if isinstance(h, EsCap):
        return {"family": "es", "alpha": h.alpha}
    if isinstance(h, Identity):
        return {"family": "identity"}
    return {"family": type(h).__name__.lower(), "grid": h.sampled().values.tolist()}
