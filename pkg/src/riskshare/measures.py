"""Loss distributions and the distortion riskmetric functional.

For ``X`` with law ``d`` and a curve ``h`` with dual ``h~``::

    rho_h(X) = int_0^inf h(P(X >= x)) dx - int_-inf^0 h~(P(X < x)) dx

which equals the usual two-integral definition because
``h(P(X >= x)) - h(1) = -h~(P(X < x))``. Writing the negative half through
the dual avoids cancellation when ``P(X >= x)`` is close to one.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, stats

from .distortion import DistortionCurve, EsCap
from .errors import ConeError, DivergenceError, DomainError

log = logging.getLogger(__name__)

QUAD_ABS_TOL = 1e-8
TAIL_LEVEL = 1e-10
CONES = ("nonnegative", "nonpositive", "general")


class Distribution:
    """Law of a loss ``X``; subclasses provide tail probabilities and quantiles."""

    lower: float
    upper: float
    # Pareto-type decay exponents of the upper / lower tails (inf = lighter than any power)
    upper_tail_index: float = math.inf
    lower_tail_index: float = math.inf

    def prob_ge(self, x):
        """``P(X >= x)``."""
        raise NotImplementedError

    def prob_lt(self, x):
        """``P(X < x)``."""
        raise NotImplementedError

    def isf(self, u):
        """Upper quantile ``inf{x : P(X <= x) >= 1 - u}`` (the VaR at level ``u``)."""
        raise NotImplementedError

    def ppf(self, u):
        """Lower quantile ``inf{x : P(X <= x) >= u}``."""
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float]:
        return (self.lower, self.upper)

    @property
    def cone(self) -> str:
        return _cone_of(self.lower, self.upper, getattr(self, "declared_cone", None))

    @property
    def is_discrete(self) -> bool:
        return False

    def mean(self) -> float:
        return riskmetric(_IDENTITY, self)


def _cone_of(lower, upper, declared):
    inferred = "nonnegative" if lower >= 0 else "nonpositive" if upper <= 0 else "general"
    if declared is None:
        return inferred
    if declared not in CONES:
        raise DomainError(f"unknown cone {declared!r}")
    if declared == "nonnegative" and lower < 0:
        raise ConeError("cone=nonnegative requires a support bounded below by 0")
    if declared == "nonpositive" and upper > 0:
        raise ConeError("cone=nonpositive requires a support bounded above by 0")
    return declared


@functools.lru_cache(maxsize=256)
def _frozen_law(d):
    return d._make_frozen()


class _ScipyLaw(Distribution):
    """Continuous law backed by a frozen ``scipy.stats`` distribution."""

    def _make_frozen(self):
        raise NotImplementedError

    def _frozen(self):
        # freezing is far slower than evaluating, so build it once per law
        return _frozen_law(self)

    def prob_ge(self, x):
        return self._frozen().sf(x)

    def prob_lt(self, x):
        return self._frozen().cdf(x)

    def isf(self, u):
        return self._frozen().isf(u)

    def ppf(self, u):
        return self._frozen().ppf(u)


@dataclass(frozen=True)
class Uniform(_ScipyLaw):
    a: float = 0.0
    b: float = 1.0
    declared_cone: str | None = None

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError("Uniform needs a < b")
        _cone_of(self.a, self.b, self.declared_cone)

    @property
    def lower(self):
        return self.a

    @property
    def upper(self):
        return self.b

    def _make_frozen(self):
        return stats.uniform(loc=self.a, scale=self.b - self.a)


@dataclass(frozen=True)
class Pareto(_ScipyLaw):
    """Pareto law with shape ``alpha`` and scale ``theta``.

    ``form="type1"``: ``S(x) = (theta / x) ** alpha`` for ``x >= theta``.
    ``form="lomax"``: ``S(x) = (theta / (theta + x)) ** alpha`` for ``x >= 0``.
    """

    alpha: float = 3.0
    theta: float = 2.0
    form: str = "type1"
    declared_cone: str | None = None

    def __post_init__(self):
        if not self.alpha > 1 or not self.theta > 0:
            raise DomainError("Pareto needs alpha > 1 and theta > 0")
        if self.form not in ("type1", "lomax"):
            raise DomainError(f"unknown Pareto form {self.form!r}")
        _cone_of(self.lower, self.upper, self.declared_cone)

    @property
    def lower(self):
        return self.theta if self.form == "type1" else 0.0

    upper = math.inf

    @property
    def upper_tail_index(self):
        return self.alpha

    def _make_frozen(self):
        if self.form == "type1":
            return stats.pareto(b=self.alpha, scale=self.theta)
        return stats.lomax(c=self.alpha, scale=self.theta)


@dataclass(frozen=True)
class LogNormal(_ScipyLaw):
    mu: float = 0.0
    sigma: float = 1.0
    declared_cone: str | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("LogNormal needs sigma > 0")
        _cone_of(0.0, math.inf, self.declared_cone)

    lower = 0.0
    upper = math.inf

    def _make_frozen(self):
        return stats.lognorm(s=self.sigma, scale=math.exp(self.mu))


@dataclass(frozen=True, eq=False)
class Discrete(Distribution):
    """Finitely many atoms ``(value, probability)``; duplicate values are merged."""

    atoms: tuple
    declared_cone: str | None = None

    def __post_init__(self):
        merged: dict[float, float] = {}
        for value, prob in self.atoms:
            value, prob = float(value), float(prob)
            if not prob > 0:
                raise DomainError("Discrete probabilities must be positive")
            merged[value] = merged.get(value, 0.0) + prob
        if not merged:
            raise DomainError("Discrete needs at least one atom")
        total = math.fsum(merged.values())
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"Discrete probabilities sum to {total!r}, not 1")
        atoms = tuple(sorted(merged.items()))
        object.__setattr__(self, "atoms", atoms)
        values = np.array([a[0] for a in atoms])
        probs = np.array([a[1] for a in atoms])
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        # tail[k] = P(X >= values[k])
        object.__setattr__(self, "tail", np.cumsum(probs[::-1])[::-1])
        _cone_of(values[0], values[-1], self.declared_cone)

    def __eq__(self, other):
        return isinstance(other, Discrete) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    @property
    def lower(self):
        return float(self.values[0])

    @property
    def upper(self):
        return float(self.values[-1])

    @property
    def is_discrete(self):
        return True

    def prob_ge(self, x):
        idx = np.searchsorted(self.values, x, side="left")
        ext = np.append(self.tail, 0.0)
        return ext[idx]

    def prob_lt(self, x):
        return 1.0 - self.prob_ge(x)

    def isf(self, u):
        # smallest x with P(X <= x) >= 1 - u, i.e. P(X > x) <= u
        u = np.asarray(u, dtype=float)
        above = np.append(self.tail[1:], 0.0)  # P(X > values[k])
        idx = np.searchsorted(-above, -u - 1e-15, side="left")
        out = self.values[np.minimum(idx, len(self.values) - 1)]
        return float(out) if out.ndim == 0 else out

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        cdf = np.cumsum(self.probs)
        idx = np.searchsorted(cdf, u - 1e-15, side="left")
        out = self.values[np.minimum(idx, len(self.values) - 1)]
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        return float(np.dot(self.values, self.probs))


@dataclass(frozen=True)
class Negated(Distribution):
    """Law of ``-X`` where ``X`` has law ``inner``."""

    inner: Distribution

    @property
    def lower(self):
        return -self.inner.upper

    @property
    def upper(self):
        return -self.inner.lower

    @property
    def upper_tail_index(self):
        return self.inner.lower_tail_index

    @property
    def lower_tail_index(self):
        return self.inner.upper_tail_index

    @property
    def is_discrete(self):
        return self.inner.is_discrete

    def prob_ge(self, x):
        # P(-X >= x) = P(X <= -x) = 1 - P(X > -x); for continuous laws = P(X < -x)
        if self.inner.is_discrete:
            return 1.0 - self.inner.prob_ge(np.nextafter(-np.asarray(x, dtype=float), np.inf))
        return self.inner.prob_lt(-np.asarray(x, dtype=float))

    def prob_lt(self, x):
        # P(-X < x) = P(X > -x); for continuous laws = P(X >= -x), which keeps tail precision
        if self.inner.is_discrete:
            return 1.0 - self.prob_ge(x)
        return self.inner.prob_ge(-np.asarray(x, dtype=float))

    def isf(self, u):
        return -self.inner.ppf(u)

    def ppf(self, u):
        return -self.inner.isf(u)


@dataclass(frozen=True)
class Affine(Distribution):
    """Law of ``scale * X + shift`` with ``scale > 0``."""

    inner: Distribution
    scale: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        if not self.scale > 0:
            raise DomainError("Affine scale must be positive; use negate() for sign flips")

    @property
    def lower(self):
        return self.scale * self.inner.lower + self.shift

    @property
    def upper(self):
        return self.scale * self.inner.upper + self.shift

    @property
    def upper_tail_index(self):
        return self.inner.upper_tail_index

    @property
    def lower_tail_index(self):
        return self.inner.lower_tail_index

    @property
    def is_discrete(self):
        return self.inner.is_discrete

    def _back(self, x):
        return (np.asarray(x, dtype=float) - self.shift) / self.scale

    def prob_ge(self, x):
        return self.inner.prob_ge(self._back(x))

    def prob_lt(self, x):
        return self.inner.prob_lt(self._back(x))

    def isf(self, u):
        return self.scale * self.inner.isf(u) + self.shift

    def ppf(self, u):
        return self.scale * self.inner.ppf(u) + self.shift


def negate(d: Distribution) -> Distribution:
    """Law of ``-X``; ``negate(negate(d))`` returns ``d`` itself."""
    if isinstance(d, Negated):
        return d.inner
    if isinstance(d, Discrete):
        return Discrete(tuple((-v, p) for v, p in d.atoms))
    if isinstance(d, Uniform):
        return Uniform(-d.b, -d.a)
    return Negated(d)


def scale(d: Distribution, factor: float) -> Distribution:
    """Law of ``factor * X`` for ``factor > 0``."""
    if isinstance(d, Discrete):
        return Discrete(tuple((factor * v, p) for v, p in d.atoms))
    if isinstance(d, Uniform):
        return Uniform(factor * d.a, factor * d.b)
    return Affine(d, scale=factor)


def shift(d: Distribution, c: float) -> Distribution:
    """Law of ``X + c``."""
    if isinstance(d, Discrete):
        return Discrete(tuple((v + c, p) for v, p in d.atoms))
    if isinstance(d, Uniform):
        return Uniform(d.a + c, d.b + c)
    return Affine(d, shift=c)


def require_cone(d: Distribution, *allowed: str) -> str:
    cone = d.cone
    if cone not in allowed:
        raise ConeError(f"distribution cone {cone!r} not in {allowed}")
    return cone


# -- riskmetric ---------------------------------------------------------------


def riskmetric(h: DistortionCurve, d: Distribution) -> float:
    """Distortion riskmetric ``rho_h`` of the law ``d``.

    Discrete laws use the exact Choquet sum; continuous laws use adaptive
    quadrature split at the kinks of ``h`` and at geometric tail quantiles.
    """
    if d.is_discrete:
        return _discrete_riskmetric(h, d)
    pos = _upper_part(h, d)
    neg = _upper_part(h.dual(), negate(d))
    return pos - neg


def _discrete_riskmetric(h: DistortionCurve, d: Distribution) -> float:
    if isinstance(d, Discrete):
        values, tail = d.values, d.tail
    else:
        dd = _as_discrete(d)
        values, tail = dd.values, dd.tail
    ht = h.at(tail)
    nxt = np.append(ht[1:], 0.0)
    # sum_k v_k [h(S_k) - h(S_{k+1})] written around 0 to keep both halves exact
    return float(math.fsum(values * (ht - nxt)))


def _as_discrete(d: Distribution) -> Discrete:
    if isinstance(d, Discrete):
        return d
    if isinstance(d, Negated):
        return negate(_as_discrete(d.inner))
    if isinstance(d, Affine):
        return shift(scale(_as_discrete(d.inner), d.scale), d.shift)
    raise DomainError(f"{d!r} is not discrete")


def local_exponent(h: DistortionCurve, s_small: float = 1e-12, s_large: float = 1e-9) -> float:
    """Apparent power ``p`` in ``h(s) ~ s**p`` as ``s -> 0`` (inf if ``h`` vanishes)."""
    a, b = float(h.at(s_small)), float(h.at(s_large))
    if b <= 0.0:
        return math.inf
    if a <= 0.0:
        return math.inf
    return math.log(b / a) / math.log(s_large / s_small)


def check_tail(h: DistortionCurve, d: Distribution) -> None:
    """Raise :class:`DivergenceError` unless ``h(P(X >= x))`` is integrable at +inf."""
    if d.upper < math.inf:
        return
    p = local_exponent(h)
    if p <= 1e-9:
        raise DivergenceError(f"h does not vanish at 0; upper tail of {d!r} is not integrable")
    index = d.upper_tail_index
    if index * p <= 1.0 + 1e-9:
        raise DivergenceError(
            f"tail integral diverges: survival decays like x^-{index:g} and h like s^{p:.4g}"
        )


def _upper_part(h: DistortionCurve, d: Distribution) -> float:
    """``int_0^inf h(P(X >= x)) dx``."""
    if d.upper <= 0.0:
        return 0.0
    check_tail(h, d)
    start = max(d.lower, 0.0)
    total = start * h.total_mass if start > 0 else 0.0
    f = lambda x: float(h.at(float(d.prob_ge(x))))  # noqa: E731
    cuts = [start]
    for k in h.kinks():
        x = float(d.isf(k))
        if start < x < d.upper:
            cuts.append(x)
    if d.upper < math.inf:
        cuts.append(d.upper)
        cuts = sorted(set(cuts))
        for a, b in zip(cuts, cuts[1:]):
            total += _quad(f, a, b)
        return total
    cuts = sorted(set(cuts))
    mid = float(d.isf(0.5))
    tail_levels = [10.0 ** -k for k in range(1, 320)]
    edges = sorted(set(cuts + [x for x in [mid] if x > start]))
    body_end = edges[-1]
    for a, b in zip(edges, edges[1:]):
        total += _quad(f, a, b)
    # geometric tail sweep: stop once both the last chunk and the tail proxy are negligible
    prev = body_end
    for u in tail_levels:
        x = float(d.isf(u))
        if not math.isfinite(x) or x <= prev:
            continue
        chunk = _quad(f, prev, x)
        total += chunk
        prev = x
        proxy = x * float(h.at(u))
        if u <= TAIL_LEVEL and abs(chunk) < QUAD_ABS_TOL * 1e-2 and proxy < QUAD_ABS_TOL:
            break
    else:
        log.warning("tail sweep exhausted before the integrand became negligible")
    return total


def _quad(f, a, b) -> float:
    if b <= a:
        return 0.0
    val, _err = integrate.quad(f, a, b, epsabs=QUAD_ABS_TOL * 1e-2, epsrel=1e-11, limit=200)
    return val


# -- VaR / ES -----------------------------------------------------------------


def var(d: Distribution, alpha: float) -> float:
    """``VaR_alpha(X) = inf{x : P(X <= x) >= 1 - alpha}`` for ``alpha`` in [0, 1)."""
    if not 0.0 <= alpha < 1.0:
        raise DomainError("VaR level must lie in [0, 1)")
    return float(d.isf(alpha))


def es(d: Distribution, beta: float) -> float:
    """``ES_beta(X) = (1 / beta) int_0^beta VaR_g(X) dg`` for ``beta`` in (0, 1)."""
    if not 0.0 < beta < 1.0:
        raise DomainError("ES level must lie in (0, 1)")
    if d.upper == math.inf and d.upper_tail_index <= 1.0:
        raise DivergenceError("ES diverges: the upper tail has infinite mean")
    if d.is_discrete:
        dd = _as_discrete(d)
        # VaR_g is a step function in g; integrate it exactly
        above = np.append(dd.tail[1:], 0.0)  # P(X > v_k), decreasing in k
        total = 0.0
        g_prev = 0.0
        for k in range(len(dd.values) - 1, -1, -1):
            g_next = min(1.0, above[k - 1]) if k > 0 else 1.0
            lo, hi = g_prev, min(g_next, beta)
            if hi > lo:
                total += (hi - lo) * dd.values[k]
            g_prev = max(g_prev, g_next)
            if g_prev >= beta:
                break
        return total / beta
    f = lambda g: float(d.isf(g))  # noqa: E731
    pts = [b for b in (1e-8, 1e-4) if b < beta]
    edges = [0.0] + pts + [beta]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        val, _ = integrate.quad(f, a, b, epsabs=1e-12, epsrel=1e-12, limit=200)
        total += val
    return total / beta


def es_via_riskmetric(d: Distribution, beta: float) -> float:
    return riskmetric(EsCap(beta), d)


# -- JSON literals ------------------------------------------------------------


def distribution_from_dict(literal: dict) -> Distribution:
    """Build a law from ``{"family": "uniform", "a": 0, "b": 1}`` etc.

    A ``"negate": true`` flag wraps the result as the law of ``-X``.
    """
    try:
        family = literal["family"].lower()
        cone = literal.get("cone")
        if family == "uniform":
            d = Uniform(float(literal.get("a", 0.0)), float(literal.get("b", 1.0)))
        elif family == "pareto":
            d = Pareto(float(literal["alpha"]), float(literal["theta"]), literal.get("form", "type1"))
        elif family == "lognormal":
            d = LogNormal(float(literal.get("mu", 0.0)), float(literal.get("sigma", 1.0)))
        elif family == "discrete":
            d = Discrete(tuple((float(v), float(p)) for v, p in literal["atoms"]))
        else:
            raise DomainError(f"unknown distribution family {family!r}")
    except (KeyError, TypeError, AttributeError) as exc:
        raise DomainError(f"malformed distribution literal {literal!r}") from exc
    if literal.get("negate"):
        d = negate(d)
    if cone is not None:
        _cone_of(d.lower, d.upper, cone)
    return d


def level_points(d: Distribution, n_levels: int = 2001, tail_decades: int = 300) -> np.ndarray:
    """Loss levels for grid integration: quantile-equispaced body plus a geometric upper tail."""
    u = np.arange(n_levels, 0, -1) / n_levels
    body = d.isf(np.clip(u, 0.0, 1.0))
    xs = [np.atleast_1d(body)]
    if d.upper == math.inf:
        tail_u = np.logspace(math.log10(1.0 / n_levels), -tail_decades, 40 * tail_decades // 10)
        xs.append(np.atleast_1d(d.isf(tail_u)))
    else:
        xs.append(np.array([d.upper]))
    pts = np.concatenate(xs)
    pts = pts[np.isfinite(pts)]
    return np.unique(pts)


def _identity():
    from .distortion import Identity

    return Identity()


_IDENTITY = _identity()
