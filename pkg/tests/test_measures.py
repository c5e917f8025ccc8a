import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from riskshare import distortion as D
from riskshare import measures as M
from riskshare.errors import ConeError, DivergenceError, DomainError


def test_uniform_dualpower():
    # ∫_0^1 (1 - x^0.3) dx = 1 - 1/1.3
    assert M.riskmetric(D.DualPower(0.3), M.Uniform(0, 1)) == pytest.approx(1 - 1 / 1.3, abs=1e-10)


def test_negated_uniform_uses_dual():
    d = M.negate(M.Uniform(0, 1))
    # ρ_h(-U) = -ρ_{h~}(U) with h~(t) = t^0.3
    assert M.riskmetric(D.DualPower(0.3), d) == pytest.approx(-1 / 1.3, abs=1e-10)


@pytest.mark.parametrize("d", [M.Uniform(0, 1), M.LogNormal(0, 1), M.Pareto(3, 2), M.Discrete(((1, .2), (4, .8)))])
def test_identity_gives_mean(d):
    assert M.riskmetric(D.Identity(), d) == pytest.approx(d.mean(), rel=1e-9)


def test_lognormal_mean():
    assert M.LogNormal(0, 1).mean() == pytest.approx(math.exp(0.5), rel=1e-10)


def test_discrete_exact_sum():
    d = M.Discrete(((0.0, 0.5), (2.0, 0.3), (5.0, 0.2)))
    h = D.Power(2.0)
    # layers: [0,2) with S=0.5, [2,5) with S=0.2
    assert M.riskmetric(h, d) == pytest.approx(2 * 0.25 + 3 * 0.04, abs=1e-15)


def test_discrete_merges_atoms():
    d = M.Discrete(((1.0, 0.25), (1.0, 0.25), (3.0, 0.5)))
    assert list(d.values) == [1.0, 3.0]
    assert list(d.probs) == pytest.approx([0.5, 0.5])


def test_discrete_requires_unit_mass():
    with pytest.raises(DomainError):
        M.Discrete(((1.0, 0.3),))


def test_divergence_detected():
    with pytest.raises(DivergenceError):
        M.riskmetric(D.Power(0.3), M.Pareto(3, 2))


def test_pareto_type1_survival():
    d = M.Pareto(3, 2)
    assert float(d.prob_ge(4.0)) == pytest.approx((2 / 4) ** 3)
    assert d.upper_tail_index == 3


def test_pareto_lomax_form():
    d = M.Pareto(3, 2, form="lomax")
    assert float(d.prob_ge(2.0)) == pytest.approx((1 + 1) ** -3)
    assert d.lower == 0


@pytest.mark.parametrize("beta", [0.05, 0.2, 0.5, 0.95])
@pytest.mark.parametrize("d", [M.Uniform(0, 1), M.LogNormal(0, 0.5), M.Discrete(((1, .1), (2, .4), (7, .5)))])
def test_es_matches_riskmetric(beta, d):
    assert M.es(d, beta) == pytest.approx(M.es_via_riskmetric(d, beta), rel=1e-8, abs=1e-10)


def test_es_against_quantile_integral():
    d = M.LogNormal(0, 1)
    beta = 0.1
    ref = integrate.quad(lambda u: stats.lognorm(1).isf(u), 0, beta, limit=200)[0] / beta
    assert M.es(d, beta) == pytest.approx(ref, rel=1e-8)


def test_var_upper_quantile():
    d = M.Discrete(((1, 0.5), (3, 0.5)))
    assert M.var(d, 0.5) == 1.0
    assert M.var(d, 0.4) == 3.0
    assert M.var(M.Uniform(0, 1), 0.3) == pytest.approx(0.7)


def test_affine_shift_adds_constant():
    d = M.Uniform(0, 1)
    h = D.DualPower(2.0)
    assert M.riskmetric(h, M.shift(d, 3.0)) == pytest.approx(M.riskmetric(h, d) + 3.0, abs=1e-9)


def test_cone_check():
    with pytest.raises(ConeError):
        M.require_cone(M.Uniform(-1, 1), "L+")


def test_distribution_from_dict():
    d = M.distribution_from_dict({"family": "uniform", "a": 0, "b": 2, "negate": True})
    assert d.lower == -2 and d.upper == 0
    with pytest.raises(DomainError):
        M.distribution_from_dict({"family": "cauchy"})


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-5, 5))
def test_translation_and_scaling_on_discrete(c, s):
    d = M.Discrete(((0.0, 0.3), (1.0, 0.3), (4.0, 0.4)))
    h = D.DualPower(2.5)
    base = M.riskmetric(h, d)
    moved = M.Discrete(tuple((c * v + s, p) for v, p in d.atoms))
    assert M.riskmetric(h, moved) == pytest.approx(c * base + s, rel=1e-12, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(0.01, 1.0)), min_size=1, max_size=6))
def test_dual_negation_identity_discrete(atoms):
    tot = sum(p for _, p in atoms)
    d = M.Discrete(tuple((v, p / tot) for v, p in atoms[:-1]) + ((atoms[-1][0], 1 - sum(p / tot for _, p in atoms[:-1])),))
    h = D.Power(1.7)
    lhs = M.riskmetric(h, d)
    rhs = -M.riskmetric(h.dual(), M.Discrete(tuple((-v, p) for v, p in d.atoms)))
    assert lhs == pytest.approx(rhs, abs=1e-9)


@pytest.mark.parametrize("beta", [0.0, 1.0, 1.5])
def test_es_level_domain(beta):
    with pytest.raises(DomainError):
        M.es(M.Uniform(0, 1), beta)
