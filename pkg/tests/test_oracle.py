import numpy as np
import pytest
from scipy import integrate

from riskshare import distortion as D
from riskshare import measures as M
from riskshare.errors import ConeError, DomainError
from riskshare.oracle import (
    LevelGrid,
    convex_order_leq,
    level_grid,
    level_split,
    oracle_constant_share,
    oracle_levelwise,
    stop_loss,
)


def test_single_curve_matches_direct_integral():
    # ∫_0^1 (1 - x^0.3) dx on the uniform law
    assert oracle_levelwise([D.DualPower(0.3)], M.Uniform(0, 1)) == pytest.approx(1 - 1 / 1.3, abs=1e-4)


def test_lognormal_identity_gives_mean():
    assert oracle_levelwise([D.Identity()], M.LogNormal(0, 1)) == pytest.approx(np.exp(0.5), rel=1e-4)


def test_discrete_exact():
    d = M.Discrete(((1.0, 0.5), (3.0, 0.5)))
    h = D.Power(2.0)
    assert oracle_levelwise([h], d) == pytest.approx(M.riskmetric(h, d), abs=1e-14)


def test_level_split_pair_by_hand():
    hs = (D.Power(2.0), D.Power(2.0))
    # split evenly: 2 (s/2)^2 = s^2 / 2
    np.testing.assert_allclose(level_split(hs, [0.2, 1.0], "min"), [0.02, 0.5], atol=1e-12)


def test_level_split_max_of_concave_pair():
    hs = (D.Power(0.5), D.Power(0.5))
    np.testing.assert_allclose(level_split(hs, [1.0], "max"), [2 * np.sqrt(0.5)], atol=1e-9)


def test_negative_law_uses_mirror():
    d = M.negate(M.Uniform(0, 1))
    h = D.DualPower(0.3)
    assert oracle_levelwise([h], d) == pytest.approx(M.riskmetric(h, d), abs=1e-4)


def test_two_sided_rejected():
    with pytest.raises(ConeError):
        oracle_levelwise([D.Power(2.0)], M.Uniform(-1, 1))


def test_level_grid_shapes():
    g = level_grid(M.LogNormal(0, 1), 101)
    assert np.all(np.diff(g.levels) > 0)
    assert np.all(np.diff(g.survival_values) <= 0)
    assert g.survival_values[-1] < 1e-100


def test_level_grid_validation():
    with pytest.raises(DomainError):
        LevelGrid(np.array([1.0, 0.5]), np.array([0.5, 0.2]))


@pytest.mark.parametrize("alphas", [(1.2, 1.4), (1.2, 5.0)])
def test_constant_share_pair(alphas):
    w, v = oracle_constant_share(alphas, 10000)
    ps = np.linspace(0, 1, 200001)
    ref = np.min(ps ** alphas[0] + (1 - ps) ** alphas[1])
    assert v == pytest.approx(ref, abs=1e-9)
    assert sum(w) == pytest.approx(1.0)


def test_constant_share_bounds():
    with pytest.raises(DomainError):
        oracle_constant_share([2.0] * 6, 10)
    with pytest.raises(DomainError):
        oracle_constant_share([0.9, 2.0], 10)


class TestConvexOrder:
    def test_spread_dominates_mean(self):
        x = M.Discrete(((1.0, 1.0),))
        y = M.Discrete(((0.0, 0.5), (2.0, 0.5)))
        assert convex_order_leq(x, y)
        assert not convex_order_leq(y, x)

    def test_unequal_means(self):
        assert not convex_order_leq(M.Discrete(((1.0, 1.0),)), M.Discrete(((2.0, 1.0),)))

    def test_stop_loss_against_quad(self):
        d = M.Discrete(((0.0, 0.2), (1.0, 0.3), (4.0, 0.5)))
        # E[(X - t)+] = ∫_t^∞ S(x) dx
        for t in (0.0, 0.5, 2.0, 5.0):
            ref = integrate.quad(lambda x: float(d.prob_ge(x)), t, 5.0, points=[1.0, 4.0])[0] if t < 5 else 0.0
            assert stop_loss(d, t)[0] == pytest.approx(ref, abs=1e-9)
