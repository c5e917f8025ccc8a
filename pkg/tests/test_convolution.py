import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riskshare import convolution as C
from riskshare import distortion as D
from riskshare.errors import DomainError
from riskshare.oracle import level_split


@pytest.mark.parametrize(
    "alphas, w1, value",
    [((1.2, 1.4), 0.5129, 0.8141), ((1.2, 5.0), 0.3371, 0.3992)],
)
def test_power_pair_at_one(alphas, w1, value):
    r = C.inf_convolve([D.Power(a) for a in alphas], 1.0)
    assert r.weights[0] == pytest.approx(w1, abs=5e-4)
    assert r.value == pytest.approx(value, abs=5e-4)
    assert sum(r.weights) == pytest.approx(1.0, abs=1e-12)


def test_first_order_condition():
    r = C.inf_convolve([D.Power(1.2), D.Power(1.4)], 1.0)
    w1, w2 = r.weights
    assert 1.2 * w1**0.2 == pytest.approx(1.4 * w2**0.4, rel=1e-10)


@pytest.mark.parametrize("mode, split_mode", [("inf", "min"), ("sup", "max")])
@pytest.mark.parametrize(
    "hs",
    [
        (D.Power(1.5), D.Power(3.0)),
        (D.DualPower(0.3), D.DualPower(0.6)),
        (D.Power(2.0), D.DualPower(0.5)),
        (D.PiecewiseLinear.ramp(1.24, 0.24), D.PiecewiseLinear.ramp(1.10, 0.10)),
    ],
)
def test_matches_grid_search(hs, mode, split_mode):
    if mode == "sup":
        hs = tuple(h.dual() for h in hs)
    xs = np.linspace(0.0, 1.0, 21)
    main = C.convolution_values(hs, xs, mode)
    ref = level_split(hs, xs, split_mode)
    np.testing.assert_allclose(main, ref, atol=1e-7)


def test_triple_matches_coordinate_search():
    hs = (D.Power(1.3), D.Power(2.0), D.DualPower(0.4))
    xs = np.array([0.2, 0.5, 0.9, 1.0])
    np.testing.assert_allclose(C.convolution_values(hs, xs, "inf"), level_split(hs, xs, "min"), atol=1e-6)


def test_sup_of_ramp_duals_kinks():
    hs = [D.PiecewiseLinear.ramp(1.24, 0.24), D.PiecewiseLinear.ramp(1.10, 0.10)]
    sup = C.piecewise_convolve([h.dual() for h in hs], "sup")
    assert min(abs(k - 1 / 1.24) for k in sup.kinks()) < 1e-12
    assert float(sup.at(0.5)) == pytest.approx(0.62, abs=1e-12)


def test_sup_of_dualpower_duals_at_one():
    # max_p p^0.3 + (1-p)^0.6
    ps = np.linspace(0, 1, 2_000_001)
    ref = np.max(ps**0.3 + (1 - ps) ** 0.6)
    assert C.sup_convolve([D.Power(0.3), D.Power(0.6)], 1.0).value == pytest.approx(ref, abs=1e-10)


def test_normalized_sup_dual_power_pair():
    f = C.normalized_sup_dual([D.Power(2.0), D.Power(2.0)])
    ts = np.linspace(0, 1, 11)
    np.testing.assert_allclose(f.at(ts), (2 * ts - ts**2 / 2) / 1.5, atol=1e-10)


def test_grid_convolve_endpoint():
    g = C.grid_convolve([D.Power(2.0), D.Power(2.0)], "inf", 101)
    assert g(1.0) == pytest.approx(0.5, abs=1e-12)
    assert g(0.0) == 0.0


def test_single_curve_is_itself():
    h = D.Power(2.5)
    assert C.inf_convolve([h], 0.4).value == pytest.approx(0.4**2.5)


def test_inputs_validated():
    with pytest.raises(DomainError):
        C.inf_convolve([D.Power(2.0)], 1.5)
    with pytest.raises(DomainError):
        C.inf_convolve([], 0.5)
    with pytest.raises(DomainError):
        C.convolve([D.Power(2.0)], 0.5, "mid")


def test_convolution_curve_is_convex_for_convex_inputs():
    g = C.convolution_curve([D.Power(1.5), D.DualPower(0.3)], "inf")
    v = g.at(np.linspace(0, 1, 201))
    assert np.all(np.diff(v, 2) >= -1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(1.05, 6.0), st.floats(1.05, 6.0), st.floats(0.0, 1.0))
def test_inf_below_each_curve(a, b, x):
    hs = [D.Power(a), D.Power(b)]
    r = C.inf_convolve(hs, x)
    assert r.value <= min(x**a, x**b) + 1e-12
    assert r.value >= 0.0
    assert sum(r.weights) == pytest.approx(x, abs=1e-12)
