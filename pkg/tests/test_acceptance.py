"""Acceptance criteria 1-11, one PASS/FAIL line each.

Every line is also repeated in the "acceptance criteria" section of the
pytest terminal summary. Tolerances are the required ones; nothing here is
loosened to make a criterion pass.
"""

import math
import time

import numpy as np
import pytest

from riskshare import allocation as A
from riskshare import distortion as D
from riskshare import measures as M
from riskshare import portfolio as P
from riskshare import tables
from riskshare.convolution import piecewise_convolve
from riskshare.errors import DivergenceError
from riskshare.infconv import (
    comonotonic_infconv,
    countermonotonic_infconv,
    divergence_certificate,
    es_group_value,
    unconstrained_infconv,
)
from riskshare.oracle import convex_order_leq, oracle_constant_share, oracle_levelwise

SEED = 20240611


def _fmt(x):
    return "diverges" if not math.isfinite(x) else f"{x:.4f}"


def test_criterion_01_constant_share_table(report):
    t0 = time.perf_counter()
    rows = tables.table2_rows()
    elapsed = time.perf_counter() - t0
    devs = [max(abs(r.p1 - r.reference[0]), abs(r.p2 - r.reference[1]), abs(r.value - r.reference[2])) for r in rows]
    foc = [1.2 * rows[0].p1**0.2 - 1.4 * rows[0].p2**0.4]
    ok = max(devs) <= 5e-4 and elapsed < 1.0 and abs(foc[0]) < 1e-9
    assert report(1, ok, f"max entry deviation {max(devs):.2e} (tol 5e-4), runtime {elapsed:.3f}s (< 1s)")


def test_criterion_02_counter_column(report):
    t0 = time.perf_counter()
    rows = tables.table1_rows()
    elapsed = time.perf_counter() - t0
    oracle_devs = []
    for r in rows:
        law = tables.table1_laws()[r.law]
        d = law if r.cone == "L+" else M.negate(law)
        if math.isfinite(r.counter):
            oracle_devs.append(abs(r.counter - oracle_levelwise(tables.TABLE1_CURVES, d)))
    misses = [f"{r.law} {r.cone} {_fmt(r.counter)} vs {r.reference_counter}" for r in rows if not r.dev_counter <= 2e-2]
    internal = max(oracle_devs) <= 2e-3
    ok = not misses and internal and elapsed < 10.0
    detail = (
        f"reference match (tol 2e-2): {6 - len(misses)}/6; oracle consistency {max(oracle_devs):.1e} (tol 2e-3); "
        f"table runtime {elapsed:.1f}s (< 10s)"
    )
    if misses:
        detail += "; off: " + "; ".join(misses)
    assert report(2, ok, detail)


def test_criterion_03_comonotonic_column(report):
    rows = tables.table1_rows()
    neg = [r for r in rows if r.cone == "L-"]
    misses = [f"{r.law} {_fmt(r.como)} vs {r.reference_como}" for r in neg if not r.dev_como <= 2e-2]
    # sandwich: counter = unconstrained <= comonotonic = ρ of the pointwise minimum, here 1-(1-x)^0.3
    sandwich_err = 0.0
    for name, law in tables.table1_laws().items():
        for d in (law, M.negate(law)):
            try:
                counter = countermonotonic_infconv(tables.TABLE1_CURVES, d).value
                uncon = unconstrained_infconv(tables.TABLE1_CURVES, d).value
                como = comonotonic_infconv(tables.TABLE1_CURVES, d).value
                direct = M.riskmetric(D.DualPower(0.3), d)
            except DivergenceError:
                continue
            sandwich_err = max(sandwich_err, abs(counter - uncon), max(counter - como, 0.0), abs(como - direct))
    ok = not misses and sandwich_err <= 1e-6
    detail = f"L- reference match (tol 2e-2): {3 - len(misses)}/3; sandwich and min-curve identity err {sandwich_err:.1e}"
    if misses:
        detail += "; off: " + "; ".join(misses)
    assert report(3, ok, detail)


def test_criterion_04_ramp_crossing(report):
    hs, gs = P.crossing_example_groups()
    pts = P.crossing_points(hs, gs)
    fh, fg = P.normalized_sup_dual(hs), P.normalized_sup_dual(gs)
    single = len(pts) == 1 and abs(pts[0] - 0.789) <= 1e-3
    left = np.linspace(0, 0.789 - 1e-3, 500)
    right = np.linspace(0.789 + 1e-3, 1, 500)
    order = bool(np.all(fh.at(left) <= fg.at(left) + 1e-12) and np.all(fh.at(right) >= fg.at(right) - 1e-12))
    kink_err, off_err = 0.0, 0.0
    for group, slope, offset in ((hs, 1.24, 0.14 / 1.24), (gs, 1.36, 0.15 / 1.36)):
        sup = piecewise_convolve([h.dual() for h in group], "sup")
        kink_err = max(kink_err, min(abs(k - 1 / slope) for k in sup.kinks()))
        # second segment: y = s·x + offset
        x1, x2 = 0.95, 0.99
        s = (float(sup.at(x2)) - float(sup.at(x1))) / (x2 - x1)
        off_err = max(off_err, abs(float(sup.at(x1)) - s * x1 - offset))
    ok = single and order and kink_err <= 1e-6 and off_err <= 1e-9
    assert report(4, ok, f"crossings {[round(p, 6) for p in pts]}, order {order}, kink err {kink_err:.1e}, "
                         f"offset err {off_err:.1e}")


def _random_convex(rng, n):
    out = []
    for _ in range(n):
        if rng.random() < 0.5:
            out.append(D.Power(float(rng.uniform(1.0, 6.0)) + 1e-6))
        else:
            out.append(D.DualPower(float(rng.uniform(0.1, 1.0 - 1e-6))))
    return tuple(out)


def _random_discrete(rng, lo=0.0, hi=10.0, k=None):
    k = k or int(rng.integers(1, 8))
    vals = rng.uniform(lo, hi, size=k)
    p = rng.dirichlet(np.ones(k))
    p[-1] = 1.0 - p[:-1].sum()
    return M.Discrete(tuple(zip(vals.tolist(), p.tolist())))


def test_criterion_05_convex_groups_vs_oracle(report):
    rng = np.random.default_rng(SEED)
    worst_oracle, worst_jackpot = 0.0, 0.0
    for k in range(50):
        n = 2 if k % 4 < 2 else 3
        hs = _random_convex(rng, n)
        d = M.Uniform(0, 1) if k % 2 == 0 else _random_discrete(rng)
        r = countermonotonic_infconv(hs, d)
        ref = oracle_levelwise(hs, d, 2001 if n == 2 else 1001)
        worst_oracle = max(worst_oracle, abs(r.value - ref))
        if isinstance(d, M.Discrete):
            recomputed = r.allocation.discretize(d).total_risk(hs)
        else:
            recomputed = r.allocation.total_risk(d)
        worst_jackpot = max(worst_jackpot, abs(recomputed - r.value))
    ok = worst_oracle <= 2e-3 and worst_jackpot <= 1e-4
    assert report(5, ok, f"50 cases: max |closed form - oracle| {worst_oracle:.1e} (tol 2e-3), "
                         f"max jackpot recompute err {worst_jackpot:.1e} (tol 1e-4)")


def test_criterion_06_constant_share_ordering(report):
    rng = np.random.default_rng(SEED)
    grid = {3: 200, 4: 40, 5: 20}
    unsorted, worst_foc, worst_oracle_ratio = 0, 0.0, 0.0
    for k in range(1000):
        n = 3 + k % 3
        alphas = np.sort(rng.uniform(1.0, 6.0, size=n) + 1e-6)
        comp, _ = A.constant_share(alphas)
        p = np.array(comp.probs)
        unsorted += int(np.any(np.diff(p) < -1e-12))
        worst_foc = max(worst_foc, A.foc_residual(alphas, p))
        w, _ = oracle_constant_share(alphas, grid[n])
        worst_oracle_ratio = max(worst_oracle_ratio, float(np.max(np.abs(np.array(w) - p))) * grid[n] / 2)
    ok = unsorted == 0 and worst_foc <= 1e-9 and worst_oracle_ratio <= 1.0
    assert report(6, ok, f"1000 cases: unsorted {unsorted}, max FOC residual {worst_foc:.1e}, "
                         f"max oracle gap {worst_oracle_ratio:.2f} x (2/grid_n)")


def test_criterion_07_divergence_certificate(report):
    groups = [
        (D.Power(2.0), D.Power(3.0)),
        (D.DualPower(0.3), D.DualPower(0.6), D.Power(1.5)),
        (D.PiecewiseLinear.ramp(1.24, 0.24), D.PiecewiseLinear.ramp(1.1, 0.1)),
    ]
    worst, thetas = 0.0, []
    for hs in groups:
        n = len(hs)
        theta = n * max(float(h.at(1.0 / n)) for h in hs)
        thetas.append(theta)
        for m in (1.0, 10.0, 100.0):
            alloc, value = divergence_certificate(hs, m)
            target = n * (theta - 1.0) * m
            worst = max(worst, abs(value - target) / abs(target))
            assert np.allclose(alloc.aggregate, 0.0)
            assert alloc.total_risk(hs) <= value + 1e-9 * m
    ok = worst <= 1e-9 and all(t < 1 for t in thetas)
    assert report(7, ok, f"max relative err {worst:.1e}, theta {[round(t, 4) for t in thetas]}")


def test_criterion_08_var_es(report):
    rng = np.random.default_rng(SEED)
    var_err = abs(countermonotonic_infconv((D.VarIndicator(0.1), D.VarIndicator(0.2)), M.Uniform(0, 1)).value - 0.7)
    laws = [M.Uniform(0, 1), M.LogNormal(0, 0.5), M.Uniform(-2, 3), M.Pareto(3, 2)]
    worst = 0.0
    for k in range(20):
        betas = rng.uniform(0.01, 0.9, size=int(rng.integers(2, 5)))
        d = laws[k % 4] if k % 5 else _random_discrete(rng, -5, 5)
        target = M.es(d, float(betas.max()))
        assert es_group_value(betas, d) == target
        hs = tuple(D.EsCap(float(b)) for b in betas)
        for fn in (countermonotonic_infconv, comonotonic_infconv, unconstrained_infconv):
            worst = max(worst, abs(fn(hs, d).value - target))
    ok = var_err <= 1e-9 and worst <= 1e-6
    assert report(8, ok, f"VaR pair err {var_err:.1e} (tol 1e-9), ES max err {worst:.1e} over 20 sets (tol 1e-6)")


def test_criterion_09_comparative_statics(report):
    alphas = np.arange(0.5, 3.0 + 1e-9, 0.25)
    lam = [v for _, v in P.comparative_sweep(P.concave_example_family, alphas)]
    sweep_ok = all(a >= b for a, b in zip(lam, lam[1:]))
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(100):
        base = rng.uniform(1.0, 4.0, size=2)
        bump = rng.uniform(0.0, 2.0, size=2)
        hs = tuple(D.DualPower(float(b)) for b in base)
        gs = tuple(D.DualPower(float(b + e)) for b, e in zip(base, bump))  # g_i >= h_i pointwise
        d = M.Uniform(0, 1) if rng.random() < 0.5 else _random_discrete(rng)
        w = float(rng.uniform(0.1, 20.0))
        gap = P.optimal_lambda(gs, d, w).lambda_star - P.optimal_lambda(hs, d, w).lambda_star
        worst = max(worst, gap)
    ok = sweep_ok and worst <= 1e-9
    assert report(9, ok, f"sweep nonincreasing {sweep_ok} ({lam[0]:.3f} -> {lam[-1]:.3f}); "
                         f"max lambda_g - lambda_h {worst:.1e} over 100 pairs")


def test_criterion_10_independent_split_improves(report):
    rng = np.random.default_rng(SEED)
    failures = 0
    for _ in range(200):
        d = _random_discrete(rng)
        n = int(rng.integers(2, 5))
        probs = rng.dirichlet(np.ones(n))
        probs[-1] = 1.0 - probs[:-1].sum()
        for p, piece in zip(probs, A.independent_split(d, probs)):
            failures += int(not convex_order_leq(A.scaled_law(d, float(p)), piece))
    assert report(10, failures == 0, f"200 laws: {failures} pieces violate p_i X <=cx X 1_A_i")


def test_criterion_11_bernstein(report):
    h = D.DualPower(0.3)
    ts = np.linspace(0, 1, 4001)
    err = {k: float(np.max(np.abs(D.bernstein(h, k).at(ts) - h.at(ts)))) for k in (16, 64)}
    shape_ok = True
    for k in (16, 64):
        v = D.bernstein(h, k).at(ts)
        shape_ok &= bool(np.all(np.diff(v) >= -1e-10) and np.all(np.diff(v, 2) >= -1e-10))
    ok = err[64] < err[16] and shape_ok
    assert report(11, ok, f"sup error k=16 {err[16]:.4f}, k=64 {err[64]:.4f}; shape preserved {shape_ok}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
