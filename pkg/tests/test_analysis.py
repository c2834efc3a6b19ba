import numpy as np
import pytest
from scipy.optimize import brentq

from hablab import (
    BracketError,
    DataError,
    EvolutionProblem,
    TimeSeries,
    build_grid,
    contour_table,
    default_initial,
    evolve,
    find_extinction_threshold,
    fit_decay_rate,
    mu_degradation,
    steady_state,
    sweep_c,
)
from hablab.fields import Field

from conftest import interval_landscape


def matching_condition_root(d: float, b_half: float = 6.0, outer: float = 10.0) -> float:
    """Independent oracle for the eigenvalue zero crossing on the centered
    interval: continuity of the log-derivative at the interface, with a
    hyperbolic profile inside the degraded region and a cosine outside."""

    ell = outer - b_half

    def mismatch(c):
        kappa = np.sqrt(c / d)
        k = np.sqrt(1.0 / d)
        return kappa * np.tanh(b_half * kappa) - k * np.tan(ell * k)

    return brentq(mismatch, 1e-6, 1e3, xtol=1e-12)


@pytest.fixture(scope="module")
def threshold_d10(grid_mid):
    return find_extinction_threshold(grid_mid, 10.0)


def test_threshold_absent_for_slow_mover(grid_mid):
    rep = find_extinction_threshold(grid_mid, 1.0)
    assert not rep.exists
    assert rep.c0 is None
    assert rep.mu_infinity == pytest.approx(np.pi**2 / 64.0 - 1.0, abs=1e-3)


def test_threshold_located_for_fast_mover(grid_mid, threshold_d10):
    rep = threshold_d10
    assert rep.exists
    oracle = matching_condition_root(10.0)
    assert rep.c0 == pytest.approx(oracle, rel=0.01)
    assert rep.c0 > rep.c_star_lower_bound
    assert rep.c_star_lower_bound == pytest.approx(2.0 / 3.0)
    lo, hi = rep.bracket_mu
    assert lo < 0 < hi


def test_threshold_bracket_verified_post_hoc(grid_mid, threshold_d10):
    c0 = threshold_d10.c0
    half = 0.5 * (threshold_d10.bracket[1] - threshold_d10.bracket[0]) + 1e-3 * c0
    assert mu_degradation(grid_mid, 10.0, c0 - half).value < 0
    assert mu_degradation(grid_mid, 10.0, c0 + half).value > 0


def test_threshold_bracket_cap_error(grid_mid):
    with pytest.raises(BracketError, match="cap"):
        find_extinction_threshold(grid_mid, 10.0, c_cap=5.0)


def test_threshold_dynamics_consistency(grid_mid, threshold_d10):
    c0 = threshold_d10.c0
    below = steady_state(grid_mid, 10.0, 0.9 * c0)
    assert below.classification == "persistent"
    above = steady_state(grid_mid, 10.0, 1.1 * c0, t_max=2000.0)
    assert above.classification == "extinct"


# -- decay-rate fitting -------------------------------------------------------


def synthetic_series(rate=0.3, T=30.0, n=301):
    g = build_grid(interval_landscape(b=()), 16)
    t = np.linspace(0.0, T, n)
    sup = np.exp(-rate * t)
    return TimeSeries(
        times=t,
        sup_norm=sup,
        l2_norm=sup.copy(),
        mean_density=sup.copy(),
        snapshots=(),
        clip_total=0.0,
        clip_count=0,
        final=Field(g, np.zeros(g.n_nodes)),
    )


def test_fit_decay_rate_exact_exponential():
    assert fit_decay_rate(synthetic_series(), (0.0, 30.0)) == pytest.approx(0.3, abs=1e-6)


def test_fit_decay_rate_rejects_short_window():
    with pytest.raises(DataError, match="samples"):
        fit_decay_rate(synthetic_series(n=31), (0.0, 0.5))


def test_fit_decay_rate_rejects_nondecreasing():
    ts = synthetic_series()
    ts.sup_norm = np.ones_like(ts.sup_norm)
    with pytest.raises(DataError, match="not decreasing"):
        fit_decay_rate(ts, (0.0, 30.0))


def test_fitted_rate_matches_eigenvalue_at_2c0(grid_mid, threshold_d10):
    c = 2.0 * threshold_d10.c0
    series = evolve(
        EvolutionProblem(
            grid=grid_mid, d=10.0, c=c, u0=default_initial(grid_mid),
            dt=0.01, t_final=80.0,
        )
    )
    r = fit_decay_rate(series, (10.0, 80.0))
    mu = mu_degradation(grid_mid, 10.0, c).value
    assert r == pytest.approx(mu, rel=0.10)


def test_slow_decay_near_threshold(grid_mid, threshold_d10):
    # long window past the nonlinear transient; the rate is the (small)
    # eigenvalue and far below the rate at 2*c0
    c_near = 1.05 * threshold_d10.c0
    series = evolve(
        EvolutionProblem(
            grid=grid_mid, d=10.0, c=c_near, u0=default_initial(grid_mid),
            dt=0.01, t_final=600.0, norm_stride=10,
        )
    )
    r_near = fit_decay_rate(series, (300.0, 600.0))
    mu_near = mu_degradation(grid_mid, 10.0, c_near).value
    mu_2c0 = mu_degradation(grid_mid, 10.0, 2.0 * threshold_d10.c0).value
    assert r_near == pytest.approx(mu_near, rel=0.25)
    assert r_near < 0.1 * mu_2c0


def test_uniform_decay_rates_increase_with_c(grid_coarse):
    rep = find_extinction_threshold(grid_coarse, 10.0)
    u0 = default_initial(grid_coarse)
    rates = []
    for fac in (2.0, 10.0, 100.0):
        series = evolve(
            EvolutionProblem(
                grid=grid_coarse, d=10.0, c=fac * rep.c0, u0=u0,
                dt=0.01, t_final=60.0,
            )
        )
        rates.append(fit_decay_rate(series, (10.0, 60.0)))
    assert rates[0] <= rates[1] + 1e-6
    assert rates[0] <= rates[2] + 1e-6


def test_probe_decay_field(grid_coarse):
    rep = find_extinction_threshold(grid_coarse, 10.0, probe_decay=True)
    assert rep.probe_c == pytest.approx(2.0 * rep.c0)
    mu = mu_degradation(grid_coarse, 10.0, rep.probe_c).value
    assert rep.decay_rate_probe == pytest.approx(mu, rel=0.10)


# -- sweeps -------------------------------------------------------------------


def test_sweep_columns(grid_mid):
    cs = (0.5, 1.0, 10.0, 100.0, 1000.0, 10000.0, 100000.0, 1000000.0)
    rep = sweep_c(grid_mid, 1.0, cs)
    mus = [row.mu for row in rep.rows]
    assert all(a < b for a, b in zip(mus, mus[1:]))
    assert all(mu <= rep.mu_infinity + 1e-6 for mu in mus)
    # weight eigenvalue only defined beyond c_star = 2/3
    assert rep.rows[0].lam is None
    assert all(row.lam is not None for row in rep.rows[1:])
    steady_gaps = [row.steady_gap_sup for row in rep.rows]
    assert all(a > b for a, b in zip(steady_gaps[1:], steady_gaps[2:]))
    assert steady_gaps[-1] < 0.05
    eig_gaps = [row.eig_gap_h1 for row in rep.rows[1:]]
    assert all(a > b for a, b in zip(eig_gaps, eig_gaps[1:]))
    assert rep.empirical_mu_order is not None and rep.empirical_mu_order > 0


def test_sweep_requires_increasing_c(grid_coarse):
    with pytest.raises(Exception, match="increasing"):
        sweep_c(grid_coarse, 1.0, (10.0, 1.0))


# -- contour tables -----------------------------------------------------------


def test_contour_edge_columns():
    rows = contour_table(1.0, (0.0, 3.0), (0.0, 10.0), nodes=301)
    table = {(round(r.delta_fraction, 6), r.c): r.ratio for r in rows}
    assert table[(0.0, 0.0)] == pytest.approx(1.0, abs=1e-6)
    assert table[(0.0, 10.0)] == pytest.approx(1.0, abs=1e-6)
    assert table[(0.3, 0.0)] == pytest.approx(1.0, abs=1e-6)
    assert table[(0.3, 10.0)] < 1.0


def test_contour_diffusion_contrast():
    deltas_small = (1.0, 2.0, 3.0)
    deltas_big = (7.0, 8.0, 9.0)
    cs = (0.1, 1.0, 100.0, 10000.0)
    counts = {}
    for d in (1.0, 10.0):
        rows = contour_table(d, deltas_small + deltas_big, cs, nodes=301)
        hi = sum(1 for r in rows if r.delta_fraction <= 0.3 and r.ratio >= 0.9)
        ext = sum(1 for r in rows if r.delta_fraction >= 0.7 and r.ratio < 0.01)
        counts[d] = (hi, ext)
    assert counts[10.0][0] > counts[1.0][0]
    assert counts[10.0][1] > counts[1.0][1]
