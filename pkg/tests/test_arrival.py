import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from molcomm.arrival import (
    DistributionError,
    cdf,
    from_config,
    from_table,
    load_table,
    make_brownian1d,
    make_geometric,
    sample_delay,
    sample_delays,
)


def test_geometric_small():
    d = make_geometric(0.5, 2)
    np.testing.assert_allclose(d.pmf, [0.5, 0.25, 0.125])
    assert d.tail_mass == pytest.approx(0.125)
    d0 = make_geometric(0.5, 0)
    np.testing.assert_allclose(d0.pmf, [0.5])
    assert d0.tail_mass == 0.5


def test_geometric_cdf_against_direct_sum():
    d = make_geometric(0.9, 100)
    direct = sum(0.1 * 0.9 ** n for n in range(101))
    assert cdf(d, 100) == pytest.approx(direct, abs=1e-12)
    assert cdf(d, 100) == pytest.approx(1 - 0.9 ** 101, abs=1e-12)


@pytest.mark.parametrize("rho", [0.0, 1.0, -0.2, 1.5])
def test_geometric_rejects_bad_rho(rho):
    with pytest.raises(DistributionError):
        make_geometric(rho, 5)


def test_brownian_normalized_and_nonnegative():
    d = make_brownian1d(1.0, 1.0, 1.0, 10)
    assert abs(d.pmf.sum() + d.tail_mass - 1) < 1e-12
    assert np.all(d.pmf >= 0)
    assert d.pmf[0] > 0


def test_brownian_first_slot_matches_quadrature():
    distance, diffusion, dt = 1.0, 0.25, 0.5
    d = make_brownian1d(distance, diffusion, dt, 50)

    def density(tau):
        return distance / math.sqrt(4 * math.pi * diffusion * tau ** 3) * math.exp(-distance ** 2 / (4 * diffusion * tau))

    expected, _ = integrate.quad(density, 0, dt, epsabs=1e-13)
    assert d.pmf[0] == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize("kwargs", [
    dict(distance=0, diffusion=1, dt=1, n_max=3),
    dict(distance=1, diffusion=-1, dt=1, n_max=3),
    dict(distance=1, diffusion=1, dt=0, n_max=3),
])
def test_brownian_rejects_nonpositive(kwargs):
    with pytest.raises(DistributionError):
        make_brownian1d(**kwargs)


def test_table_examples():
    d = from_table([1.0])
    assert d.n_max == 0 and d.tail_mass == 0 and cdf(d, 0) == 1
    d = from_table([0.0, 1.0])
    assert cdf(d, 0) == 0 and cdf(d, 1) == 1
    assert not d.instant_arrival
    d = from_table([0.3, 0.3], 0.4)
    assert cdf(d, 1) == pytest.approx(0.6)


@pytest.mark.parametrize("values,tail", [([-0.1, 1.1], 0.0), ([0.5, 0.4], 0.0), ([0.0, 0.0], 1.0)])
def test_table_rejections(values, tail):
    with pytest.raises(DistributionError):
        from_table(values, tail)


def test_table_renormalizes_small_drift():
    d = from_table([0.5, 0.5 + 5e-10])
    assert abs(d.pmf.sum() - 1) < 1e-15


def test_cdf_edges(geom8):
    assert cdf(geom8, -1) == 0
    assert cdf(geom8, geom8.n_max) == pytest.approx(1 - geom8.tail_mass, abs=1e-15)
    assert cdf(geom8, 10 ** 6) <= 1
    assert cdf(make_geometric(0.5, 4), 4) == pytest.approx(sum(0.5 ** (n + 1) for n in range(5)))
    assert cdf(make_geometric(0.5, 4), 4) == pytest.approx(0.96875)


def test_sample_deterministic_table(rng):
    d = from_table([1.0])
    assert all(sample_delay(d, rng) == 0 for _ in range(100))
    assert np.all(sample_delays(d, 10_000, rng) == 0)


def test_sample_lost_is_none(rng):
    d = from_table([0.5], 0.5)
    draws = {sample_delay(d, rng) for _ in range(200)}
    assert draws == {0, None}


def test_sample_frequency_of_zero(rng):
    d = make_geometric(0.5, 2)
    k = sample_delays(d, 10 ** 6, rng)
    # 3 binomial sigma is 0.0015
    assert abs(np.mean(k == 0) - 0.5) < 0.002


@pytest.mark.parametrize("dist", [make_geometric(0.5, 5), from_table([0.2, 0.0, 0.3, 0.4], 0.1)])
def test_sample_histogram_chi_square(dist, rng):
    k = sample_delays(dist, 10 ** 6, rng)
    probs = dist.outcome_probs()
    observed = np.array([np.sum(k == n) for n in range(dist.n_max + 1)] + [np.sum(k == -1)])
    keep = probs > 0
    assert observed[~keep].sum() == 0
    _, pvalue = stats.chisquare(observed[keep], probs[keep] * k.size)
    assert pvalue > 1e-6


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 0.99), st.integers(0, 200))
def test_geometric_invariants(rho, n_max):
    d = make_geometric(rho, n_max)
    assert abs(d.pmf.sum() + d.tail_mass - 1) < 1e-12
    c = np.array([cdf(d, n) for n in range(-1, n_max + 2)])
    assert np.all(np.diff(c) >= 0)
    assert c[-1] > 0 and d.pmf[0] > 0


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 5), st.floats(0.05, 5), st.floats(0.01, 2), st.integers(0, 300))
def test_brownian_invariants(distance, diffusion, dt, n_max):
    if math.erfc(distance / math.sqrt(4 * diffusion * (n_max + 1) * dt)) == 0.0:
        # no representable mass inside the horizon: the cdf condition fails
        with pytest.raises(DistributionError):
            make_brownian1d(distance, diffusion, dt, n_max)
        return
    d = make_brownian1d(distance, diffusion, dt, n_max)
    assert abs(d.pmf.sum() + d.tail_mass - 1) < 1e-12
    assert np.all(d.pmf >= 0)
    assert cdf(d, n_max) > 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=12), st.floats(0, 1))
def test_table_invariants(values, tail):
    raw = np.array(values + [tail])
    if raw[:-1].sum() == 0:
        return
    raw = raw / raw.sum()
    d = from_table(raw[:-1], raw[-1])
    assert abs(d.pmf.sum() + d.tail_mass - 1) < 1e-12
    assert np.all(np.diff([cdf(d, n) for n in range(d.n_max + 1)]) >= -1e-16)


def test_load_table(tmp_path):
    path = tmp_path / "pmf.txt"
    path.write_text("# two-slot law\n0.3\n0.3\n\ntail 0.4\n")
    d = load_table(path)
    np.testing.assert_allclose(d.pmf, [0.3, 0.3])
    assert d.tail_mass == pytest.approx(0.4)
    path.write_text("tail 0.4\n0.6\n")
    with pytest.raises(DistributionError):
        load_table(path)


def test_from_config():
    assert from_config({"name": "geometric", "rho": 0.5, "n_max": 3}).n_max == 3
    assert from_config({"name": "table", "values": [0.5], "tail": 0.5}).tail_mass == 0.5
    assert from_config({"name": "brownian1d", "distance": 1, "diffusion": 1, "dt": 1, "n_max": 4}).n_max == 4
    with pytest.raises(DistributionError):
        from_config({"name": "cauchy"})


def test_dist_is_immutable(geom8):
    with pytest.raises(ValueError):
        geom8.pmf[0] = 0.9
