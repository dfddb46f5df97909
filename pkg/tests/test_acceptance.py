"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line verdict that the terminal summary prints as
``[PASS|FAIL] N. title: detail``. Run just this file with
``pytest tests/test_acceptance.py -v``.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_RESULTS
from molcomm.arrival import cdf, from_table, make_geometric
from molcomm.bounds import arrangements, binomial_entropy_bound, upper_bound_reports
from molcomm.channel import ReleasePattern, all_patterns, capacity_small, conditional_law, transmit_many
from molcomm.cli import main
from molcomm.harness import SAFE_UPPER, SweepSpec, fit_scaling, run_sweep
from molcomm.schemes import (
    SchemeParameterError,
    schemeA_bound,
    schemeA_mc_error,
    schemeA_params,
    schemeB_bound,
    schemeB_mc_error,
    schemeB_params,
    schemeC_bound,
    schemeC_mc_validate,
    schemeC_params,
)

GEOM = make_geometric(0.5, 8)


def record(number, title, ok, detail):
    ACCEPTANCE_RESULTS.append((number, title, bool(ok), detail))
    assert ok, detail


def scheme_lower_bounds(t, m, dist, k=2.0, r=0.5):
    lbs = {}
    if t >= 4:
        lbs["A"] = schemeA_bound(t, m, dist).lb_paper
    try:
        lbs["B"] = schemeB_bound(m, t, k, dist).lb
    except SchemeParameterError:
        pass
    lbs["C"] = schemeC_bound(t, m / t, r, dist).lb
    return lbs


def test_01_sandwich_suite():
    start = time.perf_counter()
    failures, checked = [], 0
    for dist in (from_table([1.0]), GEOM):
        for t in range(2, 6):
            for m in range(1, 4):
                cap, _ = capacity_small(all_patterns(t, m), dist, tol=1e-9)
                ubs = {r.name.value: r.value for r in upper_bound_reports(t, m) if r.name.value in SAFE_UPPER}
                for name, lb in scheme_lower_bounds(t, m, dist).items():
                    checked += 1
                    if lb > cap + 1e-9:
                        failures.append(f"{dist.name} t={t} m={m}: LB_{name}={lb:.6g} > C={cap:.6g}")
                for name, ub in ubs.items():
                    checked += 1
                    if cap > ub + 1e-9:
                        failures.append(f"{dist.name} t={t} m={m}: C={cap:.6g} > {name}={ub:.6g}")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    detail = f"{checked} comparisons over 24 instances in {elapsed:.2f}s" if ok else "; ".join(failures) or \
        f"took {elapsed:.1f}s"
    record(1, "sandwich suite", ok, detail)


def test_02_brute_force_oracle_equivalence():
    worst = 0.0
    for seed in range(10):
        rng = np.random.default_rng(1000 + seed)
        t = int(rng.integers(1, 4))
        x = np.zeros(t, dtype=int)
        for slot in rng.integers(0, t, size=int(rng.integers(1, 4))):
            x[slot] += 1
        dist = make_geometric(float(rng.uniform(0.2, 0.8)), int(rng.integers(0, 6)))
        pattern = ReleasePattern.of(x)
        Y, lost = transmit_many(pattern, dist, 10 ** 5, rng)
        keys, counts = np.unique(np.column_stack([Y, lost]), axis=0, return_counts=True)
        empirical = {(tuple(k[:-1]), int(k[-1])): c / 10 ** 5 for k, c in zip(keys, counts)}
        law = {(rec.y, rec.lost): p for rec, p in conditional_law(pattern, dist).items()}
        tv = 0.5 * sum(abs(law.get(key, 0.0) - empirical.get(key, 0.0)) for key in set(law) | set(empirical))
        worst = max(worst, tv)
    record(2, "brute-force oracle equivalence", worst < 0.01, f"max TV {worst:.4f} over 10 instances")


def test_03_schemeA_error_law():
    rng = np.random.default_rng(303)
    trials = 10 ** 5
    parts, ok = [], True
    for t in (16, 64):
        for m in (1, 3):
            tau = schemeA_params(t, m).tau
            p_e = (1 - cdf(GEOM, tau)) ** m
            sigma = math.sqrt(p_e * (1 - p_e) / trials)
            rate, _ = schemeA_mc_error(t, m, GEOM, trials, rng)
            passed = rate <= p_e + 3 * sigma
            ok &= passed
            parts.append(f"(t={t},m={m}) sim {rate:.3g} vs limit {p_e + 3 * sigma:.3g} {'ok' if passed else 'exceeded'}")
    record(3, "scheme A error law", ok, "; ".join(parts))


def test_04_schemeB_chebyshev_law():
    rng = np.random.default_rng(404)
    trials, k = 10 ** 5, 3.0
    params = schemeB_params(20, 400, k, GEOM)
    rate, _ = schemeB_mc_error(params, GEOM, trials, rng)
    limit = 1 / k ** 2 + 3 * math.sqrt((1 / k ** 2) * (1 - 1 / k ** 2) / trials)
    record(4, "scheme B Chebyshev law", rate <= limit,
           f"{params.n_levels} levels, sim error {rate:.4g} <= {limit:.4g}")


def test_05_schemeC_analytic_mc_agreement():
    rng = np.random.default_rng(505)
    est, se = schemeC_mc_validate(10, 0.5, GEOM, 10 ** 5, rng)
    analytic = float(schemeC_params(10, 0.5, GEOM).per_slot_mi.sum())
    gap = abs(est - analytic)
    record(5, "scheme C analytic/MC agreement", gap <= 3 * se,
           f"MC {est:.5f} vs analytic {analytic:.5f}, gap {gap:.2g} <= 3se {3 * se:.2g}")


def test_06_log_scaling_in_time():
    rows = run_sweep(SweepSpec("fixed_m_sweep_t", [(2 ** i, 1) for i in range(4, 15)]))
    fit = fit_scaling(rows, "LB_schemeA", "log", "t")
    exact_ub = all(r["UB_time_safe"] / math.log2(r.t + 1) == 1.0 for r in rows)
    ok = fit.a > 0 and fit.r_squared >= 0.98 and exact_ub
    record(6, "log-scaling in t", ok,
           f"slope {fit.a:.4f}, R2 {fit.r_squared:.5f}, UB_time_safe/log2(t+1) == 1: {exact_ub}")


def test_07_log_scaling_in_molecules():
    k = 2.0
    rows = run_sweep(SweepSpec("fixed_t_sweep_m", [(50, 10 ** e) for e in range(2, 6)], k=k))
    fit = fit_scaling(rows, "LB_schemeB", "log", "m")
    target = 0.5 * (1 - 1 / k ** 2)
    ok = abs(fit.a - target) <= 0.1 * target and fit.r_squared >= 0.99
    record(7, "log-scaling in m", ok, f"slope {fit.a:.4f} (target {target}), R2 {fit.r_squared:.5f}")


def test_08_linear_scaling_joint():
    spec = SweepSpec.from_dict({"mode": "joint_linear", "t": list(range(100, 1001, 100)), "alpha": 1.0,
                                "r": 0.5, "trials": 10 ** 4, "seed": 808})
    rows = run_sweep(spec)
    lb = np.array([r["LB_schemeC"] / r.t for r in rows])
    mc = np.array([r["MC_schemeC"] / r.t for r in rows])
    lb_spread = float(np.ptp(lb) / lb.mean())
    mc_spread = float(np.ptp(mc) / mc.mean())
    ub_exact = all(r["UB_joint_linear"] / r.t == 2.0 for r in rows)
    ok = lb_spread <= 1e-6 and mc_spread <= 0.05 and ub_exact
    record(8, "linear scaling in t with m = t", ok,
           f"LB/t spread {lb_spread:.2g}, MC/t spread {mc_spread:.3%}, UB_joint_linear/t == 2: {ub_exact}")


def test_09_combinatorics_exhaustive():
    start = time.perf_counter()
    entropy_ok = all(math.log2(math.comb(n, k)) <= binomial_entropy_bound(n, k) + 1e-12
                     for n in range(1, 65) for k in range(n + 1))
    count_ok = all(arrangements(t, m) == sum(1 for x in itertools.product(range(m + 1), repeat=t) if sum(x) <= m)
                   for t in range(1, 7) for m in range(0, 7))
    elapsed = time.perf_counter() - start
    record(9, "combinatorics exhaustive", entropy_ok and count_ok and elapsed < 1.0,
           f"binomial-entropy {entropy_ok}, stars-and-bars {count_ok}, {elapsed * 1000:.0f} ms")


@pytest.mark.parametrize("fmt", ["csv", "svg"])
def test_10_determinism(tmp_path, fmt):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mode": "fixed_m_sweep_t", "t": [16, 64, 256], "m": 2, "trials": 2000,
                               "seed": 123456789}))
    outputs = []
    for run in range(2):
        out = tmp_path / f"run{run}.{fmt}"
        assert main(["sweep", "--config", str(cfg), "--format", fmt, "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    same = outputs[0] == outputs[1]
    ACCEPTANCE_RESULTS.append((10, f"determinism ({fmt})", same, f"{len(outputs[0])} bytes, identical: {same}"))
    assert same
