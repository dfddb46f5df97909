"""Constructive lower-bound schemes.

Scheme A signals in time: one of ell intervals, all m molecules at its start.
Scheme B signals in amplitude: a level W_j released in slot 1, decoded from
the total arrival count with Chebyshev-sized ranges.
Scheme C releases a molecule per slot with probability r and decodes from the
binarized arrivals; its rate is evaluated with an auxiliary product channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .arrival import FirstArrivalDist, cdf
from .bounds import binary_entropy, round_half_up
from .channel import ArrivalRecord, ReleasePattern, mutual_information, simulate_arrivals

_BLOCK_CELLS = 2_000_000


class SchemeParameterError(ValueError):
    pass


def _h2(x):
    """Elementwise binary entropy in bits."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -x * np.log2(x) - (1 - x) * np.log2(1 - x)
    return np.nan_to_num(h, nan=0.0)


def _mean_se(samples: np.ndarray):
    n = samples.size
    mean = float(samples.mean())
    se = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
    return mean, se


def _y_rows(y):
    if isinstance(y, ArrivalRecord):
        y = y.y
    return np.atleast_2d(np.asarray(y, dtype=np.int64))


# --- Scheme A ---------------------------------------------------------------

@dataclass(frozen=True)
class SchemeAParams:
    t: int
    m: int
    tau: int
    ell: int

    @property
    def release_slots(self) -> np.ndarray:
        """1-based release slot of every message."""
        return (np.arange(1, self.ell + 1) - 1) * self.tau + 1


def schemeA_params(t: int, m: int) -> SchemeAParams:
    if t < 1 or m < 1:
        raise SchemeParameterError("need t >= 1 and m >= 1")
    tau = math.isqrt(t)
    return SchemeAParams(t, m, tau, t // tau)


def schemeA_encode(j: int, params: SchemeAParams) -> ReleasePattern:
    if not 1 <= j <= params.ell:
        raise SchemeParameterError(f"interval index {j} outside 1..{params.ell}")
    x = [0] * params.t
    x[(j - 1) * params.tau] = params.m
    return ReleasePattern(tuple(x), params.m)


def schemeA_decode_batch(Y, params: SchemeAParams) -> np.ndarray:
    Y = np.asarray(Y)
    hit = Y > 0
    any_hit = hit.any(axis=1)
    first = np.argmax(hit, axis=1)  # 0-based slot of the first arrival
    # arrivals past ell*tau are clamped into the last interval
    U = np.minimum(first // params.tau + 1, params.ell)
    return np.where(any_hit, U, params.ell + 1)


def schemeA_decode(y, params: SchemeAParams) -> int:
    """Interval of the first occupied slot, or ell + 1 if nothing arrived."""
    return int(schemeA_decode_batch(_y_rows(y), params)[0])


class SchemeABound(NamedTuple):
    p_e: float
    lb_paper: float
    lb_exact_ell: float


def schemeA_bound(t: int, m: int, dist: FirstArrivalDist) -> SchemeABound:
    """Fano lower bound with P_e = (1 - F_N(tau))^m."""
    if t < 4:
        raise SchemeParameterError("Scheme A bound needs t >= 4")
    params = schemeA_params(t, m)
    p_e = (1.0 - cdf(dist, params.tau)) ** m
    lb_paper = (1.0 - p_e) * math.log2(math.sqrt(t) - 1.0) - 1.0
    lb_exact_ell = (1.0 - p_e) * math.log2(params.ell) - 1.0
    return SchemeABound(p_e, lb_paper, lb_exact_ell)


def schemeA_channel(params: SchemeAParams, dist: FirstArrivalDist) -> np.ndarray:
    """Exact P(U | message) as an ell x (ell + 1) matrix.

    The first of m molecules released in slot s arrives with delay n with
    probability S(n-1)^m - S(n)^m, S being the survival function of N.
    """
    t, tau, ell, m = params.t, params.tau, params.ell, params.m
    P = np.zeros((ell, ell + 1))
    for row, s in enumerate(params.release_slots):
        horizon = t - s
        surv = np.array([dist.survival(n) for n in range(-1, horizon + 1)]) ** m
        first = surv[:-1] - surv[1:]  # delays 0..horizon
        slots = s - 1 + np.arange(horizon + 1)
        U = np.minimum(slots // tau + 1, ell)
        np.add.at(P[row], U - 1, first)
        P[row, ell] += surv[-1]
    return P


def schemeA_error_probability(t: int, m: int, dist: FirstArrivalDist) -> float:
    """Exact decoding error rate under uniformly chosen intervals."""
    params = schemeA_params(t, m)
    P = schemeA_channel(params, dist)
    return float(1.0 - np.trace(P[:, :params.ell]) / params.ell)


def schemeA_exact_mi(t: int, m: int, dist: FirstArrivalDist) -> float:
    """I(message; U) for uniform messages, in bits."""
    params = schemeA_params(t, m)
    P = schemeA_channel(params, dist)
    return mutual_information(np.full(params.ell, 1.0 / params.ell), P)


def schemeA_mc_error(t: int, m: int, dist: FirstArrivalDist, trials: int, rng: np.random.Generator):
    """Simulated error frequency of encode -> channel -> decode; returns (rate, std error)."""
    params = schemeA_params(t, m)
    errors = np.empty(trials, dtype=float)
    block = max(1, _BLOCK_CELLS // t)
    for start in range(0, trials, block):
        n = min(block, trials - start)
        j = rng.integers(1, params.ell + 1, size=n)
        X = np.zeros((n, t), dtype=np.int64)
        X[np.arange(n), (j - 1) * params.tau] = m
        Y, _ = simulate_arrivals(X, dist, rng)
        errors[start:start + n] = schemeA_decode_batch(Y, params) != j
    rate = float(errors.mean())
    return rate, math.sqrt(max(rate * (1 - rate), 0.0) / trials)


# --- Scheme B ---------------------------------------------------------------

@dataclass(frozen=True)
class SchemeBParams:
    t: int
    m: int
    k: float
    p: float
    q: float
    n_levels: int
    levels: tuple
    noiseless: bool = False

    @property
    def half_width(self) -> float:
        """k sqrt(m p q): half the width of a decoding range."""
        return self.k * math.sqrt(self.m * self.p * self.q)

    def range_edges(self) -> np.ndarray:
        """Boundaries (2j - 1) k sqrt(mpq), j = 1..n+1; range j is (edge_j, edge_{j+1}]."""
        j = np.arange(1, self.n_levels + 2)
        return (2 * j - 1) * self.half_width


def _scheme_b_pq(t: int, dist: FirstArrivalDist):
    p = cdf(dist, t)
    q = dist.survival(t)
    if p <= 0:
        raise SchemeParameterError("Scheme B needs F_N(t) > 0")
    return p, q


def schemeB_params(t: int, m: int, k: float, dist: FirstArrivalDist) -> SchemeBParams:
    """Levels W_j = 2 j k sqrt(m q / p), j = 1..n with n = (1/2k) sqrt(m p / q), both rounded.

    With F_N(t) = 1 the count is noiseless and the levels are simply 1..m.
    """
    if not k > 1:
        raise SchemeParameterError(f"Chebyshev parameter k must exceed 1, got {k}")
    if t < 1 or m < 1:
        raise SchemeParameterError("need t >= 1 and m >= 1")
    p, q = _scheme_b_pq(t, dist)
    if q == 0:
        return SchemeBParams(t, m, k, p, q, m, tuple(range(1, m + 1)), noiseless=True)
    n_levels = round_half_up(math.sqrt(m * p / q) / (2 * k))
    if n_levels < 1:
        raise SchemeParameterError(f"no amplitude level fits: (1/2k) sqrt(mp/q) rounds to {n_levels}")
    step = 2 * k * math.sqrt(m * q / p)
    # rounding may push the peak a hair above the budget
    levels = tuple(min(round_half_up(j * step), m) for j in range(1, n_levels + 1))
    if len(set(levels)) != len(levels):
        raise SchemeParameterError(
            f"levels collide after rounding (spacing {step:.3g} molecules for {n_levels} levels)")
    return SchemeBParams(t, m, k, p, q, n_levels, levels)


def schemeB_encode(j: int, params: SchemeBParams) -> ReleasePattern:
    if not 1 <= j <= params.n_levels:
        raise SchemeParameterError(f"level index {j} outside 1..{params.n_levels}")
    x = [0] * params.t
    x[0] = params.levels[j - 1]
    return ReleasePattern(tuple(x), params.m)


def schemeB_decode_batch(U, params: SchemeBParams) -> np.ndarray:
    """Level index for each total count, 0 for an erasure."""
    U = np.asarray(U)
    if params.noiseless:
        return np.where((U >= 1) & (U <= params.m), U, 0)
    i = np.searchsorted(params.range_edges(), U, side="left")
    return np.where((i >= 1) & (i <= params.n_levels), i, 0)


def schemeB_decode(U: int, params: SchemeBParams):
    """j with (2j-1)k sqrt(mpq) < U <= (2j+1)k sqrt(mpq), or None."""
    j = int(schemeB_decode_batch(np.array([U]), params)[0])
    return j or None


class SchemeBBound(NamedTuple):
    err_ub: float
    lb: float
    slope: float
    K: float
    noiseless: bool = False


def schemeB_bound(m: int, t: int, k: float, dist: FirstArrivalDist) -> SchemeBBound:
    """Chebyshev/Fano lower bound, evaluated term by term as published.

    lb = slope * log2(m) + K with slope = (1 - 1/k^2) / 2.
    """
    if not k > 1:
        raise SchemeParameterError(f"Chebyshev parameter k must exceed 1, got {k}")
    p, q = _scheme_b_pq(t, dist)
    if q == 0:
        # every released molecule is counted: levels 1..m decode without error
        return SchemeBBound(0.0, math.log2(m), 1.0, 0.0, noiseless=True)
    e = 1.0 / k ** 2
    root = math.sqrt(p / q) / (2 * k)
    log_m = math.log2(m)
    lb = (0.5 * log_m + math.log2(root)
          - 0.5 * e * log_m - e * (1.0 + root) - binary_entropy(e))
    K = math.log2(root) - e * (1.0 + root) - binary_entropy(e)
    return SchemeBBound(e, lb, 0.5 * (1.0 - e), K)


def schemeB_mc_error(params: SchemeBParams, dist: FirstArrivalDist, trials: int, rng: np.random.Generator):
    """Simulated error frequency (erasures count as errors); returns (rate, std error)."""
    levels = np.asarray(params.levels, dtype=np.int64)
    errors = np.empty(trials, dtype=float)
    # each block holds about _BLOCK_CELLS molecules
    block = max(1, _BLOCK_CELLS // max(params.m, params.t))
    for start in range(0, trials, block):
        n = min(block, trials - start)
        j = rng.integers(1, params.n_levels + 1, size=n)
        X = np.zeros((n, params.t), dtype=np.int64)
        X[:, 0] = levels[j - 1]
        Y, _ = simulate_arrivals(X, dist, rng)
        errors[start:start + n] = schemeB_decode_batch(Y.sum(axis=1), params) != j
    rate = float(errors.mean())
    return rate, math.sqrt(max(rate * (1 - rate), 0.0) / trials)


# --- Scheme C ---------------------------------------------------------------

def slot_mask(t: int, alpha: float = 1.0) -> np.ndarray:
    """Slots allowed to release.

    alpha >= 1 uses every slot. Otherwise every ceil(1/alpha)-th slot is used,
    capped at floor(alpha t) slots so the release count never exceeds the budget.
    """
    if not alpha > 0:
        raise SchemeParameterError("alpha must be positive")
    mask = np.zeros(t, dtype=bool)
    if alpha >= 1:
        mask[:] = True
        return mask
    spacing = math.ceil(1.0 / alpha - 1e-9)
    count = max(1, math.floor(alpha * t + 1e-9))
    mask[::spacing] = True
    mask[np.flatnonzero(mask)[count:]] = False
    return mask


def schemeC_gammas(t: int, r: float, dist: FirstArrivalDist, mask=None):
    """P(w_i = 0 | x_i = 0) and P(w_i = 0 | x_i = 1) for i = 1..t.

    gamma0[i] = prod_{j=1}^{i-1} (1 - r p_N(j)) over release-enabled slots i - j;
    gamma1[i] = (1 - p_N(0)) gamma0[i].
    """
    if not 0 < r < 1:
        raise SchemeParameterError(f"release probability must lie in (0, 1), got {r}")
    enabled = np.ones(t) if mask is None else np.asarray(mask, dtype=float)
    lags = min(dist.n_max, t - 1)
    log_keep = np.zeros(lags + 1)
    log_keep[1:] = np.log1p(-r * dist.pmf[1:lags + 1])
    log_gamma0 = np.convolve(enabled, log_keep)[:t]
    gamma0 = np.minimum(np.exp(log_gamma0), 1.0)
    gamma1 = (1.0 - dist.pmf[0]) * gamma0
    return gamma0, gamma1


def schemeC_binarize(y) -> np.ndarray:
    """w_i = 1 iff at least one molecule arrived in slot i."""
    if isinstance(y, ArrivalRecord):
        y = y.y
    return (np.asarray(y) >= 1).astype(np.int64)


@dataclass(frozen=True, eq=False)
class SchemeCParams:
    t: int
    r: float
    alpha: float
    mask: np.ndarray
    gamma0: np.ndarray
    gamma1: np.ndarray
    per_slot_mi: np.ndarray
    i0: float

    @property
    def slots_used(self) -> int:
        return int(self.mask.sum())

    def aux_tables(self):
        """log2 g_i(w | x) - log2 g_i(w), indexed [x, w, i]."""
        rates = self.r * self.mask
        g_w0_x = np.stack([self.gamma0, self.gamma1])          # P(w=0 | x)
        g_x = np.stack([g_w0_x, 1 - g_w0_x], axis=1)           # [x, w, i]
        g_w0 = rates * self.gamma1 + (1 - rates) * self.gamma0
        g_w = np.stack([g_w0, 1 - g_w0])                       # [w, i]
        with np.errstate(divide="ignore", invalid="ignore"):
            table = np.log2(g_x) - np.log2(g_w)[None]
        # pairs with g(w|x) = 0 never occur under the true law
        return np.where(g_x > 0, table, 0.0)


def schemeC_params(t: int, r: float, dist: FirstArrivalDist, alpha: float = 1.0) -> SchemeCParams:
    mask = slot_mask(t, alpha)
    gamma0, gamma1 = schemeC_gammas(t, r, dist, mask)
    rates = r * mask
    marginal = rates * gamma1 + (1 - rates) * gamma0
    mi = _h2(marginal) - rates * _h2(gamma1) - (1 - rates) * _h2(gamma0)
    mi = np.where(mask, np.maximum(mi, 0.0), 0.0)
    i0 = float(mi[mask].min())
    mask.setflags(write=False)
    return SchemeCParams(t, r, alpha, mask, gamma0, gamma1, mi, i0)


class SchemeCBound(NamedTuple):
    per_slot_mi: np.ndarray
    i0: float
    lb: float


def schemeC_bound(t: int, alpha: float, r: float, dist: FirstArrivalDist) -> SchemeCBound:
    """lb = (number of release slots) * I_0, i.e. t I_0 when alpha >= 1."""
    params = schemeC_params(t, r, dist, alpha)
    return SchemeCBound(params.per_slot_mi, params.i0, params.slots_used * params.i0)


def schemeC_mc_validate(t: int, r: float, dist: FirstArrivalDist, trials: int, rng: np.random.Generator,
                        alpha: float = 1.0):
    """Monte-Carlo mean of log2 prod g_i(w|x) / prod g_i(w) over true (x, w) draws.

    Returns (estimate_bits, std_error). Its expectation is sum(per_slot_mi).
    """
    params = schemeC_params(t, r, dist, alpha)
    table = params.aux_tables()
    cols = np.arange(t)
    totals = np.empty(trials)
    block = max(1, _BLOCK_CELLS // t)
    for start in range(0, trials, block):
        n = min(block, trials - start)
        X = ((rng.random((n, t)) < r) & params.mask).astype(np.int64)
        Y, _ = simulate_arrivals(X, dist, rng)
        W = (Y >= 1).astype(np.int64)
        totals[start:start + n] = table[X, W, cols].sum(axis=1)
    return _mean_se(totals)
