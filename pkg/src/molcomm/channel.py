"""Discrete-time molecular channel with indistinguishable, absorbed molecules.

Slots are numbered 1..t in docstrings and 0..t-1 in arrays. A molecule
released in slot i with delay n is counted in slot i + n if that is within
the session, otherwise it is lost. The receiver only observes y.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arrival import FirstArrivalDist, sample_delays

MAX_ENUM_SLOTS = 6
MAX_ENUM_MOLECULES = 6
# molecules sampled per vectorized block in simulate_arrivals
_BLOCK_MOLECULES = 2_000_000


class EnumerationTooLarge(ValueError):
    pass


class CapacityConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class ReleasePattern:
    """Molecules released per slot, x = (x_1, ..., x_t), under a budget of m."""

    x: tuple
    m_budget: int

    def __post_init__(self):
        x = tuple(int(v) for v in self.x)
        if not x:
            raise ValueError("a release pattern needs at least one slot")
        if any(v < 0 for v in x):
            raise ValueError(f"negative release count in {x}")
        if self.m_budget < 1:
            raise ValueError("molecule budget must be positive")
        if sum(x) > self.m_budget:
            raise ValueError(f"pattern {x} releases {sum(x)} > budget {self.m_budget}")
        object.__setattr__(self, "x", x)

    @classmethod
    def of(cls, x, m_budget=None):
        x = tuple(int(v) for v in x)
        return cls(x, m_budget if m_budget is not None else max(sum(x), 1))

    @property
    def t(self) -> int:
        return len(self.x)

    @property
    def molecules(self) -> int:
        return sum(self.x)

    def as_array(self) -> np.ndarray:
        return np.array(self.x, dtype=np.int64)


@dataclass(frozen=True)
class ArrivalRecord:
    y: tuple
    lost: int = 0

    def __post_init__(self):
        object.__setattr__(self, "y", tuple(int(v) for v in self.y))
        object.__setattr__(self, "lost", int(self.lost))


@dataclass(frozen=True)
class InputEnsemble:
    patterns: tuple
    probs: np.ndarray

    def __post_init__(self):
        patterns = tuple(self.patterns)
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        if not patterns:
            raise ValueError("ensemble is empty")
        if len(patterns) != probs.size:
            raise ValueError("one probability per pattern required")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("ensemble probabilities must be nonnegative and sum to 1")
        if len({(p.t, p.m_budget) for p in patterns}) != 1:
            raise ValueError("all patterns must share t and m_budget")
        object.__setattr__(self, "patterns", patterns)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def uniform(cls, patterns):
        patterns = tuple(patterns)
        return cls(patterns, np.full(len(patterns), 1.0 / len(patterns)))

    def entropy(self) -> float:
        p = self.probs[self.probs > 0]
        return float(-(p * np.log2(p)).sum())


def all_patterns(t: int, m: int, exact: bool = False) -> list:
    """Every release vector of length t with at most m molecules (exactly m if `exact`)."""
    out = []
    for x in itertools.product(range(m + 1), repeat=t):
        s = sum(x)
        if s == m or (not exact and s <= m):
            out.append(ReleasePattern(x, max(m, 1)))
    return out


def simulate_arrivals(X, dist: FirstArrivalDist, rng: np.random.Generator):
    """Push a batch of release vectors through the channel.

    X has shape (trials, t). Each released molecule draws its own delay.
    Returns (Y, lost) with Y of shape (trials, t) and lost of shape (trials,).
    """
    X = np.asarray(X, dtype=np.int64)
    if X.ndim != 2:
        raise ValueError("X must be 2-D (trials, t)")
    trials, t = X.shape
    Y = np.zeros((trials, t), dtype=np.int64)
    per_trial = X.sum(axis=1)
    start = 0
    while start < trials:
        # grow the block until it holds about _BLOCK_MOLECULES molecules
        cum = np.cumsum(per_trial[start:])
        stop = start + max(1, int(np.searchsorted(cum, _BLOCK_MOLECULES, side="right")))
        block = X[start:stop]
        flat = block.reshape(-1)
        cells = np.flatnonzero(flat)
        counts = flat[cells]
        cell = np.repeat(cells, counts)
        delays = sample_delays(dist, cell.size, rng)
        slot = cell % t + delays
        ok = (delays >= 0) & (slot < t)
        idx = (cell[ok] // t) * t + slot[ok]
        Y[start:stop] = np.bincount(idx, minlength=block.size).reshape(block.shape)
        start = stop
    lost = per_trial - Y.sum(axis=1)
    return Y, lost


def transmit(pattern: ReleasePattern, dist: FirstArrivalDist, rng: np.random.Generator) -> ArrivalRecord:
    Y, lost = simulate_arrivals(pattern.as_array()[None, :], dist, rng)
    return ArrivalRecord(tuple(Y[0]), int(lost[0]))


def transmit_many(pattern: ReleasePattern, dist: FirstArrivalDist, trials: int, rng: np.random.Generator):
    """Independent channel uses of one pattern; returns (Y, lost) arrays."""
    X = np.broadcast_to(pattern.as_array(), (trials, pattern.t))
    return simulate_arrivals(X, dist, rng)


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _check_enumerable(pattern: ReleasePattern):
    if pattern.t > MAX_ENUM_SLOTS or pattern.molecules > MAX_ENUM_MOLECULES:
        raise EnumerationTooLarge(
            f"exact law limited to t <= {MAX_ENUM_SLOTS} and <= {MAX_ENUM_MOLECULES} molecules, "
            f"got t={pattern.t}, molecules={pattern.molecules}"
        )


def conditional_law(pattern: ReleasePattern, dist: FirstArrivalDist) -> dict:
    """Exact law of ArrivalRecord given the release pattern, by enumeration.

    The x_i molecules of slot i are split multinomially over destinations
    i, i+1, ..., t and "lost"; slots are then convolved.
    """
    _check_enumerable(pattern)
    t = pattern.t
    law = {((0,) * t, 0): 1.0}
    for i, xi in enumerate(pattern.x):
        if xi == 0:
            continue
        horizon = t - 1 - i
        dest = [dist.p(d) for d in range(horizon + 1)] + [dist.survival(horizon)]
        splits = []
        for c in _compositions(xi, len(dest)):
            prob = math.factorial(xi)
            for ci, pi in zip(c, dest):
                prob = prob / math.factorial(ci) * pi ** ci
            if prob > 0:
                splits.append((c, prob))
        new = {}
        for (y, lost), p0 in law.items():
            for c, pc in splits:
                y2 = list(y)
                for d, cd in enumerate(c[:-1]):
                    y2[i + d] += cd
                key = (tuple(y2), lost + c[-1])
                new[key] = new.get(key, 0.0) + p0 * pc
        law = new
    return {ArrivalRecord(y, lost): p for (y, lost), p in law.items()}


def output_law(pattern: ReleasePattern, dist: FirstArrivalDist) -> dict:
    """Law of the observable y alone (lost molecules are invisible)."""
    out = {}
    for rec, p in conditional_law(pattern, dist).items():
        out[rec.y] = out.get(rec.y, 0.0) + p
    return out


def transition_matrix(patterns: Sequence[ReleasePattern], dist: FirstArrivalDist):
    """Row-stochastic P(y | x) over the union of reachable outputs.

    Returns (matrix, outputs) with outputs sorted for determinism.
    """
    laws = [output_law(p, dist) for p in patterns]
    outputs = sorted(set().union(*laws))
    col = {y: j for j, y in enumerate(outputs)}
    W = np.zeros((len(patterns), len(outputs)))
    for i, law in enumerate(laws):
        for y, p in law.items():
            W[i, col[y]] = p
    return W, outputs


def _divergences(W: np.ndarray, q: np.ndarray) -> np.ndarray:
    """D(W_x || q) in bits for every row x."""
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(W > 0, W * np.log2(W / q), 0.0)
    return terms.sum(axis=1)


def mutual_information(px, W) -> float:
    """I(X;Y) in bits for input pmf px and channel matrix W."""
    px = np.asarray(px, dtype=float)
    q = px @ W
    support = px > 0  # rows outside the support may have infinite divergence
    return max(float(px[support] @ _divergences(W[support], q)), 0.0)


def exact_mi(ensemble: InputEnsemble, dist: FirstArrivalDist) -> float:
    W, _ = transition_matrix(ensemble.patterns, dist)
    return mutual_information(ensemble.probs, W)


def blahut_arimoto(W: np.ndarray, tol: float = 1e-9, max_iter: int = 100_000):
    """Capacity of a finite channel matrix by alternating maximization.

    Stops once max_x D(W_x||q) - I(r) < tol; that gap brackets the capacity.
    Returns (capacity_bits, input_pmf, converged).
    """
    nx = W.shape[0]
    r = np.full(nx, 1.0 / nx)
    if nx == 1:
        return 0.0, r, True
    value = 0.0
    for _ in range(int(max_iter)):
        D = _divergences(W, r @ W)
        value = max(float(r @ D), 0.0)
        if D.max() - value < tol:
            return value, r, True
        r = r * np.exp2(D - D.max())
        r /= r.sum()
    return value, r, False


def capacity_small(patterns: Sequence[ReleasePattern], dist: FirstArrivalDist, tol: float = 1e-9,
                   max_iter: int = 100_000):
    """Capacity over input distributions supported on `patterns`.

    Returns (bits, optimal_probs). Warns with CapacityConvergenceWarning and
    returns the best value found if the iteration cap is hit.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    patterns = list(patterns)
    W, _ = transition_matrix(patterns, dist)
    value, r, converged = blahut_arimoto(W, tol, max_iter)
    if not converged:
        warnings.warn(f"capacity iteration hit the cap of {max_iter}; best value {value:.12g} bits",
                      CapacityConvergenceWarning, stacklevel=2)
    return value, r
