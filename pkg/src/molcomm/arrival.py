"""First-arrival-time distributions p_N(n) for the discrete-time channel.

A distribution is a truncated pmf on {0, ..., n_max} plus an explicit tail
mass for arrivals after n_max. The simulator treats tail draws as lost, which
is exact whenever the session horizon does not exceed n_max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

NORM_ATOL = 1e-12
TABLE_ATOL = 1e-9


class DistributionError(ValueError):
    """Raised for pmfs that violate causality, normalization or the cdf condition."""


@dataclass(frozen=True, eq=False)
class FirstArrivalDist:
    pmf: np.ndarray
    tail_mass: float
    name: str = "table"

    def __post_init__(self):
        pmf = np.array(self.pmf, dtype=float).reshape(-1)
        if pmf.size == 0:
            raise DistributionError("pmf must have at least one entry")
        if np.any(pmf < 0) or not np.all(np.isfinite(pmf)):
            raise DistributionError("pmf entries must be finite and nonnegative")
        tail = float(self.tail_mass)
        if not 0.0 <= tail <= 1.0:
            raise DistributionError(f"tail_mass {tail} outside [0, 1]")
        if abs(pmf.sum() + tail - 1.0) > NORM_ATOL:
            raise DistributionError(f"pmf + tail sums to {pmf.sum() + tail!r}, not 1")
        if pmf.sum() <= 0.0:
            raise DistributionError("F_N(n_max) = 0: no arrival ever occurs within the horizon")
        pmf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "tail_mass", tail)
        cumulative = np.minimum(np.cumsum(pmf), 1.0)
        cumulative.setflags(write=False)
        object.__setattr__(self, "_cumulative", cumulative)

    @property
    def n_max(self) -> int:
        return self.pmf.size - 1

    @property
    def instant_arrival(self) -> bool:
        """True when p_N(0) > 0, which Scheme C needs for a positive rate."""
        return bool(self.pmf[0] > 0)

    def p(self, n: int) -> float:
        if n < 0 or n > self.n_max:
            return 0.0
        return float(self.pmf[n])

    def cdf(self, n: int) -> float:
        return cdf(self, n)

    def survival(self, n: int) -> float:
        """P(N > n), with tail mass counted as never arriving."""
        if n < 0:
            return 1.0
        if n >= self.n_max:
            return self.tail_mass
        return float(self.pmf[n + 1:].sum() + self.tail_mass)

    def outcome_probs(self) -> np.ndarray:
        """Probabilities of delays 0..n_max followed by the lost outcome."""
        return np.append(self.pmf, self.tail_mass)

    def __repr__(self):
        return f"FirstArrivalDist(name={self.name!r}, n_max={self.n_max}, tail_mass={self.tail_mass:.3g})"


def make_geometric(rho: float, n_max: int) -> FirstArrivalDist:
    """p_N(n) = (1 - rho) rho^n, truncated at n_max."""
    if not 0.0 < rho < 1.0:
        raise DistributionError(f"rho must lie in (0, 1), got {rho}")
    if n_max < 0:
        raise DistributionError("n_max must be nonnegative")
    n = np.arange(n_max + 1)
    pmf = (1.0 - rho) * rho ** n
    tail = rho ** (n_max + 1)
    return FirstArrivalDist(pmf, tail, name=f"geometric(rho={rho}, n_max={n_max})")


def brownian_first_passage_cdf(tau: float, distance: float, diffusion: float) -> float:
    """P(T <= tau) for 1-D Brownian motion hitting an absorbing point at `distance`."""
    if tau <= 0:
        return 0.0
    return math.erfc(distance / math.sqrt(4.0 * diffusion * tau))


def make_brownian1d(distance: float, diffusion: float, dt: float, n_max: int) -> FirstArrivalDist:
    """Discretize the 1-D first-passage law by cdf differences on a grid of width dt.

    Slot n collects first passages in (n dt, (n+1) dt], so pmf[0] = F(dt) > 0.
    """
    for label, value in (("distance", distance), ("diffusion", diffusion), ("dt", dt)):
        if not value > 0:
            raise DistributionError(f"{label} must be positive, got {value}")
    if n_max < 0:
        raise DistributionError("n_max must be nonnegative")
    edges = [brownian_first_passage_cdf((n + 1) * dt, distance, diffusion) for n in range(n_max + 1)]
    cdf_values = np.array([0.0] + edges)
    pmf = np.diff(cdf_values)
    # 1 - F computed with erf to keep precision far into the tail
    tail = math.erf(distance / math.sqrt(4.0 * diffusion * (n_max + 1) * dt))
    residue = 1.0 - pmf.sum() - tail
    if abs(residue) > NORM_ATOL:
        raise DistributionError(f"discretization lost {residue} of mass")
    return FirstArrivalDist(
        pmf,
        tail,
        name=f"brownian1d(distance={distance}, diffusion={diffusion}, dt={dt}, n_max={n_max})",
    )


def from_table(values, tail_mass: float = 0.0) -> FirstArrivalDist:
    """Build a distribution from user probabilities, renormalizing tiny drift away."""
    pmf = np.asarray(values, dtype=float).reshape(-1)
    if pmf.size == 0:
        raise DistributionError("table is empty")
    if np.any(pmf < 0) or tail_mass < 0:
        raise DistributionError("table entries must be nonnegative")
    total = pmf.sum() + tail_mass
    if abs(total - 1.0) > TABLE_ATOL:
        raise DistributionError(f"table sums to {total}, expected 1 within {TABLE_ATOL}")
    if pmf.sum() == 0:
        raise DistributionError("F_N(n_max) = 0: no arrival ever occurs within the horizon")
    return FirstArrivalDist(pmf / total, float(tail_mass) / total, name="table")


def load_table(path) -> FirstArrivalDist:
    """Read one probability per line, with an optional final ``tail <value>`` line.

    Blank lines and ``#`` comments are ignored.
    """
    values, tail = [], 0.0
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    for lineno, line in enumerate(lines):
        if line.lower().startswith("tail"):
            if lineno != len(lines) - 1:
                raise DistributionError("`tail` line must be the last line")
            tail = float(line.split()[1])
        else:
            values.append(float(line))
    return from_table(values, tail)


def cdf(d: FirstArrivalDist, n: int) -> float:
    """F_N(n) = sum_{i <= n} p_N(i); zero for n < 0."""
    if n < 0:
        return 0.0
    return float(d._cumulative[min(n, d.n_max)])


def sample_delay(d: FirstArrivalDist, rng: np.random.Generator):
    """One delay draw, or None when the molecule is lost to the tail."""
    k = int(sample_delays(d, 1, rng)[0])
    return None if k < 0 else k


def sample_delays(d: FirstArrivalDist, size, rng: np.random.Generator) -> np.ndarray:
    """Vectorized i.i.d. delays; lost draws are encoded as -1."""
    edges = np.cumsum(d.outcome_probs())
    u = rng.random(size)
    k = np.searchsorted(edges, u, side="right")
    # cumsum drift must not turn a zero tail into occasional losses
    k = np.minimum(k, d.n_max + 1 if d.tail_mass > 0 else d.n_max)
    return np.where(k > d.n_max, -1, k)


def from_config(cfg: dict) -> FirstArrivalDist:
    """Construct a distribution from a JSON-style mapping with a ``name`` key."""
    cfg = dict(cfg)
    name = cfg.pop("name", None)
    if name == "geometric":
        return make_geometric(float(cfg["rho"]), int(cfg["n_max"]))
    if name == "brownian1d":
        return make_brownian1d(float(cfg["distance"]), float(cfg["diffusion"]), float(cfg["dt"]), int(cfg["n_max"]))
    if name == "table":
        if "path" in cfg:
            return load_table(cfg["path"])
        return from_table(cfg["values"], float(cfg.get("tail", 0.0)))
    raise DistributionError(f"unknown distribution name {name!r}")
