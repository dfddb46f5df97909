"""Maximum-entropy upper bounds on I(X^t; Y^t) and their combinatorics.

Everything is in bits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


def round_half_up(x: float) -> int:
    # tolerate float noise such as (m / t) * t = m - 1e-16
    return int(math.floor(x + 0.5 + 1e-9))


class BoundName(str, enum.Enum):
    UB_time = "UB_time"
    UB_time_safe = "UB_time_safe"
    UB_molecules = "UB_molecules"
    UB_molecules_safe = "UB_molecules_safe"
    UB_joint_entropy = "UB_joint_entropy"
    UB_joint_linear = "UB_joint_linear"
    LB_schemeA = "LB_schemeA"
    LB_schemeB = "LB_schemeB"
    LB_schemeC = "LB_schemeC"

    @property
    def is_upper(self) -> bool:
        return self.value.startswith("UB")


@dataclass(frozen=True)
class BoundReport:
    name: BoundName
    value: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name.is_upper and not self.value >= 0:
            raise ValueError(f"upper bound {self.name.value} must be nonnegative, got {self.value}")


def binary_entropy(lam: float) -> float:
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"binary entropy needs lambda in [0, 1], got {lam}")
    if lam in (0.0, 1.0):
        return 0.0
    return -lam * math.log2(lam) - (1.0 - lam) * math.log2(1.0 - lam)


def binomial_entropy_bound(n: int, k: int) -> float:
    """n H(k/n), which dominates log2 C(n, k)."""
    if n < 1 or not 0 <= k <= n:
        raise ValueError(f"need n >= 1 and 0 <= k <= n, got n={n}, k={k}")
    return n * binary_entropy(k / n)


def arrangements(t: int, m_cap: int) -> int:
    """Number of release vectors of length t using at most m_cap molecules.

    Stars and bars with an extra "unsent" bin: C(t + m_cap, t).
    """
    if t < 1 or m_cap < 0:
        raise ValueError("need t >= 1 and m_cap >= 0")
    return math.comb(t + m_cap, t)


def log2_comb(n: int, k: int) -> float:
    return math.log2(math.comb(n, k))


def ub_time(m: int, t: int):
    """(m log2 t, m log2(t + 1)).

    The second form also counts the option of a molecule not being sent, so
    it bounds exact MI at finite sizes.
    """
    if m < 1 or t < 1:
        raise ValueError("need m >= 1 and t >= 1")
    return m * math.log2(t), m * math.log2(t + 1)


def ub_molecules(t: int, m: int):
    """(t log2 m, t log2(m + 1)); each Y_i takes one of m + 1 values."""
    if m < 1 or t < 1:
        raise ValueError("need m >= 1 and t >= 1")
    return t * math.log2(m), t * math.log2(m + 1)


def ub_joint(t: int, alpha: float):
    """(entropy form, linear form) for budgets up to alpha*t molecules.

    entropy form = (t + a) H(t / (t + a)); linear form = (1 + alpha) t = t + a,
    with a = alpha t rounded to the nearest integer molecule count.
    """
    if t < 1 or not alpha > 0:
        raise ValueError("need t >= 1 and alpha > 0")
    a = round_half_up(alpha * t)
    n = t + a
    return n * binary_entropy(t / n), float(n)


def upper_bound_reports(t: int, m: int, alpha: float | None = None) -> list:
    """All upper bounds for one (t, m), with alpha defaulting to m / t."""
    alpha = m / t if alpha is None else alpha
    loose_t, safe_t = ub_time(m, t)
    loose_m, safe_m = ub_molecules(t, m)
    ent, lin = ub_joint(t, alpha)
    tm = {"t": t, "m": m}
    ja = {"t": t, "alpha": alpha}
    return [
        BoundReport(BoundName.UB_time, loose_t, tm),
        BoundReport(BoundName.UB_time_safe, safe_t, tm),
        BoundReport(BoundName.UB_molecules, loose_m, tm),
        BoundReport(BoundName.UB_molecules_safe, safe_m, tm),
        BoundReport(BoundName.UB_joint_entropy, ent, ja),
        BoundReport(BoundName.UB_joint_linear, lin, ja),
    ]
