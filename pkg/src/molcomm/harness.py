"""Scaling sweeps: evaluate every bound over a (t, m) grid, fit, and emit CSV/SVG."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import arrival
from .bounds import BoundName, round_half_up, upper_bound_reports
from .schemes import (
    SchemeParameterError,
    schemeA_bound,
    schemeA_mc_error,
    schemeB_bound,
    schemeB_mc_error,
    schemeB_params,
    schemeC_bound,
    schemeC_mc_validate,
)

MODES = ("fixed_m_sweep_t", "fixed_t_sweep_m", "joint_linear")
DEFAULT_DIST = {"name": "geometric", "rho": 0.5, "n_max": 8}
DEFAULTS = {"k": 2.0, "r": 0.5, "alpha": 1.0, "seed": 0, "trials": 0}

BOUND_COLUMNS = [b.value for b in BoundName]
MC_COLUMNS = ["MC_schemeA_err", "MC_schemeA_err_se", "MC_schemeB_err", "MC_schemeB_err_se",
              "MC_schemeC", "MC_schemeC_se"]
COLUMNS = ["t", "m", "seed"] + BOUND_COLUMNS + MC_COLUMNS
SAFE_UPPER = ("UB_time_safe", "UB_molecules_safe", "UB_joint_entropy")
LOWER = ("LB_schemeA", "LB_schemeB", "LB_schemeC")


class SweepError(ValueError):
    pass


class SandwichViolation(SweepError):
    pass


@dataclass
class SweepSpec:
    mode: str
    grid: list
    dist: dict = field(default_factory=lambda: dict(DEFAULT_DIST))
    k: float = DEFAULTS["k"]
    r: float = DEFAULTS["r"]
    alpha: float = DEFAULTS["alpha"]
    seed: int = DEFAULTS["seed"]
    trials: int = DEFAULTS["trials"]

    def __post_init__(self):
        if self.mode not in MODES:
            raise SweepError(f"mode must be one of {MODES}, got {self.mode!r}")
        self.grid = [(int(t), int(m)) for t, m in self.grid]
        if not self.grid:
            raise SweepError("grid is empty")
        if any(t < 1 or m < 1 for t, m in self.grid):
            raise SweepError("grid points need t >= 1 and m >= 1")
        if self.mode == "joint_linear":
            bad = [(t, m) for t, m in self.grid if m != round_half_up(self.alpha * t)]
            if bad:
                raise SweepError(f"joint_linear needs m = round(alpha t); violated at {bad}")
        if not 0 <= self.seed < 2 ** 64:
            raise SweepError("seed must be an unsigned 64-bit integer")
        if self.trials < 0:
            raise SweepError("trials must be nonnegative")

    @classmethod
    def from_dict(cls, cfg: dict) -> "SweepSpec":
        """Accepts an explicit ``grid`` or the shorthand ``t``/``m`` lists per mode."""
        cfg = dict(cfg)
        mode = cfg.get("mode")
        grid = cfg.get("grid")
        alpha = float(cfg.get("alpha", DEFAULTS["alpha"]))
        if grid is None:
            ts, ms = cfg.get("t"), cfg.get("m")
            if mode == "fixed_m_sweep_t":
                grid = [(t, ms) for t in ts]
            elif mode == "fixed_t_sweep_m":
                grid = [(ts, m) for m in ms]
            elif mode == "joint_linear":
                grid = [(t, round_half_up(alpha * t)) for t in ts]
            else:
                raise SweepError(f"mode must be one of {MODES}, got {mode!r}")
        return cls(
            mode=mode,
            grid=grid,
            dist=cfg.get("dist", dict(DEFAULT_DIST)),
            k=float(cfg.get("k", DEFAULTS["k"])),
            r=float(cfg.get("r", DEFAULTS["r"])),
            alpha=alpha,
            seed=int(cfg.get("seed", DEFAULTS["seed"])),
            trials=int(cfg.get("trials", DEFAULTS["trials"])),
        )

    def swept_variable(self) -> str:
        return "m" if self.mode == "fixed_t_sweep_m" else "t"


def load_config(path) -> dict:
    return json.loads(Path(path).read_text())


@dataclass
class SweepRow:
    t: int
    m: int
    seed: int
    values: dict

    def __getitem__(self, key):
        if key in ("t", "m", "seed"):
            return getattr(self, key)
        return self.values.get(key, math.nan)


def _row_alpha(spec: SweepSpec, t: int, m: int) -> float:
    return spec.alpha if spec.mode == "joint_linear" else m / t


def _sandwich_failures(values: dict) -> list:
    out = []
    for lb in LOWER:
        for ub in SAFE_UPPER:
            lo, hi = values[lb], values[ub]
            if math.isfinite(lo) and lo > hi + 1e-9:
                out.append(f"{lb}={lo:.6g} > {ub}={hi:.6g}")
    return out


def evaluate_point(spec: SweepSpec, dist, t: int, m: int, index: int) -> SweepRow:
    alpha = _row_alpha(spec, t, m)
    values = {c: math.nan for c in BOUND_COLUMNS + MC_COLUMNS}
    for rep in upper_bound_reports(t, m, alpha):
        values[rep.name.value] = rep.value
    if t >= 4:
        values["LB_schemeA"] = schemeA_bound(t, m, dist).lb_paper
    try:
        values["LB_schemeB"] = schemeB_bound(m, t, spec.k, dist).lb
    except SchemeParameterError:
        pass
    values["LB_schemeC"] = schemeC_bound(t, alpha, spec.r, dist).lb

    row_seed = spec.seed + index  # per-row stream: master seed + grid index
    if spec.trials > 0:
        rng = np.random.default_rng(row_seed)
        if t >= 4:
            values["MC_schemeA_err"], values["MC_schemeA_err_se"] = schemeA_mc_error(t, m, dist, spec.trials, rng)
        try:
            params = schemeB_params(t, m, spec.k, dist)
        except SchemeParameterError:
            params = None
        if params is not None:
            values["MC_schemeB_err"], values["MC_schemeB_err_se"] = schemeB_mc_error(params, dist, spec.trials, rng)
        values["MC_schemeC"], values["MC_schemeC_se"] = schemeC_mc_validate(
            t, spec.r, dist, spec.trials, rng, alpha=alpha)
    return SweepRow(t, m, row_seed, values)


def run_sweep(spec: SweepSpec) -> list:
    """One row per grid point, in grid order.

    Raises SandwichViolation if any scheme lower bound exceeds a safe upper bound.
    """
    dist = arrival.from_config(spec.dist)
    rows = [evaluate_point(spec, dist, t, m, i) for i, (t, m) in enumerate(spec.grid)]
    failures = [f"(t={r.t}, m={r.m}) {msg}" for r in rows for msg in _sandwich_failures(r.values)]
    if failures:
        raise SandwichViolation("; ".join(failures))
    return rows


# --- fitting ----------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    model: str  # "log": a log2(x) + b, "linear": a x + b
    a: float
    b: float
    r_squared: float
    column: str
    variable: str


def default_fit(mode: str):
    """(model, variable) matching each sweep mode's scaling law."""
    return {"fixed_m_sweep_t": ("log", "t"), "fixed_t_sweep_m": ("log", "m"),
            "joint_linear": ("linear", "t")}[mode]


def fit_scaling(rows, column: str, model: str = "log", variable: str = "t") -> FitResult:
    """Least-squares fit of `column` against log2(variable) or variable."""
    if model not in ("log", "linear"):
        raise ValueError(f"model must be 'log' or 'linear', got {model!r}")
    if len(rows) < 3:
        raise ValueError("fitting needs at least 3 rows")
    x = np.array([float(r[variable]) for r in rows])
    y = np.array([float(r[column]) for r in rows])
    if not np.all(np.isfinite(y)):
        raise ValueError(f"column {column} has missing values")
    if model == "log":
        x = np.log2(x)
    if np.ptp(x) == 0:
        raise ValueError("degenerate regressor: all x values equal")
    A = np.column_stack([x, np.ones_like(x)])
    (a, b), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (a * x + b)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res < 1e-24 else 0.0)
    return FitResult(model, float(a), float(b), r2, column, variable)


# --- emission ---------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "" if not math.isfinite(v) else f"{v:.17g}"


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in COLUMNS])
    return buf.getvalue()


def read_csv(path) -> list:
    return parse_csv(Path(path).read_text())


def parse_csv(text: str) -> list:
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        values = {c: float(rec[c]) if rec.get(c) else math.nan for c in BOUND_COLUMNS + MC_COLUMNS}
        rows.append(SweepRow(int(rec["t"]), int(rec["m"]), int(rec["seed"]), values))
    return rows


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f", "#17becf"]


def to_svg(rows, fit: FitResult | None = None, columns=None, variable: str | None = None,
           log_x: bool | None = None) -> str:
    """Line chart of bound columns over the swept variable.

    Lower bounds below zero are drawn at zero. Output is plain deterministic text.
    """
    if variable is None:
        variable = fit.variable if fit else ("t" if len({r.t for r in rows}) > 1 else "m")
    if columns is None:
        columns = [c for c in BOUND_COLUMNS if any(math.isfinite(r[c]) for r in rows)]
    xs = np.array([float(r[variable]) for r in rows])
    if log_x is None:
        log_x = fit.model == "log" if fit else bool(xs.min() > 0 and xs.max() / xs.min() >= 16)
    xv = np.log2(xs) if log_x else xs
    series = {c: np.array([max(float(r[c]), 0.0) if math.isfinite(r[c]) else math.nan for r in rows])
              for c in columns}
    finite = [v for s in series.values() for v in s if math.isfinite(v)]
    y_max = max(finite) if finite else 1.0
    y_max = y_max if y_max > 0 else 1.0
    width, height, left, right, top, bottom = 640, 400, 60, 170, 20, 50
    pw, ph = width - left - right, height - top - bottom
    x_lo, x_hi = float(xv.min()), float(xv.max())
    span = x_hi - x_lo or 1.0

    def px(x):
        return left + (x - x_lo) / span * pw

    def py(y):
        return top + ph - y / y_max * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>']
    xlabel = f"log2({variable})" if log_x else variable
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 12}" text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="16" y="{top + ph / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {top + ph / 2:.2f})">bits</text>')
    for frac in (0.0, 0.5, 1.0):
        out.append(f'<text x="{px(x_lo + frac * span):.2f}" y="{top + ph + 16}" text-anchor="middle" '
                   f'font-size="10">{x_lo + frac * span:.4g}</text>')
        out.append(f'<text x="{left - 4}" y="{py(frac * y_max) + 3:.2f}" text-anchor="end" '
                   f'font-size="10">{frac * y_max:.4g}</text>')
    for i, c in enumerate(columns):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xv, series[c]) if math.isfinite(y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{left + pw + 8}" y="{top + 14 + 16 * i}" fill="{color}" font-size="11">{c}</text>')
    if fit is not None:
        out.append(f'<text x="{left + 6}" y="{top + 14}" font-size="11">fit {fit.column}: a={fit.a:.6g} '
                   f'b={fit.b:.6g} R2={fit.r_squared:.6f}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit(rows, fit: FitResult | None = None, format: str = "csv", path=None, **svg_options) -> str:
    """Render rows as CSV or SVG; writes to `path` when given and returns the text."""
    if not rows:
        raise ValueError("nothing to emit: no rows")
    if format == "csv":
        text = to_csv(rows)
    elif format == "svg":
        text = to_svg(rows, fit, **svg_options)
    else:
        raise ValueError(f"format must be csv or svg, got {format!r}")
    if path is not None:
        Path(path).write_text(text)
    return text
