"""Command-line entry point: ``molcomm <command> ...``.

Values resolve as flag > config file > built-in default. Results go to stdout
as JSON (or CSV/SVG for ``sweep``); failures print one JSON line to stderr and
exit with status 1.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import arrival, bounds, channel, harness, schemes


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def _print_json(obj, out):
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


class _Settings:
    """Merged view over CLI flags, the JSON config and defaults."""

    def __init__(self, args):
        self.args = args
        self.cfg = harness.load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, name, default=None):
        v = getattr(self.args, name, None)
        if v is not None:
            return v
        return self.cfg.get(name, harness.DEFAULTS.get(name, default))

    def dist(self):
        a = self.args
        if getattr(a, "table", None):
            return arrival.load_table(a.table)
        if getattr(a, "geometric", None) is not None:
            return arrival.make_geometric(a.geometric, a.n_max if a.n_max is not None else 8)
        return arrival.from_config(self.cfg.get("dist", harness.DEFAULT_DIST))

    def rng(self):
        return np.random.default_rng(int(self.get("seed")))


def cmd_dist_check(s: _Settings):
    d = s.dist()
    pmf = d.pmf
    cdf_vals = np.cumsum(pmf)
    report = {
        "name": d.name,
        "n_max": d.n_max,
        "tail_mass": d.tail_mass,
        "normalization_error": abs(pmf.sum() + d.tail_mass - 1.0),
        "nonnegative": bool(np.all(pmf >= 0)),
        "cdf_monotone": bool(np.all(np.diff(cdf_vals) >= 0)),
        "cdf_at_n_max": d.cdf(d.n_max),
        "instant_arrival": d.instant_arrival,
        "pmf": pmf,
    }
    if not d.instant_arrival:
        report["warning"] = "p_N(0) = 0: Scheme C rate is zero"
    return report


def cmd_bounds(s: _Settings):
    t, m = int(s.get("t")), int(s.get("m"))
    alpha = s.get("alpha_override")
    reps = bounds.upper_bound_reports(t, m, alpha)
    return {"t": t, "m": m, "arrangements": str(bounds.arrangements(t, m)),
            "bounds": [{"name": r.name.value, "value": r.value, "params": r.params} for r in reps]}


def cmd_scheme(s: _Settings):
    which = s.args.which
    d = s.dist()
    t, m = int(s.get("t")), int(s.get("m"))
    trials = int(s.get("trials"))
    rng = s.rng()
    out = {"scheme": which, "t": t, "m": m, "dist": d.name}
    if which == "a":
        p = schemes.schemeA_params(t, m)
        b = schemes.schemeA_bound(t, m, d)
        out.update(tau=p.tau, ell=p.ell, p_e=b.p_e, lb_paper=b.lb_paper, lb_exact_ell=b.lb_exact_ell,
                   p_e_exact=schemes.schemeA_error_probability(t, m, d),
                   exact_mi=schemes.schemeA_exact_mi(t, m, d))
        if trials:
            out["mc_error"], out["mc_error_se"] = schemes.schemeA_mc_error(t, m, d, trials, rng)
    elif which == "b":
        k = float(s.get("k"))
        b = schemes.schemeB_bound(m, t, k, d)
        out.update(k=k, err_ub=b.err_ub, lb=b.lb, slope=b.slope, K=b.K, noiseless=b.noiseless)
        p = schemes.schemeB_params(t, m, k, d)
        out.update(p=p.p, q=p.q, n_levels=p.n_levels, levels=list(p.levels))
        if trials:
            out["mc_error"], out["mc_error_se"] = schemes.schemeB_mc_error(p, d, trials, rng)
    else:
        r = float(s.get("r"))
        alpha = s.args.alpha if s.args.alpha is not None else s.cfg.get("alpha", m / t)
        alpha = float(alpha)
        b = schemes.schemeC_bound(t, alpha, r, d)
        out.update(r=r, alpha=alpha, per_slot_mi=b.per_slot_mi, i0=b.i0, lb=b.lb,
                   analytic_sum=float(b.per_slot_mi.sum()))
        if trials:
            out["mc_estimate"], out["mc_se"] = schemes.schemeC_mc_validate(t, r, d, trials, rng, alpha=alpha)
    return out


def _parse_pattern(text):
    return tuple(int(v) for v in text.split(","))


def cmd_exact_mi(s: _Settings):
    a = s.args
    d = s.dist()
    if a.all:
        t, m = a.all
        patterns = channel.all_patterns(t, m)
    else:
        if not a.pattern:
            raise ValueError("give --pattern at least once, or --all T M")
        xs = [_parse_pattern(p) for p in a.pattern]
        budget = a.m_budget or max(max(sum(x) for x in xs), 1)
        patterns = [channel.ReleasePattern(x, budget) for x in xs]
    if a.probs:
        ens = channel.InputEnsemble(patterns, [float(v) for v in a.probs.split(",")])
    else:
        ens = channel.InputEnsemble.uniform(patterns)
    out = {"patterns": [p.x for p in patterns], "mi_bits": channel.exact_mi(ens, d),
           "input_entropy_bits": ens.entropy()}
    if a.capacity:
        cap, probs = channel.capacity_small(patterns, d, tol=a.tol)
        out.update(capacity_bits=cap, optimal_probs=probs)
    return out


def _sweep_spec(s: _Settings):
    cfg = dict(s.cfg)
    if s.args.seed is not None:
        cfg["seed"] = s.args.seed
    if s.args.trials is not None:
        cfg["trials"] = s.args.trials
    return harness.SweepSpec.from_dict(cfg)


def cmd_sweep(s: _Settings):
    spec = _sweep_spec(s)
    rows = harness.run_sweep(spec)
    fmt = s.args.format or s.cfg.get("format", "csv")
    fit = None
    if fmt == "svg" and len(rows) >= 3:
        model, variable = harness.default_fit(spec.mode)
        column = s.cfg.get("fit_column", {"fixed_m_sweep_t": "LB_schemeA", "fixed_t_sweep_m": "LB_schemeB",
                                          "joint_linear": "LB_schemeC"}[spec.mode])
        try:
            fit = harness.fit_scaling(rows, column, model, variable)
        except ValueError:
            fit = None
    text = harness.emit(rows, fit, fmt, s.args.out,
                        **({"variable": spec.swept_variable()} if fmt == "svg" else {}))
    if not s.args.out:
        sys.stdout.write(text)
    return None


def cmd_fit(s: _Settings):
    a = s.args
    if a.input:
        rows = harness.read_csv(a.input)
        mode = s.cfg.get("mode")
    else:
        spec = _sweep_spec(s)
        rows = harness.run_sweep(spec)
        mode = spec.mode
    model, variable = harness.default_fit(mode) if mode else ("log", "t")
    fit = harness.fit_scaling(rows, a.column, a.model or model, a.variable or variable)
    return {"column": fit.column, "model": fit.model, "variable": fit.variable,
            "a": fit.a, "b": fit.b, "r_squared": fit.r_squared, "rows": len(rows)}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="unsigned 64-bit master seed")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["csv", "svg"])
    common.add_argument("--trials", type=int, help="Monte-Carlo trials")

    dist_flags = argparse.ArgumentParser(add_help=False)
    dist_flags.add_argument("--table", help="pmf file: one probability per line, optional 'tail <v>'")
    dist_flags.add_argument("--geometric", type=float, metavar="RHO")
    dist_flags.add_argument("--n-max", type=int, dest="n_max")

    size_flags = argparse.ArgumentParser(add_help=False)
    size_flags.add_argument("--t", type=int)
    size_flags.add_argument("--m", type=int)

    parser = argparse.ArgumentParser(prog="molcomm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_dist = sub.add_parser("dist", help="inspect a first-arrival distribution")
    dist_sub = p_dist.add_subparsers(dest="action", required=True)
    dist_sub.add_parser("check", parents=[common, dist_flags]).set_defaults(func=cmd_dist_check)

    p_b = sub.add_parser("bounds", parents=[common, size_flags], help="upper bounds for one (t, m)")
    p_b.add_argument("--alpha", type=float, dest="alpha_override")
    p_b.set_defaults(func=cmd_bounds)

    p_s = sub.add_parser("scheme", parents=[common, dist_flags, size_flags], help="lower-bound schemes")
    p_s.add_argument("which", choices=["a", "b", "c"])
    p_s.add_argument("--k", type=float)
    p_s.add_argument("--r", type=float)
    p_s.add_argument("--alpha", type=float)
    p_s.set_defaults(func=cmd_scheme)

    p_e = sub.add_parser("exact-mi", parents=[common, dist_flags], help="exact MI on small instances")
    p_e.add_argument("--pattern", action="append", help="comma-separated release counts, e.g. 1,0")
    p_e.add_argument("--all", nargs=2, type=int, metavar=("T", "M"), help="every pattern of length T, <= M molecules")
    p_e.add_argument("--probs", help="comma-separated input probabilities (default uniform)")
    p_e.add_argument("--m-budget", type=int)
    p_e.add_argument("--capacity", action="store_true", help="also maximize over the input distribution")
    p_e.add_argument("--tol", type=float, default=1e-9)
    p_e.set_defaults(func=cmd_exact_mi)

    sub.add_parser("sweep", parents=[common], help="run a scaling sweep").set_defaults(func=cmd_sweep)

    p_f = sub.add_parser("fit", parents=[common], help="fit a scaling law to sweep rows")
    p_f.add_argument("--input", help="CSV written by `sweep` (otherwise the sweep is run from --config)")
    p_f.add_argument("--column", required=True)
    p_f.add_argument("--model", choices=["log", "linear"])
    p_f.add_argument("--variable", choices=["t", "m"])
    p_f.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        s = _Settings(args)
        result = args.func(s)
        if result is not None:
            _print_json(result, getattr(args, "out", None))
    except Exception as exc:  # noqa: BLE001 - every failure becomes one machine-readable line
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
