"""
Sweeping, fitting and plotting
==============================

The harness evaluates every bound over a grid, checks that no lower bound
ever beats a safe upper bound, and writes CSV or SVG. The same run is
available from the shell with ``molcomm sweep --config demos/sweep_time.json``.
"""

from pathlib import Path

from molcomm.harness import SweepSpec, emit, fit_scaling, load_config, run_sweep

here = Path(__file__).parent
out = here / "output"
out.mkdir(exist_ok=True)

spec = SweepSpec.from_dict(load_config(here / "sweep_time.json"))
rows = run_sweep(spec)
fit = fit_scaling(rows, "LB_schemeA", "log", "t")
print(f"LB_schemeA ~ {fit.a:.3f} log2 t {fit.b:+.3f}  (R2 = {fit.r_squared:.4f})")
emit(rows, fit, "csv", out / "sweep_time.csv")
emit(rows, fit, "svg", out / "sweep_time.svg", columns=["UB_time_safe", "LB_schemeA"])

joint = run_sweep(SweepSpec.from_dict({"mode": "joint_linear", "t": [100, 200, 400, 800], "alpha": 1.0}))
fit = fit_scaling(joint, "LB_schemeC", "linear", "t")
print(f"LB_schemeC ~ {fit.a:.4f} t {fit.b:+.2g}  (R2 = {fit.r_squared:.6f})")
emit(joint, fit, "svg", out / "sweep_joint.svg", columns=["UB_joint_linear", "UB_joint_entropy", "LB_schemeC"])
print("wrote", sorted(p.name for p in out.iterdir()))
