#!/usr/bin/env python3
# Run the full solver x problem grid at a small size and turn the results
# into a function-evaluation performance profile (CSV + SVG).
#
# The same artifacts come out of the command line interface:
#   trbench run --solver mss,steihaug --problems all --n 200 --out results.csv
#   trbench profile --in results.csv --metric fe --out profile.csv --svg profile.svg
from pathlib import Path

from trbench import (
    PROBLEM_NAMES,
    TrConfig,
    performance_profile,
    run_suite,
    write_csv,
    write_profile,
)

out_dir = Path(__file__).resolve().parent / "output"
out_dir.mkdir(exist_ok=True)

records = run_suite(
    ["mss", "steihaug"], [(name, 200) for name in PROBLEM_NAMES], TrConfig()
)
write_csv(records, out_dir / "results.csv")

print(f"{'problem':<10} {'solver':<9} {'status':<12} {'fe':>5} {'inner':>6}")
for r in records:
    print(f"{r.problem:<10} {r.solver:<9} {r.status:<12} {r.fe:>5} {r.inner_iters:>6}")

for solver in ("mss", "steihaug"):
    total = sum(r.fe for r in records if r.solver == solver)
    print(f"total function evaluations, {solver}: {total}")

curves = performance_profile(records, metric="fe")
write_profile(curves, out_dir / "profile.csv", svg_path=out_dir / "profile.svg")
for curve in curves:
    win_rate = next((f for t, f in curve.points if t == 0.0), 0.0)
    print(f"{curve.solver}: best-or-tied on {win_rate:.0%} of problems, "
          f"r_max = {curve.r_max:.2f}")
print(f"artifacts in {out_dir}")
