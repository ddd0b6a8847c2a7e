#!/usr/bin/env python3
# Trust-region minimization of the extended Rosenbrock function, with a
# per-iteration trace from the driver callback.
import numpy as np

from trbench import TrConfig, make, minimize

problem = make("srosenbr", 200)
print(f"problem: {problem.name}, n = {problem.n}, start f = "
      f"{problem.eval(problem.x0)[0]:.4e}")

rows = []
result = minimize(problem, TrConfig(solver="mss"), callback=rows.append)

print(f"{'iter':>4} {'f':>12} {'|g|':>10} {'delta':>10} {'rho':>8} {'step':>9} {'pairs':>5}")
for info in rows[:10] + (["..."] if len(rows) > 20 else []) + rows[-5:]:
    if info == "...":
        print("  ...")
        continue
    step = "accept" if info["accepted"] else "reject"
    print(f"{info['iteration']:>4} {info['f']:>12.4e} {info['gnorm']:>10.2e} "
          f"{info['delta']:>10.2e} {info['rho']:>8.2f} {step:>9} {info['memory_size']:>5}")

print()
print(f"status: {result.status}")
print(f"function evaluations: {result.fe_count}  "
      f"(accepted {result.accepted_steps}, rejected {result.rejected_steps})")
print(f"subproblem iterations: {result.inner_iterations_total}, "
      f"time in solver: {result.subproblem_time:.4f}s")
print(f"final f = {result.f_final:.6e}, final |g| = {result.gnorm_final:.3e}")
