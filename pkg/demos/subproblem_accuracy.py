#!/usr/bin/env python3
# Solve one trust-region subproblem both ways and certify the answers.
#
# The L-BFGS memory is filled with curvature pairs sampled from a random
# SPD quadratic, then a gradient is chosen large enough that the solution
# lies on the boundary of the region.  The sigma-Newton solver (mss) is
# compared against truncated CG (steihaug) and against a dense
# eigendecomposition reference.
import numpy as np

from trbench import (
    PairMemory,
    Subproblem,
    check_optimality,
    dense_reference_solve,
    mss_solve,
    steihaug_solve,
)

rng = np.random.default_rng(3)
n = 50

# Build the memory from steps against a fixed SPD matrix, the same data a
# quasi-Newton run would produce on a quadratic objective.
q, _ = np.linalg.qr(rng.standard_normal((n, n)))
hess = (q * rng.uniform(0.5, 8.0, size=n)) @ q.T
mem = PairMemory(n, capacity=5)
while mem.m < 5:
    s = rng.standard_normal(n)
    mem.try_update(s, hess @ s)

g = rng.standard_normal(n)
g *= 8.0 / np.linalg.norm(g)
sp = Subproblem(g=g, delta=0.25)

exact = mss_solve(mem, sp)
cg = steihaug_solve(mem, sp)
p_ref, sigma_ref = dense_reference_solve(mem.materialize_dense(), g, sp.delta)

print(f"mss:      status={exact.status}  sigma={exact.sigma:.6f}  "
      f"newton iterations={exact.inner_iterations}")
print(f"steihaug: status={cg.status}  cg iterations={cg.inner_iterations}")
print(f"dense reference sigma = {sigma_ref:.6f}")
print()
print(f"mss step vs reference:      {np.linalg.norm(exact.p - p_ref):.3e}")
print(f"steihaug step vs reference: {np.linalg.norm(cg.p - p_ref):.3e}")
print(f"boundary gap (mss):         {abs(np.linalg.norm(exact.p) - sp.delta):.3e}")
print(f"model reduction mss / cg:   {exact.model_reduction:.6f} / {cg.model_reduction:.6f}")

report = check_optimality(mem, exact, sp, tol=1e-6)
print()
print(f"optimality certificate: residual={report.residual:.3e}  "
      f"complementarity={report.complementarity:.3e}  passed={report.passed}")
