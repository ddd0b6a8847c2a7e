"""Trust-region subproblem solvers over an implicit L-BFGS model.

Solves min_p g^T p + 0.5 p^T B p subject to ||p|| <= delta, where B is a
positive-definite pair memory.  Two production solvers are provided:

* :func:`mss_solve` drives the boundary multiplier sigma with Newton's
  method on the pole function phi(sigma) = 1/||p(sigma)|| - 1/delta,
  replacing the Cholesky solves of the classic More-Sorensen iteration
  with the matrix-free shifted recursion.  It solves to any requested
  boundary accuracy.
* :func:`steihaug_solve` is the Steihaug-Toint truncated conjugate
  gradient method, which stops at the boundary and does not polish.

:func:`dense_reference_solve` (eigendecomposition plus bisection) and
:func:`check_optimality` exist for verification at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateDerivativeError,
    NumericalBreakdownError,
    ShiftTooSmallError,
)
from .memory import EPS, SQRT_EPS, PairMemory
from .shifted import apply as shifted_apply
from .shifted import prepare as shifted_prepare

INTERIOR = "interior"
BOUNDARY = "boundary"
MAX_ITERATIONS = "max_iterations"
BREAKDOWN = "breakdown"


@dataclass
class Subproblem:
    """Gradient and radius defining one trust-region subproblem."""

    g: np.ndarray
    delta: float

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=float)
        self.delta = float(self.delta)
        if self.g.ndim != 1:
            raise ValueError("g must be a vector")
        if not np.all(np.isfinite(self.g)):
            raise ValueError("g must be finite")
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta}")


@dataclass
class MssOptions:
    """Stopping controls for :func:`mss_solve`.

    tau_ms is the relative boundary tolerance |(||p|| - delta)| <= tau_ms*delta;
    sigma values at or below sqrt(eps_sigma) are snapped to zero and solved
    unshifted.  max_iterations defaults to min(n, 100) at solve time.
    """

    tau_ms: float = SQRT_EPS
    eps_sigma: float = EPS
    max_iterations: int | None = None


@dataclass
class SubproblemResult:
    """Solver output: step, multiplier, exit status and counters."""

    p: np.ndarray
    sigma: float
    status: str
    inner_iterations: int
    model_reduction: float


@dataclass
class OptimalityReport:
    """Measured violations of the global-optimality conditions."""

    residual: float
    complementarity: float
    feasibility: float
    residual_ok: bool
    complementarity_ok: bool
    feasibility_ok: bool
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = (
            self.residual_ok and self.complementarity_ok and self.feasibility_ok
        )


def phi(p_norm: float, delta: float) -> float:
    """Pole function 1/p_norm - 1/delta whose root puts p on the boundary."""
    p_norm = float(p_norm)
    delta = float(delta)
    if p_norm <= 0.0:
        raise ValueError(f"p_norm must be positive, got {p_norm}")
    if delta <= 0.0:
        raise ValueError(f"delta must be positive, got {delta}")
    return 1.0 / p_norm - 1.0 / delta


def newton_sigma_update(sigma: float, p, p_hat, delta: float) -> float:
    """One Newton step sigma - phi/phi' for the boundary multiplier.

    ``p_hat`` must solve (B + sigma I) p_hat = -p, which makes
    phi'(sigma) = -(p^T p_hat) / ||p||^3 without any factorization.
    """
    p = np.asarray(p, dtype=float)
    p_hat = np.asarray(p_hat, dtype=float)
    p_norm = float(np.linalg.norm(p))
    value = phi(p_norm, delta)
    slope = -float(p @ p_hat) / p_norm**3
    if slope == 0.0:
        raise DegenerateDerivativeError("phi'(sigma) = 0")
    return float(sigma) - value / slope


def _model_reduction(mem: PairMemory, g: np.ndarray, p: np.ndarray) -> float:
    return float(-(g @ p) - 0.5 * (p @ mem.multiply(p)))


def mss_solve(
    mem: PairMemory, sp: Subproblem, opts: MssOptions | None = None
) -> SubproblemResult:
    """Solve the subproblem to boundary accuracy tau_ms via sigma-Newton.

    Starts from the unconstrained step p = -B^{-1} g (returned directly
    when inside the region).  Otherwise alternates: solve
    (B + sigma I) p_hat = -p for the derivative of the pole function,
    take a Newton step in sigma, then re-solve (B + sigma I) p = -g.
    Shifts at or below sqrt(eps_sigma) are snapped to zero and handled by
    the two-loop recursion; larger shifts reuse one prepared recursion
    state for both solves at that sigma.

    Returns a result with status "interior", "boundary", "max_iterations"
    (iteration cap hit, best iterate returned) or "breakdown" (recursion
    failure or a negative Newton step, both pathological for SPD B).
    """
    if opts is None:
        opts = MssOptions()
    g = sp.g
    if g.shape != (mem.n,):
        raise ValueError(f"g has shape {g.shape}, expected ({mem.n},)")
    delta = sp.delta
    max_iterations = (
        opts.max_iterations if opts.max_iterations is not None else min(mem.n, 100)
    )
    sqrt_eps_sigma = math.sqrt(opts.eps_sigma)

    sigma = 0.0
    p = -mem.inv_multiply(g)
    p_norm = float(np.linalg.norm(p))
    iterations = 0

    def finish(status: str) -> SubproblemResult:
        return SubproblemResult(
            p=p,
            sigma=sigma,
            status=status,
            inner_iterations=iterations,
            model_reduction=_model_reduction(mem, g, p),
        )

    if p_norm <= delta:
        return finish(INTERIOR)

    state = None  # prepared recursion state for the current sigma (> threshold)
    while abs(p_norm - delta) > opts.tau_ms * delta:
        if iterations >= max_iterations:
            return finish(MAX_ITERATIONS)
        iterations += 1
        try:
            # p solved (B + sigma I) p = -g at the current sigma, so the
            # prepared state can be reused for the p_hat system.
            if state is not None:
                p_hat = shifted_apply(state, mem, -p)
            else:
                p_hat = -mem.inv_multiply(p)
            sigma_new = newton_sigma_update(sigma, p, p_hat, delta)
            if not math.isfinite(sigma_new) or sigma_new < 0.0:
                # Newton stays in [0, sigma*] for SPD B; a negative step
                # means the iteration has lost its footing.
                return finish(BREAKDOWN)
            if sigma_new > sqrt_eps_sigma:
                sigma = sigma_new
                state = shifted_prepare(mem, sigma)
                p = shifted_apply(state, mem, -g)
            else:
                sigma = 0.0
                state = None
                p = -mem.inv_multiply(g)
        except (NumericalBreakdownError, DegenerateDerivativeError, ShiftTooSmallError):
            return finish(BREAKDOWN)
        p_norm = float(np.linalg.norm(p))
    return finish(BOUNDARY)


def _boundary_step(p: np.ndarray, d: np.ndarray, delta: float) -> float:
    """Positive tau with ||p + tau d|| = delta, for ||p|| <= delta, d != 0."""
    dd = float(d @ d)
    pd = float(p @ d)
    pp = float(p @ p)
    rest = delta**2 - pp  # >= 0 inside the region
    disc = math.sqrt(max(pd**2 + dd * max(rest, 0.0), 0.0))
    if pd >= 0.0:
        return rest / (pd + disc) if (pd + disc) > 0.0 else 0.0
    return (disc - pd) / dd


def steihaug_solve(
    mem: PairMemory,
    sp: Subproblem,
    gradient_norm_at_x: float | None = None,
    max_iterations: int | None = None,
) -> SubproblemResult:
    """Truncated conjugate gradients on B p = -g inside the region.

    CG starts from p = 0 and stops at the first of: residual small enough
    (||r|| <= ||g(x)|| * min(0.1, ||g(x)||^0.1)), an iterate crossing the
    boundary (step truncated to the sphere), negative curvature (cannot
    occur for SPD B, guarded anyway), or the iteration cap
    (default min(n, 100)).  Costs one product with B per iteration.

    The multiplier is always reported as 0; a boundary exit carries
    status "boundary" without polishing the boundary equation.
    """
    g = sp.g
    if g.shape != (mem.n,):
        raise ValueError(f"g has shape {g.shape}, expected ({mem.n},)")
    delta = sp.delta
    if max_iterations is None:
        max_iterations = min(mem.n, 100)
    gnorm = (
        float(gradient_norm_at_x)
        if gradient_norm_at_x is not None
        else float(np.linalg.norm(g))
    )
    tolerance = gnorm * min(0.1, gnorm**0.1) if gnorm > 0.0 else 0.0

    p = np.zeros(mem.n)
    r = g.copy()
    rr = float(r @ r)
    iterations = 0
    status = MAX_ITERATIONS
    if math.sqrt(rr) <= tolerance:
        status = INTERIOR  # zero gradient: p = 0 is optimal
    else:
        d = -g
        while iterations < max_iterations:
            bd = mem.multiply(d)
            iterations += 1
            curvature = float(d @ bd)
            if curvature <= 0.0:
                p = p + _boundary_step(p, d, delta) * d
                status = BOUNDARY
                break
            alpha = rr / curvature
            p_trial = p + alpha * d
            if float(np.linalg.norm(p_trial)) > delta:
                p = p + _boundary_step(p, d, delta) * d
                status = BOUNDARY
                break
            p = p_trial
            r = r + alpha * bd
            rr_new = float(r @ r)
            if math.sqrt(rr_new) <= tolerance:
                status = INTERIOR
                break
            d = -r + (rr_new / rr) * d
            rr = rr_new

    return SubproblemResult(
        p=p,
        sigma=0.0,
        status=status,
        inner_iterations=iterations,
        model_reduction=_model_reduction(mem, g, p),
    )


def dense_reference_solve(
    b_dense, g, delta: float, tol: float = 1e-10
) -> tuple[np.ndarray, float]:
    """Reference solver on an explicit SPD matrix (test oracle, small n).

    Uses an eigendecomposition B = Q diag(lam) Q^T.  If the unconstrained
    minimizer fits inside the region it is returned with sigma = 0;
    otherwise sigma solves sum_i (q_i^T g)^2 / (lam_i + sigma)^2 = delta^2
    by bisection on the pole function, to |(||p|| - delta)| <= tol*delta.
    """
    b_dense = np.asarray(b_dense, dtype=float)
    g = np.asarray(g, dtype=float)
    delta = float(delta)
    n = g.size
    if b_dense.shape != (n, n):
        raise ValueError("B and g have inconsistent shapes")
    if not np.allclose(b_dense, b_dense.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(b_dense).max()))):
        raise ValueError("B must be symmetric")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    lam, q = np.linalg.eigh(b_dense)
    if lam[0] <= 0.0:
        raise ValueError(f"B must be positive definite (min eigenvalue {lam[0]:.3e})")
    coeff = q.T @ g

    def p_norm(sigma: float) -> float:
        return float(np.linalg.norm(coeff / (lam + sigma)))

    if p_norm(0.0) <= delta:
        return -q @ (coeff / lam), 0.0

    lo = 0.0
    hi = max(float(np.linalg.norm(g)) / delta - float(lam[0]), SQRT_EPS)
    while p_norm(hi) > delta:
        hi *= 2.0
    sigma = hi
    for _ in range(300):
        sigma = 0.5 * (lo + hi)
        norm = p_norm(sigma)
        if abs(norm - delta) <= tol * delta:
            break
        if norm > delta:
            lo = sigma
        else:
            hi = sigma
        if hi - lo <= EPS * max(1.0, sigma):
            break
    return -q @ (coeff / (lam + sigma)), sigma


def check_optimality(
    mem: PairMemory,
    result: SubproblemResult,
    sp: Subproblem,
    tol: float,
    tau_ms: float = SQRT_EPS,
) -> OptimalityReport:
    """Certify a result against the global-optimality conditions.

    Measures the stationarity residual ||B p + sigma p + g|| / ||g||, the
    complementarity |sigma * (delta - ||p||)| and the feasibility excess
    ||p|| - delta (1 + tau_ms).  Passing requires residual <= tol,
    complementarity <= tol * max(1, sigma*delta) and no feasibility excess.
    """
    p = result.p
    sigma = result.sigma
    g = sp.g
    delta = sp.delta
    gnorm = float(np.linalg.norm(g))
    p_norm = float(np.linalg.norm(p))
    residual = float(np.linalg.norm(mem.multiply(p) + sigma * p + g))
    residual /= gnorm if gnorm > 0.0 else 1.0
    complementarity = abs(sigma * (delta - p_norm))
    feasibility = p_norm - delta * (1.0 + tau_ms)
    return OptimalityReport(
        residual=residual,
        complementarity=complementarity,
        feasibility=feasibility,
        residual_ok=residual <= tol,
        complementarity_ok=complementarity <= tol * max(1.0, sigma * delta),
        feasibility_ok=feasibility <= 0.0,
    )
