"""Limited-memory BFGS pair storage and implicit products with B.

The Hessian approximation B is never formed.  It is defined by at most
``capacity`` stored curvature pairs (s, y) together with a scalar gamma
giving the base matrix B0 = gamma^{-1} I:

    B = B0 - sum_i a_i a_i^T + sum_i b_i b_i^T

with a_i = B_i s_i / sqrt(s_i^T B_i s_i) and b_i = y_i / sqrt(y_i^T s_i),
where B_i is the matrix after the first i updates.  Products with B use
this unrolled rank-one form (O(M^2 n) to set up, O(M n) per product);
products with B^{-1} use the classic two-loop recursion (O(M n)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalBreakdownError

EPS = float(np.finfo(float).eps)
SQRT_EPS = math.sqrt(EPS)


@dataclass(frozen=True)
class AbVectors:
    """Unrolled rank-one factors of a pair memory.

    ``a`` and ``b`` hold the update vectors row-wise.  ``s_bs`` and
    ``y_s`` keep the normalization denominators s_i^T B_i s_i and
    y_i^T s_i (both positive) for diagnostics.
    """

    a: np.ndarray
    b: np.ndarray
    s_bs: np.ndarray
    y_s: np.ndarray

    @property
    def m(self) -> int:
        return self.a.shape[0]


class PairMemory:
    """FIFO store of L-BFGS curvature pairs with implicit-matrix products.

    Pairs enter through :meth:`try_update`, which enforces the curvature
    gate sqrt(eps) < s^T y < 1/sqrt(eps); accepted pairs evict the oldest
    once ``capacity`` is reached.  gamma is refreshed from the newest pair
    as s^T y / ||y||^2 and thresholded from below by sqrt(eps) so that the
    shifted recursion stays stable.  Before any update B is the identity
    (gamma = 1).

    All operations except ``try_update`` are read-only; the a/b factors
    are cached and rebuilt lazily after any mutation.
    """

    def __init__(self, n: int, capacity: int = 5):
        if n < 1:
            raise ValueError(f"dimension must be >= 1, got {n}")
        if capacity < 1:
            raise ValueError(f"capacity must be >= 1, got {capacity}")
        self.n = n
        self.capacity = capacity
        self._s: list[np.ndarray] = []
        self._y: list[np.ndarray] = []
        self._gamma = 1.0
        self._ab: AbVectors | None = None
        self._version = 0

    @property
    def m(self) -> int:
        """Number of stored pairs."""
        return len(self._s)

    @property
    def gamma(self) -> float:
        """Scale of the base matrix B0 = gamma^{-1} I (1 while empty)."""
        return self._gamma

    @property
    def version(self) -> int:
        """Mutation counter; bumps on every accepted update."""
        return self._version

    @property
    def pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Stored (s, y) pairs, oldest first (copies)."""
        return [(s.copy(), y.copy()) for s, y in zip(self._s, self._y)]

    def _check_dim(self, v: np.ndarray, name: str) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"{name} has shape {v.shape}, expected ({self.n},)")
        return v

    def try_update(self, s_plus, y_plus) -> bool:
        """Offer a new pair; store it only if the curvature gate passes.

        Returns True iff sqrt(eps) < s^T y < 1/sqrt(eps).  On acceptance
        the oldest pair is evicted when full and gamma is recomputed from
        the new pair.  On rejection the memory is untouched.
        """
        s = self._check_dim(s_plus, "s_plus")
        y = self._check_dim(y_plus, "y_plus")
        sy = float(s @ y)
        # NaN compares false on both sides, so non-finite data is rejected.
        if not (SQRT_EPS < sy < 1.0 / SQRT_EPS):
            return False
        self._s.append(s.copy())
        self._y.append(y.copy())
        if len(self._s) > self.capacity:
            self._s.pop(0)
            self._y.pop(0)
        self._gamma = max(SQRT_EPS, sy / float(y @ y))
        self._ab = None
        self._version += 1
        return True

    def inv_multiply(self, z) -> np.ndarray:
        """Return B^{-1} z via the two-loop recursion with B0^{-1} = gamma I."""
        z = self._check_dim(z, "z")
        m = len(self._s)
        q = z.copy()
        alpha = np.empty(m)
        rho = np.empty(m)
        for k in range(m - 1, -1, -1):
            rho[k] = 1.0 / float(self._y[k] @ self._s[k])
            alpha[k] = rho[k] * float(self._s[k] @ q)
            q -= alpha[k] * self._y[k]
        r = self._gamma * q
        for k in range(m):
            beta = rho[k] * float(self._y[k] @ r)
            r += (alpha[k] - beta) * self._s[k]
        return r

    def multiply(self, v) -> np.ndarray:
        """Return B v using the unrolled a/b form."""
        v = self._check_dim(v, "v")
        ab = self.ab_vectors()
        r = v / self._gamma
        if ab.m:
            r = r - ab.a.T @ (ab.a @ v) + ab.b.T @ (ab.b @ v)
        return r

    def ab_vectors(self) -> AbVectors:
        """Return the cached a/b factors, rebuilding after any mutation.

        Raises NumericalBreakdownError when some s_i^T B_i s_i is not
        positive, which signals loss of positive definiteness despite the
        curvature gate.
        """
        if self._ab is None:
            self._ab = self._build_ab()
        return self._ab

    def _build_ab(self) -> AbVectors:
        m = len(self._s)
        a = np.zeros((m, self.n))
        b = np.zeros((m, self.n))
        s_bs = np.zeros(m)
        y_s = np.zeros(m)
        ginv = 1.0 / self._gamma
        for i in range(m):
            s, y = self._s[i], self._y[i]
            bs = ginv * s
            if i:
                bs = bs - a[:i].T @ (a[:i] @ s) + b[:i].T @ (b[:i] @ s)
            sbs = float(s @ bs)
            if not np.isfinite(sbs) or sbs <= 0.0:
                raise NumericalBreakdownError(
                    f"s^T B s = {sbs:.3e} for pair {i}; B lost positive definiteness"
                )
            ys = float(y @ s)
            a[i] = bs / math.sqrt(sbs)
            b[i] = y / math.sqrt(ys)
            s_bs[i] = sbs
            y_s[i] = ys
        return AbVectors(a=a, b=b, s_bs=s_bs, y_s=y_s)

    def materialize_dense(self) -> np.ndarray:
        """Form B explicitly as an n x n array.  Test oracle, small n only."""
        ab = self.ab_vectors()
        dense = np.eye(self.n) / self._gamma
        for i in range(ab.m):
            dense -= np.outer(ab.a[i], ab.a[i])
            dense += np.outer(ab.b[i], ab.b[i])
        return dense
