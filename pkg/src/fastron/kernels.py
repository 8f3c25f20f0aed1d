"""Kernel functions and the lazily evaluated Gram matrix used by the learner.

The proxy model uses the rational quadratic kernel with the exponent fixed
at 2: it needs no exp() call, so a kernel evaluation is a handful of
multiplies, and it lower-bounds the Gaussian kernel of the same width.
All points live in the normalized input space [-1, 1]^d.

Kernel functions are pure and thread-safe. A LazyGramMatrix is
single-writer: it may move between threads but must not be mutated
concurrently.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["rq_kernel", "gaussian_kernel", "rq_kernel_vector", "LazyGramMatrix"]


def rq_kernel(x, y, gamma: float) -> float:
    """Rational quadratic kernel ``(1 + gamma/2 * ||x - y||^2)^-2``.

    Parameters
    ----------
    x, y : array_like
        Input points of equal dimension.
    gamma : float
        Positive width parameter; larger gamma means a narrower kernel.

    Returns
    -------
    float
        A similarity in (0, 1]; exactly 1 iff x == y. Symmetric in x, y.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    t = 1.0 + 0.5 * gamma * (diff * diff).sum()
    return float(1.0 / (t * t))


def gaussian_kernel(x, y, gamma: float) -> float:
    """Gaussian kernel ``exp(-gamma * ||x - y||^2)``.

    Kept for comparison tests and timing benchmarks; the learner itself
    always uses :func:`rq_kernel`, which bounds this from above.
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    diff = x - y
    return math.exp(-gamma * (diff * diff).sum())


def rq_kernel_vector(X: np.ndarray, q: np.ndarray, gamma: float) -> np.ndarray:
    """Rational quadratic kernel of every row of ``X`` against ``q``.

    Elementwise arithmetic matches :func:`rq_kernel` exactly, so a lazy
    column fill and a scalar evaluation of the same pair agree bitwise.
    """
    diff = X - q
    t = 1.0 + 0.5 * gamma * (diff * diff).sum(axis=1)
    return 1.0 / (t * t)


class LazyGramMatrix:
    """Dense kernel matrix filled one column at a time.

    Training only ever needs the columns of points whose weight gets
    adjusted, so most columns are never evaluated. A block of
    ``capacity`` rows can be reserved up front so the shrink/extend cycle
    of a changing environment never reallocates.

    Entries hold rq_kernel values; a column is valid only once its
    computed flag is set. The diagonal of a computed column is exactly 1.
    """

    def __init__(self, gamma: float, capacity: int = 0):
        if gamma <= 0.0:
            raise ValueError("gamma must be positive")
        self.gamma = float(gamma)
        self._buf = np.zeros((capacity, capacity), dtype=np.float64)
        self._computed = np.zeros(capacity, dtype=bool)
        self.n = 0
        self.kernel_evals = 0  # scalar kernel evaluations performed so far
        self.reallocs = 0

    def _grow(self, cap: int) -> None:
        if cap <= self._buf.shape[0]:
            return
        buf = np.zeros((cap, cap), dtype=np.float64)
        flags = np.zeros(cap, dtype=bool)
        n = self.n
        buf[:n, :n] = self._buf[:n, :n]
        flags[:n] = self._computed[:n]
        self._buf = buf
        self._computed = flags
        self.reallocs += 1

    def reset(self, n: int) -> None:
        """Start over with ``n`` points and no computed columns."""
        self._grow(n)
        self.n = n
        self._computed[:n] = False

    @property
    def matrix(self) -> np.ndarray:
        """View of the live n-by-n block. Only computed columns are valid."""
        return self._buf[: self.n, : self.n]

    def column_computed(self, j: int) -> bool:
        return bool(self._computed[j])

    def ensure_column(self, X: np.ndarray, j: int) -> np.ndarray:
        """Fill column ``j`` against every current point and return it.

        Idempotent: a second call performs no kernel evaluations.
        """
        n = self.n
        if not 0 <= j < n:
            raise IndexError(f"column {j} out of range for {n} points")
        col = self._buf[:n, j]
        if self._computed[j]:
            return col
        col[:] = rq_kernel_vector(X[:n], X[j], self.gamma)
        self._computed[j] = True
        self.kernel_evals += n
        return col

    def full(self, X: np.ndarray) -> np.ndarray:
        """Ensure every column is computed and return the matrix view."""
        for j in range(self.n):
            self.ensure_column(X, j)
        return self.matrix

    def compact(self, keep: np.ndarray) -> None:
        """Drop all rows/columns not in ``keep`` (sorted index array).

        Computed flags survive: a full column stays exact when rows of
        discarded points are removed from it.
        """
        m = len(keep)
        if m:
            sub = self._buf[np.ix_(keep, keep)]
            flags = self._computed[keep].copy()
            self._buf[:m, :m] = sub
            self._computed[:m] = flags
        self.n = m

    def complete_and_extend(self, X_old: np.ndarray, X_new: np.ndarray) -> None:
        """Grow by ``len(X_new)`` points, completing partially filled columns.

        Columns computed before the resize only cover the old rows; their
        new rows are filled here so hypothesis values for the added points
        can be read off directly. The added columns stay lazy.
        """
        n_old = self.n
        if len(X_old) != n_old:
            raise ValueError(f"expected {n_old} retained points, got {len(X_old)}")
        n_add = len(X_new)
        n = n_old + n_add
        self._grow(n)
        if n_add:
            cols = np.flatnonzero(self._computed[:n_old])
            if cols.size:
                diff = X_new[:, None, :] - X_old[None, cols, :]
                d2 = (diff * diff).sum(axis=2)
                t = 1.0 + 0.5 * self.gamma * d2
                self._buf[n_old:n, cols] = 1.0 / (t * t)
                self.kernel_evals += n_add * cols.size
            self._computed[n_old:n] = False
        self.n = n
