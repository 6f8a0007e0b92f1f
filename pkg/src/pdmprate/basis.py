"""Trigonometric orthonormal system on the estimation window.

The nested subspaces have dimensions ``2m + 1``: the constant function plus
``m`` full cosine/sine pairs, orthonormal for the Lebesgue inner product on
``[0, a_max]``.  Functions vanish outside the window, so observations off the
window simply contribute zero to the empirical coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyModelSetError


@dataclass(frozen=True)
class Basis:
    """Window ``[0, a_max]`` and the associated dimension schedule."""

    a_max: float = 6.0

    def __post_init__(self):
        if not self.a_max > 0:
            raise ValueError("window length must be positive")

    @staticmethod
    def dim(m: int) -> int:
        """Dimension of the m-th subspace."""
        return 2 * m + 1

    def max_model_index(self, n: int) -> int:
        """Largest index m whose squared dimension does not exceed n."""
        if n < 1:
            raise EmptyModelSetError("no admissible dimension for n < 1")
        # (2m+1)^2 <= n
        return int((np.sqrt(n) - 1.0) // 2)

    def eval_one(self, l: int, x):
        """Evaluate the l-th basis function (1-based index), 0 off-window."""
        if l < 1:
            raise ValueError("basis index starts at 1")
        x = np.asarray(x, dtype=float)
        inside = (x >= 0.0) & (x <= self.a_max)
        if l == 1:
            vals = np.full_like(x, 1.0 / np.sqrt(self.a_max))
        else:
            # same association order as in design() so results are bit-equal
            j = l // 2
            arg = j * (2.0 * np.pi * x / self.a_max)
            amp = np.sqrt(2.0 / self.a_max)
            vals = amp * (np.cos(arg) if l % 2 == 0 else np.sin(arg))
        out = np.where(inside, vals, 0.0)
        return out if out.ndim else float(out)

    def design_row(self, x: float, dim: int) -> np.ndarray:
        """All basis functions up to ``dim`` at a single point."""
        return self.design(np.array([x]), dim)[:, 0]

    def design(self, x: np.ndarray, dim: int) -> np.ndarray:
        """Matrix of basis values, shape ``(dim, len(x))``."""
        x = np.asarray(x, dtype=float)
        inside = (x >= 0.0) & (x <= self.a_max)
        out = np.zeros((dim, len(x)))
        out[0] = np.where(inside, 1.0 / np.sqrt(self.a_max), 0.0)
        amp = np.sqrt(2.0 / self.a_max)
        n_pairs = (dim - 1) // 2
        theta = 2.0 * np.pi * x / self.a_max
        for j in range(1, n_pairs + 1):
            arg = j * theta
            out[2 * j - 1] = np.where(inside, amp * np.cos(arg), 0.0)
            if 2 * j < dim:
                out[2 * j] = np.where(inside, amp * np.sin(arg), 0.0)
        return out


def coefficients(samples: np.ndarray, basis: Basis, m: int) -> np.ndarray:
    """Empirical projection coefficients for the m-th subspace.

    Entry ``l`` is the sample mean of the l-th basis function; prefixes are
    exactly nested across m because each entry is computed the same way
    regardless of m.
    """
    samples = np.asarray(samples, dtype=float)
    n = len(samples)
    if n < 1:
        raise EmptyModelSetError("empty sample")
    if basis.dim(m) ** 2 > n:
        raise EmptyModelSetError(
            f"dimension {basis.dim(m)} inadmissible for sample size {n}")
    return design_means(samples, basis, basis.dim(m))


def design_means(samples: np.ndarray, basis: Basis, dim: int,
                 chunk: int = 16384) -> np.ndarray:
    """Column means of the design matrix, chunked to bound memory."""
    samples = np.asarray(samples, dtype=float)
    n = len(samples)
    total = np.zeros(dim)
    for start in range(0, n, chunk):
        block = samples[start:start + chunk]
        total += basis.design(block, dim).sum(axis=1)
    return total / n
