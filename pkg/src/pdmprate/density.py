"""Projection estimator of the stationary density with penalized selection.

The least-squares contrast restricted to a subspace is minimized by the
empirical coefficients, where it equals minus the sum of their squares.  The
selected index minimizes contrast plus a linear dimension penalty over all
indices whose squared dimension stays below the sample size.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .basis import Basis, design_means
from .errors import ChainTooShortError

DEFAULT_SIGMA = 2.0
DEFAULT_SIGMA_PRIME = 0.0


@dataclass(frozen=True)
class DensityFit:
    """Result of penalized model selection on one sample.

    ``coeffs`` holds the coefficients at the largest admissible dimension;
    every smaller model reuses its prefix.
    """

    basis: Basis
    coeffs: np.ndarray
    contrasts: np.ndarray
    penalties: np.ndarray
    m_hat: int
    n: int
    sigma: float
    sigma_prime: float

    @property
    def m_max(self) -> int:
        return len(self.contrasts) - 1

    def evaluate(self, x, m: int | None = None):
        """Estimated density at ``x`` using model ``m`` (default: selected).

        May be negative; no positivity correction is applied here.
        """
        m = self.m_hat if m is None else m
        if m > self.m_max:
            raise ValueError(f"model index {m} exceeds maximum {self.m_max}")
        x = np.asarray(x, dtype=float)
        dim = self.basis.dim(m)
        design = self.basis.design(np.atleast_1d(x), dim)
        out = self.coeffs[:dim] @ design
        return out if x.ndim else float(out[0])


def contrast(coeffs: np.ndarray) -> float:
    """Minimized contrast value: minus the squared norm of the coefficients."""
    coeffs = np.asarray(coeffs, dtype=float)
    return -float(np.sum(coeffs ** 2))


def penalty(m: int, n: int, sigma: float = DEFAULT_SIGMA,
            sigma_prime: float = DEFAULT_SIGMA_PRIME) -> float:
    """Dimension penalty ``sigma*D_m/n + sigma_prime/n``."""
    if n < 1:
        raise ValueError("sample size must be positive")
    return sigma * Basis.dim(m) / n + sigma_prime / n


def select_model(samples: np.ndarray, basis: Basis,
                 sigma: float = DEFAULT_SIGMA,
                 sigma_prime: float = DEFAULT_SIGMA_PRIME) -> DensityFit:
    """Fit all admissible models and pick the penalized-contrast minimizer.

    Ties break toward the smallest index.  Requires at least 9 observations
    so the downstream log-threshold is well defined.
    """
    samples = np.asarray(samples, dtype=float)
    n = len(samples)
    if n < 9:
        raise ChainTooShortError(f"need n >= 9 observations, got {n}")
    m_max = basis.max_model_index(n)
    coeffs = design_means(samples, basis, basis.dim(m_max))
    sq = coeffs ** 2
    # contrast at model m is minus the cumulative sum of squares up to D_m
    cumsq = np.cumsum(sq)
    dims = np.array([basis.dim(m) for m in range(m_max + 1)])
    contrasts = -cumsq[dims - 1]
    penalties = sigma * dims / n + sigma_prime / n
    crit = contrasts + penalties
    m_hat = int(np.argmin(crit))  # argmin returns the first, i.e. smallest m
    return DensityFit(basis=basis, coeffs=coeffs, contrasts=contrasts,
                      penalties=penalties, m_hat=m_hat, n=n,
                      sigma=sigma, sigma_prime=sigma_prime)


def fit_to_text(fit: DensityFit) -> str:
    """Serialize a fit to a plain text record (17 significant digits)."""
    buf = io.StringIO()
    buf.write(f"a_max\t{fit.basis.a_max:.17g}\n")
    buf.write(f"d_max\t{fit.basis.dim(fit.m_max)}\n")
    buf.write(f"m_hat\t{fit.m_hat}\n")
    buf.write(f"n\t{fit.n}\n")
    buf.write(f"sigma\t{fit.sigma:.17g}\n")
    buf.write(f"sigma_prime\t{fit.sigma_prime:.17g}\n")
    buf.write("coefficients\t" + "\t".join(f"{c:.17g}" for c in fit.coeffs) + "\n")
    return buf.getvalue()


def fit_from_text(text: str) -> DensityFit:
    """Parse the record produced by :func:`fit_to_text`."""
    fields = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, *rest = line.split("\t")
        fields[key] = rest
    basis = Basis(a_max=float(fields["a_max"][0]))
    coeffs = np.array([float(v) for v in fields["coefficients"]])
    n = int(fields["n"][0])
    sigma = float(fields["sigma"][0])
    sigma_prime = float(fields["sigma_prime"][0])
    m_max = (len(coeffs) - 1) // 2
    dims = np.array([basis.dim(m) for m in range(m_max + 1)])
    contrasts = -np.cumsum(coeffs ** 2)[dims - 1]
    penalties = sigma * dims / n + sigma_prime / n
    return DensityFit(basis=basis, coeffs=coeffs, contrasts=contrasts,
                      penalties=penalties, m_hat=int(fields["m_hat"][0]),
                      n=n, sigma=sigma, sigma_prime=sigma_prime)
