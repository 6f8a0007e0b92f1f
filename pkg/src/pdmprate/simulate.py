"""Exact simulation of the embedded post-jump chain.

Each closed-form sampler inverts the conditional survival function of the
next state given the current one, driven by a unit-exponential draw.  A
numeric fallback handles arbitrary rates by integrating the hazard along the
support and root-finding.  Chains are reproducible bit-exactly from their
seed record.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import CapExceededError, FamilyMismatchError, InconsistentChainError
from .model import (ADDITIVE, BACTERIAL_POWER, TCP_POWER, TCP_QUADRATIC,
                    Model, PowerRate, ShiftedQuadraticRate, require_family)


@dataclass(frozen=True)
class JumpChain:
    """Observed chain ``z[0..n]`` with optional jump times and seed record."""

    z: np.ndarray
    model: Model
    seed: Optional[tuple] = None
    times: Optional[np.ndarray] = None
    draws: Optional[np.ndarray] = None

    def __post_init__(self):
        if np.any(self.z <= 0):
            raise InconsistentChainError("chain states must be positive")

    @property
    def n(self) -> int:
        """Number of transitions."""
        return len(self.z) - 1

    @property
    def samples(self) -> np.ndarray:
        """States entering the empirical sums (post-jump states, index >= 1)."""
        return self.z[1:]


def sample_next_tcp_power(model: Model, z, e):
    """Next state for the additive flow / power rate family.

    Inverts the cumulative-hazard recursion in closed form; accepts scalars
    or arrays for ``z`` and ``e``.
    """
    require_family(model, TCP_POWER)
    lam, delta, c = model.rate.lam, model.rate.delta, model.flow.c
    kappa = model.jump.kappa
    p = delta + 1.0
    z = np.asarray(z, dtype=float)
    e = np.asarray(e, dtype=float)
    out = kappa * np.power(np.power(z, p) + p * c * e / lam, 1.0 / p)
    return out if out.ndim else float(out)


def sample_next_tcp_quadratic(model: Model, z, e):
    """Next state for the additive flow / shifted quadratic rate family.

    The hazard recursion reduces to a depressed cubic; its unique real root
    is written with sign-preserving cube roots.
    """
    require_family(model, TCP_QUADRATIC)
    a, b, c = model.rate.a, model.rate.b, model.flow.c
    kappa = model.jump.kappa
    z = np.asarray(z, dtype=float)
    e = np.asarray(e, dtype=float)
    q = 3.0 * c * e + (z - a) ** 3 + 3.0 * b * (z - a)
    root = np.sqrt(4.0 * b ** 3 + q ** 2)
    # real root of t^3 + 3bt = q via Cardano; the halving goes inside the
    # cube roots, and real (sign-preserving) cube roots are required.  The
    # smaller-magnitude argument cancels when 4b^3 << q^2, so it is formed
    # through its conjugate: (q - root)(q + root) = -4b^3.
    b3 = b ** 3
    with np.errstate(divide="ignore", invalid="ignore"):
        plus = np.where(q >= 0.0, (q + root) / 2.0,
                        np.where(root - q > 0.0, 2.0 * b3 / (root - q), 0.0))
        minus = np.where(q >= 0.0,
                         np.where(q + root > 0.0, -2.0 * b3 / (q + root), 0.0),
                         (q - root) / 2.0)
    t = np.cbrt(plus) + np.cbrt(minus)
    out = kappa * (a + t)
    return out if out.ndim else float(out)


def sample_next_bacterial_power(model: Model, z, e):
    """Next state for the exponential flow / halving jump / power rate family."""
    require_family(model, BACTERIAL_POWER)
    lam, delta, c = model.rate.lam, model.rate.delta, model.flow.c
    z = np.asarray(z, dtype=float)
    e = np.asarray(e, dtype=float)
    out = 0.5 * np.power(delta * c * e / lam + np.power(z, delta), 1.0 / delta)
    return out if out.ndim else float(out)


def _scalar_integrand(model: Model):
    """Scalar hazard integrand ``rate(f^{-1}(u)) * weight(u)``.

    Quadrature evaluates this point by point, so the array broadcasting in
    :meth:`Model.transition_weight` is replaced with plain float arithmetic.
    """
    inv_k = 1.0 / model.jump.kappa
    c = model.flow.c
    rate = model.rate
    if isinstance(rate, PowerRate):
        lam, delta = rate.lam, rate.delta
        if delta == 0:
            rate_at = lambda x: lam
        else:
            rate_at = lambda x: lam * x ** delta
    elif isinstance(rate, ShiftedQuadraticRate):
        a, b = rate.a, rate.b
        rate_at = lambda x: (x - a) ** 2 + b
    else:
        rate_at = rate.rate
    if model.flow.variant == ADDITIVE:
        w = inv_k / c
        return lambda u: rate_at(u * inv_k) * w
    return lambda u: rate_at(u * inv_k) / (c * u)


class GenericSampler:
    """Numeric next-state sampler for a fixed starting state.

    Accumulates the hazard integral from the jump image of ``z`` and solves
    ``accumulated_hazard(y) = e`` by bracket expansion plus Brent root
    finding.  Evaluated integrals are cached at their breakpoints so repeated
    draws from the same state get cheap.
    """

    def __init__(self, model: Model, z: float, cap: Optional[float] = None,
                 quad_tol: float = 1e-10, root_rtol: float = 1e-12):
        self.model = model
        self.z = float(z)
        self.lo = model.jump.apply(self.z)
        self.cap = cap if cap is not None else 1e3 * max(self.z, 1.0)
        self.quad_tol = quad_tol
        self.root_rtol = root_rtol
        # sorted breakpoints with their accumulated hazard
        self._ys = [self.lo]
        self._hs = [0.0]
        self._min_gap = max((self.cap - self.lo) / 4096.0, 1e-9)
        self._integrand = _scalar_integrand(model)

    def hazard_to(self, y: float) -> float:
        """Accumulated hazard from the jump image of ``z`` up to ``y``."""
        if y <= self.lo:
            return 0.0
        i = bisect.bisect_right(self._ys, y) - 1
        base, start = self._hs[i], self._ys[i]
        if y == start:
            return base
        seg, _ = integrate.quad(self._integrand, start, y,
                                epsabs=0.0, epsrel=self.quad_tol)
        h = base + seg
        # keep the breakpoint cache bounded: only store well-separated points
        if y - start > self._min_gap:
            j = bisect.bisect_right(self._ys, y)
            self._ys.insert(j, y)
            self._hs.insert(j, h)
        return h

    def draw(self, e: float) -> float:
        if e < 0:
            raise ValueError("exponential draw must be nonnegative")
        if e == 0.0:
            return self.lo
        # the cached hazard values are sorted, so they bracket the root for
        # free once the cache has warmed up
        i = bisect.bisect_right(self._hs, e) - 1
        lo = self._ys[i]
        if i + 1 < len(self._ys):
            hi = self._ys[i + 1]
        else:
            hi = max(lo, 1e-12)
            step = max(lo, 1.0)
            while self.hazard_to(hi) < e:
                hi = hi + step
                step *= 2.0
                if hi > self.cap:
                    raise CapExceededError(
                        f"hazard below target {e:.3g} before cap {self.cap:.3g}")
        y = optimize.brentq(lambda v: self.hazard_to(v) - e, lo, hi,
                            xtol=1e-300, rtol=self.root_rtol)
        return float(y)


def sample_next_generic(model: Model, z: float, e: float,
                        cap: Optional[float] = None) -> float:
    """One-shot numeric next-state draw; see :class:`GenericSampler`."""
    return GenericSampler(model, z, cap=cap).draw(e)


def sample_next(model: Model, z: float, e: float) -> float:
    """Family dispatch: closed form when available, numeric otherwise."""
    fam = model.family
    if fam == TCP_POWER:
        return sample_next_tcp_power(model, z, e)
    if fam == TCP_QUADRATIC:
        return sample_next_tcp_quadratic(model, z, e)
    if fam == BACTERIAL_POWER:
        return sample_next_bacterial_power(model, z, e)
    return sample_next_generic(model, z, e)


def _seed_record(seed) -> tuple:
    if isinstance(seed, np.random.SeedSequence):
        return (tuple(np.atleast_1d(seed.entropy)), tuple(seed.spawn_key))
    return ((int(seed),), ())


def simulate_chain(model: Model, z0: float, n: int, seed) -> JumpChain:
    """Simulate ``n`` transitions starting from ``z0``.

    ``seed`` may be an integer or a ``numpy.random.SeedSequence``; the record
    stored on the chain allows bit-exact replay.
    """
    if not z0 > 0:
        raise ValueError("initial state must be positive")
    if n < 1:
        raise ValueError("need at least one transition")
    ss = seed if isinstance(seed, np.random.SeedSequence) \
        else np.random.SeedSequence(seed)
    rng = np.random.default_rng(ss)
    draws = rng.exponential(1.0, size=n)
    z = np.empty(n + 1)
    z[0] = z0
    fam = model.family
    try:
        if fam == TCP_POWER:
            for k in range(n):
                z[k + 1] = sample_next_tcp_power(model, z[k], draws[k])
        elif fam == TCP_QUADRATIC:
            for k in range(n):
                z[k + 1] = sample_next_tcp_quadratic(model, z[k], draws[k])
        elif fam == BACTERIAL_POWER:
            for k in range(n):
                z[k + 1] = sample_next_bacterial_power(model, z[k], draws[k])
        else:
            for k in range(n):
                z[k + 1] = sample_next_generic(model, z[k], draws[k])
    except (CapExceededError, FamilyMismatchError) as exc:
        raise type(exc)(f"at transition {k}: {exc}") from exc
    return JumpChain(z=z, model=model, seed=_seed_record(ss), draws=draws)


def reconstruct_times(chain: JumpChain, model: Optional[Model] = None) -> np.ndarray:
    """Jump times implied by the states, taking the first jump at time T_1.

    Each inter-jump duration is the flow travel time from the previous state
    to the pre-jump position of the next one.
    """
    model = model or chain.model
    if chain.n < 1:
        raise InconsistentChainError("need at least one transition")
    pre_jump = model.jump.invert(chain.z[1:])
    if np.any(pre_jump < chain.z[:-1]):
        raise InconsistentChainError("pre-jump state behind previous state")
    gaps = model.flow.travel_time(chain.z[:-1], pre_jump)
    return np.cumsum(np.atleast_1d(gaps))


# --- chain serialization -----------------------------------------------------

def chain_to_text(chain: JumpChain, include_times: bool = False) -> str:
    """Columnar text format: comment header, then one state per line."""
    lines = [f"# model: {chain.model.name}",
             f"# seed: {chain.seed}"]
    times = None
    if include_times:
        times = reconstruct_times(chain)
    lines.append("# columns: z" + ("\tt" if include_times else ""))
    lines.append(f"{chain.z[0]:.17g}")
    for k in range(1, len(chain.z)):
        if times is not None:
            lines.append(f"{chain.z[k]:.17g}\t{times[k - 1]:.17g}")
        else:
            lines.append(f"{chain.z[k]:.17g}")
    return "\n".join(lines) + "\n"


def chain_from_text(text: str, model: Model) -> JumpChain:
    """Parse the columnar format back into a chain (header is informational)."""
    zs = []
    ts = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        zs.append(float(parts[0]))
        if len(parts) > 1:
            ts.append(float(parts[1]))
    times = np.array(ts) if ts else None
    return JumpChain(z=np.array(zs), model=model, times=times)
