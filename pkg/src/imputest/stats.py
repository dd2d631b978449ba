"""Seeded random streams, samplers, bootstrap and summary statistics.

Every stochastic routine in the package takes an explicit
``numpy.random.Generator``. Generators come from :func:`derive_stream`,
which maps a ``(master_seed, replicate_index)`` pair to an independent
PCG64 stream. The derivation is::

    derived_seed = master_seed XOR splitmix64(replicate_index)
    generator    = Generator(PCG64(derived_seed))

splitmix64 is a bijection on 64-bit integers, so distinct indices under the
same master seed never share a derived seed. PCG64 seeding goes through
``numpy.random.SeedSequence`` and is identical across platforms.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_MASK64 = (1 << 64) - 1


def splitmix64(x):
    """One round of the splitmix64 finalizer on a 64-bit unsigned integer."""
    z = (int(x) + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeededStream:
    """Value-like handle on a reproducible random stream."""

    master_seed: int
    index: int

    @property
    def derived_seed(self):
        return (self.master_seed ^ splitmix64(self.index)) & _MASK64

    def generator(self):
        """Fresh generator positioned at the start of the stream."""
        return np.random.Generator(np.random.PCG64(self.derived_seed))


def derive_stream(master_seed, replicate_index):
    if not 0 <= int(master_seed) <= _MASK64:
        raise DomainError(f"master seed must be a 64-bit unsigned integer, got {master_seed}")
    if int(replicate_index) < 0:
        raise DomainError(f"replicate index must be nonnegative, got {replicate_index}")
    return SeededStream(int(master_seed), int(replicate_index))


def as_generator(rng):
    """Accept a Generator, a SeededStream or an int seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, SeededStream):
        return rng.generator()
    if isinstance(rng, (int, np.integer)):
        return derive_stream(int(rng), 0).generator()
    raise TypeError(f"cannot build a random generator from {type(rng).__name__}")


# Samplers. Thin wrappers over numpy's PCG64-backed generators with the
# preconditions the case studies rely on.


def sample_normal(mean, sd, size, rng):
    if np.any(np.asarray(sd) <= 0):
        raise DomainError("normal scale must be positive")
    return rng.normal(mean, sd, size)


def sample_lognormal(log_mean, log_sd, size, rng):
    if np.any(np.asarray(log_sd) <= 0):
        raise DomainError("log-normal log-scale must be positive")
    return rng.lognormal(log_mean, log_sd, size)


def sample_exponential(rate, size, rng):
    rate = np.asarray(rate, dtype=float)
    if np.any(rate <= 0):
        raise DomainError("exponential rate must be positive")
    return rng.exponential(1.0 / rate, size)


def _check_probs(p):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise DomainError(f"not a probability vector: {p}")
    return p / p.sum()


def sample_categorical(probs, size, rng):
    """Draw category indices in ``[0, len(probs))``."""
    p = _check_probs(probs)
    return rng.choice(p.size, size=size, p=p)


def sample_multinomial(n, probs, rng):
    if n < 0:
        raise DomainError("multinomial size must be nonnegative")
    p = _check_probs(probs)
    return rng.multinomial(int(n), p)


def sample_dirichlet(concentration, rng):
    """One draw from Dirichlet(concentration).

    Raises
    ------
    DomainError
        If any concentration entry is not strictly positive.
    """
    a = np.asarray(concentration, dtype=float)
    if a.ndim != 1 or a.size < 2 or np.any(~(a > 0)):
        raise DomainError(f"Dirichlet concentration must be a positive vector, got {a}")
    return rng.dirichlet(a)


# Bootstrap.


@dataclass(frozen=True)
class BootstrapPlan:
    resamples: int

    def __post_init__(self):
        if self.resamples < 1:
            raise DomainError(f"bootstrap needs at least one resample, got {self.resamples}")


def bootstrap_resample(n, plan, rng):
    """Index draws with replacement, one row per resample.

    Returns
    -------
    ndarray of shape (plan.resamples, n)
        Integer indices in ``[0, n)``.
    """
    if n < 1:
        raise DomainError("bootstrap needs at least one observation")
    return rng.integers(0, n, size=(plan.resamples, n))


def bootstrap_statistic(data, statistic, plan, rng):
    """Apply ``statistic`` to every bootstrap resample of ``data`` (along axis 0)."""
    data = np.asarray(data)
    idx = bootstrap_resample(len(data), plan, rng)
    return np.array([statistic(data[row]) for row in idx])


# Summaries.


def quantiles(values, q):
    """Empirical quantiles (linear interpolation, numpy's default rule)."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise DomainError("quantiles of an empty sample")
    return np.quantile(values, q)


def median(values):
    return float(quantiles(values, 0.5))


def weighted_quantile(values, weights, q):
    """Quantile of a weighted sample by interpolating the weighted CDF midpoints."""
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    order = np.argsort(values)
    v, w = values[order], weights[order]
    total = w.sum()
    if total <= 0:
        raise DomainError("weights must not all be zero")
    cdf = (np.cumsum(w) - 0.5 * w) / total
    return np.interp(q, cdf, v)


def mean_and_se(values):
    """Sample mean and its standard error."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()), float("nan")
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))
