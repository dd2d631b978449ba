"""Generic plug-in and imputation estimators.

A fitted (possibly misspecified) model exposes two expectation operators for
each registered complete-data summary ``s``:

* ``unconditional_mean(s)``   -> E_theta[s(X)]
* ``conditional_mean(s, y)``  -> E_theta[s(X) | Y = y]

The plug-in estimate is the first; the imputation estimate averages the
second over the observed data. Summaries are registered by string id so that
each case study can supply closed-form conditional expectations.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError


class FittedModel:
    """Base class for fitted models with per-id summary functions.

    Subclasses populate ``self._summaries`` with
    ``{summary_id: (unconditional, conditional)}`` where ``unconditional()``
    returns a vector and ``conditional(y)`` returns a vector. Subclasses may
    override :meth:`conditional_means` with a vectorized version.
    """

    def __init__(self):
        self._summaries = {}

    def register(self, summary_id, unconditional, conditional):
        self._summaries[summary_id] = (unconditional, conditional)

    @property
    def summary_ids(self):
        return tuple(self._summaries)

    def _lookup(self, summary_id):
        try:
            return self._summaries[summary_id]
        except KeyError:
            raise ConfigError(
                f"unknown summary {summary_id!r}; known: {sorted(self._summaries)}"
            ) from None

    def unconditional_mean(self, summary_id):
        return np.atleast_1d(np.asarray(self._lookup(summary_id)[0](), dtype=float))

    def conditional_mean(self, summary_id, y):
        return np.atleast_1d(np.asarray(self._lookup(summary_id)[1](y), dtype=float))

    def conditional_means(self, summary_id, observations):
        """Stack of conditional means, one row per observation."""
        return np.array([self.conditional_mean(summary_id, y) for y in observations])


class CompleteDataModel(FittedModel):
    """Degenerate case where ``y`` determines ``x``: no missing information.

    ``summaries`` maps ids to functions of a single complete observation;
    ``population`` is the list of observations whose empirical distribution
    stands in for the fitted model.
    """

    def __init__(self, summaries, population):
        super().__init__()
        population = list(population)
        for sid, fn in summaries.items():
            self.register(
                sid,
                lambda fn=fn: np.mean([np.atleast_1d(fn(x)) for x in population], axis=0),
                fn,
            )


@dataclass(frozen=True)
class EstimatePair:
    plug_in: np.ndarray
    imputation: np.ndarray

    def __post_init__(self):
        if self.plug_in.shape != self.imputation.shape or self.plug_in.ndim != 1:
            raise DomainError("plug-in and imputation estimates must be vectors of equal length")

    @property
    def target_dim(self):
        return self.plug_in.size


def plug_in_estimate(model, summary_id):
    return model.unconditional_mean(summary_id)


def imputation_estimate(model, summary_id, observations):
    """Average of per-observation conditional means of the summary."""
    if len(observations) == 0:
        raise DomainError("imputation estimate needs at least one observation")
    return model.conditional_means(summary_id, observations).mean(axis=0)


def estimate_pair(model, summary_id, observations):
    return EstimatePair(
        plug_in_estimate(model, summary_id),
        imputation_estimate(model, summary_id, observations),
    )


def relative_error(estimate, truth):
    """``(estimate - truth) / truth``; vectorized over ``estimate``."""
    truth_arr = np.asarray(truth, dtype=float)
    if np.any(truth_arr == 0):
        raise DomainError("relative error undefined for a zero true value")
    out = (np.asarray(estimate, dtype=float) - truth_arr) / truth_arr
    return float(out) if out.ndim == 0 else out
