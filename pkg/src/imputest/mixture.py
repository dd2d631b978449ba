"""Two-component mixture case study.

Data come from a log-normal mixture; the analyst fits a (misspecified) normal
mixture by EM. From the fit we get plug-in and imputation estimates of the
tail summary ``E[1{h=1} 1{y>c}]``, responsibility-weighted kernel density
estimates of each component, and model-based clustering errors.

Component labels are fixed by ordering the means: component 1 has the
smaller mean.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid
from scipy.special import logsumexp, ndtr

from .errors import ConfigError, ConvergenceError, DegenerateFitError, DomainError
from .estimators import FittedModel
from .stats import weighted_quantile

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass(frozen=True)
class NormalMixtureParams:
    nu1: float
    nu2: float
    delta1: float
    delta2: float
    beta: float

    def __post_init__(self):
        if not (self.delta1 > 0 and self.delta2 > 0):
            raise DomainError("normal mixture scales must be positive")
        if not 0 < self.beta < 1:
            raise DomainError(f"mixing weight must lie in (0, 1), got {self.beta}")
        if not self.nu1 <= self.nu2:
            raise DomainError("component labels require nu1 <= nu2")

    @property
    def means(self):
        return np.array([self.nu1, self.nu2])

    @property
    def scales(self):
        return np.array([self.delta1, self.delta2])

    @property
    def weights(self):
        return np.array([self.beta, 1.0 - self.beta])

    def component_pdf(self, j, x):
        """Density of component ``j`` (1 or 2) at ``x``."""
        m, s = self.means[j - 1], self.scales[j - 1]
        return np.exp(-0.5 * ((np.asarray(x) - m) / s) ** 2 - _LOG_SQRT_2PI) / s

    def pdf(self, x):
        return self.beta * self.component_pdf(1, x) + (1 - self.beta) * self.component_pdf(2, x)


@dataclass(frozen=True)
class LogNormalMixtureParams:
    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    alpha: float

    def __post_init__(self):
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise DomainError("log-normal log-scales must be positive")
        if not 0 < self.alpha < 1:
            raise DomainError(f"mixing weight must lie in (0, 1), got {self.alpha}")
        if not self.mu1 <= self.mu2:
            raise DomainError("component labels require mu1 <= mu2")

    def component_pdf(self, j, x):
        x = np.asarray(x, dtype=float)
        m = (self.mu1, self.mu2)[j - 1]
        s = (self.sigma1, self.sigma2)[j - 1]
        out = np.zeros_like(x)
        pos = x > 0
        lx = np.log(x[pos])
        out[pos] = np.exp(-0.5 * ((lx - m) / s) ** 2 - _LOG_SQRT_2PI) / (s * x[pos])
        return out

    def pdf(self, x):
        return self.alpha * self.component_pdf(1, x) + (1 - self.alpha) * self.component_pdf(2, x)


DEFAULT_TRUTH = LogNormalMixtureParams(mu1=1.5, mu2=2.5, sigma1=0.2, sigma2=0.25, alpha=0.3)
DEFAULT_THRESHOLDS = (5.0, 5.5, 6.0, 6.5)


def simulate_lognormal_mixture(params, n, rng):
    """Draw ``n`` points; labels are 1 or 2 (the true component)."""
    if n < 1:
        raise DomainError("need n >= 1")
    labels = np.where(rng.random(n) < params.alpha, 1, 2)
    mu = np.where(labels == 1, params.mu1, params.mu2)
    sigma = np.where(labels == 1, params.sigma1, params.sigma2)
    data = np.exp(mu + sigma * rng.standard_normal(n))
    return data, labels


# EM for the two-component normal mixture.


def _log_joint(data, means, scales, weights):
    """n x 2 matrix of log(weight_j * N(y_i; mean_j, scale_j))."""
    z = (data[:, None] - means[None, :]) / scales[None, :]
    return np.log(weights)[None, :] - 0.5 * z**2 - np.log(scales)[None, :] - _LOG_SQRT_2PI


def mixture_loglik(params, data):
    data = np.asarray(data, dtype=float)
    return float(logsumexp(_log_joint(data, params.means, params.scales, params.weights), axis=1).sum())


def _median_split_init(data):
    order = np.sort(data)
    half = data.size // 2
    lo, hi = order[:half], order[half:]
    return np.array([lo.mean(), hi.mean()]), np.array([lo.std(), hi.std()]), np.array([0.5, 0.5])


def em_normal_mixture(data, k=2, init="median", tol=1e-8, max_iter=1000, xtol=1e-10,
                      return_trace=False):
    """Maximum likelihood fit of a two-component normal mixture by EM.

    Parameters
    ----------
    data : array_like
        Observations.
    k : int
        Number of components; only 2 is supported.
    init : {"median"} or NormalMixtureParams
        Median split (deterministic) or explicit starting parameters.
    tol : float
        Stop when the log-likelihood gain falls below ``tol`` ...
    xtol : float
        ... and the largest parameter change falls below ``xtol``.
    max_iter : int
        Iteration budget; exceeding it raises ``ConvergenceError`` carrying
        the last iterate.
    return_trace : bool
        Also return the list of log-likelihoods, one per E-step.

    Returns
    -------
    NormalMixtureParams, or (NormalMixtureParams, list of float)
    """
    if k != 2:
        raise ConfigError("only k=2 components are supported")
    data = np.asarray(data, dtype=float)
    if np.unique(data).size < 2 * k:
        raise DomainError(f"need at least {2 * k} distinct points")
    floor = 1e-6 * data.std()

    if isinstance(init, NormalMixtureParams):
        means, scales, weights = init.means, init.scales, init.weights
    elif init == "median":
        means, scales, weights = _median_split_init(data)
    else:
        raise ConfigError(f"unknown EM initialization {init!r}")

    trace = []
    theta = np.concatenate([means, scales, weights[:1]])
    converged = False
    for _ in range(max_iter):
        logj = _log_joint(data, means, scales, weights)
        lognorm = logsumexp(logj, axis=1)
        trace.append(float(lognorm.sum()))
        z = np.exp(logj - lognorm[:, None])

        nk = z.sum(axis=0)
        weights = nk / data.size
        means = (z * data[:, None]).sum(axis=0) / nk
        scales = np.sqrt((z * (data[:, None] - means[None, :]) ** 2).sum(axis=0) / nk)
        for j in range(k):
            if not scales[j] >= floor:
                raise DegenerateFitError(
                    f"component {j + 1} collapsed: scale {scales[j]:.3g} below floor {floor:.3g}"
                )
        new_theta = np.concatenate([means, scales, weights[:1]])
        step = np.max(np.abs(new_theta - theta))
        theta = new_theta
        if len(trace) > 1 and trace[-1] - trace[-2] < tol and step < xtol:
            converged = True
            break

    if means[0] > means[1]:
        means, scales, weights = means[::-1], scales[::-1], weights[::-1]
    params = NormalMixtureParams(*(float(v) for v in (means[0], means[1], scales[0], scales[1], weights[0])))
    if not converged:
        raise ConvergenceError(f"EM did not converge in {max_iter} iterations", last_iterate=params)
    return (params, trace) if return_trace else params


def em_lognormal_mixture(data, **kwargs):
    """Correct-model fit: a log-normal mixture is a normal mixture in log space."""
    data = np.asarray(data, dtype=float)
    if np.any(data <= 0):
        raise DomainError("log-normal mixture needs positive data")
    p = em_normal_mixture(np.log(data), **kwargs)
    return LogNormalMixtureParams(p.nu1, p.nu2, p.delta1, p.delta2, p.beta)


def responsibilities(params, data):
    """n x 2 matrix of posterior component probabilities; rows sum to one."""
    data = np.atleast_1d(np.asarray(data, dtype=float))
    logj = _log_joint(data, params.means, params.scales, params.weights)
    return np.exp(logj - logsumexp(logj, axis=1)[:, None])


# Tail summary E[1{h=1} 1{y>c}].


def plugin_tail(params, c):
    return float((1.0 - ndtr((c - params.nu1) / params.delta1)) * params.beta)


def imputation_tail(params, data, c):
    data = np.asarray(data, dtype=float)
    if data.size == 0:
        raise DomainError("imputation tail needs data")
    z1 = responsibilities(params, data)[:, 0]
    return float(np.mean(z1 * (data > c)))


def lognormal_plugin_tail(params, c):
    """Plug-in tail under a (fitted or true) log-normal mixture."""
    if c <= 0:
        return params.alpha
    return float((1.0 - ndtr((np.log(c) - params.mu1) / params.sigma1)) * params.alpha)


true_tail = lognormal_plugin_tail


class NormalMixtureFit(FittedModel):
    """Fitted normal mixture as a generic model for the estimator functions.

    Summary ids (``j`` is 1 or 2):

    ``weight_j``     1{h=j}
    ``weight_y_j``   1{h=j} y
    ``weight_y2_j``  1{h=j} y^2
    ``tail_j:c``     1{h=j} 1{y>c}, e.g. ``tail_1:5.5``
    """

    def __init__(self, params):
        super().__init__()
        self.params = params
        for j in (1, 2):
            b, m, s = params.weights[j - 1], params.means[j - 1], params.scales[j - 1]
            self.register(f"weight_{j}", lambda b=b: b,
                          lambda y, j=j: self._z(y, j))
            self.register(f"weight_y_{j}", lambda b=b, m=m: b * m,
                          lambda y, j=j: self._z(y, j) * y)
            self.register(f"weight_y2_{j}", lambda b=b, m=m, s=s: b * (m * m + s * s),
                          lambda y, j=j: self._z(y, j) * y * y)

    def _z(self, y, j):
        return responsibilities(self.params, y)[:, j - 1]

    def _lookup(self, summary_id):
        if isinstance(summary_id, str) and summary_id.startswith("tail_") and ":" in summary_id:
            head, c = summary_id.split(":", 1)
            try:
                j, c = int(head[5:]), float(c)
            except ValueError:
                raise ConfigError(f"malformed tail summary {summary_id!r}") from None
            if j not in (1, 2):
                raise ConfigError(f"component must be 1 or 2 in {summary_id!r}")
            b, m, s = self.params.weights[j - 1], self.params.means[j - 1], self.params.scales[j - 1]
            return (lambda: b * (1.0 - ndtr((c - m) / s)),
                    lambda y: self._z(y, j) * (np.asarray(y) > c))
        return super()._lookup(summary_id)

    def conditional_means(self, summary_id, observations):
        cond = self._lookup(summary_id)[1]
        return np.asarray(cond(np.asarray(observations, dtype=float)), dtype=float)[:, None]


# Weighted kernel density estimation.


class WeightedKDE:
    """Gaussian-kernel density estimate with per-point weights."""

    def __init__(self, data, weights, bandwidth):
        self.data = data
        self.weights = weights / weights.sum()
        self.bandwidth = float(bandwidth)

    def __call__(self, x, chunk=2048):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        h = self.bandwidth
        out = np.empty_like(x)
        for start in range(0, x.size, chunk):
            xs = x[start:start + chunk]
            u = (xs[:, None] - self.data[None, :]) / h
            out[start:start + chunk] = np.exp(-0.5 * u * u - _LOG_SQRT_2PI) @ self.weights / h
        return out


def weighted_bandwidth(data, weights):
    """Silverman's rule with weighted spread and effective size ``sum(weights)``."""
    w = weights / weights.sum()
    mean = np.sum(w * data)
    sd = np.sqrt(np.sum(w * (data - mean) ** 2))
    q25, q75 = weighted_quantile(data, weights, [0.25, 0.75])
    spread = min(sd, (q75 - q25) / 1.34) if q75 > q25 else sd
    n_eff = weights.sum()
    return 0.9 * spread * n_eff ** (-0.2)


def weighted_kde(data, weights, bandwidth="auto"):
    data = np.asarray(data, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if data.shape != weights.shape:
        raise DomainError("data and weights must have equal length")
    if np.any(weights < 0):
        raise DomainError("weights must be nonnegative")
    if not weights.sum() > 0:
        raise DomainError("weights must not all be zero")
    if bandwidth == "auto":
        bandwidth = weighted_bandwidth(data, weights)
    elif not bandwidth > 0:
        raise DomainError("bandwidth must be positive")
    if not bandwidth > 0:
        raise DomainError("automatic bandwidth is zero; data are degenerate")
    return WeightedKDE(data, weights, bandwidth)


# Model-based clustering.


def classify(component_densities, weights, data):
    """Assign each point to the component (1 or 2) maximizing weight * density."""
    data = np.asarray(data, dtype=float)
    scores = np.column_stack([w * f(data) for f, w in zip(component_densities, weights)])
    return np.argmax(scores, axis=1) + 1


def classify_and_error(component_densities, weights, data, truth):
    """Misclassification rate, minimized over the two label permutations."""
    if abs(sum(weights) - 1.0) > 1e-8:
        raise DomainError("component weights must sum to one")
    assigned = classify(component_densities, weights, data)
    truth = np.asarray(truth)
    err = float(np.mean(assigned != truth))
    return min(err, 1.0 - err)


def l1_distance(f, g, grid):
    """Trapezoid-rule L1 distance between two densities on ``grid``."""
    return float(trapezoid(np.abs(f(grid) - g(grid)), grid))


def mixture_replicate(rng, truth=DEFAULT_TRUTH, n=1000, thresholds=DEFAULT_THRESHOLDS, grid=None):
    """One simulation-and-estimation replicate of the mixture study.

    Returns a dict with per-threshold estimates and relative errors for the
    three estimators, clustering errors for the three classifiers, and
    grid L1 distances of each component density estimate to the truth.
    """
    if grid is None:
        grid = np.linspace(0.01, 40.0, 1600)
    data, labels = simulate_lognormal_mixture(truth, n, rng)
    fit = em_normal_mixture(data)
    correct = em_lognormal_mixture(data)
    z = responsibilities(fit, data)

    tails = {}
    for c in thresholds:
        mu = true_tail(truth, c)
        est = {
            "plugin-correct": lognormal_plugin_tail(correct, c),
            "plugin-misspec": plugin_tail(fit, c),
            "imputation": float(np.mean(z[:, 0] * (data > c))),
        }
        tails[c] = {name: (value, (value - mu) / mu) for name, value in est.items()}

    kdes = (weighted_kde(data, z[:, 0]), weighted_kde(data, z[:, 1]))
    alpha_im = z.mean(axis=0)
    dens = {
        "plugin-correct": ((lambda x: correct.component_pdf(1, x)), (lambda x: correct.component_pdf(2, x)),
                           (correct.alpha, 1 - correct.alpha)),
        "plugin-misspec": ((lambda x: fit.component_pdf(1, x)), (lambda x: fit.component_pdf(2, x)),
                           (fit.beta, 1 - fit.beta)),
        "imputation": (kdes[0], kdes[1], tuple(alpha_im)),
    }
    clustering, density_l1 = {}, {}
    for name, (f1, f2, w) in dens.items():
        clustering[name] = classify_and_error((f1, f2), w, data, labels)
        density_l1[name] = (
            l1_distance(f1, lambda x: truth.component_pdf(1, x), grid),
            l1_distance(f2, lambda x: truth.component_pdf(2, x), grid),
        )
    return {"fit": fit, "correct": correct, "tails": tails,
            "clustering": clustering, "density_l1": density_l1}
