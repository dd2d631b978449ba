"""Labeled evolutionary distances under continuous-time Markov chains.

Pairs of aligned nucleotides are the endpoints of a CTMC run for unit time
from its stationary distribution. We fit group-based generators (JC, K2P,
K3P) by closed-form maximum likelihood and estimate the mean number of
labeled transitions, E(N_L), by plug-in (pi^T Lambda_L 1 under the fit) or
by imputation (average endpoint-conditioned expectation).

State order is ``A, G, C, T`` throughout, so the Kimura three-parameter
generator reads::

        A      G      C      T
    A   -      alpha  beta   gamma
    G   alpha  -      gamma  beta
    C   beta   gamma  -      alpha
    T   gamma  beta   alpha  -

The endpoint-conditioned moments use the spectral form of
``int_0^t exp(L s) L_lab exp(L (t - s)) ds``: with ``L = U diag(d) U^-1``
and ``B = U^-1 L_lab U``, the integral is ``U (B * J) U^-1`` where
``J_ij = (exp(d_i t) - exp(d_j t)) / (d_i - d_j)`` and ``J_ii = t exp(d_i t)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryError,
    ConfigError,
    DomainError,
    NumericalError,
    SaturationError,
)
from .estimators import FittedModel

STATES = ("A", "G", "C", "T")
_IDX = {s: i for i, s in enumerate(STATES)}


def _pairs(*names):
    return frozenset((_IDX[a], _IDX[b]) for a, b in names)


# transitions (purine<->purine, pyrimidine<->pyrimidine)
L1 = _pairs("AG", "GA", "CT", "TC")
# transversions
L2 = _pairs("AC", "CA", "AT", "TA", "CG", "GC", "TG", "GT")
# the two transversion classes of the three-parameter model
K3P_BETA = _pairs("AC", "CA", "GT", "TG")
K3P_GAMMA = _pairs("AT", "TA", "GC", "CG")


def all_changes(s=4):
    return frozenset((u, v) for u in range(s) for v in range(s) if u != v)


LABEL_SETS = {"L1": L1, "L2": L2, "K3P_beta": K3P_BETA, "K3P_gamma": K3P_GAMMA,
              "all": all_changes(4)}


def label_set(pairs, s=4):
    """Validate a collection of ordered ``(u, v)`` state pairs."""
    out = set()
    for u, v in pairs:
        if isinstance(u, str):
            u, v = _IDX[u], _IDX[v]
        if u == v:
            raise DomainError(f"label set may not contain diagonal pair ({u}, {v})")
        if not (0 <= u < s and 0 <= v < s):
            raise DomainError(f"pair ({u}, {v}) outside the {s}-state space")
        out.add((int(u), int(v)))
    return frozenset(out)


def _class_pattern(pairs, s=4):
    m = np.zeros((s, s))
    for u, v in pairs:
        m[u, v] = 1.0
    return m


def _with_diagonal(m):
    m = m.copy()
    np.fill_diagonal(m, 0.0)
    np.fill_diagonal(m, -m.sum(axis=1))
    return m


# K3P class patterns: each is a permutation matrix minus the identity once the
# diagonal is filled in.
_PATTERN_ALPHA = _with_diagonal(_class_pattern(L1))
_PATTERN_BETA = _with_diagonal(_class_pattern(K3P_BETA))
_PATTERN_GAMMA = _with_diagonal(_class_pattern(K3P_GAMMA))

FAMILIES = {"JC": 1, "K2P": 2, "K3P": 3}


@dataclass(frozen=True, eq=False)
class Generator:
    matrix: np.ndarray
    family: str
    params: tuple
    basis: tuple  # d matrix / d param_j, one s x s array per parameter

    @property
    def n_states(self):
        return self.matrix.shape[0]

    def __repr__(self):
        return f"Generator({self.family}, params={self.params})"


def build_generator(family, params):
    """Group-based generator for ``family`` in {"JC", "K2P", "K3P"}.

    Rates must be nonnegative; zero is accepted so that fitted generators
    at the boundary (identical sequences) remain usable.
    """
    if family not in FAMILIES:
        raise ConfigError(f"unknown generator family {family!r}; use custom_generator for others")
    params = tuple(float(x) for x in np.atleast_1d(params))
    if len(params) != FAMILIES[family]:
        raise ConfigError(f"{family} takes {FAMILIES[family]} parameter(s), got {len(params)}")
    if any(not x >= 0 for x in params):
        raise DomainError(f"rates must be nonnegative, got {params}")
    if family == "JC":
        (g,) = params
        a, b, c = g, g, g
        basis = (_PATTERN_ALPHA + _PATTERN_BETA + _PATTERN_GAMMA,)
    elif family == "K2P":
        a, b = params
        c = b
        basis = (_PATTERN_ALPHA, _PATTERN_BETA + _PATTERN_GAMMA)
    else:
        a, b, c = params
        basis = (_PATTERN_ALPHA, _PATTERN_BETA, _PATTERN_GAMMA)
    matrix = a * _PATTERN_ALPHA + b * _PATTERN_BETA + c * _PATTERN_GAMMA
    for m in basis:
        m.setflags(write=False)
    return Generator(matrix, family, params, basis)


def custom_generator(rates):
    """Generator from a matrix of off-diagonal rates; diagonal is recomputed.

    Custom generators support simulation and moments, not fitting.
    """
    rates = np.array(rates, dtype=float)
    if rates.ndim != 2 or rates.shape[0] != rates.shape[1]:
        raise DomainError("rate matrix must be square")
    off = rates - np.diag(np.diag(rates))
    if np.any(off < 0):
        raise DomainError("off-diagonal rates must be nonnegative")
    return Generator(_with_diagonal(off), "custom", (), ())


def label_matrix(gen, labels):
    """Lambda_L: generator entries kept on labeled pairs, zero elsewhere."""
    return gen.matrix * _class_pattern(labels, gen.n_states)


# Spectral machinery.


def _spectral(gen):
    """Eigen-decomposition ``(U, d, U_inv)`` of the generator.

    Symmetric generators (all group-based ones) use ``eigh``. Reversible
    custom generators are symmetrized with their stationary distribution;
    anything else falls back to a general eigen-decomposition.
    """
    Q = gen.matrix
    if np.allclose(Q, Q.T, atol=0, rtol=0):
        d, U = np.linalg.eigh(Q)
        return U, d, U.T
    try:
        pi = stationary_distribution(gen)
    except DomainError:
        pi = None
    if pi is not None and np.allclose(pi[:, None] * Q, (pi[:, None] * Q).T, atol=1e-14):
        r = np.sqrt(pi)
        S = r[:, None] * Q / r[None, :]
        d, V = np.linalg.eigh(0.5 * (S + S.T))
        return V / r[:, None], d, (V * r[:, None]).T
    d, U = np.linalg.eig(Q)
    if np.linalg.cond(U) > 1e12:
        raise NumericalError("generator is not numerically diagonalizable")
    return U, d, np.linalg.inv(U)


def transition_matrix(gen, t=1.0):
    """exp(Lambda t), rows summing to one, tiny negatives clamped to zero."""
    if t < 0:
        raise DomainError("time must be nonnegative")
    U, d, Ui = _spectral(gen)
    P = (U * np.exp(d * t)) @ Ui
    if np.iscomplexobj(P):
        if np.max(np.abs(P.imag)) > 1e-10:
            raise NumericalError("complex transition matrix")
        P = P.real
    if np.any(P < -1e-12):
        raise NumericalError(f"transition matrix has negative entry {P.min():.3g}")
    return np.clip(P, 0.0, None)


def stationary_distribution(gen):
    """Unique left null vector of the generator, normalized to sum one."""
    if gen.family in FAMILIES:
        return np.full(gen.n_states, 1.0 / gen.n_states)
    Q = gen.matrix
    s = Q.shape[0]
    u, sv, vt = np.linalg.svd(Q.T)
    scale = max(sv[0], 1.0)
    if s > 1 and sv[-2] <= 1e-12 * scale:
        raise DomainError("generator is reducible: stationary distribution is not unique")
    pi = vt[-1]
    pi = pi / pi.sum()
    if np.any(pi <= 1e-14):
        raise DomainError("generator is reducible: stationary distribution has zero mass")
    return pi


def mean_labeled_count(gen, labels):
    """Expected labeled jumps per unit time for the stationary chain: pi^T Lambda_L 1."""
    return float(stationary_distribution(gen) @ label_matrix(gen, labels).sum(axis=1))


def _phi1_kernel(d, t):
    """J_ij = int_0^t exp(d_i s) exp(d_j (t - s)) ds, computed stably."""
    di, dj = d[:, None], d[None, :]
    delta = (di - dj) * t
    small = np.abs(di - dj) < 1e-10
    safe = np.where(small, 1.0, delta)
    ratio = np.where(small, 1.0 + 0.5 * delta, np.expm1(safe) / safe)
    return t * np.exp(dj * t) * ratio


def joint_restricted_moment(gen, labels, t=1.0):
    """Matrix of E[N_L 1{X_t = l} | X_0 = k] over ``(k, l)``."""
    if t < 0:
        raise DomainError("time must be nonnegative")
    U, d, Ui = _spectral(gen)
    B = Ui @ label_matrix(gen, labels) @ U
    M = U @ (B * _phi1_kernel(d, t)) @ Ui
    if np.iscomplexobj(M):
        if np.max(np.abs(M.imag)) > 1e-10:
            raise NumericalError("complex restricted moment")
        M = M.real
    if np.any(M < -1e-12):
        raise NumericalError(f"restricted moment has negative entry {M.min():.3g}")
    return np.clip(M, 0.0, None)


def conditional_expected_count(gen, labels, k, l, t=1.0):
    """E[N_L | X_0 = k, X_t = l]."""
    return float(conditional_count_matrix(gen, labels, t)[k, l])


def conditional_count_matrix(gen, labels, t=1.0):
    """All endpoint-conditioned expectations; NaN where p_kl(t) = 0."""
    P = transition_matrix(gen, t)
    M = joint_restricted_moment(gen, labels, t)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(P > 0, M / np.where(P > 0, P, 1.0), np.nan)
    return out


# Closed forms for the named models.


def jc_transition_closed_form(gamma, t=1.0):
    e = np.exp(-4.0 * gamma * t)
    P = np.full((4, 4), 0.25 - 0.25 * e)
    np.fill_diagonal(P, 0.25 + 0.75 * e)
    return P


def k2p_transition_closed_form(alpha, beta, t=1.0):
    e4 = np.exp(-4.0 * beta * t)
    e2 = np.exp(-2.0 * (alpha + beta) * t)
    P = np.empty((4, 4))
    for k in range(4):
        for l in range(4):
            if k == l:
                P[k, l] = 0.25 + 0.25 * e4 + 0.5 * e2
            elif (k, l) in L1:
                P[k, l] = 0.25 + 0.25 * e4 - 0.5 * e2
            else:
                P[k, l] = 0.25 - 0.25 * e4
    return P


def k2p_class_probs(alpha, beta):
    """Limiting frequencies (p_L1, p_L2, p_D) of aligned pairs under K2P at unit time."""
    e4 = np.exp(-4.0 * beta)
    e2 = np.exp(-2.0 * (alpha + beta))
    return (0.25 + 0.25 * e4 - 0.5 * e2, 0.5 - 0.5 * e4, 0.25 + 0.25 * e4 + 0.5 * e2)


def k3p_class_probs(alpha, beta, gamma):
    """Frequencies of (alpha-class, beta-class, gamma-class, identical) pairs under K3P."""
    e1 = np.exp(-2.0 * (beta + gamma))
    e2 = np.exp(-2.0 * (alpha + gamma))
    e3 = np.exp(-2.0 * (alpha + beta))
    return (0.25 * (1 + e1 - e2 - e3), 0.25 * (1 - e1 + e2 - e3),
            0.25 * (1 - e1 - e2 + e3), 0.25 * (1 + e1 + e2 + e3))


# Data.


@dataclass(frozen=True, eq=False)
class PairCounts:
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError("pair counts must be a square matrix")
        if np.any(m < 0) or np.any(m != np.round(m)):
            raise DomainError("pair counts must be nonnegative integers")
        if m.sum() < 1:
            raise DomainError("pair counts must include at least one column")
        object.__setattr__(self, "m", m.astype(np.int64))

    @property
    def n(self):
        return int(self.m.sum())

    def class_count(self, labels):
        return int(sum(self.m[u, v] for u, v in labels))

    def class_freq(self, labels):
        return self.class_count(labels) / self.n

    @property
    def f_L1(self):
        return self.class_freq(L1)

    @property
    def f_L2(self):
        return self.class_freq(L2)

    @property
    def f_D(self):
        return float(np.trace(self.m)) / self.n

    @classmethod
    def from_sequences(cls, seq1, seq2):
        if len(seq1) != len(seq2):
            raise DomainError("aligned sequences must have equal length")
        m = np.zeros((4, 4), dtype=np.int64)
        for a, b in zip(seq1, seq2):
            m[_IDX[a], _IDX[b]] += 1
        return cls(m)


def simulate_alignment(gen, n, rng, t=1.0):
    """Aggregate counts of ``n`` independent columns (start ~ pi, end ~ P[start])."""
    if n < 1:
        raise DomainError("need n >= 1")
    joint = stationary_distribution(gen)[:, None] * transition_matrix(gen, t)
    joint = joint.ravel() / joint.sum()
    return PairCounts(rng.multinomial(n, joint).reshape(gen.n_states, gen.n_states))


def pair_loglik(gen, counts):
    """Observed-data log-likelihood sum m_kl log p_kl(1), dropping the constant pi term."""
    P = transition_matrix(gen, 1.0)
    pos = counts.m > 0
    if np.any(P[pos] <= 0):
        return -np.inf
    return float(np.sum(counts.m[pos] * np.log(P[pos])))


# Closed-form maximum likelihood.


def _neg_half_log(x, what):
    if not x > 0:
        raise SaturationError(f"MLE does not exist: {what} = {x:.6g} is not positive")
    return -0.5 * np.log(x)


def fit_jc(counts):
    """gamma_hat = -1/4 ln(1 - 4/3 (1 - f_D)); requires 1 - f_D < 3/4."""
    diff = 1.0 - counts.f_D
    if not diff < 0.75:
        raise SaturationError(f"JC MLE does not exist: 1 - f_D = {diff:.6g} >= 3/4")
    return float(-0.25 * np.log(1.0 - 4.0 / 3.0 * diff))


def fit_k2p(counts):
    """Closed-form K2P MLE (alpha_hat, beta_hat) from class frequencies."""
    fl1, fl2 = counts.f_L1, counts.f_L2
    beta = 0.5 * _neg_half_log(1.0 - 2.0 * fl2, "1 - 2 f_L2")
    alpha = _neg_half_log(1.0 - 2.0 * fl1 - fl2, "1 - 2 f_L1 - f_L2") - beta
    return _check_rates((alpha, beta), "K2P")


def fit_k3p(counts):
    """Closed-form K3P MLE (alpha_hat, beta_hat, gamma_hat) from class frequencies."""
    fa, fb, fc = counts.class_freq(L1), counts.class_freq(K3P_BETA), counts.class_freq(K3P_GAMMA)
    s_bg = _neg_half_log(1.0 - 2.0 * (fb + fc), "1 - 2 (f_beta + f_gamma)")
    s_ag = _neg_half_log(1.0 - 2.0 * (fa + fc), "1 - 2 (f_alpha + f_gamma)")
    s_ab = _neg_half_log(1.0 - 2.0 * (fa + fb), "1 - 2 (f_alpha + f_beta)")
    rates = (0.5 * (s_ag + s_ab - s_bg), 0.5 * (s_ab + s_bg - s_ag), 0.5 * (s_ag + s_bg - s_ab))
    return _check_rates(rates, "K3P")


def _check_rates(rates, family):
    # float noise from the log differences can leave an exact-zero rate at -1e-17
    rates = tuple(0.0 if -1e-14 < r < 0 else float(r) for r in rates)
    if any(r < 0 for r in rates):
        raise BoundaryError(f"{family} MLE lies outside the rate space: {rates}")
    return rates


FITTERS = {"JC": fit_jc, "K2P": fit_k2p, "K3P": fit_k3p}


def fit_generator(family, counts):
    if family not in FITTERS:
        raise ConfigError(f"cannot fit family {family!r}")
    return build_generator(family, FITTERS[family](counts))


# Estimators.


def plugin_labeled(genfit, labels):
    return mean_labeled_count(genfit, labels)


def imputation_labeled(genfit, labels, counts):
    """(1/n) sum_kl m_kl E[N_L | X_0 = k, X_1 = l] under the fitted generator."""
    C = conditional_count_matrix(genfit, labels)
    pos = counts.m > 0
    if np.any(np.isnan(C[pos])):
        raise DomainError("an observed endpoint pair has zero probability under the fit")
    return float(np.sum(counts.m[pos] * C[pos]) / counts.n)


class CTMCFit(FittedModel):
    """Fitted generator as a generic model; observations are ``(k, l)`` endpoint pairs.

    Summary ids are ``N:<name>`` for every entry of ``LABEL_SETS``
    (``N:L1``, ``N:L2``, ``N:K3P_beta``, ``N:K3P_gamma``, ``N:all``).
    """

    def __init__(self, gen):
        super().__init__()
        self.gen = gen
        for name, labels in LABEL_SETS.items():
            self.register(
                f"N:{name}",
                lambda labels=labels: mean_labeled_count(gen, labels),
                lambda y, labels=labels: conditional_expected_count(gen, labels, *y),
            )
        self._cache = {}

    def conditional_means(self, summary_id, observations):
        self._lookup(summary_id)
        name = summary_id[2:]
        if name not in self._cache:
            self._cache[name] = conditional_count_matrix(self.gen, LABEL_SETS[name])
        C = self._cache[name]
        obs = np.asarray(observations, dtype=int).reshape(-1, 2)
        return C[obs[:, 0], obs[:, 1]][:, None]


def observations_from_counts(counts):
    """Expand pair counts into a list of ``(k, l)`` observations."""
    s = counts.m.shape[0]
    return [(k, l) for k in range(s) for l in range(s) for _ in range(counts.m[k, l])]


# Coincidence condition and asymptotic limits.


def theorem1_condition(genfit, labels):
    """Span test: is Lambda_L - I pi^T Lambda_L 1 a combination of the dLambda/dtheta_j?

    Returns ``(holds, residual)`` where ``residual`` is the Frobenius norm of
    the least-squares misfit and ``holds`` means residual < 1e-8 * ||target||.
    """
    if len(genfit.basis) == 0:
        raise DomainError("generator has no partial-derivative basis")
    target = label_matrix(genfit, labels) - np.eye(genfit.n_states) * mean_labeled_count(genfit, labels)
    A = np.column_stack([b.ravel() for b in genfit.basis])
    coef, *_ = np.linalg.lstsq(A, target.ravel(), rcond=None)
    residual = float(np.linalg.norm(A @ coef - target.ravel()))
    scale = float(np.linalg.norm(target))
    return residual <= 1e-8 * scale, residual


def theorem2_limits(alpha, beta):
    """Almost-sure limits when K2P(alpha, beta) data are fitted by JC, labels L1.

    Returns ``(mu, mu_pi_inf, mu_im_inf)``: the true mean, the plug-in limit
    and the imputation limit.
    """
    if not (alpha > 0 and beta > 0):
        raise DomainError("rates must be positive")
    e4 = np.exp(-4.0 * beta)
    e2 = np.exp(-2.0 * (alpha + beta))
    mu_pi = beta - 0.25 * np.log((1.0 + 2.0 * np.exp(2.0 * (beta - alpha))) / 3.0)
    factor = 1.0 + 4.0 * (e4 + 2.0 * e2) * (e4 - e2) / (3.0 * (3.0 - e4 - 2.0 * e2))
    return float(alpha), float(mu_pi), float(mu_pi * factor)


def jc_imputation_closed_form(counts):
    """Imputation estimate of E(N_L1) under a JC fit, in terms of f_L1 and f_D."""
    gamma = fit_jc(counts)
    fd, fl1 = counts.f_D, counts.f_L1
    a = 1.0 - 4.0 / 3.0 * (1.0 - fd)
    return gamma * (1.0 + a * (3.0 * fl1 / (1.0 - fd) - 1.0)) if fd < 1 else gamma


# Monte Carlo path oracle.


def _simulate_paths(gen, k, n_paths, lab_mask, rng, t=1.0):
    """Jump-chain paths from state ``k``; returns end states and labeled-jump counts."""
    Q = gen.matrix
    q = -np.diag(Q)
    with np.errstate(divide="ignore", invalid="ignore"):
        jump = np.where(q[:, None] > 0, Q / q[:, None], 0.0)
    np.fill_diagonal(jump, 0.0)
    cum = np.cumsum(jump, axis=1)
    last = cum[:, -1:]
    cum = np.divide(cum, last, out=np.zeros_like(cum), where=last > 0)
    state = np.full(n_paths, k, dtype=np.int64)
    clock = np.zeros(n_paths)
    count = np.zeros(n_paths, dtype=np.int64)
    active = np.arange(n_paths)
    while active.size:
        s = state[active]
        rate = q[s]
        with np.errstate(divide="ignore"):
            hold = rng.standard_exponential(active.size) / rate
        clock[active] += hold
        jumping = clock[active] <= t
        active = active[jumping]
        s = s[jumping]
        u = rng.random(active.size)
        nxt = (u[:, None] >= cum[s]).sum(axis=1)
        count[active] += lab_mask[s, nxt]
        state[active] = nxt
    return state, count


def mc_path_oracle_row(gen, labels, k, samples, rng, t=1.0, chunk=1_000_000):
    """Rejection-sampling estimates of E[N_L | X_0=k, X_t=l] for every end state l.

    Paths are simulated until each reachable end state has at least
    ``samples`` accepted paths. Returns ``{l: (mean, std_error, accepted)}``
    over end states whose acceptance probability is estimated at >= 1e-6.
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    lab_mask = _class_pattern(labels, gen.n_states).astype(np.int64)
    s = gen.n_states
    sums = np.zeros(s)
    sq = np.zeros(s)
    acc = np.zeros(s, dtype=np.int64)
    total = 0
    while True:
        end, cnt = _simulate_paths(gen, k, chunk, lab_mask, rng, t)
        total += chunk
        sums += np.bincount(end, weights=cnt, minlength=s)
        sq += np.bincount(end, weights=cnt.astype(float) ** 2, minlength=s)
        acc += np.bincount(end, minlength=s)
        feasible = acc / total >= 1e-6
        if np.all(acc[feasible] >= samples):
            break
    out = {}
    for l in np.flatnonzero(feasible):
        mean = sums[l] / acc[l]
        var = max(sq[l] / acc[l] - mean**2, 0.0) * acc[l] / max(acc[l] - 1, 1)
        out[int(l)] = (float(mean), float(np.sqrt(var / acc[l])), int(acc[l]))
    return out


def mc_path_oracle(gen, labels, k, l, samples, rng, t=1.0, chunk=None):
    """Monte Carlo estimate of E[N_L | X_0 = k, X_t = l] with its standard error.

    Simulates jump-chain paths from ``k`` (exponential holding times,
    embedded-chain jumps) and keeps those ending at ``l`` until ``samples``
    paths are accepted.

    Raises
    ------
    DomainError
        If the acceptance probability is estimated below 1e-6.
    """
    if samples < 1:
        raise DomainError("need at least one sample")
    lab_mask = _class_pattern(labels, gen.n_states).astype(np.int64)
    pilot = 1_000_000 if chunk is None else chunk
    end, cnt = _simulate_paths(gen, k, pilot, lab_mask, rng, t)
    hit = end == l
    if hit.mean() < 1e-6:
        raise DomainError(f"endpoint ({k}, {l}) is practically unreachable: "
                          f"acceptance {hit.mean():.2g} < 1e-6")
    kept = [cnt[hit]]
    got = kept[0].size
    if chunk is None:
        chunk = int(min(5_000_000, max(10_000, 1.2 * (samples - got) / hit.mean())))
    while got < samples:
        end, cnt = _simulate_paths(gen, k, chunk, lab_mask, rng, t)
        kept.append(cnt[end == l])
        got += kept[-1].size
    vals = np.concatenate(kept)[:samples].astype(float)
    se = vals.std(ddof=1) / np.sqrt(vals.size) if vals.size > 1 else float("nan")
    return float(vals.mean()), float(se)


def ctmc_sim_replicate(rng, alpha, beta, n):
    """Simulate K2P(alpha, beta) data, fit JC and return (plug-in, imputation) for L1."""
    counts = simulate_alignment(build_generator("K2P", (alpha, beta)), n, rng)
    fit = build_generator("JC", fit_jc(counts))
    return plugin_labeled(fit, L1), imputation_labeled(fit, L1, counts)
