"""Genotype-frequency case study.

True genotypes follow the inbreeding model; the analyst assumes
Hardy-Weinberg equilibrium (inbreeding coefficient zero) and observes only
phenotypes through a deterministic genotype -> phenotype map. Allele
frequencies are fitted by EM (maximum likelihood) or sampled by a
data-augmentation Gibbs sampler (Bayesian); genotype frequencies are then
estimated by plug-in or by imputation.

Genotypes are unordered allele pairs stored as index tuples ``(k, l)`` with
``k <= l``.
"""

from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .errors import ConvergenceError, DegenerateFitError, DomainError
from .estimators import FittedModel

ALLELES = ("A", "B", "C", "D")


def _pair(k, l):
    return (k, l) if k <= l else (l, k)


@dataclass(frozen=True)
class InbreedingModel:
    allele_freqs: tuple
    f: float = 0.0

    def __post_init__(self):
        p = np.asarray(self.allele_freqs, dtype=float)
        if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise DomainError(f"allele frequencies must be a probability vector, got {p}")
        if not 0.0 <= self.f <= 1.0:
            raise DomainError(f"inbreeding coefficient must lie in [0, 1], got {self.f}")
        object.__setattr__(self, "allele_freqs", tuple(float(x) for x in p))

    @property
    def n_alleles(self):
        return len(self.allele_freqs)

    def genotype_probs(self, genotypes):
        return np.array([genotype_prob(self, k, l) for k, l in genotypes])


def genotype_prob(model, k, l):
    p, f = model.allele_freqs, model.f
    if k == l:
        return p[k] ** 2 * (1 - f) + f * p[k]
    return 2 * p[k] * p[l] * (1 - f)


class PhenotypeMap:
    """Symmetric, total map from unordered allele pairs to phenotype labels."""

    def __init__(self, table, n_alleles):
        self.n_alleles = n_alleles
        self.genotypes = list(combinations_with_replacement(range(n_alleles), 2))
        norm = {}
        for (k, l), label in table.items():
            key = _pair(k, l)
            if key in norm and norm[key] != label:
                raise DomainError(f"map is not symmetric at {key}")
            norm[key] = label
        missing = [g for g in self.genotypes if g not in norm]
        if missing:
            raise DomainError(f"map is not total; missing genotypes {missing}")
        self.table = norm
        labels = []
        for g in self.genotypes:
            if norm[g] not in labels:
                labels.append(norm[g])
        self.phenotypes = tuple(labels)
        self.compatible = {c: [i for i, g in enumerate(self.genotypes) if norm[g] == c]
                           for c in self.phenotypes}
        # genotype x allele matrix of allele counts t_k
        self.allele_counts = np.zeros((len(self.genotypes), n_alleles))
        for i, (k, l) in enumerate(self.genotypes):
            self.allele_counts[i, k] += 1
            self.allele_counts[i, l] += 1

    def __call__(self, k, l):
        return self.table[_pair(k, l)]

    def genotype_index(self, k, l):
        return self.genotypes.index(_pair(k, l))

    def is_ambiguous(self, phenotype):
        return len(self.compatible[phenotype]) > 1


def _named_map(labels):
    """Build a four-allele map from labels listed in (AA, AB, AC, AD, BB, BC, BD, CC, CD, DD) order."""
    order = list(combinations_with_replacement(range(4), 2))
    return PhenotypeMap(dict(zip(order, labels)), 4)


H1 = _named_map(["aa", "ab", "ac", "ad", "bb", "bdc", "bdc", "cc", "cd", "dd"])
H2 = _named_map(["aa", "ab", "ac", "ad", "bd", "bdc", "bdc", "cc", "cd", "bd"])
MAPPINGS = {"h1": H1, "h2": H2}
DEFAULT_ALLELE_FREQS = (0.3, 0.2, 0.2, 0.3)
DEFAULT_F_VALUES = (0.0, 0.125, 0.25, 0.375, 0.5)


def identity_map(n_alleles):
    """Every genotype is its own phenotype (no missing information)."""
    genotypes = combinations_with_replacement(range(n_alleles), 2)
    return PhenotypeMap({g: f"{g[0]}{g[1]}" for g in genotypes}, n_alleles)


@dataclass(frozen=True)
class PhenotypeCounts:
    phenotypes: tuple
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (len(self.phenotypes),) or np.any(counts < 0):
            raise DomainError("counts must be one nonnegative integer per phenotype")
        object.__setattr__(self, "counts", counts)

    @property
    def n(self):
        return int(self.counts.sum())

    def __getitem__(self, phenotype):
        return int(self.counts[self.phenotypes.index(phenotype)])

    @classmethod
    def from_labels(cls, labels, mapping):
        labels = list(labels)
        return cls(mapping.phenotypes, [labels.count(c) for c in mapping.phenotypes])


def phenotype_probs(model, mapping):
    gp = model.genotype_probs(mapping.genotypes)
    return np.array([gp[mapping.compatible[c]].sum() for c in mapping.phenotypes])


def simulate_phenotypes(model, mapping, n, rng):
    if n < 1:
        raise DomainError("need n >= 1")
    probs = phenotype_probs(model, mapping)
    return PhenotypeCounts(mapping.phenotypes, rng.multinomial(n, probs / probs.sum()))


# Hardy-Weinberg (misspecified) quantities.


def hw_genotype_probs(p, mapping):
    """p_F(x; p) for every genotype of ``mapping``: p_k^2 or 2 p_k p_l."""
    p = np.asarray(p, dtype=float)
    return np.array([p[k] * p[l] * (1 if k == l else 2) for k, l in mapping.genotypes])


def _class_probs(gp, mapping):
    return np.array([gp[mapping.compatible[c]].sum() for c in mapping.phenotypes])


def hw_loglik(p, counts, mapping):
    pc = _class_probs(hw_genotype_probs(p, mapping), mapping)
    pos = counts.counts > 0
    if np.any(pc[pos] <= 0):
        return -np.inf
    return float(np.sum(counts.counts[pos] * np.log(pc[pos])))


def expected_genotype_counts(p, counts, mapping):
    """E-step: n_j * p_F(x) / p_F(c_j) spread over the genotypes of each class."""
    gp = hw_genotype_probs(p, mapping)
    out = np.zeros(len(mapping.genotypes))
    for c, nj in zip(mapping.phenotypes, counts.counts):
        if nj == 0:
            continue
        idx = mapping.compatible[c]
        total = gp[idx].sum()
        if total <= 0:
            raise DegenerateFitError(f"phenotype {c!r} observed but has zero probability under the fit")
        out[idx] = nj * gp[idx] / total
    return out


def em_allele_freqs(counts, mapping, tol=1e-10, max_iter=5000, xtol=1e-12, return_trace=False):
    """Hardy-Weinberg MLE of allele frequencies from phenotype counts.

    Starts from uniform frequencies. Stops once the log-likelihood gain is
    below ``tol`` and the largest frequency change is below ``xtol``.
    """
    if counts.n == 0:
        raise DomainError("no phenotypes observed")
    if tuple(counts.phenotypes) != tuple(mapping.phenotypes):
        raise DomainError("counts and mapping disagree on the phenotype alphabet")
    p = np.full(mapping.n_alleles, 1.0 / mapping.n_alleles)
    trace = [hw_loglik(p, counts, mapping)]
    for _ in range(max_iter):
        m = expected_genotype_counts(p, counts, mapping)
        p_new = m @ mapping.allele_counts / (2.0 * counts.n)
        trace.append(hw_loglik(p_new, counts, mapping))
        step = np.max(np.abs(p_new - p))
        p = p_new
        if trace[-1] - trace[-2] < tol and step < xtol:
            return (p, trace) if return_trace else p
    raise ConvergenceError(f"allele-frequency EM did not converge in {max_iter} iterations",
                           last_iterate=p)


def plugin_genotype_freq(p, k, l):
    return float(p[k] ** 2) if k == l else float(2 * p[k] * p[l])


def imputation_genotype_freq(p, counts, mapping, k, l):
    """(n_j / n) * p_F(x; p) / p_F(c_j; p) for the class c_j containing x = (k, l)."""
    c = mapping(k, l)
    nj = counts[c]
    gp = hw_genotype_probs(p, mapping)
    total = gp[mapping.compatible[c]].sum()
    if total <= 0:
        if nj > 0:
            raise DegenerateFitError(f"phenotype {c!r} observed but has zero probability under the fit")
        return 0.0
    return float(nj / counts.n * gp[mapping.genotype_index(k, l)] / total)


class HardyWeinbergFit(FittedModel):
    """Fitted Hardy-Weinberg model; observations are phenotype labels.

    Summary ids:

    ``allele_counts``     vector (t_1, ..., t_R) of allele counts in a genotype
    ``genotype:kl``       indicator of genotype (k, l), allele letters, e.g. ``genotype:BC``
    """

    def __init__(self, p, mapping, allele_names=ALLELES):
        super().__init__()
        self.p = np.asarray(p, dtype=float)
        self.mapping = mapping
        gp = hw_genotype_probs(self.p, mapping)
        self._post = {}
        for c in mapping.phenotypes:
            w = np.zeros(len(mapping.genotypes))
            idx = mapping.compatible[c]
            if gp[idx].sum() > 0:
                w[idx] = gp[idx] / gp[idx].sum()
            self._post[c] = w
        self.register("allele_counts", lambda: 2.0 * self.p,
                      lambda y: self._post[y] @ mapping.allele_counts)
        for i, (k, l) in enumerate(mapping.genotypes):
            if k < len(allele_names) and l < len(allele_names):
                sid = f"genotype:{allele_names[k]}{allele_names[l]}"
                self.register(sid, lambda i=i: gp[i], lambda y, i=i: self._post[y][i])

    def conditional_means(self, summary_id, observations):
        cond = self._lookup(summary_id)[1]
        cache = {}
        rows = []
        for y in observations:
            if y not in cache:
                cache[y] = np.atleast_1d(np.asarray(cond(y), dtype=float))
            rows.append(cache[y])
        return np.array(rows)


# Bayesian data augmentation.


@dataclass
class GibbsState:
    allele_freqs: np.ndarray
    genotype_counts: np.ndarray  # aligned with mapping.genotypes


def gibbs_sampler(counts, mapping, prior, iterations=10000, burn_in=1000, rng=None, thin=1):
    """Data-augmentation Gibbs sampler for allele frequencies.

    Each sweep draws the genotype attributions of every ambiguous phenotype
    class from a multinomial with weights p_F(x; p), then draws
    ``p ~ Dirichlet(prior + allele counts of the imputed genotypes)``.

    Returns the list of retained states (after ``burn_in``, every ``thin``-th).
    """
    if not iterations > burn_in >= 0:
        raise DomainError("need iterations > burn_in >= 0")
    if thin < 1:
        raise DomainError("thinning must be at least 1")
    prior = np.asarray(prior, dtype=float)
    if prior.shape != (mapping.n_alleles,) or np.any(prior <= 0):
        raise DomainError("prior must be a positive vector with one entry per allele")
    if rng is None:
        raise DomainError("gibbs_sampler needs an explicit random generator")

    m = np.zeros(len(mapping.genotypes), dtype=np.int64)
    ambiguous = []
    for c, nj in zip(mapping.phenotypes, counts.counts):
        idx = mapping.compatible[c]
        if len(idx) == 1:
            m[idx[0]] = nj
        elif nj > 0:
            ambiguous.append((np.array(idx), int(nj)))

    p = prior / prior.sum()
    states = []
    for it in range(iterations):
        gp = hw_genotype_probs(p, mapping)
        for idx, nj in ambiguous:
            w = gp[idx]
            total = w.sum()
            w = w / total if total > 0 else np.full(idx.size, 1.0 / idx.size)
            m[idx] = rng.multinomial(nj, w)
        t = m @ mapping.allele_counts
        p = rng.dirichlet(prior + t)
        if it >= burn_in and (it - burn_in) % thin == 0:
            states.append(GibbsState(p.copy(), m.copy()))
    return states


def predictive_distributions(states, counts, mapping, k, l):
    """Posterior draws of the plug-in, raw imputation and Rao-Blackwellized estimators.

    Returns
    -------
    plug_in, raw_imputation, rao_blackwellized : ndarray
        One value per state: 2 p_k p_l (p_k^2 if k == l), m_kl / n, and
        (n_j / n) p_F(x; p) / p_F(c_j; p).
    """
    if len(states) == 0:
        raise DomainError("no Gibbs states")
    gi = mapping.genotype_index(k, l)
    n = counts.n
    plug = np.empty(len(states))
    raw = np.empty(len(states))
    rb = np.empty(len(states))
    for s, st in enumerate(states):
        plug[s] = plugin_genotype_freq(st.allele_freqs, k, l)
        raw[s] = st.genotype_counts[gi] / n
        rb[s] = imputation_genotype_freq(st.allele_freqs, counts, mapping, k, l)
    return plug, raw, rb


def genotype_replicate(rng, mapping, f, allele_freqs=DEFAULT_ALLELE_FREQS, n=1000,
                       targets=((1, 2), (1, 3))):
    """One replicate of the maximum likelihood study.

    Returns ``{target: {"plugin": (estimate, rel_err), "imputation": (...)}}``
    with targets as allele-index pairs (default BC and BD).
    """
    truth_model = InbreedingModel(tuple(allele_freqs), f)
    counts = simulate_phenotypes(truth_model, mapping, n, rng)
    p_hat = em_allele_freqs(counts, mapping)
    out = {}
    for k, l in targets:
        mu = genotype_prob(truth_model, k, l)
        pi = plugin_genotype_freq(p_hat, k, l)
        im = imputation_genotype_freq(p_hat, counts, mapping, k, l)
        out[(k, l)] = {"plugin": (pi, (pi - mu) / mu), "imputation": (im, (im - mu) / mu)}
    return out
