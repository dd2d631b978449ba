"""Configuration-driven simulation studies for the three case studies.

A run is described by one JSON document::

    {
      "experiment": "mixture" | "genotype-ml" | "genotype-bayes" | "ctmc-limits" | "ctmc-sim",
      "seed": 20100101,
      "replicates": 1000,
      "output": "out/mixture",
      "params": {...}          # optional; missing keys take the defaults below
    }

Unknown keys anywhere are rejected. Every replicate draws from its own
stream ``derive_stream(seed, task_index)``, so results do not depend on how
replicates are scheduled across workers.
"""

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import ctmc, genotype, mixture
from .errors import ConfigError, SaturationError
from .stats import derive_stream, median

DEFAULT_SEED = 20100101

DEFAULT_PARAMS = {
    "mixture": {
        "n": 1000,
        "mu1": 1.5, "mu2": 2.5, "sigma1": 0.2, "sigma2": 0.25, "alpha": 0.3,
        "thresholds": list(mixture.DEFAULT_THRESHOLDS),
    },
    "genotype-ml": {
        "n": 1000,
        "allele_freqs": list(genotype.DEFAULT_ALLELE_FREQS),
        "f_values": list(genotype.DEFAULT_F_VALUES),
        "mappings": ["h1", "h2"],
        "targets": ["BC", "BD"],
    },
    "genotype-bayes": {
        "n": 1000,
        "allele_freqs": list(genotype.DEFAULT_ALLELE_FREQS),
        "f_values": list(genotype.DEFAULT_F_VALUES),
        "mappings": ["h1", "h2"],
        "targets": ["BC", "BD"],
        "prior": [1.0, 1.0, 1.0, 1.0],
        "iterations": 10000,
        "burn_in": 1000,
        "thin": 1,
    },
    "ctmc-limits": {
        "alphas": [0.01, 0.1],
        "betas": [round(0.005 * i, 3) for i in range(1, 61)],
    },
    "ctmc-sim": {
        "pairs": [[0.01, 0.15], [0.1, 0.05], [0.1, 0.2]],
        "n_values": [1000, 10000, 200000],
        "on_saturation": "record",
    },
}

DEFAULT_REPLICATES = {"mixture": 1000, "genotype-ml": 1000, "genotype-bayes": 1,
                      "ctmc-limits": 1, "ctmc-sim": 1}

HEADERS = {
    "mixture_tail.csv": ["replicate", "c", "estimator", "estimate", "truth", "relative_error"],
    "mixture_clustering.csv": ["replicate", "method", "error"],
    "mixture_density.csv": ["replicate", "method", "component", "l1_distance"],
    "genotype_ml.csv": ["mapping", "f", "replicate", "target", "estimator", "estimate", "truth",
                        "relative_error"],
    "genotype_bayes.csv": ["mapping", "f", "replicate", "target", "estimator", "draw", "value",
                           "truth", "relative_error"],
    "ctmc_limits.csv": ["alpha", "beta", "mu", "mu_pi_inf", "mu_im_inf", "imputation_dominates"],
    "ctmc_sim.csv": ["alpha", "beta", "n", "replicate", "estimator", "estimate",
                     "closed_form_limit", "status"],
}

OUTPUTS = {
    "mixture": ("mixture_tail.csv", "mixture_clustering.csv", "mixture_density.csv"),
    "genotype-ml": ("genotype_ml.csv",),
    "genotype-bayes": ("genotype_bayes.csv",),
    "ctmc-limits": ("ctmc_limits.csv",),
    "ctmc-sim": ("ctmc_sim.csv",),
}

_TOP_KEYS = {"experiment", "seed", "replicates", "output", "params"}


@dataclass
class ExperimentConfig:
    experiment: str
    seed: int = DEFAULT_SEED
    replicates: int = 1
    output: str = "out"
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(doc) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        name = doc.get("experiment")
        if name not in DEFAULT_PARAMS:
            raise ConfigError(f"unknown experiment {name!r}; choose from {sorted(DEFAULT_PARAMS)}")
        params = dict(DEFAULT_PARAMS[name])
        given = doc.get("params", {}) or {}
        if not isinstance(given, dict):
            raise ConfigError("params must be a JSON object")
        bad = set(given) - set(params)
        if bad:
            raise ConfigError(f"unknown params for {name}: {sorted(bad)}")
        params.update(given)
        cfg = cls(
            experiment=name,
            seed=doc.get("seed", DEFAULT_SEED),
            replicates=doc.get("replicates", DEFAULT_REPLICATES[name]),
            output=doc.get("output", os.path.join("out", name)),
            params=params,
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self):
        return {"experiment": self.experiment, "seed": self.seed, "replicates": self.replicates,
                "output": self.output, "params": self.params}

    def validate(self):
        """Check every parameter against the owning module's preconditions."""
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not isinstance(self.replicates, int) or self.replicates < 1:
            raise ConfigError(f"replicates must be a positive integer, got {self.replicates!r}")
        try:
            _VALIDATORS[self.experiment](self.params)
        except ConfigError:
            raise
        except Exception as exc:
            raise ConfigError(f"invalid params for {self.experiment}: {exc}") from exc


def _positive_int(x, what):
    if not isinstance(x, int) or isinstance(x, bool) or x < 1:
        raise ConfigError(f"{what} must be a positive integer, got {x!r}")


def _check_mixture(p):
    _positive_int(p["n"], "n")
    mixture.LogNormalMixtureParams(p["mu1"], p["mu2"], p["sigma1"], p["sigma2"], p["alpha"])
    if not p["thresholds"]:
        raise ConfigError("thresholds must be nonempty")
    for c in p["thresholds"]:
        float(c)


def _parse_target(t):
    if not (isinstance(t, str) and len(t) == 2 and all(a in genotype.ALLELES for a in t)):
        raise ConfigError(f"target must be two allele letters like 'BC', got {t!r}")
    return genotype.ALLELES.index(t[0]), genotype.ALLELES.index(t[1])


def _check_genotype(p):
    _positive_int(p["n"], "n")
    for f in p["f_values"]:
        genotype.InbreedingModel(tuple(p["allele_freqs"]), float(f))
    for m in p["mappings"]:
        if m not in genotype.MAPPINGS:
            raise ConfigError(f"unknown mapping {m!r}")
    for t in p["targets"]:
        _parse_target(t)


def _check_genotype_bayes(p):
    _check_genotype(p)
    prior = np.asarray(p["prior"], dtype=float)
    if prior.shape != (4,) or np.any(prior <= 0):
        raise ConfigError("prior must be four positive concentrations")
    _positive_int(p["iterations"], "iterations")
    _positive_int(p["thin"], "thin")
    if not (isinstance(p["burn_in"], int) and 0 <= p["burn_in"] < p["iterations"]):
        raise ConfigError("need 0 <= burn_in < iterations")


def _check_ctmc_limits(p):
    for a in p["alphas"]:
        for b in p["betas"]:
            if not (float(a) > 0 and float(b) > 0):
                raise ConfigError("rates must be positive")


def _check_ctmc_sim(p):
    for pair in p["pairs"]:
        a, b = pair
        if not (float(a) > 0 and float(b) > 0):
            raise ConfigError("rates must be positive")
    for n in p["n_values"]:
        _positive_int(n, "n")
    if p["on_saturation"] not in ("record", "fail"):
        raise ConfigError("on_saturation must be 'record' or 'fail'")


_VALIDATORS = {
    "mixture": _check_mixture,
    "genotype-ml": _check_genotype,
    "genotype-bayes": _check_genotype_bayes,
    "ctmc-limits": _check_ctmc_limits,
    "ctmc-sim": _check_ctmc_sim,
}


# Per-task workers. Top-level functions so they pickle for process pools.


def _mixture_task(args):
    params, seed, r = args
    truth = mixture.LogNormalMixtureParams(params["mu1"], params["mu2"], params["sigma1"],
                                           params["sigma2"], params["alpha"])
    rng = derive_stream(seed, r).generator()
    res = mixture.mixture_replicate(rng, truth, params["n"], tuple(params["thresholds"]))
    tail, clus, dens = [], [], []
    for c in params["thresholds"]:
        truth_c = mixture.true_tail(truth, c)
        for name, (est, rel) in res["tails"][c].items():
            tail.append([r, float(c), name, est, truth_c, rel])
    for name, err in res["clustering"].items():
        clus.append([r, name, err])
    for name, (d1, d2) in res["density_l1"].items():
        dens.append([r, name, 1, d1])
        dens.append([r, name, 2, d2])
    return tail, clus, dens


def _genotype_task(args):
    params, seed, idx, mapping_name, f, r = args
    rng = derive_stream(seed, idx).generator()
    targets = [_parse_target(t) for t in params["targets"]]
    res = genotype.genotype_replicate(rng, genotype.MAPPINGS[mapping_name], f,
                                      tuple(params["allele_freqs"]), params["n"], targets)
    model = genotype.InbreedingModel(tuple(params["allele_freqs"]), f)
    rows = []
    for name, tg in zip(params["targets"], targets):
        truth = genotype.genotype_prob(model, *tg)
        for est in ("plugin", "imputation"):
            value, rel = res[tg][est]
            rows.append([mapping_name, f, r, name, est, value, truth, rel])
    return (rows,)


def _genotype_bayes_task(args):
    params, seed, idx, mapping_name, f, r = args
    rng = derive_stream(seed, idx).generator()
    mapping = genotype.MAPPINGS[mapping_name]
    model = genotype.InbreedingModel(tuple(params["allele_freqs"]), f)
    counts = genotype.simulate_phenotypes(model, mapping, params["n"], rng)
    states = genotype.gibbs_sampler(counts, mapping, params["prior"], params["iterations"],
                                    params["burn_in"], rng, thin=params["thin"])
    rows = []
    for name in params["targets"]:
        k, l = _parse_target(name)
        truth = genotype.genotype_prob(model, k, l)
        streams = genotype.predictive_distributions(states, counts, mapping, k, l)
        for est, values in zip(("plugin", "imputation", "rao-blackwell"), streams):
            for d, v in enumerate(values):
                v = float(v)
                rows.append([mapping_name, f, r, name, est, d, v, truth, (v - truth) / truth])
    return (rows,)


def _ctmc_sim_task(args):
    seed, idx, a, b, n, r, on_saturation = args
    rng = derive_stream(seed, idx).generator()
    status = "ok"
    try:
        pi, im = ctmc.ctmc_sim_replicate(rng, a, b, n)
    except SaturationError:
        # small alignments can be too divergent for the JC distance to exist
        if on_saturation == "fail":
            raise
        pi = im = float("nan")
        status = "saturated"
    _, lim_pi, lim_im = ctmc.theorem2_limits(a, b)
    return ([[a, b, n, r, "plugin", pi, lim_pi, status],
             [a, b, n, r, "imputation", im, lim_im, status]],)


def _map(fn, tasks, threads):
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (8 * threads))))


def _collect(results, n_files):
    tables = [[] for _ in range(n_files)]
    for res in results:
        for table, rows in zip(tables, res):
            table.extend(rows)
    return tables


# Public runners: each returns {file name: list of rows}.


def run_mixture_experiment(config, threads=1):
    p = config.params
    tasks = [(p, config.seed, r) for r in range(config.replicates)]
    tables = _collect(_map(_mixture_task, tasks, threads), 3)
    return dict(zip(OUTPUTS["mixture"], tables))


def _genotype_tasks(config):
    p = config.params
    tasks = []
    idx = 0
    for m in p["mappings"]:
        for f in p["f_values"]:
            for r in range(config.replicates):
                tasks.append((p, config.seed, idx, m, float(f), r))
                idx += 1
    return tasks


def run_genotype_experiment(config, threads=1):
    tables = _collect(_map(_genotype_task, _genotype_tasks(config), threads), 1)
    return {"genotype_ml.csv": tables[0]}


def run_genotype_bayes(config, threads=1):
    tables = _collect(_map(_genotype_bayes_task, _genotype_tasks(config), threads), 1)
    return {"genotype_bayes.csv": tables[0]}


def run_ctmc_limits(config, threads=1):
    rows = []
    for a in config.params["alphas"]:
        for b in config.params["betas"]:
            mu, pi, im = ctmc.theorem2_limits(float(a), float(b))
            dominates = "" if a == b else int(abs(im - mu) < abs(pi - mu))
            rows.append([float(a), float(b), mu, pi, im, dominates])
    return {"ctmc_limits.csv": rows}


def run_ctmc_sim(config, threads=1):
    tasks = []
    idx = 0
    for a, b in config.params["pairs"]:
        for n in config.params["n_values"]:
            for r in range(config.replicates):
                tasks.append((config.seed, idx, float(a), float(b), int(n), r,
                              config.params["on_saturation"]))
                idx += 1
    tables = _collect(_map(_ctmc_sim_task, tasks, threads), 1)
    return {"ctmc_sim.csv": tables[0]}


RUNNERS = {
    "mixture": run_mixture_experiment,
    "genotype-ml": run_genotype_experiment,
    "genotype-bayes": run_genotype_bayes,
    "ctmc-limits": run_ctmc_limits,
    "ctmc-sim": run_ctmc_sim,
}


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def run(config, out_dir=None, threads=1):
    """Run an experiment and write its CSV files; returns the list of written paths."""
    out_dir = out_dir or config.output
    tables = RUNNERS[config.experiment](config, threads=threads)
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name in OUTPUTS[config.experiment]:
        path = os.path.join(out_dir, name)
        write_csv(path, HEADERS[name], tables[name])
        written.append(path)
    manifest = os.path.join(out_dir, f"{config.experiment}.config.json")
    with open(manifest, "w", encoding="utf-8") as fh:
        json.dump(config.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    written.append(manifest)
    return written


def summarize_rows(rows, key_cols, value_col, fn=median):
    """Group rows by ``key_cols`` (indices) and reduce ``value_col`` with ``fn``."""
    groups = {}
    for row in rows:
        groups.setdefault(tuple(row[i] for i in key_cols), []).append(row[value_col])
    return {k: fn(v) for k, v in groups.items()}
