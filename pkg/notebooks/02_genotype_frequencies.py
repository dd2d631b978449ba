"""
Genotype frequencies under unmodelled inbreeding
================================================

Phenotypes hide some genotypes (B/C and B/D both look like ``bdc``). We fit
Hardy-Weinberg allele frequencies by EM although the population is inbred,
and compare plug-in and imputation estimates of the heterozygote
frequencies.
"""

import numpy as np

from imputest import genotype as gt
from imputest.stats import derive_stream

B, C, D = 1, 2, 3
print("phenotypes of h1:", gt.H1.phenotypes)
print("phenotypes of h2:", gt.H2.phenotypes)

for f in gt.DEFAULT_F_VALUES:
    model = gt.InbreedingModel(gt.DEFAULT_ALLELE_FREQS, f)
    counts = gt.simulate_phenotypes(model, gt.H1, 1000, derive_stream(7, int(f * 1000)).generator())
    p_hat = gt.em_allele_freqs(counts, gt.H1)
    true_bc = gt.genotype_prob(model, B, C)
    pi = gt.plugin_genotype_freq(p_hat, B, C)
    im = gt.imputation_genotype_freq(p_hat, counts, gt.H1, B, C)
    print(f"f={f:5.3f}  mu_BC={true_bc:.4f}  plug-in {pi:.4f} ({(pi - true_bc) / true_bc:+.2f})  "
          f"imputation {im:.4f} ({(im - true_bc) / true_bc:+.2f})")

# Allele counts are the sufficient statistics of the Hardy-Weinberg model,
# so their two estimates agree at the EM fixed point whatever f is.
fit = gt.HardyWeinbergFit(p_hat, gt.H1)
obs = [c for c, n in zip(gt.H1.phenotypes, counts.counts) for _ in range(n)]
print("\nallele counts, plug-in   :", np.round(fit.unconditional_mean("allele_counts"), 12))
print("allele counts, imputation:", np.round(fit.conditional_means("allele_counts", obs).mean(axis=0), 12))
