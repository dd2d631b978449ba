import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, linalg, optimize

from imputest import ctmc
from imputest.errors import BoundaryError, ConfigError, DomainError, SaturationError
from imputest.stats import derive_stream

A, G, C, T = range(4)
rate = st.floats(0.001, 1.0)


def _rng(i=0, seed=1618):
    return derive_stream(seed, i).generator()


def _counts_from_freqs(n, f_l1, f_l2):
    """Symmetric-ish pair counts with given class counts (all on row A / from A)."""
    m = np.zeros((4, 4), dtype=np.int64)
    m[A, G] = f_l1
    m[A, C] = f_l2
    m[A, A] = n - f_l1 - f_l2
    return ctmc.PairCounts(m)


def _integral_oracle(gen, labels, t=1.0):
    Q = gen.matrix
    QL = ctmc.label_matrix(gen, labels)
    f = lambda s: linalg.expm(Q * s) @ QL @ linalg.expm(Q * (t - s))
    val, _ = integrate.quad_vec(f, 0.0, t, epsabs=1e-14, epsrel=1e-12)
    return val


# Generators.


def test_k3p_layout():
    Q = ctmc.build_generator("K3P", (0.1, 0.2, 0.3)).matrix
    assert Q[A, G] == 0.1 and Q[A, C] == 0.2 and Q[A, T] == 0.3
    assert Q[A, A] == pytest.approx(-0.6)


@given(rate)
def test_k3p_nests_jc(a):
    np.testing.assert_array_equal(ctmc.build_generator("K3P", (a, a, a)).matrix,
                                  ctmc.build_generator("JC", a).matrix)


@given(rate, rate)
def test_k2p_structure(a, b):
    Q = ctmc.build_generator("K2P", (a, b)).matrix
    np.testing.assert_allclose(Q.sum(axis=1), 0, atol=1e-15)
    np.testing.assert_allclose(np.diag(Q), -(a + 2 * b))


def test_generator_validation():
    with pytest.raises(ConfigError):
        ctmc.build_generator("HKY", (1.0,))
    with pytest.raises(ConfigError):
        ctmc.build_generator("K2P", (1.0,))
    with pytest.raises(DomainError):
        ctmc.build_generator("JC", -0.1)
    with pytest.raises(DomainError):
        ctmc.custom_generator([[0, -1], [1, 0]])


def test_label_sets_partition_changes():
    assert set(ctmc.L1) | set(ctmc.L2) == set(ctmc.all_changes())
    assert not set(ctmc.L1) & set(ctmc.L2)
    assert set(ctmc.K3P_BETA) | set(ctmc.K3P_GAMMA) == set(ctmc.L2)


# Transition probabilities.


def test_identity_at_zero():
    np.testing.assert_allclose(ctmc.transition_matrix(ctmc.build_generator("K2P", (0.3, 0.1)), 0),
                               np.eye(4), atol=1e-15)


def test_jc_diagonal_value():
    P = ctmc.transition_matrix(ctmc.build_generator("JC", 0.25))
    assert P[0, 0] == pytest.approx(0.25 + 0.75 * np.exp(-1), abs=1e-14)
    assert P[0, 0] == pytest.approx(0.52591, abs=1e-5)


@settings(max_examples=40)
@given(rate, rate, st.sampled_from([0.1, 0.5, 1.0, 2.0]))
def test_closed_forms_match_spectral(a, b, t):
    np.testing.assert_allclose(ctmc.transition_matrix(ctmc.build_generator("K2P", (a, b)), t),
                               ctmc.k2p_transition_closed_form(a, b, t), atol=1e-12)
    np.testing.assert_allclose(ctmc.transition_matrix(ctmc.build_generator("JC", a), t),
                               ctmc.jc_transition_closed_form(a, t), atol=1e-12)


@settings(max_examples=40)
@given(rate, rate, rate, st.floats(0.01, 3.0))
def test_k3p_matches_expm(a, b, c, t):
    gen = ctmc.build_generator("K3P", (a, b, c))
    np.testing.assert_allclose(ctmc.transition_matrix(gen, t), linalg.expm(gen.matrix * t),
                               atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0.01, 2.0), min_size=9, max_size=9), st.floats(0.1, 2.0))
def test_custom_matches_expm(raw, t):
    R = np.zeros((3, 3))
    R[~np.eye(3, dtype=bool)] = raw[:6]
    gen = ctmc.custom_generator(R)
    P = ctmc.transition_matrix(gen, t)
    np.testing.assert_allclose(P, linalg.expm(gen.matrix * t), atol=1e-10)
    np.testing.assert_allclose(P.sum(axis=1), 1, atol=1e-12)


def test_k2p_class_probs_sum():
    p1, p2, pd = ctmc.k2p_class_probs(0.1, 0.05)
    assert p1 + p2 + pd == pytest.approx(1.0)
    P = ctmc.k2p_transition_closed_form(0.1, 0.05)
    assert p1 == pytest.approx(P[A, G]) and pd == pytest.approx(P[A, A])


# Stationarity and means.


@pytest.mark.parametrize("family, params", [("JC", 0.1), ("K2P", (0.1, 0.3)),
                                            ("K3P", (0.1, 0.2, 0.3))])
def test_group_based_stationary_uniform(family, params):
    gen = ctmc.build_generator(family, params)
    np.testing.assert_allclose(ctmc.stationary_distribution(gen), 0.25)


@given(st.floats(0.01, 5), st.floats(0.01, 5))
def test_two_state_stationary(a, b):
    pi = ctmc.stationary_distribution(ctmc.custom_generator([[0, a], [b, 0]]))
    np.testing.assert_allclose(pi, [b / (a + b), a / (a + b)], rtol=1e-10)


@settings(max_examples=30)
@given(st.lists(st.floats(0.01, 2.0), min_size=12, max_size=12))
def test_stationary_is_null_vector(raw):
    R = np.zeros((4, 4))
    R[~np.eye(4, dtype=bool)] = raw
    gen = ctmc.custom_generator(R)
    pi = ctmc.stationary_distribution(gen)
    assert np.max(np.abs(pi @ gen.matrix)) < 1e-10


def test_reducible_generator_rejected():
    with pytest.raises(DomainError):
        ctmc.stationary_distribution(ctmc.custom_generator([[0, 1, 0], [0, 0, 0], [0, 0, 0]]))


@given(rate, rate)
def test_mean_counts_k2p(a, b):
    gen = ctmc.build_generator("K2P", (a, b))
    assert ctmc.mean_labeled_count(gen, ctmc.L1) == pytest.approx(a)
    assert ctmc.mean_labeled_count(gen, ctmc.L2) == pytest.approx(2 * b)
    assert ctmc.mean_labeled_count(gen, ()) == 0.0


# Endpoint-conditioned moments.


def test_jc_restricted_moment_value():
    g = 0.1
    M = ctmc.joint_restricted_moment(ctmc.build_generator("JC", g), ctmc.L1)
    want = g * (0.25 + 0.75 * np.exp(-4 * g))
    assert M[A, G] == pytest.approx(want, abs=1e-14)
    assert want == pytest.approx(0.075274, abs=1e-6)


@pytest.mark.parametrize("family, params, labels", [
    ("JC", 0.1, ctmc.L1), ("K2P", (0.15, 0.05), ctmc.L1), ("K2P", (0.15, 0.05), ctmc.L2),
    ("K3P", (0.3, 0.1, 0.2), ctmc.K3P_GAMMA)])
def test_restricted_moment_matches_quadrature(family, params, labels):
    gen = ctmc.build_generator(family, params)
    np.testing.assert_allclose(ctmc.joint_restricted_moment(gen, labels),
                               _integral_oracle(gen, labels), atol=1e-12)


def test_restricted_moment_nonreversible_custom():
    R = np.array([[0, 0.5, 0.1], [0.05, 0, 0.9], [0.7, 0.02, 0]])
    gen = ctmc.custom_generator(R)
    labels = [(0, 1), (2, 0)]
    np.testing.assert_allclose(ctmc.joint_restricted_moment(gen, labels, t=1.5),
                               _integral_oracle(gen, labels, t=1.5), atol=1e-10)


def test_repeated_eigenvalues_kernel():
    # K3P with two equal rates has repeated eigenvalues; the divided difference must stay finite
    gen = ctmc.build_generator("K3P", (0.2, 0.2, 0.2000000001))
    np.testing.assert_allclose(ctmc.joint_restricted_moment(gen, ctmc.L1),
                               _integral_oracle(gen, ctmc.L1), atol=1e-12)


@given(rate)
def test_jc_commutation_shortcut(g):
    gen = ctmc.build_generator("JC", g)
    shortcut = ctmc.label_matrix(gen, ctmc.L1) @ linalg.expm(gen.matrix)
    np.testing.assert_allclose(ctmc.joint_restricted_moment(gen, ctmc.L1), shortcut, atol=1e-12)


@given(rate)
def test_jc_conditional_formula(g):
    gen = ctmc.build_generator("JC", g)
    want = g * (0.25 + 0.75 * np.exp(-4 * g)) / (0.25 - 0.25 * np.exp(-4 * g))
    assert ctmc.conditional_expected_count(gen, ctmc.L1, A, G) == pytest.approx(want, rel=1e-10)


def test_small_rate_single_change_limit():
    vals = [ctmc.conditional_expected_count(ctmc.build_generator("JC", g), ctmc.L1, A, G)
            for g in (1e-2, 1e-4, 1e-6)]
    assert abs(vals[-1] - 1) < 1e-5 and abs(vals[0] - 1) > abs(vals[-1] - 1)


def test_empty_labels_zero():
    gen = ctmc.build_generator("K2P", (0.2, 0.1))
    np.testing.assert_array_equal(ctmc.joint_restricted_moment(gen, ()), 0.0)


@settings(max_examples=30)
@given(rate, rate, rate)
def test_conditional_counts_nonnegative(a, b, c):
    C_ = ctmc.conditional_count_matrix(ctmc.build_generator("K3P", (a, b, c)), ctmc.L2)
    assert np.all(C_ >= 0)


def test_total_jumps_identity():
    R = np.array([[0, 0.5, 0.1], [0.3, 0, 0.9], [0.7, 0.2, 0]])
    gen = ctmc.custom_generator(R)
    pi = ctmc.stationary_distribution(gen)
    M = ctmc.joint_restricted_moment(gen, ctmc.all_changes(3), t=2.0)
    assert pi @ M.sum(axis=1) == pytest.approx(-2.0 * pi @ np.diag(gen.matrix), rel=1e-12)


def test_zero_probability_endpoint_is_nan():
    gen = ctmc.custom_generator([[0, 1.0], [0, 0]])
    C_ = ctmc.conditional_count_matrix(gen, [(0, 1)])
    assert np.isnan(C_[1, 0]) and C_[0, 1] == pytest.approx(1.0)


# Data and fitting.


def test_pair_counts_from_sequences():
    pc = ctmc.PairCounts.from_sequences("AGCT", "GGCA")
    assert pc.n == 4 and pc.m[A, G] == 1 and pc.m[T, A] == 1
    assert pc.f_D == 0.5 and pc.f_L1 == 0.25 and pc.f_L2 == 0.25
    with pytest.raises(DomainError):
        ctmc.PairCounts.from_sequences("AG", "A")


def test_simulated_class_frequencies():
    counts = ctmc.simulate_alignment(ctmc.build_generator("K2P", (0.15, 0.05)), 1_000_000, _rng())
    p1, p2, pd = ctmc.k2p_class_probs(0.15, 0.05)
    assert abs(counts.f_L1 - p1) < 0.005 and abs(counts.f_L2 - p2) < 0.005
    assert abs(counts.f_D - pd) < 0.005


def test_single_column():
    counts = ctmc.simulate_alignment(ctmc.build_generator("JC", 0.3), 1, _rng())
    assert np.count_nonzero(counts.m) == 1


def test_fit_jc_examples():
    assert ctmc.fit_jc(_counts_from_freqs(10, 0, 0)) == 0.0
    with pytest.raises(SaturationError):
        ctmc.fit_jc(_counts_from_freqs(100, 40, 35))
    g = ctmc.fit_jc(_counts_from_freqs(10, 1, 0))
    assert g == pytest.approx(-0.25 * np.log(1 - 4 / 30), abs=1e-12)
    assert g == pytest.approx(0.0357752, abs=1e-7)


def _numeric_fit(family, counts, k):
    res = optimize.minimize(lambda x: -ctmc.pair_loglik(ctmc.build_generator(family, np.exp(x)),
                                                        counts),
                            np.full(k, np.log(0.1)), method="BFGS", options={"gtol": 1e-9})
    return np.exp(res.x)


def test_fit_jc_numeric():
    counts = _counts_from_freqs(10, 1, 0)
    assert ctmc.fit_jc(counts) == pytest.approx(_numeric_fit("JC", counts, 1)[0], rel=1e-6)


@pytest.mark.parametrize("f1, f2", [(120, 80), (37, 301), (5, 5), (250, 100)])
def test_k2p_inverse_round_trip(f1, f2):
    # fitted rates reproduce the observed class frequencies exactly
    counts = _counts_from_freqs(1000, f1, f2)
    a, b = ctmc.fit_k2p(counts)
    p1, p2, _ = ctmc.k2p_class_probs(a, b)
    assert p1 == pytest.approx(f1 / 1000, abs=1e-12) and p2 == pytest.approx(f2 / 1000, abs=1e-12)


def test_k3p_inverse_round_trip():
    m = np.zeros((4, 4), dtype=np.int64)
    m[A, G], m[A, C], m[A, T], m[A, A] = 90, 60, 30, 820
    a, b, c = ctmc.fit_k3p(ctmc.PairCounts(m))
    P = ctmc.transition_matrix(ctmc.build_generator("K3P", (a, b, c)))
    np.testing.assert_allclose([P[A, G], P[A, C], P[A, T]], [0.09, 0.06, 0.03], atol=1e-12)


def test_k3p_exact_recovery():
    P = ctmc.transition_matrix(ctmc.build_generator("K3P", (0.1, 0.2, 0.3)))
    n = 10**15
    # counts proportional to the exact class probabilities, up to integer rounding
    m = np.rint(P / 4 * n).astype(np.int64)
    np.testing.assert_allclose(ctmc.fit_k3p(ctmc.PairCounts(m)), (0.1, 0.2, 0.3), atol=1e-12)


@pytest.mark.parametrize("i", range(20))
def test_closed_form_mles_match_numeric(i):
    g = _rng(i, seed=99)
    a, b, c = g.uniform(0.02, 0.3, 3)
    counts = ctmc.simulate_alignment(ctmc.build_generator("K3P", (a, b, c)), 2000, g)
    k2 = ctmc.fit_k2p(counts)
    np.testing.assert_allclose(k2, _numeric_fit("K2P", counts, 2), rtol=1e-5)
    k3 = ctmc.fit_k3p(counts)
    np.testing.assert_allclose(k3, _numeric_fit("K3P", counts, 3), rtol=1e-5)


def test_k2p_consistent_with_jc():
    # f_L1 = f_L2 / 2 is what JC predicts; K2P must then collapse to JC
    counts = _counts_from_freqs(1000, 50, 100)
    a, b = ctmc.fit_k2p(counts)
    assert a == pytest.approx(b, abs=1e-12) and a == pytest.approx(ctmc.fit_jc(counts), abs=1e-12)


def test_simulated_fits_near_truth():
    counts = ctmc.simulate_alignment(ctmc.build_generator("K2P", (0.1, 0.05)), 100_000, _rng(1))
    np.testing.assert_allclose(ctmc.fit_k2p(counts), (0.1, 0.05), atol=0.01)
    counts = ctmc.simulate_alignment(ctmc.build_generator("K3P", (0.1, 0.2, 0.3)), 100_000, _rng(2))
    np.testing.assert_allclose(ctmc.fit_k3p(counts), (0.1, 0.2, 0.3), atol=0.01)


def test_k2p_errors():
    with pytest.raises(SaturationError):
        ctmc.fit_k2p(_counts_from_freqs(100, 0, 50))
    with pytest.raises(BoundaryError):
        ctmc.fit_k2p(_counts_from_freqs(1000, 0, 300))
    with pytest.raises(ConfigError):
        ctmc.fit_generator("custom", _counts_from_freqs(10, 1, 1))


# Estimators.


@pytest.mark.parametrize("i", range(5))
def test_coincidence_cases(i):
    g = _rng(i, seed=5)
    counts = ctmc.simulate_alignment(ctmc.build_generator("K3P", (0.2, 0.05, 0.1)), 5000, g)
    jc = ctmc.fit_generator("JC", counts)
    assert ctmc.plugin_labeled(jc, ctmc.all_changes()) == pytest.approx(
        ctmc.imputation_labeled(jc, ctmc.all_changes(), counts), rel=1e-8)
    k2 = ctmc.fit_generator("K2P", counts)
    for labels in (ctmc.L1, ctmc.L2):
        assert ctmc.plugin_labeled(k2, labels) == pytest.approx(
            ctmc.imputation_labeled(k2, labels, counts), rel=1e-8)


def test_jc_on_k2p_data_diverges():
    counts = ctmc.simulate_alignment(ctmc.build_generator("K2P", (0.01, 0.15)), 100_000, _rng(3))
    jc = ctmc.fit_generator("JC", counts)
    pi, im = ctmc.plugin_labeled(jc, ctmc.L1), ctmc.imputation_labeled(jc, ctmc.L1, counts)
    _, lim_pi, lim_im = ctmc.theorem2_limits(0.01, 0.15)
    assert abs(pi - im) > 0.03
    assert abs(pi - lim_pi) < 0.005 and abs(im - lim_im) < 0.005


def test_jc_imputation_closed_form():
    counts = ctmc.simulate_alignment(ctmc.build_generator("K2P", (0.1, 0.2)), 3000, _rng(4))
    jc = ctmc.fit_generator("JC", counts)
    assert ctmc.jc_imputation_closed_form(counts) == pytest.approx(
        ctmc.imputation_labeled(jc, ctmc.L1, counts), rel=1e-10)


def test_ctmcfit_generic_interface():
    counts = ctmc.simulate_alignment(ctmc.build_generator("K2P", (0.1, 0.2)), 500, _rng(5))
    fit = ctmc.CTMCFit(ctmc.fit_generator("JC", counts))
    obs = ctmc.observations_from_counts(counts)
    assert len(obs) == 500
    vals = fit.conditional_means("N:L1", obs)
    assert vals.mean() == pytest.approx(ctmc.imputation_labeled(fit.gen, ctmc.L1, counts))
    # the slow per-observation path agrees with the vectorized one
    assert fit.conditional_mean("N:L1", obs[0])[0] == pytest.approx(vals[0, 0])


# Coincidence condition and limits.


def test_span_condition_cases():
    k2 = ctmc.build_generator("K2P", (0.12, 0.04))
    assert ctmc.theorem1_condition(k2, ctmc.L1)[0]
    assert ctmc.theorem1_condition(k2, ctmc.L2)[0]
    holds, resid = ctmc.theorem1_condition(ctmc.build_generator("JC", 0.1), ctmc.L1)
    assert not holds and resid > 1e-3
    with pytest.raises(DomainError):
        ctmc.theorem1_condition(ctmc.custom_generator(np.ones((2, 2))), ctmc.L1)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["JC", "K2P", "K3P"]),
       st.sampled_from(sorted(ctmc.LABEL_SETS)))
def test_condition_implies_coincidence(seed, family, name):
    g = np.random.default_rng(seed)
    truth = ctmc.build_generator("K3P", g.uniform(0.02, 0.3, 3))
    counts = ctmc.simulate_alignment(truth, 3000, g)
    try:
        fit = ctmc.fit_generator(family, counts)
    except DomainError:
        return
    labels = ctmc.LABEL_SETS[name]
    if ctmc.theorem1_condition(fit, labels)[0]:
        pi, im = ctmc.plugin_labeled(fit, labels), ctmc.imputation_labeled(fit, labels, counts)
        assert abs(pi - im) < 1e-8


@given(rate)
def test_limits_no_misspecification(a):
    mu, pi, im = ctmc.theorem2_limits(a, a)
    assert pi == pytest.approx(mu, rel=1e-12) and im == pytest.approx(mu, rel=1e-12)


def test_limits_ordering_left_panel():
    for b in np.linspace(0.005, 0.3, 60):
        mu, pi, im = ctmc.theorem2_limits(0.01, b)
        if abs(b - 0.01) > 1e-12:
            assert min(mu, pi) < im < max(mu, pi)


@settings(max_examples=200)
@given(st.floats(0.005, 0.5), st.floats(0.005, 0.5))
def test_dominance_property(a, b):
    if abs(a - b) > 1e-6:
        mu, pi, im = ctmc.theorem2_limits(a, b)
        assert abs(im - mu) < abs(pi - mu)


def test_limits_reject_nonpositive():
    with pytest.raises(DomainError):
        ctmc.theorem2_limits(0.0, 0.1)


# Path oracle.


def test_oracle_empty_labels():
    mean, se = ctmc.mc_path_oracle(ctmc.build_generator("JC", 0.2), (), A, G, 1000, _rng())
    assert mean == 0.0


def test_oracle_jc_single_entry():
    gen = ctmc.build_generator("JC", 0.2)
    mean, se = ctmc.mc_path_oracle(gen, ctmc.L1, A, G, 1_000_000, _rng(1))
    assert abs(mean - ctmc.conditional_expected_count(gen, ctmc.L1, A, G)) < 3 * se


def test_oracle_tiny_rates_stay_put():
    gen = ctmc.build_generator("JC", 1e-4)
    mean, _ = ctmc.mc_path_oracle(gen, ctmc.L1, A, A, 10_000, _rng(2))
    assert mean < 1e-3


def test_oracle_custom_generator():
    R = np.array([[0, 0.5, 0.1], [0.3, 0, 0.9], [0.7, 0.2, 0]])
    gen = ctmc.custom_generator(R)
    labels = [(0, 1), (2, 0)]
    row = ctmc.mc_path_oracle_row(gen, labels, 0, 200_000, _rng(3))
    C_ = ctmc.conditional_count_matrix(gen, labels)
    for l, (mean, se, acc) in row.items():
        assert acc >= 200_000
        assert abs(mean - C_[0, l]) < 4 * se


def test_oracle_unreachable():
    gen = ctmc.custom_generator([[0, 1.0], [0, 0]])
    with pytest.raises(DomainError):
        ctmc.mc_path_oracle(gen, [(0, 1)], 1, 0, 10, _rng(), chunk=10_000)
