import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hnoma import fronthaul
from hnoma.activations import activation_patterns
from hnoma.embb_ul import gram, rate_ul_oma, rate_ul_punct, rate_ul_tin
from oracles import random_channels, sampled_expectation


def frame(seed, M=4, n_F=4, n_T=8):
    rng = np.random.default_rng(seed)
    H = random_channels(rng, n_F, M, 0.8)
    G = (rng.standard_normal((n_T, n_F, M)) + 1j * rng.standard_normal((n_T, n_F, M))) * 1.5
    s2 = rng.uniform(0.1, 2.0, size=M)
    return H, G, s2


def test_scalar_oma_example():
    H = np.full((1, 1, 1), math.sqrt(3.0), complex)
    r = rate_ul_oma(H, [4 / 15], 1.0, 2)
    assert r == pytest.approx(0.5 * math.log2(1 + 3 / (1 + 4 / 15)), rel=1e-12)
    assert r == pytest.approx(0.5 * math.log2(64 / 19), rel=1e-12)
    assert r == pytest.approx(0.87604, abs=1e-5)


def test_oma_zero_power_and_single_slot():
    H, _, s2 = frame(0)
    assert rate_ul_oma(H, s2, 0.0, 2) == 0.0
    assert rate_ul_oma(H, s2, 2.0, 1) == 0.0


def test_oma_matches_direct_formula():
    H, _, s2 = frame(1)
    P_B, L_U = 2.5, 3
    direct = 0.0
    for f in range(4):
        K = np.eye(4) + P_B * np.linalg.inv(np.eye(4) + np.diag(s2)) @ H[f] @ H[f].conj().T
        direct += math.log2(np.linalg.det(K).real)
    assert rate_ul_oma(H, s2, P_B, L_U) == pytest.approx((1 - 1 / L_U) * direct / 16, rel=1e-12)


def test_oma_monotone_in_latency():
    H, _, s2 = frame(2)
    rates = [rate_ul_oma(H, s2, 2.5, L) for L in (2, 3, 5, 50, 10 ** 6)]
    assert all(a < b for a, b in zip(rates, rates[1:]))
    assert rates[-1] == pytest.approx(rate_ul_oma(H, s2, 2.5, math.inf), rel=1e-5)


def test_tin_without_traffic_is_cran():
    H, G, s2 = frame(3)
    assert rate_ul_tin(H, G, s2, 2.5, 200.0, 0.0) == pytest.approx(rate_ul_oma(H, s2, 2.5, math.inf), rel=1e-12)


def test_tin_swamped_by_urllc():
    H, G, s2 = frame(4)
    assert rate_ul_tin(H, G, s2, 2.5, 1e6, 1.0) < 1e-3 * rate_ul_oma(H, s2, 2.5, math.inf)


def test_tin_matches_direct_formula():
    H, G, s2 = frame(5, M=2, n_F=2, n_T=3)
    P_B, P_U, a = 2.0, 30.0, 0.3
    total = 0.0
    for bits in range(4):
        A = np.array([bits & 1, bits >> 1 & 1], float)
        w = np.prod(np.where(A == 1, a, 1 - a))
        for t in range(3):
            for f in range(2):
                I = P_U * A * np.abs(G[t, f]) ** 2
                num = np.linalg.det(np.eye(2) + np.diag(s2 + I) + P_B * H[f] @ H[f].conj().T).real
                den = np.prod(1 + s2 + I)
                total += w * math.log2(num / den) / 3
    assert rate_ul_tin(H, G, s2, P_B, P_U, a) == pytest.approx(total / 4, rel=1e-12)


def test_punct_limits():
    H, _, s2 = frame(6)
    assert rate_ul_punct(H, s2, 2.5, 0.0) == pytest.approx(rate_ul_oma(H, s2, 2.5, math.inf), rel=1e-12)
    assert rate_ul_punct(H, s2, 2.5, 1.0) == 0.0


def test_projector_sylvester_identity():
    rng = np.random.default_rng(7)
    for _ in range(50):
        H = random_channels(rng, 1, 4)[0]
        D_inv = np.diag(1 / (1 + rng.uniform(0.1, 3, 4)))
        Pi = np.diag((rng.random(4) > 0.5).astype(float))
        one_sided = np.linalg.slogdet(np.eye(4) + 2.5 * D_inv @ Pi @ H @ H.conj().T)[1]
        two_sided = np.linalg.slogdet(np.eye(4) + 2.5 * D_inv @ Pi @ H @ H.conj().T @ Pi)[1]
        assert abs(one_sided - two_sided) / math.log(2) < 1e-10


def test_punct_erased_row_equals_reduced_system():
    H, _, s2 = frame(8, M=3, n_F=1)
    A = np.array([[0.0, 1.0, 0.0]])
    r = rate_ul_punct(H, s2, 2.0, 0.5, patterns=(A, np.ones(1)))
    keep = [0, 2]
    Hk = H[:, keep, :]
    K = np.eye(2) + 2.0 * np.diag(1 / (1 + s2[keep])) @ Hk[0] @ Hk[0].conj().T
    assert r == pytest.approx(math.log2(np.linalg.det(K).real) / 3, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.permutations(range(4)))
def test_permutation_invariance(seed, perm):
    H, G, s2 = frame(seed)
    p = list(perm)
    Hp, Gp, sp = H[:, p][:, :, p], G[:, :, p], s2[p]
    assert rate_ul_tin(Hp, Gp, sp, 2.5, 50.0, 0.2) == pytest.approx(rate_ul_tin(H, G, s2, 2.5, 50.0, 0.2), rel=1e-10)
    assert rate_ul_punct(Hp, sp, 2.5, 0.2) == pytest.approx(rate_ul_punct(H, s2, 2.5, 0.2), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.floats(0, 1), st.floats(0, 1))
def test_punct_monotone_in_erasure(seed, e1, e2):
    H, _, s2 = frame(seed)
    lo, hi = sorted((e1, e2))
    assert rate_ul_punct(H, s2, 2.5, hi) <= rate_ul_punct(H, s2, 2.5, lo) + 1e-12


def test_enumeration_agrees_with_sampling():
    rng = np.random.default_rng(9)
    H, G, s2 = frame(10, M=2)
    for fn in (lambda pat: rate_ul_tin(H, G, s2, 2.5, 80.0, 0.3, patterns=pat),
               lambda pat: rate_ul_punct(H, s2, 2.5, 0.3, patterns=pat)):
        exact = fn(activation_patterns(2, 0.3))
        mc, se = sampled_expectation(fn, 2, 0.3, 10 ** 6, rng)
        assert abs(exact - mc) < 3 * se


def test_large_network_uses_sampling():
    rng = np.random.default_rng(11)
    A, w = activation_patterns(17, 0.25, rng=rng, n_samples=20_000)
    assert A.shape == (20_000, 17) and w.sum() == pytest.approx(1.0)
    assert A.mean() == pytest.approx(0.25, abs=0.01)
    with pytest.raises(ValueError):
        activation_patterns(17, 0.25)


def test_exact_pattern_weights():
    A, w = activation_patterns(3, 0.2)
    assert A.shape == (8, 3) and w.sum() == pytest.approx(1.0, abs=1e-15)
    assert w[A.sum(axis=1) == 3][0] == pytest.approx(0.008)
    A0, w0 = activation_patterns(3, 0.0)
    assert A0.shape == (1, 3) and not A0.any() and w0[0] == 1.0


def test_gram_hermitian():
    H, _, _ = frame(12)
    K = gram(H)
    np.testing.assert_allclose(K, np.conj(np.swapaxes(K, -1, -2)))


def test_rates_with_fronthaul_noise_nonnegative():
    H, G, _ = frame(13)
    q = fronthaul.ul_tin_noise(H, G, 2.5, 200.0, 0.2, 2.0)
    assert rate_ul_tin(H, G, q.sigma2, 2.5, 200.0, 0.2) >= 0.0
