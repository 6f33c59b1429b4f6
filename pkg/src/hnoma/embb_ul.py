"""Uplink eMBB per-cell sum-rates for a given channel realization.

Shapes: ``H`` is (n_F, M, M); ``G`` is (n_T, n_F, M); ``sigma2`` is (M,).
Rates are in bit/s/Hz per cell.
"""
from __future__ import annotations

import numpy as np

from .activations import activation_patterns

LN2 = np.log(2.0)


def gram(H):
    return H @ np.conj(np.swapaxes(H, -1, -2))


def _logdet2(X):
    sign, ld = np.linalg.slogdet(X)
    return ld / LN2


def rate_ul_oma(H, sigma2, P_B, L_U):
    """C-RAN joint decoding over the ``1 - 1/L_U`` eMBB share of mini-slots."""
    n_F, M, _ = H.shape
    share = 1.0 - 1.0 / L_U
    if share == 0.0 or P_B == 0.0:
        return 0.0
    s = 1.0 / np.sqrt(1.0 + np.asarray(sigma2, dtype=float))
    K = np.eye(M) + P_B * s[:, None] * gram(H) * s[None, :]
    return float(share * _logdet2(K).sum() / (M * n_F))


def rate_ul_tin(H, G, sigma2, P_B, P_U, a_U, rng=None, patterns=None):
    """BBU decodes eMBB treating URLLC as noise, conditioned on the activations.

    The activation expectation is exact for small M and averaged over the
    mini-slots in ``G``.  ``patterns=(A, w)`` overrides the expectation.
    """
    n_F, M, _ = H.shape
    sigma2 = np.asarray(sigma2, dtype=float)
    A, w = patterns if patterns is not None else activation_patterns(M, a_U, rng=rng)
    base = np.eye(M) + np.diag(sigma2) + P_B * gram(H)                   # (n_F, M, M)
    interf = P_U * A[None, :, None, :] * (np.abs(G) ** 2)[:, None, :, :]  # (n_T, Q, n_F, M)
    num = base + interf[..., None] * np.eye(M)
    ld_num = _logdet2(num)
    ld_den = np.log2(1.0 + sigma2 + interf).sum(axis=-1)
    per_f = np.einsum("q,qf->f", w, (ld_num - ld_den).mean(axis=0))
    return float(per_f.sum() / (M * n_F))


def rate_ul_punct(H, sigma2, P_B, erase_prob, rng=None, patterns=None):
    """Erased EN samples carry no eMBB signal; SIC uses ``erase_prob = a_U*eps_D``."""
    n_F, M, _ = H.shape
    A, w = patterns if patterns is not None else activation_patterns(M, erase_prob, rng=rng)
    row = (1.0 - A) / (1.0 + np.asarray(sigma2, dtype=float))            # (Q, M)
    K = np.eye(M) + P_B * row[:, None, :, None] * gram(H)[None]           # (Q, n_F, M, M)
    per_f = w @ _logdet2(K)
    return float(per_f.sum() / (M * n_F))
