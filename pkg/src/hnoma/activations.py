"""Activation patterns for expectations over i.i.d. Bernoulli URLLC traffic."""
from __future__ import annotations

import numpy as np

ENUMERATION_LIMIT = 16


def activation_patterns(M: int, p: float, rng=None, n_samples: int = 4096,
                        limit: int = ENUMERATION_LIMIT):
    """Patterns ``A`` (Q, M) and weights (Q,) with ``E[f(A)] = sum_q w_q f(A_q)``.

    All 2^M patterns with exact Bernoulli weights up to ``limit`` cells;
    beyond that, ``n_samples`` i.i.d. draws from ``rng`` with equal weights.
    """
    if M <= limit:
        idx = np.arange(2 ** M)
        A = ((idx[:, None] >> np.arange(M)[None, :]) & 1).astype(float)
        ones = A.sum(axis=1)
        w = p ** ones * (1.0 - p) ** (M - ones)
        keep = w > 0
        return A[keep], w[keep]
    if rng is None:
        raise ValueError(f"M={M} exceeds the enumeration limit {limit}; pass rng for sampling")
    A = (rng.random((n_samples, M)) < p).astype(float)
    return A, np.full(n_samples, 1.0 / n_samples)
