"""Fronthaul quantization noise from the per-EN rate-distortion condition.

Every scheme reduces to the same scalar equation per EN,

    prefactor * sum_s w_s log2(1 + T_s / sigma2) = C_eff,

whose left side is strictly decreasing in ``sigma2``.  The weights ``w``
carry the channel average (and, for TIN, the activation expectation).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleFronthaulError, InvalidParameterError

LN2 = np.log(2.0)
BRACKET = (1e-12, 1e12)
RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class QuantNoise:
    sigma2: np.ndarray   # (M,)
    residual: float       # max |capacity - C_eff| over ENs


def binary_entropy(p) -> float:
    """Entropy in bits of a Bernoulli(p) variable, with 0 log 0 = 0."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"p={p!r}: must satisfy 0 <= p <= 1")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


def fronthaul_load(terms, sigma2, prefactor=1.0, weights=None):
    """Left side of the rate-distortion condition, per EN."""
    T, w = _normalize(terms, weights)
    s2 = np.asarray(sigma2, dtype=float)[..., None]
    return prefactor * (w * np.log1p(T / s2)).sum(axis=-1) / LN2


def _normalize(terms, weights):
    T = np.atleast_1d(np.asarray(terms, dtype=float))
    if weights is None:
        w = np.full(T.shape[-1], 1.0 / T.shape[-1])
    else:
        w = np.asarray(weights, dtype=float)
        w = w / w.sum(axis=-1, keepdims=True)
    return T, np.broadcast_to(w, T.shape)


def solve_quant_noise(terms, C_eff, prefactor=1.0, weights=None) -> QuantNoise:
    """Quantization noise power meeting the fronthaul budget ``C_eff``.

    ``terms`` has shape ``(M, S)`` (or ``(S,)`` for a single EN): the
    received/forwarded signal powers whose compression the fronthaul must
    carry.  Solved by bisection on ``log(sigma2)`` over a bracket that starts
    at [1e-12, 1e12] and widens geometrically until it straddles the root.
    """
    if not 0.0 < prefactor <= 1.0:
        raise InvalidParameterError(f"prefactor={prefactor!r}: must lie in (0, 1]")
    T, w = _normalize(terms, weights)
    if np.any(T < 0):
        raise InvalidParameterError("power terms must be >= 0")
    if np.any((w * T).sum(axis=-1) <= 0):
        raise InvalidParameterError("every EN needs a positive power term")
    c = np.broadcast_to(np.asarray(C_eff, dtype=float), T.shape[:-1]).copy()
    if np.any(c <= 0):
        raise InfeasibleFronthaulError(f"effective fronthaul budget {np.min(c):.6g} <= 0")

    def load(u):
        return prefactor * (w * np.log1p(T * np.exp(-u)[..., None])).sum(axis=-1) / LN2

    u_lo = np.full(c.shape, np.log(BRACKET[0]))
    u_hi = np.full(c.shape, np.log(BRACKET[1]))
    for _ in range(64):
        short = load(u_lo) <= c
        if not short.any():
            break
        u_lo = np.where(short, u_lo - np.log(1e6), u_lo)
    for _ in range(64):
        over = load(u_hi) >= c
        if not over.any():
            break
        u_hi = np.where(over, u_hi + np.log(1e6), u_hi)

    for _ in range(200):
        mid = 0.5 * (u_lo + u_hi)
        above = load(mid) > c
        u_lo = np.where(above, mid, u_lo)
        u_hi = np.where(above, u_hi, mid)
        if np.all(u_hi - u_lo < 1e-13):
            break
    u = 0.5 * (u_lo + u_hi)
    residual = float(np.max(np.abs(load(u) - c)))
    if residual > RESIDUAL_TOL:
        raise ArithmeticError(f"fronthaul bisection residual {residual:.3g} above {RESIDUAL_TOL}")
    return QuantNoise(sigma2=np.exp(u), residual=residual)


# scheme wiring ----------------------------------------------------------------

def ul_received_power(H, P_B):
    """``1 + sum_j |h_{k,j}|^2 P_B`` as an (M, n_F) array."""
    return (1.0 + P_B * (np.abs(H) ** 2).sum(axis=2)).T


def ul_oma_noise(H, P_B, C, L_U) -> QuantNoise:
    return solve_quant_noise(ul_received_power(H, P_B), C, prefactor=1.0 - 1.0 / L_U)


def ul_tin_noise(H, G, P_B, P_U, a_U, C) -> QuantNoise:
    """TIN: expectation over each EN's own activation, averaged over mini-slots.

    ``G`` has shape (n_T, n_F, M); pass a subset of mini-slots to bound cost.
    """
    base = ul_received_power(H, P_B)                      # (M, n_F)
    n_T = G.shape[0]
    boost = P_U * (np.abs(G) ** 2).transpose(2, 0, 1)     # (M, n_T, n_F)
    idle = np.broadcast_to(base[:, None, :], boost.shape)
    terms = np.concatenate([idle.reshape(len(base), -1), (idle + boost).reshape(len(base), -1)], axis=1)
    per = idle.shape[1] * idle.shape[2]
    weights = np.concatenate([np.full(per, 1.0 - a_U), np.full(per, a_U)])
    return solve_quant_noise(terms, C, weights=weights)


def punct_budget(C, erase_prob, n_F, l_T, l_F):
    """Per-symbol budget left after signalling the erased mini-slot pattern."""
    return C - binary_entropy(erase_prob) / (n_F * l_T * l_F)


def ul_punct_noise(H, P_B, C, erase_prob, n_F, l_T, l_F) -> QuantNoise:
    """Puncturing (``erase_prob = a_U``) or SIC (``erase_prob = a_U * eps_D``)."""
    if erase_prob >= 1.0:
        raise InfeasibleFronthaulError("every mini-slot is erased; nothing to forward")
    return solve_quant_noise(ul_received_power(H, P_B), punct_budget(C, erase_prob, n_F, l_T, l_F),
                             prefactor=1.0 - erase_prob)


def dl_noise(row_norms, C, prefactor=1.0) -> QuantNoise:
    """Downlink: ``row_norms`` is ``||v^f_(k)||^2`` with shape (n_F, M)."""
    return solve_quant_noise(np.asarray(row_norms).T, C, prefactor=prefactor)
