"""Downlink C-RAN precoding under per-EN power and fronthaul limits, and eMBB rates.

The precoder is regularized zero-forcing with per-channel power scaling,
alternated with the fronthaul quantization-noise solve until every channel
meets its per-EN power limit.  It is a feasible design, not the sum-rate
optimum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .activations import activation_patterns
from .errors import PrecoderConvergenceError
from .fronthaul import dl_noise, fronthaul_load


@dataclass(frozen=True)
class Precoder:
    V: np.ndarray            # (n_F, M, M), column j beams to the cell-j user
    sigma2: np.ndarray       # (M,)
    power_slack: float       # min_{k,f} P - ||v^f_(k)||^2 - sigma2_k
    fronthaul_residual: float
    iterations: int
    time_share: float = 1.0

    def row_norms(self):
        """``||v^f_(k)||^2`` with shape (n_F, M)."""
        return (np.abs(self.V) ** 2).sum(axis=2)


def rzf_directions(H, P):
    n_F, M, _ = H.shape
    Hh = np.conj(np.swapaxes(H, -1, -2))
    return Hh @ np.linalg.inv(H @ Hh + (M / P) * np.eye(M))


def design_precoder(H, P, C, time_share_factor=1.0, max_iter=50, tol=1e-8) -> Precoder:
    """Feasible RZF precoder and matching quantization noise.

    Channel ``f`` uses ``sqrt(c_f)`` times the RZF directions.  Each round
    lifts every channel to its own power headroom given the current noise,
    re-solves the noise, and shrinks all channels by a common factor so the
    tightest ``(k, f)`` sits exactly at ``P``.  Because the noise scales with
    the row norms, that shrink keeps the fronthaul condition satisfied.
    """
    V0 = rzf_directions(H, P)
    r0 = (np.abs(V0) ** 2).sum(axis=2)                  # (n_F, M)

    def settle(c2):
        rows = c2[:, None] * r0
        s2 = dl_noise(rows, C, time_share_factor).sigma2
        shrink = P / (rows + s2[None, :]).max()
        return c2 * shrink, s2 * shrink

    c2, s2 = settle(1.0 / r0.max(axis=1))
    for it in range(1, max_iter + 1):
        rows = c2[:, None] * r0
        headroom = ((P - s2)[None, :] / rows).min(axis=1)
        c2_new, s2 = settle(c2 * headroom)
        change = np.max(np.abs(c2_new / c2 - 1.0))
        c2 = c2_new
        if change < tol:
            break
    else:
        raise PrecoderConvergenceError(
            f"precoder power split still moving by {change:.3g} after {max_iter} rounds",
            last_iterate=_certify(V0, c2, s2, P, C, time_share_factor, max_iter))
    return _certify(V0, c2, s2, P, C, time_share_factor, it)


def _certify(V0, c2, s2, P, C, time_share, iterations) -> Precoder:
    V = np.sqrt(c2)[:, None, None] * V0
    rows = (np.abs(V) ** 2).sum(axis=2)
    slack = float((P - rows - s2[None, :]).min())
    residual = float(np.max(np.abs(fronthaul_load(rows.T, s2, time_share) - C)))
    return Precoder(V=V, sigma2=s2, power_slack=slack, fronthaul_residual=residual,
                    iterations=iterations, time_share=time_share)


def _sinr_rate(H, V, amplitude, noise_power):
    """Mean over patterns of ``sum_{f,k} log2(1 + SINR)/(M n_F)``.

    ``amplitude`` (Q, M) scales what each EN forwards from the BBU;
    ``noise_power`` (Q, M) is the per-EN disturbance power seen through
    ``|h_{k,j}|^2`` (quantization noise plus any URLLC signal).
    """
    n_F, M, _ = H.shape
    S = np.einsum("fkl,ql,flj->qfkj", H, amplitude, V)
    S2 = np.abs(S) ** 2
    sig = np.diagonal(S2, axis1=2, axis2=3)              # (Q, n_F, M)
    leak = S2.sum(axis=3) - sig
    dist = 1.0 + np.einsum("fkj,qj->qfk", np.abs(H) ** 2, noise_power)
    return np.log2(1.0 + sig / (dist + leak)).sum(axis=(1, 2)) / (M * n_F)


def rate_dl_oma(H, precoder: Precoder, L_U):
    share = 1.0 - 1.0 / L_U
    if share == 0.0:
        return 0.0
    M = H.shape[1]
    ones = np.ones((1, M))
    return float(share * _sinr_rate(H, precoder.V, ones, precoder.sigma2[None, :])[0])


def rate_dl_punct(H, precoder: Precoder, P, a_U, rng=None, patterns=None):
    """ENs with a URLLC packet drop the eMBB signal and send URLLC at full power."""
    A, w = patterns if patterns is not None else activation_patterns(H.shape[1], a_U, rng=rng)
    noise = (1.0 - A) * precoder.sigma2[None, :] + A * P
    return float(w @ _sinr_rate(H, precoder.V, 1.0 - A, noise))


def rate_dl_superpos(H, precoder: Precoder, P, P_U, a_U, rng=None, patterns=None):
    """Active ENs superpose a URLLC packet of power ``P_U`` on the eMBB signal.

    The forwarded eMBB signal is scaled by ``I + A(Delta - I)`` with
    ``Delta = delta*I``, ``delta = 1 - P_U/P``, and quantization noise by
    ``W_j = 1 + A_j(delta - 1)``.  At ``P_U = P`` this is puncturing.
    """
    delta = 1.0 - P_U / P
    A, w = patterns if patterns is not None else activation_patterns(H.shape[1], a_U, rng=rng)
    shaping = 1.0 + A * (delta - 1.0)
    noise = shaping * precoder.sigma2[None, :] + A * P_U
    return float(w @ _sinr_rate(H, precoder.V, shaping, noise))
