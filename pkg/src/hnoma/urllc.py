"""URLLC error budgets, per-scheme SINR and empirical outage capacity."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleBudgetError, InsufficientSamplesError, InvalidParameterError
from .schemes import as_scheme

# tail resolution: at least this many samples per unit of eps_D
MIN_TAIL_SAMPLES = 100


@dataclass(frozen=True)
class ErrorBudget:
    """Split of the reliability target between access loss and decoding.

    ``eps_U = p_access + decode_weight * eps_D``.
    """

    eps_U: float
    eps_D: float
    p_access: float
    decode_weight: float
    L_U: int = 1

    def recombined(self) -> float:
        return self.p_access + self.decode_weight * self.eps_D


def _binom_pmf(L_U: int, a_U: float) -> list:
    n_max = L_U - 1
    return [math.comb(n_max, n) * a_U ** n * (1.0 - a_U) ** (n_max - n) for n in range(n_max + 1)]


def _check(L_U, a_U, eps_U):
    if int(L_U) != L_U or L_U < 1:
        raise InvalidParameterError(f"L_U={L_U!r}: must be an integer >= 1")
    if not 0.0 <= a_U <= 1.0:
        raise InvalidParameterError(f"a_U={a_U!r}: must satisfy 0 <= a_U <= 1")
    if not 0.0 < eps_U < 1.0:
        raise InvalidParameterError(f"eps_U={eps_U!r}: must satisfy 0 < eps_U < 1")


def _finish(eps_U, p_access, weight, L_U):
    if p_access >= eps_U:
        raise InfeasibleBudgetError(
            f"access loss {p_access:.6g} >= eps_U={eps_U:g} (L_U={L_U})", p_access=p_access, eps_U=eps_U)
    return ErrorBudget(eps_U=eps_U, eps_D=(eps_U - p_access) / weight,
                       p_access=p_access, decode_weight=weight, L_U=int(L_U))


def collision_budget_ul(L_U: int, a_U: float, eps_U: float) -> ErrorBudget:
    """Uplink H-OMA: every packet sharing an opportunity with another is lost."""
    _check(L_U, a_U, eps_U)
    p = _binom_pmf(int(L_U), a_U)
    return _finish(eps_U, math.fsum(p[1:]), p[0], L_U)


def blockage_budget_dl(L_U: int, a_U: float, eps_U: float) -> ErrorBudget:
    """Downlink H-OMA: the EN serves one queued packet chosen uniformly."""
    _check(L_U, a_U, eps_U)
    p = _binom_pmf(int(L_U), a_U)
    p_access = math.fsum(pn * n / (n + 1) for n, pn in enumerate(p) if n >= 1)
    weight = math.fsum(pn / (n + 1) for n, pn in enumerate(p))
    return _finish(eps_U, p_access, weight, L_U)


def nonorthogonal_budget(eps_U: float) -> ErrorBudget:
    """H-NOMA has no collisions or blockages: the whole target goes to decoding."""
    _check(1, 0.0, eps_U)
    return ErrorBudget(eps_U=eps_U, eps_D=eps_U, p_access=0.0, decode_weight=1.0, L_U=1)


def error_budget(scheme, config) -> ErrorBudget:
    scheme = as_scheme(scheme)
    if not scheme.orthogonal:
        return nonorthogonal_budget(config.eps_U)
    if scheme.direction == "ul":
        return collision_budget_ul(config.L_U, config.a_U, config.eps_U)
    return blockage_budget_dl(config.L_U, config.a_U, config.eps_U)


def sinr_from_gains(scheme, g2, config, embb_interference=None):
    """Per-channel URLLC SINR from squared gains ``|g|^2``.

    ``embb_interference`` is ``sum_j |h_{k,j}|^2 P_B`` broadcast against
    ``g2``; it is only used by the uplink H-NOMA schemes.
    """
    scheme = as_scheme(scheme)
    g2 = np.asarray(g2, dtype=float)
    if scheme.direction == "ul":
        if scheme.orthogonal:
            return g2 * config.P_U
        if embb_interference is None:
            raise InvalidParameterError("uplink H-NOMA SINR needs the eMBB interference power")
        return g2 * config.P_U / (1.0 + embb_interference)
    if scheme.strategy == "superpos":
        return g2 * config.P_U / (1.0 + g2 * (config.P - config.P_U))
    return g2 * config.P


def urllc_sinr(scheme, draw, k: int, t: int, config) -> np.ndarray:
    """SINR on each frequency channel for the URLLC user of cell ``k`` at mini-slot ``t``."""
    g2 = np.abs(draw.G[t, :, k]) ** 2
    interference = (np.abs(draw.H[:, k, :]) ** 2).sum(axis=1) * config.P_B
    return sinr_from_gains(scheme, g2, config, interference)


def spectral_efficiency(sinr, axis=-1):
    """Frame spectral efficiency, the channel-average of ``log2(1 + S)``."""
    return np.log2(1.0 + np.asarray(sinr)).mean(axis=axis)


def required_samples(eps_D: float) -> int:
    return math.ceil(MIN_TAIL_SAMPLES / eps_D - 1e-9)


def _validate(samples, eps_D, check_tail):
    x = np.asarray(samples, dtype=float).ravel()
    if not 0.0 < eps_D < 1.0:
        raise InvalidParameterError(f"eps_D={eps_D!r}: must satisfy 0 < eps_D < 1")
    need = required_samples(eps_D)
    if check_tail and x.size < need:
        raise InsufficientSamplesError(
            f"{x.size} samples cannot resolve eps_D={eps_D:g}; need {need}", required=need, available=x.size)
    return x


def outage_capacity(se_samples, eps_D: float, check_tail: bool = True) -> float:
    """Largest rate whose empirical outage does not exceed ``eps_D``.

    Returns the ``floor(eps_D*N)``-th smallest sample.  Fewer than
    ``100/eps_D`` samples raise :class:`InsufficientSamplesError` unless
    ``check_tail`` is off, in which case an empty lower tail
    (``eps_D < 1/N``) gives 0.
    """
    x = _validate(se_samples, eps_D, check_tail)
    idx = math.floor(eps_D * x.size + 1e-9)
    if idx == 0:
        return 0.0
    return float(np.partition(x, idx - 1)[idx - 1])


def outage_capacity_stderr(se_samples, eps_D: float, check_tail: bool = True) -> float:
    """Order-statistic standard error of :func:`outage_capacity`.

    Half the spread between the order statistics one binomial standard
    deviation either side of the quantile index.
    """
    x = _validate(se_samples, eps_D, check_tail)
    N = x.size
    idx = math.floor(eps_D * N + 1e-9)
    if idx == 0:
        return 0.0
    spread = math.sqrt(N * eps_D * (1.0 - eps_D))
    lo = max(1, int(math.floor(idx - spread)))
    hi = min(N, int(math.ceil(idx + spread)))
    part = np.partition(x, [lo - 1, hi - 1])
    return float(part[hi - 1] - part[lo - 1]) / 2.0
