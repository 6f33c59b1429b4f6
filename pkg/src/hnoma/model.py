"""Cell geometry, system parameters and path-loss calibration.

Powers are linear (mW) with unit noise variance; only their ratios and the
SNR calibration targets matter.  All logarithms elsewhere are base 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidParameterError


def db2lin(x_db):
    if np.ndim(x_db):
        return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)
    return 10.0 ** (float(x_db) / 10.0)


def lin2db(x):
    return 10.0 * np.log10(x)


@dataclass(frozen=True)
class SystemConfig:
    """Static parameters of the multi-cell network.

    Defaults reproduce the evaluation setup: four cells of radius 2 km,
    eMBB users on a ring of radius ``r*sin(pi/3)``, URLLC users at 0.1 km.
    """

    M: int = 4
    r: float = 2.0
    d_B: Optional[float] = None
    d_U: float = 0.1
    gamma: float = 3.0
    n_F: int = 4
    n_F_B: int = 1
    n_T: int = 8
    l_F: int = 12
    l_T: int = 14
    C: float = 2.0
    eps_U: float = 1e-3
    a_U: float = 0.5e-3
    L_U: int = 2
    P_B: float = field(default_factory=lambda: db2lin(6.4))
    P_U: float = field(default_factory=lambda: db2lin(23.0))
    P: float = field(default_factory=lambda: db2lin(24.77))
    snr_embb_dB: float = 3.0
    snr_urllc_dB: float = 10.0
    # c_U is calibrated against this URLLC power in both directions
    urllc_ref_power: float = field(default_factory=lambda: db2lin(23.0))

    def __post_init__(self):
        if self.d_B is None:
            object.__setattr__(self, "d_B", self.r * math.sin(math.pi / 3))
        self.validate()

    def validate(self):
        def need(cond, name, constraint):
            if not cond:
                raise InvalidParameterError(f"{name}={getattr(self, name)!r}: must satisfy {constraint}")

        need(int(self.M) == self.M and self.M >= 1, "M", "integer >= 1")
        for name in ("r", "d_B", "d_U", "C", "P_B", "P_U", "P", "urllc_ref_power"):
            need(getattr(self, name) > 0, name, "> 0")
        need(self.gamma >= 0, "gamma", ">= 0")
        for name in ("n_F", "n_F_B", "n_T", "l_F", "l_T", "L_U"):
            value = getattr(self, name)
            need(int(value) == value and value >= 1, name, "integer >= 1")
        need(self.n_F // self.n_F_B >= 1, "n_F_B", "floor(n_F/n_F_B) >= 1")
        need(0.0 <= self.a_U <= 1.0, "a_U", "0 <= a_U <= 1")
        need(0.0 < self.eps_U < 1.0, "eps_U", "0 < eps_U < 1")
        need(self.P_U <= self.P, "P_U", "P_U <= P")

    @property
    def users_per_cell(self) -> int:
        return self.n_F // self.n_F_B

    @property
    def delta(self) -> float:
        """Power share left to eMBB when an EN superposes a URLLC packet."""
        return 1.0 - self.P_U / self.P


@dataclass(frozen=True)
class Topology:
    en_positions: np.ndarray      # (M, 2) km
    embb_positions: np.ndarray    # (M, U, 2) km
    alpha2: np.ndarray            # (M, M*U): EN i <- user u of cell j at column j*U + u
    beta2: np.ndarray             # (M,)
    schedule: np.ndarray          # (n_F,) user index served on each channel

    @property
    def M(self) -> int:
        return self.en_positions.shape[0]

    @property
    def users_per_cell(self) -> int:
        return self.embb_positions.shape[1]

    def scheduled_alpha2(self) -> np.ndarray:
        """Per-channel link variances, shape (n_F, M, M), entry (f, k, j)."""
        U = self.users_per_cell
        cols = np.arange(self.M)[None, :] * U + self.schedule[:, None]   # (n_F, M)
        return self.alpha2[:, cols].transpose(1, 0, 2)


def calibrate_pathloss(snr_target: float, power: float) -> float:
    """Path-loss constant giving ``snr_target`` at the reference distance."""
    if not snr_target > 0 or not power > 0:
        raise InvalidParameterError(f"snr_target and power must be > 0, got {snr_target}, {power}")
    return snr_target / power


def pathloss_gain(c, d_ref, d, gamma):
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0) or not d_ref > 0:
        raise InvalidParameterError("distances must be > 0")
    return c * (d_ref / d) ** gamma


def grid_positions(M: int, spacing: float) -> np.ndarray:
    cols = math.ceil(math.sqrt(M))
    k = np.arange(M)
    return np.stack([spacing * (k % cols), spacing * (k // cols)], axis=1).astype(float)


def build_topology(config: SystemConfig, direction: str = "ul") -> Topology:
    """Place ENs and users and fill the link variances.

    The eMBB calibration power is ``P_B`` in the uplink and ``P`` in the
    downlink; the URLLC constant uses ``urllc_ref_power`` in both.
    """
    if direction not in ("ul", "dl"):
        raise InvalidParameterError(f"direction must be 'ul' or 'dl', got {direction!r}")
    M, U = config.M, config.users_per_cell
    en = grid_positions(M, 2.0 * config.r)
    angles = 2.0 * np.pi * np.arange(U) / U
    ring = config.d_B * np.stack([np.cos(angles), np.sin(angles)], axis=1)   # (U, 2)
    users = en[:, None, :] + ring[None, :, :]                                # (M, U, 2)

    power = config.P_B if direction == "ul" else config.P
    c_B = calibrate_pathloss(db2lin(config.snr_embb_dB), power)
    c_U = calibrate_pathloss(db2lin(config.snr_urllc_dB), config.urllc_ref_power)

    flat = users.reshape(M * U, 2)
    dist = np.linalg.norm(en[:, None, :] - flat[None, :, :], axis=2)
    alpha2 = pathloss_gain(c_B, config.d_B, dist, config.gamma)
    # own-cell users sit exactly on the reference ring
    for j in range(M):
        alpha2[j, j * U:(j + 1) * U] = c_B
    beta2 = np.full(M, float(pathloss_gain(c_U, config.d_U, config.d_U, config.gamma)))

    schedule = np.minimum(np.arange(config.n_F) // config.n_F_B, U - 1)
    return Topology(en_positions=en, embb_positions=users, alpha2=alpha2, beta2=beta2, schedule=schedule)
