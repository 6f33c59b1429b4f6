"""Rayleigh fading and URLLC activation sampling.

Every Monte-Carlo trial owns its RNG streams, derived from ``(seed, trial)``
through :class:`numpy.random.SeedSequence`, so draws do not depend on how
trials are distributed over workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .model import Topology

STREAMS = ("embb", "urllc", "activation", "urllc_samples")


@dataclass(frozen=True)
class ChannelDraw:
    H: np.ndarray   # (n_F, M, M) complex, H[f, k, j] = h^f_{k,j}
    G: np.ndarray   # (n_T, n_F, M) complex, G[t, f, k] = g^f_k(t)
    A: np.ndarray   # (M, n_T) activation indicators


def trial_streams(seed: int, trial: int) -> dict:
    """Independent generators for one trial, keyed by purpose."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial),))
    return {name: np.random.Generator(np.random.PCG64(child))
            for name, child in zip(STREAMS, ss.spawn(len(STREAMS)))}


def unit_cn(rng: np.random.Generator, shape) -> np.ndarray:
    """CN(0, 1) samples from two independent N(0, 1/2) components."""
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


def sample_embb_channels(topology: Topology, n_F: int, rng: np.random.Generator) -> np.ndarray:
    a2 = topology.scheduled_alpha2()
    if a2.shape[0] != n_F:
        raise InvalidParameterError(f"topology schedules {a2.shape[0]} channels, asked for {n_F}")
    return unit_cn(rng, a2.shape) * np.sqrt(a2)


def sample_urllc_gains(topology: Topology, n_F: int, n_T: int, rng: np.random.Generator) -> np.ndarray:
    return unit_cn(rng, (n_T, n_F, topology.M)) * np.sqrt(topology.beta2)


def sample_activations(a_U: float, M: int, n_T: int, rng: np.random.Generator) -> np.ndarray:
    if not 0.0 <= a_U <= 1.0:
        raise InvalidParameterError(f"a_U={a_U!r}: must satisfy 0 <= a_U <= 1")
    return (rng.random((M, n_T)) < a_U).astype(np.int8)


def draw_frame(topology: Topology, config, streams: dict) -> ChannelDraw:
    H = sample_embb_channels(topology, config.n_F, streams["embb"])
    G = sample_urllc_gains(topology, config.n_F, config.n_T, streams["urllc"])
    A = sample_activations(config.a_U, topology.M, config.n_T, streams["activation"])
    return ChannelDraw(H=H, G=G, A=A)
