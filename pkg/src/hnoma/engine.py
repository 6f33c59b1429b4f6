"""Monte-Carlo orchestration: per-trial pipelines, aggregation and sweeps."""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import List, Optional

import numpy as np

from . import embb_dl, embb_ul, fronthaul, urllc
from .channel import draw_frame, sample_urllc_gains, trial_streams
from .errors import InfeasibleBudgetError, InvalidParameterError
from .model import SystemConfig, Topology, build_topology
from .schemes import SchemeConfig, as_scheme

WORKERS_ENV = "HNOMA_WORKERS"
SWEEP_AXES = ("a_U", "C", "gamma", "L_U", "P_U")

FLAG_NONE = "none"
FLAG_BUDGET = "budget"
FLAG_UNRESOLVED = "urllc-unresolved"
FLAG_FRONTHAUL = "fronthaul"


@dataclass(frozen=True)
class Scenario:
    system: SystemConfig = field(default_factory=SystemConfig)
    scheme: SchemeConfig = field(default_factory=lambda: SchemeConfig("ul", "oma"))
    n_trials: int = 500
    seed: int = 0
    workers: int = 1
    # URLLC outage samples per cell are capped; beyond it eps_D is unresolvable
    max_urllc_samples: int = 1_000_000
    tin_minislots: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "scheme", as_scheme(self.scheme))
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise InvalidParameterError(f"n_trials={self.n_trials!r}: must be an integer >= 1")
        if self.seed < 0:
            raise InvalidParameterError(f"seed={self.seed!r}: must be >= 0")


@dataclass
class TrialResult:
    embb_rate: float
    sigma2: np.ndarray        # (M,), NaN when no fronthaul is used
    urllc_se: np.ndarray      # (K, M) frame spectral efficiencies


@dataclass
class RateReport:
    scheme: str
    direction: str
    embb_rate: float
    embb_stderr: float
    urllc_rate: float
    urllc_stderr: float
    eps_D: float
    L_U: int
    infeasible_flag: str
    n_trials: int
    seed: int
    n_urllc_samples: int = 0
    sigma2_mean: float = float("nan")
    sigma2_std: float = float("nan")
    axis: str = ""
    axis_value: float = float("nan")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RateReport":
        return cls(**data)


def resolve_workers(requested: int) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            requested = int(env)
        except ValueError:
            raise InvalidParameterError(f"{WORKERS_ENV}={env!r}: must be an integer") from None
    return max(1, int(requested))


def embb_rate_for_draw(scheme: SchemeConfig, config: SystemConfig, draw, eps_D: float,
                       rng=None, tin_minislots=None):
    """eMBB per-cell sum-rate and quantization noise for one frame."""
    H = draw.H
    M = H.shape[1]
    none = np.full(M, np.nan)
    s = scheme.strategy
    if scheme.direction == "ul":
        if s == "oma":
            if config.L_U == 1:
                return 0.0, none
            q = fronthaul.ul_oma_noise(H, config.P_B, config.C, config.L_U)
            return embb_ul.rate_ul_oma(H, q.sigma2, config.P_B, config.L_U), q.sigma2
        if s == "tin":
            G = draw.G if tin_minislots is None else draw.G[:tin_minislots]
            q = fronthaul.ul_tin_noise(H, G, config.P_B, config.P_U, config.a_U, config.C)
            return embb_ul.rate_ul_tin(H, G, q.sigma2, config.P_B, config.P_U, config.a_U, rng=rng), q.sigma2
        erase = config.a_U if s == "punct" else config.a_U * eps_D
        if erase >= 1.0:
            return 0.0, none
        q = fronthaul.ul_punct_noise(H, config.P_B, config.C, erase, config.n_F, config.l_T, config.l_F)
        return embb_ul.rate_ul_punct(H, q.sigma2, config.P_B, erase, rng=rng), q.sigma2

    if s == "oma":
        if config.L_U == 1:
            return 0.0, none
        prec = embb_dl.design_precoder(H, config.P, config.C, 1.0 - 1.0 / config.L_U)
        return embb_dl.rate_dl_oma(H, prec, config.L_U), prec.sigma2
    prec = embb_dl.design_precoder(H, config.P, config.C, 1.0)
    if s == "punct":
        return embb_dl.rate_dl_punct(H, prec, config.P, config.a_U, rng=rng), prec.sigma2
    return embb_dl.rate_dl_superpos(H, prec, config.P, config.P_U, config.a_U, rng=rng), prec.sigma2


def urllc_samples_for_draw(scheme: SchemeConfig, config: SystemConfig, topology: Topology,
                           H, n_samples: int, rng) -> np.ndarray:
    """Frame spectral efficiencies (n_samples, M) of fresh URLLC mini-slots."""
    M = topology.M
    if n_samples == 0:
        return np.empty((0, M))
    g2 = np.abs(sample_urllc_gains(topology, config.n_F, n_samples, rng)) ** 2   # (K, n_F, M)
    interference = config.P_B * (np.abs(H) ** 2).sum(axis=2)                       # (n_F, M)
    sinr = urllc.sinr_from_gains(scheme, g2, config, interference)
    return urllc.spectral_efficiency(sinr, axis=1)


def simulate_trial(scenario: Scenario, topology: Topology, trial: int, eps_D: float,
                   urllc_per_trial: int) -> TrialResult:
    config = scenario.system
    streams = trial_streams(scenario.seed, trial)
    draw = draw_frame(topology, config, streams)
    rate, sigma2 = embb_rate_for_draw(scenario.scheme, config, draw, eps_D,
                                      rng=streams["activation"], tin_minislots=scenario.tin_minislots)
    se = urllc_samples_for_draw(scenario.scheme, config, topology, draw.H, urllc_per_trial,
                                streams["urllc_samples"])
    return TrialResult(embb_rate=rate, sigma2=sigma2, urllc_se=se)


def _trial_chunk(args):
    scenario, topology, trials, eps_D, per_trial = args
    return [simulate_trial(scenario, topology, t, eps_D, per_trial) for t in trials]


def _plan(scenario: Scenario):
    """Error budget, flag and per-trial URLLC sample count."""
    try:
        budget = urllc.error_budget(scenario.scheme, scenario.system)
    except InfeasibleBudgetError:
        return None, FLAG_BUDGET, 0
    need = urllc.required_samples(budget.eps_D)
    if need > scenario.max_urllc_samples:
        return budget, FLAG_UNRESOLVED, 0
    return budget, FLAG_NONE, math.ceil(need / scenario.n_trials)


def run_trials(scenario: Scenario) -> List[TrialResult]:
    """Per-trial results in trial order, independent of the worker count."""
    topology = build_topology(scenario.system, scenario.scheme.direction)
    budget, _, per_trial = _plan(scenario)
    eps_D = budget.eps_D if budget is not None else scenario.system.eps_U
    workers = min(resolve_workers(scenario.workers), scenario.n_trials)
    trials = list(range(scenario.n_trials))
    if workers == 1:
        return _trial_chunk((scenario, topology, trials, eps_D, per_trial))
    chunks = [trials[i::workers] for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_trial_chunk, [(scenario, topology, c, eps_D, per_trial) for c in chunks]))
    out = [None] * scenario.n_trials
    for chunk, part in zip(chunks, parts):
        for t, res in zip(chunk, part):
            out[t] = res
    return out


def summarize(scenario: Scenario, results: List[TrialResult]) -> RateReport:
    budget, flag, _ = _plan(scenario)
    N = len(results)
    embb = np.array([r.embb_rate for r in results])
    stderr = float(embb.std(ddof=1) / math.sqrt(N)) if N > 1 else float("nan")
    sig = np.concatenate([r.sigma2 for r in results])
    sig = sig[np.isfinite(sig)]

    urllc_rate, urllc_se, n_samples = 0.0, 0.0, 0
    if flag == FLAG_NONE:
        pooled = np.concatenate([r.urllc_se for r in results], axis=0)    # (K_total, M)
        n_samples = pooled.shape[0]
        rates = [urllc.outage_capacity(pooled[:, k], budget.eps_D) for k in range(pooled.shape[1])]
        errs = [urllc.outage_capacity_stderr(pooled[:, k], budget.eps_D) for k in range(pooled.shape[1])]
        urllc_rate = float(np.mean(rates))
        urllc_se = float(math.sqrt(sum(e * e for e in errs)) / len(errs))

    scheme = scenario.scheme
    return RateReport(
        scheme=scheme.name, direction=scheme.direction,
        embb_rate=float(embb.mean()), embb_stderr=stderr,
        urllc_rate=urllc_rate, urllc_stderr=urllc_se,
        eps_D=float(budget.eps_D) if budget is not None else float("nan"),
        L_U=int(scenario.system.L_U) if scheme.orthogonal else 1,
        infeasible_flag=flag, n_trials=N, seed=int(scenario.seed),
        n_urllc_samples=int(n_samples),
        sigma2_mean=float(sig.mean()) if sig.size else float("nan"),
        sigma2_std=float(sig.std()) if sig.size else float("nan"),
    )


def run_experiment(scenario: Scenario) -> RateReport:
    """Average eMBB rate and URLLC outage capacity for one scheme.

    Budget infeasibility only zeroes the URLLC rate (flag ``budget``);
    an infeasible fronthaul propagates as
    :class:`~hnoma.errors.InfeasibleFronthaulError`.
    """
    return summarize(scenario, run_trials(scenario))


def with_axis(scenario: Scenario, axis: str, value) -> Scenario:
    if axis not in SWEEP_AXES:
        raise InvalidParameterError(f"unknown sweep axis {axis!r}; valid axes: {', '.join(SWEEP_AXES)}")
    if axis == "L_U":
        if int(value) != value:
            raise InvalidParameterError(f"L_U={value!r}: must be an integer >= 1")
        value = int(value)
    return replace(scenario, system=replace(scenario.system, **{axis: value}))


def sweep(base: Scenario, axis: str, values) -> List[RateReport]:
    """One report per axis value, all on the same seed (common random numbers)."""
    if axis not in SWEEP_AXES:
        raise InvalidParameterError(f"unknown sweep axis {axis!r}; valid axes: {', '.join(SWEEP_AXES)}")
    reports = []
    for value in values:
        report = run_experiment(with_axis(base, axis, value))
        report.axis, report.axis_value = axis, float(value)
        reports.append(report)
    return reports
