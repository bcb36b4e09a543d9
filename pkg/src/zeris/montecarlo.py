"""Event-level Monte Carlo simulator for the wireless-powered zeRIS link.

Each frame draws the Rayleigh channels, applies the mode's phase design to
the raw complex coefficients and evaluates three events from first
principles:

* energy outage: the surface harvests less than ``Q``,
  equivalently ``beta_pr |sum h_pr|^2 < (N Pe + Pc) / Pt``;
* data outage: ``SNR_a < eps``;
* interception: ``SNR_e >= eps``.

Nothing in here reuses the statistical simplifications of
:mod:`zeris.metrics`, so the two modules can check each other.

Trials are processed in fixed-size blocks. Block ``b`` of stream ``s``
always draws from ``RngState(seed, s).substream(b)``, so results depend only
on ``(seed, stream_id, n_trials)`` and blocks can be evaluated in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from .channels import ChannelBatch, ChannelRealization, RngState, sample_batch
from .metrics import Mode
from .params import SystemParams, derive_constants

__all__ = [
    "FrameOutcome",
    "MetricEstimate",
    "EventCounts",
    "CascadeGains",
    "phase_design",
    "cascade_gains",
    "simulate_frame",
    "simulate_batch",
    "count_events",
    "estimate",
    "estimate_many",
    "block_size",
]

_BLOCK_ELEMENTS = 1_000_000  # trials * N per block; bounds memory to ~100 MB


def block_size(N: int) -> int:
    """Trials per block for a surface of `N` elements (depends on N only)."""
    return max(1000, _BLOCK_ELEMENTS // N)


@dataclass(frozen=True)
class FrameOutcome:
    energy_outage: bool
    data_outage: bool
    intercepted: bool

    @property
    def joint_outage(self) -> bool:
        return self.energy_outage or self.data_outage

    @property
    def joint_interception(self) -> bool:
        return (not self.energy_outage) and self.intercepted


@dataclass(frozen=True)
class MetricEstimate:
    value: float
    stderr: float
    n: int
    seed: int

    def interval(self, z: float = 3.0) -> tuple[float, float]:
        return self.value - z * self.stderr, self.value + z * self.stderr


@dataclass(frozen=True)
class EventCounts:
    """Integer tallies over `n` frames; adding two tallies merges their blocks."""

    n: int = 0
    energy_outage: int = 0
    data_outage: int = 0
    intercepted: int = 0
    energy_and_data: int = 0
    jop: int = 0
    jip: int = 0
    jop_and_jip: int = 0

    def __add__(self, other: "EventCounts") -> "EventCounts":
        return EventCounts(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def combination_frequencies(self) -> dict[tuple[bool, bool], float]:
        """Empirical frequencies of the four (energy outage, data outage) combinations."""
        both = self.energy_and_data
        e_only = self.energy_outage - both
        d_only = self.data_outage - both
        neither = self.n - both - e_only - d_only
        return {(True, True): both / self.n, (True, False): e_only / self.n,
                (False, True): d_only / self.n, (False, False): neither / self.n}

    def estimates(self, params: SystemParams, seed: int) -> dict[str, MetricEstimate]:
        n = self.n
        if n == 0:
            raise ValueError("no trials were counted")
        p_jop, p_jip = self.jop / n, self.jip / n
        p_both = self.jop_and_jip / n
        out = {
            "jop": MetricEstimate(p_jop, math.sqrt(p_jop * (1 - p_jop) / n), n, seed),
            "jip": MetricEstimate(p_jip, math.sqrt(p_jip * (1 - p_jip) / n), n, seed),
        }
        # per-frame score 1 - I_jop - I_jip; its mean is the SEE margin
        margin = 1.0 - p_jop - p_jip
        second = 1.0 - p_jop - p_jip + 2.0 * p_both
        # per-frame score (I_jop + I_jip) / 2
        mean_half = 0.5 * (p_jop + p_jip)
        second_half = 0.25 * (p_jop + p_jip + 2.0 * p_both)
        out["normalized_jiop"] = MetricEstimate(mean_half, math.sqrt(max(second_half - mean_half**2, 0.0) / n), n, seed)
        scale = params.R / params.Ps
        out["see"] = MetricEstimate(scale * max(margin, 0.0),
                                    scale * math.sqrt(max(second - margin**2, 0.0) / n), n, seed)
        return out


@dataclass(frozen=True)
class CascadeGains:
    """Power-free small-scale quantities of a batch of frames under one phase design.

    ``info = |sum h_ur e^{j phi} h_ra|^2``, ``leak = |sum h_ur e^{j phi} h_re|^2`` and
    ``jam = |sum h_jr e^{j phi} h_re|^2``; ``jam`` is zero for benchmark-I.
    """

    user: np.ndarray  # |h_pu|^2
    jammer: np.ndarray  # |h_pj|^2
    harvest: np.ndarray  # |sum h_pr|^2
    info: np.ndarray
    leak: np.ndarray
    jam: np.ndarray


def phase_design(mode, batch: ChannelBatch, N1: int | None = None,
                 rng: np.random.Generator | None = None) -> np.ndarray:
    """Reflection phases (shape ``(n, N)``) chosen by `mode` for every frame of `batch`."""
    mode = Mode.parse(mode)
    align_ap = -(np.angle(batch.h_ur) + np.angle(batch.h_ra))
    if mode in (Mode.I, Mode.BENCH_I):
        return align_ap
    align_jam = -(np.angle(batch.h_jr) + np.angle(batch.h_re))
    if mode is Mode.II:
        return align_jam
    if mode is Mode.III:
        if N1 is None:
            raise ValueError("mode III needs the split N1")
        return np.concatenate([align_ap[:, :N1], align_jam[:, N1:]], axis=1)
    if rng is None:
        raise ValueError("benchmark-II draws random phases and needs an rng")
    return rng.uniform(-np.pi, np.pi, size=batch.h_ur.shape)


def cascade_gains(mode, batch: ChannelBatch, N1: int | None = None,
                  rng: np.random.Generator | None = None) -> CascadeGains:
    mode = Mode.parse(mode)
    rot = np.exp(1j * phase_design(mode, batch, N1, rng))
    user_side = batch.h_ur * rot
    info = np.abs(np.sum(user_side * batch.h_ra, axis=1)) ** 2
    leak = np.abs(np.sum(user_side * batch.h_re, axis=1)) ** 2
    if mode is Mode.BENCH_I:
        jam = np.zeros_like(info)
    else:
        jam = np.abs(np.sum(batch.h_jr * rot * batch.h_re, axis=1)) ** 2
    return CascadeGains(
        user=np.abs(batch.h_pu) ** 2,
        jammer=np.abs(batch.h_pj) ** 2,
        harvest=np.abs(np.sum(batch.h_pr, axis=1)) ** 2,
        info=info,
        leak=leak,
        jam=jam,
    )


def snrs(gains: CascadeGains, params: SystemParams) -> tuple[np.ndarray, np.ndarray]:
    """SNR at the AP and SINR at the eavesdropper for every frame."""
    c = derive_constants(params)
    p_user = c.Pt * c.beta_pu * gains.user
    p_jam = c.Pt * c.beta_pj * gains.jammer
    snr_a = p_user * c.beta_ura * gains.info / params.sigma2
    snr_e = p_user * c.beta_ure * gains.leak / (p_jam * c.beta_jre * gains.jam + params.sigma2)
    return snr_a, snr_e


def _events(gains: CascadeGains, params: SystemParams):
    c = derive_constants(params)
    snr_a, snr_e = snrs(gains, params)
    energy = c.beta_pr * gains.harvest < c.energy_threshold
    return energy, snr_a < c.epsilon, snr_e >= c.epsilon


def simulate_batch(mode, params: SystemParams, batch: ChannelBatch,
                   rng: np.random.Generator | None = None):
    """Boolean arrays ``(energy_outage, data_outage, intercepted)`` for every frame."""
    return _events(cascade_gains(mode, batch, params.N1, rng), params)


def simulate_frame(mode, params: SystemParams, realization: ChannelRealization,
                   rng: np.random.Generator | None = None) -> FrameOutcome:
    """Events of a single frame. Benchmark-II needs `rng` for its random phases."""
    if realization.N != params.N:
        raise ValueError(f"realization has N = {realization.N}, params expect {params.N}")
    batch = ChannelBatch(*(np.asarray(getattr(realization, f))[None, ...] for f in
                           ("h_pu", "h_pj", "h_pr", "h_ur", "h_jr", "h_ra", "h_re")))
    e, d, i = simulate_batch(mode, params, batch, rng)
    return FrameOutcome(bool(e[0]), bool(d[0]), bool(i[0]))


def count_events(energy: np.ndarray, data: np.ndarray, intercepted: np.ndarray) -> EventCounts:
    jop = energy | data
    jip = ~energy & intercepted
    return EventCounts(
        n=len(energy),
        energy_outage=int(energy.sum()),
        data_outage=int(data.sum()),
        intercepted=int(intercepted.sum()),
        energy_and_data=int((energy & data).sum()),
        jop=int(jop.sum()),
        jip=int(jip.sum()),
        jop_and_jip=int((jop & jip).sum()),
    )


def _check_shared(params_list: Sequence[SystemParams]) -> None:
    first = params_list[0]
    for p in params_list[1:]:
        if (p.N, p.N1) != (first.N, first.N1):
            raise ValueError("all parameter sets in one shared-batch run need the same N and N1")


def _run_block(modes: Sequence[Mode], params_list: Sequence[SystemParams], state: RngState,
               n: int, los: bool) -> dict[tuple[Mode, int], EventCounts]:
    N, N1 = params_list[0].N, params_list[0].N1
    batch = sample_batch(N, n, state, los=los)
    out = {}
    for mode in modes:
        # benchmark-II phases come from their own child stream so the channels stay shared
        phase_rng = state.substream(0).generator() if mode is Mode.BENCH_II else None
        gains = cascade_gains(mode, batch, N1, phase_rng)
        for j, p in enumerate(params_list):
            out[(mode, j)] = count_events(*_events(gains, p))
    return out


def estimate_many(modes: Iterable, params_list: Sequence[SystemParams], n_trials: int, seed: int = 0,
                  stream_id: int = 0, los: bool = False, workers: int = 1,
                  ) -> dict[tuple[Mode, int], dict[str, MetricEstimate]]:
    """Estimate JOP/JIP/SEE for several modes and operating points on shared channel draws.

    Every operating point in `params_list` sees the same frames, which makes
    sweeps over ``Ps`` or ``tau`` cheap and their curves smooth. Keys of the
    result are ``(mode, index into params_list)``.
    """
    modes = [Mode.parse(m) for m in modes]
    params_list = list(params_list)
    if not params_list:
        raise ValueError("params_list is empty")
    if n_trials < 1000:
        raise ValueError(f"n_trials must be >= 1000, got {n_trials}")
    _check_shared(params_list)

    size = block_size(params_list[0].N)
    root = RngState(seed, stream_id)
    blocks = [(b, min(size, n_trials - b * size)) for b in range(-(-n_trials // size))]

    def job(block):
        b, n = block
        return _run_block(modes, params_list, root.substream(b), n, los)

    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            parts = list(pool.map(_run_block, [modes] * len(blocks), [params_list] * len(blocks),
                                  [root.substream(b) for b, _ in blocks], [n for _, n in blocks],
                                  [los] * len(blocks)))
    else:
        parts = [job(b) for b in blocks]

    totals: dict[tuple[Mode, int], EventCounts] = {}
    for part in parts:
        for key, counts in part.items():
            totals[key] = totals.get(key, EventCounts()) + counts
    return {(m, j): totals[(m, j)].estimates(params_list[j], seed) for m in modes for j in range(len(params_list))}


def estimate(mode, params: SystemParams, n_trials: int, seed: int = 0, stream_id: int = 0,
             los: bool = False) -> dict[str, MetricEstimate]:
    """Monte Carlo JOP, JIP and SEE of one mode at one operating point."""
    mode = Mode.parse(mode)
    return estimate_many([mode], [params], n_trials, seed, stream_id, los)[(mode, 0)]
