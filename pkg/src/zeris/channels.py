"""Seeded Rayleigh channel draws for the zeRIS link.

Every draw is tied to an :class:`RngState` (seed, stream_id). The pair is fed
to :class:`numpy.random.SeedSequence` as entropy plus spawn key, so distinct
stream ids give statistically independent substreams and the same pair always
replays the same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SystemParams

__all__ = ["RngState", "ChannelRealization", "ChannelBatch", "sample_realization", "sample_batch"]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngState:
    seed: int = 0
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed & _MASK64, spawn_key=(self.stream_id & _MASK64,))
        return np.random.Generator(np.random.PCG64(ss))

    def substream(self, index: int) -> "RngState":
        """Child stream for trial block `index` (deterministic, collision-free per parent)."""
        return RngState(self.seed, (self.stream_id << 20) + int(index) + 1)


def _cn(rng: np.random.Generator, shape) -> np.ndarray:
    # CN(0, 1): real and imaginary parts each N(0, 1/2)
    shape = (shape,) if isinstance(shape, (int, np.integer)) else tuple(shape)
    z = rng.standard_normal((*shape, 2))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


@dataclass(frozen=True)
class ChannelRealization:
    """One frame's small-scale fading: two scalars and five length-N vectors."""

    h_pu: complex
    h_pj: complex
    h_pr: np.ndarray
    h_ur: np.ndarray
    h_jr: np.ndarray
    h_ra: np.ndarray
    h_re: np.ndarray

    def __post_init__(self):
        n = len(self.h_pr)
        for name in ("h_ur", "h_jr", "h_ra", "h_re"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"{name} has length {len(getattr(self, name))}, expected {n}")

    @property
    def N(self) -> int:
        return len(self.h_pr)


@dataclass(frozen=True)
class ChannelBatch:
    """`n` independent frames stacked along axis 0 (vectors have shape (n, N))."""

    h_pu: np.ndarray
    h_pj: np.ndarray
    h_pr: np.ndarray
    h_ur: np.ndarray
    h_jr: np.ndarray
    h_ra: np.ndarray
    h_re: np.ndarray

    def __len__(self) -> int:
        return len(self.h_pu)

    def __getitem__(self, i: int) -> ChannelRealization:
        return ChannelRealization(*(getattr(self, f)[i] for f in _FIELDS))


_FIELDS = ("h_pu", "h_pj", "h_pr", "h_ur", "h_jr", "h_ra", "h_re")


def sample_batch(N: int, n: int, rng: RngState | np.random.Generator, los: bool = False) -> ChannelBatch:
    """Draw `n` frames for a surface of `N` elements.

    With ``los=True`` the PS->U and PS->J links have unit magnitude (uniform
    phase), which is the line-of-sight setting used for the large-N JIP limits.
    """
    gen = rng.generator() if isinstance(rng, RngState) else rng
    h_pu = _cn(gen, n)
    h_pj = _cn(gen, n)
    vecs = [_cn(gen, (n, N)) for _ in range(5)]
    if los:
        h_pu = np.exp(1j * np.angle(h_pu))
        h_pj = np.exp(1j * np.angle(h_pj))
    return ChannelBatch(h_pu, h_pj, *vecs)


def sample_realization(params: SystemParams, rng: RngState) -> ChannelRealization:
    return sample_batch(params.N, 1, rng)[0]
