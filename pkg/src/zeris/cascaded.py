"""Statistics of the cascaded surface channels.

A surface element contributes ``xi = |h_1| |h_2|``, the product of two
independent unit-power Rayleigh amplitudes. Elements phase-aligned to a
link add coherently; the rest arrive with uniform random phase. For a split
of ``n_same`` aligned and ``n_other`` random-phase elements the received
power gain is

    Delta = | sum_{aligned} xi + sum_{random} xi * exp(j*omega) |^2

whose first two moments are matched to a Gamma law. The pure coherent sum
``Z = sum xi`` over all N elements is matched separately (:func:`zed_params`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "GammaFit",
    "ZedParams",
    "XI_MOMENTS",
    "delta_moments",
    "delta_moments_printed",
    "delta_moments_termwise",
    "gamma_fit",
    "fit_delta",
    "zed_params",
    "gamma_pdf",
    "gamma_cdf",
]

PI = math.pi

# E{xi^k} for k = 1..4, xi the product of two independent unit-power Rayleigh amplitudes
XI_MOMENTS = (PI / 4.0, 1.0, 9.0 * PI / 16.0, 4.0)


@dataclass(frozen=True)
class GammaFit:
    k: float
    theta: float
    mean: float
    second_moment: float

    @property
    def variance(self) -> float:
        return self.second_moment - self.mean**2


@dataclass(frozen=True)
class ZedParams:
    v: float
    phi: float


def _check_counts(n_same: int, n_other: int) -> None:
    if n_same < 0 or n_other < 0:
        raise ValueError(f"element counts must be non-negative, got ({n_same}, {n_other})")
    if n_same + n_other < 1:
        raise ValueError("at least one element is required")


def delta_moments(n_same: int, n_other: int) -> tuple[float, float]:
    """First and second moments of Delta for `n_same` aligned, `n_other` random-phase elements.

    Writing ``a`` for the coherent (real) sum and ``b`` for the circularly
    symmetric random-phase sum, odd powers of ``Re b`` average out and

        E{Delta^2} = E{a^4} + E{|b|^4} + 4 E{a^2} E{|b|^2}.

    Use ``(N1, N2)`` for the information-side gain and ``(N2, N1)`` for the
    jamming-side gain.
    """
    _check_counts(n_same, n_other)
    n, m = n_same, n_other
    m1, m2, m3, m4 = XI_MOMENTS
    mean = n + m + n * (n - 1) * PI**2 / 16.0
    ea2 = n * m2 + n * (n - 1) * m1**2
    ea4 = (
        n * m4
        + 4 * n * (n - 1) * m3 * m1
        + 3 * n * (n - 1) * m2**2
        + 6 * n * (n - 1) * (n - 2) * m2 * m1**2
        + n * (n - 1) * (n - 2) * (n - 3) * m1**4
    )
    eb2 = m * m2
    eb4 = m * m4 + 2 * m * (m - 1) * m2**2
    return mean, ea4 + eb4 + 4.0 * ea2 * eb2


def delta_moments_printed(n_same: int, n_other: int) -> tuple[float, float]:
    """Moments from an alternative collected second-moment polynomial.

    Kept for reproducing curves computed with that polynomial. It agrees with
    :func:`delta_moments` only when ``n_same <= 1`` and ``n_other <= 1``;
    elsewhere it overstates the variance (see the test-suite for the
    Monte Carlo comparison).
    """
    _check_counts(n_same, n_other)
    n1, n2 = n_same, n_other
    pi2, pi4 = PI**2, PI**4
    mean = n1 + n2 + n1 * (n1 - 1) * pi2 / 16.0
    second = (
        (32 * pi2 * n1 + 512) * n2**2
        + (64 * pi2 * n1**2 + 512 + (1024 - 96 * pi2) * n1) * n2
        + pi4 * n1**4
        + (96 * pi2 - 6 * pi4) * n1**3
        + (11 * pi4 - 216 * pi2 + 768) * n1**2
        - (6 * pi4 - 120 * pi2 - 256) * n1
    ) / 256.0
    return mean, second


def delta_moments_termwise(n_same: int, n_other: int) -> tuple[float, float]:
    """Moments by brute-force expansion of ``Delta = |sum_i c_i|^2`` over index tuples.

    Every element is ``c_i = xi_i exp(j omega_i)`` with ``omega_i = 0`` for the
    aligned ones. ``Delta^2 = sum c_i conj(c_j) c_k conj(c_l)`` is averaged term by
    term, using independence across distinct indices, the xi moments and the
    uniform-phase averages. Cost grows as ``N^4``; meant for small N only.
    """
    _check_counts(n_same, n_other)
    N = n_same + n_other
    aligned = [i < n_same for i in range(N)]

    def term(idx: tuple[int, ...], signs: tuple[int, ...]) -> float:
        # E{ prod xi^{power} } * E{ exp(j * sum sign*omega) }
        powers: dict[int, int] = {}
        phase: dict[int, int] = {}
        for i, s in zip(idx, signs):
            powers[i] = powers.get(i, 0) + 1
            phase[i] = phase.get(i, 0) + s
        value = 1.0
        for i, p in powers.items():
            value *= XI_MOMENTS[p - 1]
            if not aligned[i] and phase[i] != 0:
                return 0.0
        return value

    first = sum(term((i, j), (1, -1)) for i, j in itertools.product(range(N), repeat=2))
    second = sum(
        term(idx, (1, -1, 1, -1)) for idx in itertools.product(range(N), repeat=4)
    )
    return first, second


def gamma_fit(mean: float, second_moment: float) -> GammaFit:
    """Shape/scale of the Gamma law with the given first two moments."""
    var = second_moment - mean * mean
    if not mean > 0:
        raise ValueError(f"mean must be positive, got {mean}")
    if not var > 0 or var <= 1e-14 * second_moment:
        raise ValueError(f"degenerate variance ({var}) for mean={mean}, second_moment={second_moment}")
    return GammaFit(k=mean * mean / var, theta=var / mean, mean=mean, second_moment=second_moment)


def fit_delta(n_same: int, n_other: int, printed: bool = False) -> GammaFit:
    moments = delta_moments_printed if printed else delta_moments
    return gamma_fit(*moments(n_same, n_other))


def zed_params(N: int) -> ZedParams:
    """Gamma parameters of ``Z = sum_{n=1}^N xi_n`` (mean N*pi/4, variance N*(1 - pi^2/16))."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    return ZedParams(v=N * PI**2 / (16.0 - PI**2), phi=(16.0 - PI**2) / (4.0 * PI))


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("z must be non-negative")
    return z


def gamma_pdf(z, fit: GammaFit):
    z = _check_z(z)
    with np.errstate(divide="ignore"):
        logpdf = (fit.k - 1.0) * np.log(z) - z / fit.theta - special.gammaln(fit.k) - fit.k * np.log(fit.theta)
    out = np.exp(logpdf)
    if fit.k == 1.0:
        out = np.where(z == 0, 1.0 / fit.theta, out)
    return out if out.ndim else float(out)


def gamma_cdf(z, fit: GammaFit):
    z = _check_z(z)
    out = special.gammainc(fit.k, z / fit.theta)
    return out if np.ndim(out) else float(out)
