"""Closed-form and asymptotic reliability/security metrics for the three surface modes.

Mode I aligns every element with the user -> AP cascade, mode II aligns every
element with the jammer -> eavesdropper cascade, and mode III splits the
surface ``N = N1 + N2`` between the two. For each mode

* JOP  = A + B - A B  (energy outage ``A`` or data outage ``B``)
* JIP  = C D          (energy sufficiency ``C = 1 - A`` and interception ``D``)
* SEE  = (R / Ps) * max(1 - JOP - JIP, 0)

``B`` and ``D`` integrate over one positive random gain with the ``L``-point
Chebyshev rule of :func:`zeris.specfun.gc_rule`, stretched to the mean of
that gain (:func:`zeris.specfun.gc_nodes`) so the nodes sit on its bulk for
any N and path loss. Everything is evaluated in log space; the integrands
span hundreds of orders of magnitude across the nodes.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .cascaded import GammaFit, fit_delta, zed_params
from .params import DerivedConstants, SystemParams, derive_constants
from .specfun import digamma, exp_e1, gc_nodes, log_bessel_k, log_scaled_upper_inc_gamma

__all__ = [
    "Mode",
    "MetricValue",
    "AsymptoticConstants",
    "RegimeError",
    "UnsupportedModeError",
    "NumericalIntegrityError",
    "ANALYTIC_MODES",
    "asymptotic_constants",
    "energy_outage_prob",
    "energy_sufficiency_prob",
    "data_outage_prob",
    "interception_prob",
    "jop",
    "jip",
    "jop_asymptotic",
    "jip_asymptotic",
    "jop_large_n",
    "jip_large_n",
    "see",
    "normalized_jiop",
    "delta_fits",
    "mode2_imaginary_residue",
]

log = logging.getLogger(__name__)

# nodes whose incomplete-gamma recurrence residual exceeds this are integrated directly
RECURRENCE_TOL = 1e-6
# largest relative imaginary part tolerated in the mode-II interception sum
IMAG_TOL = 1e-6


class Mode(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    BENCH_I = "benchmark-I"
    BENCH_II = "benchmark-II"

    @classmethod
    def parse(cls, value: "Mode | str") -> "Mode":
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        aliases = {"1": "I", "2": "II", "3": "III", "B1": "benchmark-I", "B2": "benchmark-II",
                   "BENCHMARK-I": "benchmark-I", "BENCHMARK-II": "benchmark-II"}
        text = aliases.get(text.upper(), text)
        try:
            return cls(text)
        except ValueError:
            valid = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown mode {value!r}; expected one of {valid}") from None


ANALYTIC_MODES = (Mode.I, Mode.II, Mode.III)


class RegimeError(ValueError):
    """An asymptotic expression is used outside the parameter range where it holds."""


class UnsupportedModeError(ValueError):
    """No analytic result exists for this mode (benchmarks are simulation-only)."""


class NumericalIntegrityError(ArithmeticError):
    """A closed form produced a value that fails its own consistency checks."""


@dataclass(frozen=True)
class MetricValue:
    value: float
    kind: str  # "JOP", "JIP", "SEE", "normalized-JIOP"
    provenance: str  # "closed-form", "asymptotic", "large-N-limit"
    mode: Mode | None = None
    clamped: bool = False

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class AsymptoticConstants:
    mu1: float
    mu2: float
    mu3: float


def _mode(mode) -> Mode:
    mode = Mode.parse(mode)
    if mode not in ANALYTIC_MODES:
        raise UnsupportedModeError(f"{mode.value} has no closed form; use the Monte Carlo estimator")
    return mode


def _clamp(value: float, what: str) -> tuple[float, bool]:
    if 0.0 <= value <= 1.0:
        return value, False
    excess = -value if value < 0 else value - 1.0
    if excess > 1e-6:
        raise NumericalIntegrityError(f"{what} = {value!r} is not a probability")
    if excess > 1e-12:
        log.warning("clamping %s = %.3e into [0, 1]", what, value)
    return min(max(value, 0.0), 1.0), True


def delta_fits(params: SystemParams, printed_moments: bool = False) -> tuple[GammaFit, GammaFit]:
    """Gamma fits of the mode-III information gain and jamming gain."""
    return (fit_delta(params.N1, params.N2, printed_moments),
            fit_delta(params.N2, params.N1, printed_moments))


def asymptotic_constants(params: SystemParams) -> AsymptoticConstants:
    c = derive_constants(params)
    mu1 = c.beta_pu * c.beta_ure / (c.epsilon * c.beta_pj * c.beta_jre)
    phi = zed_params(params.N).phi
    mu2 = 1.0 / (params.N * mu1) if mu1 > 0 else math.inf
    return AsymptoticConstants(mu1=mu1, mu2=mu2, mu3=params.N * mu1 / phi**2)


# -- energy events --------------------------------------------------------------

def _energy_exponent(params: SystemParams, c: DerivedConstants) -> float:
    return c.energy_threshold / (params.N * c.beta_pr)


def energy_outage_prob(params: SystemParams) -> float:
    """Probability that the harvested surface energy falls short of its budget."""
    c = derive_constants(params)
    return -math.expm1(-_energy_exponent(params, c))


def energy_sufficiency_prob(params: SystemParams) -> float:
    c = derive_constants(params)
    return math.exp(-_energy_exponent(params, c))


# -- data outage -------------------------------------------------------------------

def _outage_mode1(params: SystemParams, c: DerivedConstants) -> float:
    z = zed_params(params.N)
    t, log_w = gc_nodes(params.L, z.v * z.phi)
    log_f = ((z.v - 1.0) * np.log(t) - c.varsigma / (c.rho_t * t * t) - t / z.phi
             - special.gammaln(z.v) - z.v * math.log(z.phi))
    return 1.0 - float(np.sum(np.exp(log_w + log_f)))


def _outage_mode2(params: SystemParams, c: DerivedConstants) -> float:
    x = math.sqrt(4.0 * c.varsigma / (c.rho_t * params.N))
    return 1.0 - math.exp(math.log(x) + log_bessel_k(1.0, x))


def _outage_mode3(params: SystemParams, c: DerivedConstants, fit: GammaFit) -> float:
    y = c.varsigma / (c.rho_t * fit.theta)
    k = fit.k
    log_term = math.log(2.0) - special.gammaln(k) + 0.5 * k * math.log(y) + log_bessel_k(k, 2.0 * math.sqrt(y))
    return -math.expm1(log_term)


def data_outage_prob(mode, params: SystemParams, printed_moments: bool = False) -> float:
    """Probability that the main-link capacity falls below R."""
    mode = _mode(mode)
    c = derive_constants(params)
    if math.isinf(c.epsilon):  # the SNR threshold is beyond double range: certain outage
        return 1.0
    if mode is Mode.I:
        b = _outage_mode1(params, c)
    elif mode is Mode.II:
        b = _outage_mode2(params, c)
    else:
        b = _outage_mode3(params, c, delta_fits(params, printed_moments)[0])
    return _clamp(b, f"B[{mode.value}]")[0]


# -- interception ------------------------------------------------------------------

def _common_log(params: SystemParams, c: DerivedConstants, t: np.ndarray) -> np.ndarray:
    # density-free part shared by all modes: exp(-eps/(rho_t beta_pu t) - t/(N beta_ure))
    return -c.epsilon / (c.rho_t * c.beta_pu * t) - t / (params.N * c.beta_ure)


def _intercept_mode1(params: SystemParams, c: DerivedConstants) -> float:
    N = params.N
    t, log_w = gc_nodes(params.L, N * c.beta_ure)
    x = c.beta_pu * t / (c.epsilon * N * c.beta_pj * c.beta_jre)
    # -Ei(-x) e^{x} = e^{x} E1(x) > 0, so the leading minus sign yields a positive value
    scale = c.beta_pu / (c.epsilon * N**2 * c.beta_pj * c.beta_ure * c.beta_jre)
    terms = t * np.exp(log_w + _common_log(params, c, t)) * exp_e1(x)
    d = scale * float(np.sum(terms))
    if d < 0:
        raise NumericalIntegrityError(f"mode-I interception probability came out negative ({d})")
    return d


def _mode2_direct(v: float, phi: float, X: float) -> float:
    """E{1 / (1 + Y^2 / X)} for Y ~ Gamma(v, phi), by adaptive quadrature."""
    mean = v * phi
    sd = math.sqrt(v) * phi

    def f(y):
        return math.exp((v - 1.0) * math.log(y) - y / phi - special.gammaln(v) - v * math.log(phi)) / (1.0 + y * y / X)

    lo, hi = max(mean - 40 * sd, 0.0), mean + 40 * sd
    val, _ = integrate.quad(f, lo, hi, points=[mean], limit=200, epsabs=0, epsrel=1e-12)
    return val


def _intercept_mode2_sum(params: SystemParams, c: DerivedConstants) -> complex:
    N = params.N
    t, log_w = gc_nodes(params.L, N * c.beta_ure)
    z = zed_params(N)
    v, phi = z.v, z.phi
    a = 2.0 - v
    X = c.beta_pu * t / (c.epsilon * c.beta_pj * c.beta_jre)
    alpha = 1j * np.sqrt(X) / phi
    shift = 1j * math.pi * (v - 2.0) / 2.0
    g_plus = log_scaled_upper_inc_gamma(a, alpha)
    g_minus = log_scaled_upper_inc_gamma(a, -alpha)

    # recurrence residual e^z G(a+1,z) = a e^z G(a,z) + z^a flags nodes that lost precision
    g_next = log_scaled_upper_inc_gamma(a + 1.0, alpha)
    lhs = np.exp(g_next - g_plus)
    rhs = a + np.exp(a * np.log(alpha) - g_plus)
    residual = np.abs(lhs - rhs) / np.maximum(np.abs(lhs), 1e-300)
    bad = ~np.isfinite(residual) | (residual > RECURRENCE_TOL)

    log_pre = (log_w - math.log(2.0 * N * c.beta_ure * (v - 1.0)) + 0.5 * v * np.log(X) - v * math.log(phi)
               + _common_log(params, c, t))
    terms = np.exp(log_pre + shift + g_plus) + np.exp(log_pre - shift + g_minus)

    if bad.any():
        log.info("mode-II interception: %d of %d nodes use direct integration", int(bad.sum()), len(t))
        log_direct = log_w[bad] - math.log(N * c.beta_ure) + _common_log(params, c, t[bad])
        direct = np.array([_mode2_direct(v, phi, x) for x in X[bad]])
        terms[bad] = np.exp(log_direct) * direct

    return complex(np.sum(terms))


def mode2_imaginary_residue(params: SystemParams) -> float:
    """Relative imaginary part left over by the mode-II interception bracket.

    The two conjugate incomplete-gamma terms should cancel each other's
    imaginary parts exactly; what remains measures the loss of precision.
    """
    total = _intercept_mode2_sum(params, derive_constants(params))
    return abs(total.imag) / abs(total.real) if total.real != 0 else 0.0


def _intercept_mode2(params: SystemParams, c: DerivedConstants) -> float:
    total = _intercept_mode2_sum(params, c)
    if abs(total.real) > 0 and abs(total.imag) / abs(total.real) > IMAG_TOL:
        raise NumericalIntegrityError(
            f"mode-II interception has imaginary residue {total.imag:.3e} vs real {total.real:.3e}")
    return total.real


def _intercept_mode3(params: SystemParams, c: DerivedConstants, fit: GammaFit) -> float:
    N = params.N
    t, log_w = gc_nodes(params.L, N * c.beta_ure)
    k, theta = fit.k, fit.theta
    x0 = c.beta_pu / (c.epsilon * c.beta_pj * c.beta_jre)
    b = x0 * t / theta
    g = log_scaled_upper_inc_gamma(1.0 - k, b).real
    log_terms = (log_w - math.log(N * c.beta_ure)
                 + k * np.log(x0 * t / theta) + g + _common_log(params, c, t))
    return float(np.sum(np.exp(log_terms)))


def interception_prob(mode, params: SystemParams, printed_moments: bool = False) -> float:
    """Probability that the eavesdropper's capacity reaches R."""
    mode = _mode(mode)
    c = derive_constants(params)
    if math.isinf(c.epsilon):
        return 0.0
    if mode is Mode.I:
        d = _intercept_mode1(params, c)
    elif mode is Mode.II:
        d = _intercept_mode2(params, c)
    else:
        d = _intercept_mode3(params, c, delta_fits(params, printed_moments)[1])
    return _clamp(d, f"D[{mode.value}]")[0]


# -- headline metrics ------------------------------------------------------------------

def jop(mode, params: SystemParams, printed_moments: bool = False) -> MetricValue:
    mode = _mode(mode)
    a = energy_outage_prob(params)
    b = data_outage_prob(mode, params, printed_moments)
    value, clamped = _clamp(a + b - a * b, f"JOP[{mode.value}]")
    return MetricValue(value, "JOP", "closed-form", mode, clamped)


def jip(mode, params: SystemParams, printed_moments: bool = False) -> MetricValue:
    mode = _mode(mode)
    value, clamped = _clamp(energy_sufficiency_prob(params) * interception_prob(mode, params, printed_moments),
                            f"JIP[{mode.value}]")
    return MetricValue(value, "JIP", "closed-form", mode, clamped)


def see(mode, params: SystemParams, printed_moments: bool = False) -> MetricValue:
    """Secrecy energy efficiency ``(R / Ps) * max(1 - JOP - JIP, 0)``."""
    mode = _mode(mode)
    margin = 1.0 - jop(mode, params, printed_moments).value - jip(mode, params, printed_moments).value
    return MetricValue(params.R / params.Ps * max(margin, 0.0), "SEE", "closed-form", mode, margin < 0)


def normalized_jiop(mode, params: SystemParams, printed_moments: bool = False) -> MetricValue:
    mode = _mode(mode)
    value = 0.5 * (jop(mode, params, printed_moments).value + jip(mode, params, printed_moments).value)
    return MetricValue(value, "normalized-JIOP", "closed-form", mode)


# -- high-power asymptotics -----------------------------------------------------------

def jop_asymptotic(mode, params: SystemParams, printed_moments: bool = False) -> MetricValue:
    """High-``Ps`` JOP: energy-outage term plus a data-outage term, both ~ 1/Ps."""
    mode = _mode(mode)
    p = params
    c = derive_constants(p)
    if math.isinf(c.epsilon):
        raise RegimeError("the SNR threshold overflows (tau too close to 1); no asymptote applies")
    energy = (p.N * p.Pe + p.Pc) / (c.Pt * p.N * c.beta_pr)
    noise = c.epsilon * p.sigma2 / (c.Pt * c.beta_pu * c.beta_ura)
    if mode is Mode.I:
        z = zed_params(p.N)
        if z.v <= 2.0:
            raise RegimeError(f"mode-I asymptote needs v > 2 (N >= 2); v = {z.v:.4g}")
        value = energy + noise / (z.phi**2 * (z.v - 1.0) * (z.v - 2.0))
    elif mode is Mode.II:
        ratio = p.N / noise
        if ratio <= 1.0:
            raise RegimeError(f"mode-II asymptote needs Pt*beta*N/(eps*sigma2) > 1, got {ratio:.4g}")
        # energy outage is dropped: it is of lower order than the log term
        value = math.log(ratio) / ratio
    else:
        fit = delta_fits(p, printed_moments)[0]
        if fit.k <= 1.0:
            raise RegimeError(f"mode-III asymptote needs k1 > 1, got k1 = {fit.k:.4g}")
        value = energy + noise / (fit.theta * (fit.k - 1.0))
    return MetricValue(value, "JOP", "asymptotic", mode)


def jop_large_n(params: SystemParams, mode=None) -> MetricValue:
    """Common JOP ceiling ``Pe / (beta_pr Pt)`` reached by every mode as Ps and N grow."""
    c = derive_constants(params)
    return MetricValue(params.Pe / (c.beta_pr * c.Pt), "JOP", "large-N-limit",
                       None if mode is None else _mode(mode))


def jip_asymptotic(mode, params: SystemParams, printed_moments: bool = False) -> MetricValue:
    """JIP floor as ``Ps -> inf`` (energy sufficiency certain, receiver noise negligible)."""
    mode = _mode(mode)
    k = asymptotic_constants(params)
    if k.mu1 == 0.0:
        raise RegimeError("the SNR threshold overflows (tau too close to 1); no floor applies")
    if mode is Mode.I:
        mu = k.mu1
        value = -mu * (math.log(mu) + float(digamma(2.0)))
        if mu >= 1.0 or not 0.0 <= value <= 1.0:
            raise RegimeError(f"mode-I JIP floor is not a probability for mu1 = {mu:.4g} (value {value:.4g})")
        return MetricValue(value, "JIP", "asymptotic", mode)

    if mode is Mode.II:
        z = zed_params(params.N)
        t, log_w = gc_nodes(params.L, z.v * z.phi)
        log_f = (z.v + 1.0) * np.log(t) - t / z.phi - special.gammaln(z.v) - z.v * math.log(z.phi)
        arg = k.mu2 * t * t
    else:
        fit = delta_fits(params, printed_moments)[1]
        t, log_w = gc_nodes(params.L, fit.mean)
        log_f = fit.k * np.log(t) - t / fit.theta - special.gammaln(fit.k) - fit.k * math.log(fit.theta)
        arg = k.mu2 * t
    # e^{c} Ei(-c) = -e^{c} E1(c)
    s = float(np.sum(np.exp(log_w + log_f) * exp_e1(arg)))
    value, clamped = _clamp(1.0 - k.mu2 * s, f"JIP_asy[{mode.value}]")
    return MetricValue(value, "JIP", "asymptotic", mode, clamped)


def jip_large_n(mode, params: SystemParams, printed_moments: bool = False) -> MetricValue:
    """Line-of-sight JIP floors for large N (modes II and III only)."""
    mode = _mode(mode)
    k = asymptotic_constants(params)
    if mode is Mode.I:
        raise UnsupportedModeError("mode I has no large-N JIP limit; its floor does not depend on N")
    if mode is Mode.II:
        v = zed_params(params.N).v
        mu3 = k.mu3
        log_val = (0.5 * v * (1.0 + math.log(mu3 / (2.0 * v))) - 0.25 * math.log(v)
                   + mu3 / 8.0 - math.sqrt(v * mu3 / 2.0))
        value = math.exp(log_val)
    else:
        fit = delta_fits(params, printed_moments)[1]
        nm = params.N * k.mu1
        value = math.exp(fit.k * math.log(nm / (fit.theta + nm)))
    return MetricValue(value, "JIP", "large-N-limit", mode)
