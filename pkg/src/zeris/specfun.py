"""Special functions and the Gauss-Chebyshev rule used by the closed-form metrics.

Real-argument Bessel K, Ei and digamma are thin validated wrappers over
:mod:`scipy.special`, with log-scaled companions where the metric formulas
would otherwise overflow. The upper incomplete gamma function is implemented
here because the metrics need it at negative order and complex argument,
which SciPy does not cover.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "QuadratureRule",
    "gc_rule",
    "gc_integrate",
    "gc_nodes",
    "bessel_k",
    "log_bessel_k",
    "upper_inc_gamma",
    "log_upper_inc_gamma",
    "log_scaled_upper_inc_gamma",
    "expint_ei",
    "exp_e1",
    "digamma",
]

_TINY = 1e-300
_CF_MAXITER = 20000


# -- quadrature ---------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """L-point Chebyshev rule mapped to (0, inf) through ``z = tan(u)``.

    ``integral_0^inf f(z) dz ~= pi^2 / (4 L) * sum(prefactors * f(tan(nodes)))``
    """

    L: int
    varpi: np.ndarray
    nodes: np.ndarray
    prefactors: np.ndarray
    tan: np.ndarray

    @property
    def weight(self) -> float:
        return math.pi**2 / (4.0 * self.L)


@functools.lru_cache(maxsize=32)
def gc_rule(L: int) -> QuadratureRule:
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    l = np.arange(1, L + 1)
    varpi = np.cos((2 * l - 1) * np.pi / (2 * L))
    u = (varpi + 1.0) * np.pi / 4.0
    pref = np.sqrt(1.0 - varpi**2) / np.cos(u) ** 2
    tan = np.tan(u)
    for a in (varpi, u, pref, tan):
        a.setflags(write=False)
    return QuadratureRule(L=L, varpi=varpi, nodes=u, prefactors=pref, tan=tan)


def gc_nodes(L: int, scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``t`` and log-weights of the rule applied to ``z = t / scale``.

    ``integral_0^inf f(t) dt ~= sum(exp(log_w) * f(t))``. Choosing `scale`
    near where `f` has its mass keeps the nodes on the bulk of the integrand;
    with ``scale = 1`` this is the plain rule.
    """
    rule = gc_rule(L)
    return scale * rule.tan, np.log(rule.weight * scale * rule.prefactors)


def gc_integrate(f, L: int, scale: float = 1.0) -> float:
    """Approximate ``integral_0^inf f(z) dz``; `f` must accept a numpy array."""
    t, log_w = gc_nodes(L, scale)
    return float(np.sum(np.exp(log_w) * f(t)))


# -- Bessel K -----------------------------------------------------------------

def bessel_k(nu, x):
    """Modified Bessel function of the second kind, real order `nu`, x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("bessel_k requires x > 0")
    out = special.kv(nu, x)
    return out if np.ndim(out) else float(out)


def _log_bessel_k_scalar(nu: float, x: float) -> float:
    nu = abs(nu)
    kve = special.kve(nu, x)
    if np.isfinite(kve) and kve > 0:
        return math.log(kve) - x
    # overflow: recur upwards from the fractional order, which is stable for K
    nu0 = nu - math.floor(nu)
    k0 = special.kve(nu0, x)
    k1 = special.kve(nu0 + 1.0, x)
    log_k = math.log(k1) - x
    ratio = k1 / k0  # K_{nu0+1} / K_{nu0}
    order = nu0 + 1.0
    while order < nu - 0.5:
        ratio = 1.0 / ratio + 2.0 * order / x
        log_k += math.log(ratio)
        order += 1.0
    return log_k


def log_bessel_k(nu, x):
    """``log K_nu(x)``, finite even where ``K_nu(x)`` overflows a double."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("log_bessel_k requires x > 0")
    out = np.vectorize(_log_bessel_k_scalar, otypes=[float])(nu, x)
    return out if out.ndim else float(out)


# -- upper incomplete gamma ----------------------------------------------------

def _is_nonpositive_int(a: float) -> bool:
    return a <= 0 and float(a).is_integer()


def _log_cf(a: float, z: np.ndarray) -> np.ndarray:
    """log of the Legendre continued fraction: Gamma(a, z) = z^a e^-z * CF."""
    b = z + 1.0 - a
    c = np.full_like(z, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(z.shape, dtype=bool)
    for i in range(1, _CF_MAXITER):
        an = -i * (i - a)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > 1e-16
        if not active.any():
            break
    else:
        raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a})")
    return np.log(h)


def _log_series(a: float, z: np.ndarray) -> np.ndarray:
    """log Gamma(a, z) for small |z| and non-integer a <= 0 or any a > 0."""
    s = np.zeros_like(z)
    term = np.ones_like(z)
    for k in range(400):
        s = s + term / (a + k)
        term = term * (-z) / (k + 1)
        if np.all(np.abs(term) < 1e-17 * np.abs(s)):
            break
    log_za = a * np.log(z)
    # Gamma(a, z) = z^a * (Gamma(a) z^-a - S)
    return np.log(np.exp(special.loggamma(complex(a)) - log_za) - s) + log_za


def _log_negint(n: int, z: np.ndarray) -> np.ndarray:
    """log Gamma(-n, z) from E1 for a non-positive integer order -n."""
    acc = special.exp1(z)
    tail = np.zeros_like(z)
    fact = 1.0
    for k in range(n):
        tail = tail + (-1) ** k * fact / z ** (k + 1)
        fact *= k + 1
    val = (-1) ** n / math.factorial(n) * (acc - np.exp(-z) * tail)
    return np.log(val.astype(complex))


def log_upper_inc_gamma(a: float, z):
    """Complex ``log Gamma(a, z)`` (principal branch) for real `a` and complex `z`.

    `z` must avoid the closed negative real axis (the branch cut), and
    ``z == 0`` is only allowed when ``a > 0``.
    """
    a = float(a)
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if np.any((z.real <= 0) & (z.imag == 0) & ((z.real < 0) | (a <= 0))):
        raise ValueError(f"upper_inc_gamma: invalid argument for a={a} (branch cut or z=0 with a<=0)")
    out = np.empty(z.shape, dtype=complex)
    zero = z == 0
    out[zero] = special.loggamma(complex(a)) if a > 0 else np.nan
    done = zero.copy()
    if a > 0:
        # positive real axis: the regularised function is accurate wherever it does not underflow
        real = (z.imag == 0) & (z.real > 0)
        q = special.gammaincc(a, z.real[real])
        ok = q > 1e-280
        idx = np.flatnonzero(real)[ok]
        out[idx] = special.gammaln(a) + np.log(q[ok])
        done[idx] = True
    # the continued fraction converges slowly and loses digits when |z| < a + 1
    small_limit = min(max(1.0, a + 1.0), 25.0)
    small = (np.abs(z) < small_limit) & ~done
    big = ~small & ~done
    if big.any():
        zb = z[big]
        out[big] = a * np.log(zb) - zb + _log_cf(a, zb)
    if small.any():
        if _is_nonpositive_int(a):
            out[small] = _log_negint(int(-a), z[small])
        else:
            out[small] = _log_series(a, z[small])
    return out[0] if scalar else out


def log_scaled_upper_inc_gamma(a: float, z):
    """``log(exp(z) * Gamma(a, z))``; avoids the exp(-z) factor overflowing or spinning."""
    a = float(a)
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty(z.shape, dtype=complex)
    small_limit = min(max(1.0, a + 1.0), 25.0)
    big = np.abs(z) >= small_limit
    if a > 0:
        big &= ~((z.imag == 0) & (z.real > 0))
    if big.any():
        zb = z[big]
        out[big] = a * np.log(zb) + _log_cf(a, zb)
    if (~big).any():
        zs = z[~big]
        out[~big] = log_upper_inc_gamma(a, zs) + zs
    return out[0] if scalar else out


def upper_inc_gamma(a: float, z):
    """Upper incomplete gamma ``Gamma(a, z) = integral_z^inf t^(a-1) e^-t dt``.

    Real `a` of any sign, complex `z` off the negative real axis. Returns a
    complex value (or array); for real ``z > 0`` the imaginary part is zero up
    to rounding.
    """
    out = np.exp(log_upper_inc_gamma(a, z))
    return out


# -- exponential integral ------------------------------------------------------

def expint_ei(x):
    """Exponential integral ``Ei(x)``; ``Ei(x) = -E1(-x)`` for x < 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise ValueError("Ei is singular at x = 0")
    out = special.expi(x)
    return out if np.ndim(out) else float(out)


def exp_e1(x):
    """``exp(x) * E1(x)`` for x > 0 without overflow; equals ``-exp(x) Ei(-x)``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("exp_e1 requires x > 0")
    out = np.empty_like(x)
    small = x < 1.0
    out[small] = np.exp(x[small]) * special.exp1(x[small])
    xb = x[~small]
    if xb.size:
        # continued fraction e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...)))
        b = xb + 1.0
        c = np.full_like(xb, 1.0 / _TINY)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, 500):
            an = -float(i * i)
            b = b + 2.0
            d = 1.0 / (an * d + b)
            c = b + an / c
            delta = c * d
            h = h * delta
            if np.all(np.abs(delta - 1.0) < 1e-16):
                break
        out[~small] = h
    return out if out.ndim else float(out)


def digamma(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("digamma is only provided for x > 0")
    out = special.digamma(x)
    return out if np.ndim(out) else float(out)
