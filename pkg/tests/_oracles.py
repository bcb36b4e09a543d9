"""Independent reference implementations used as test oracles.

These use mpmath arithmetic at 50 significant digits but implement the
series and integral representations by hand, so they share no code path
with either :mod:`zeris.specfun` or SciPy.
"""

import mpmath as mp

mp.mp.dps = 50


def bessel_k(nu, x):
    """K_nu(x) from the integral  int_0^inf exp(-x cosh t) cosh(nu t) dt."""
    with mp.workdps(30):
        nu, x = abs(mp.mpf(nu)), mp.mpf(x)
        # log-integrand -x cosh t + nu t peaks at x sinh t* = nu
        t_star = mp.asinh(nu / x)
        peak = -x * mp.cosh(t_star) + nu * t_star
        g = lambda t: -x * mp.cosh(t) + nu * t - peak
        hi = t_star + 1
        while g(hi) > -120:
            hi = t_star + 2 * (hi - t_star)
        f = lambda t: mp.exp(g(t)) * (1 + mp.exp(-2 * nu * t)) / 2
        pts = [mp.mpf(0)] + ([t_star] if t_star > 0 else []) + [hi]
        return mp.quad(f, pts) * mp.exp(peak)


def lower_gamma_series(a, z, terms=4000):
    """gamma(a, z) = z^a * sum_k (-z)^k / (k! (a + k)); fine for moderate |z| at 50 digits."""
    a, z = mp.mpf(a), mp.mpc(z)
    s = mp.mpc(0)
    term = mp.mpc(1)
    for k in range(terms):
        add = term / (a + k)
        s += add
        if k > 10 and abs(add) < mp.mpf(10) ** (-45) * abs(s):
            break
        term *= -z / (k + 1)
    return z**a * s


def upper_gamma(a, z):
    """Gamma(a, z) = Gamma(a) - gamma(a, z), non-integer a, by high-precision series."""
    with mp.workdps(80):
        return mp.gamma(mp.mpf(a)) - lower_gamma_series(a, z, terms=20000)


def upper_gamma_legendre(a, z, depth=4000):
    """Gamma(a, z) from Legendre's continued fraction evaluated bottom-up (large |z|)."""
    a, z = mp.mpf(a), mp.mpc(z)
    tail = mp.mpc(0)
    for i in range(depth, 0, -1):
        tail = -i * (i - a) / (z + 1 - a + 2 * i + tail)
    return mp.exp(-z) * z**a / (z + 1 - a + tail)


def ei(x):
    """Ei(x) = gamma_E + ln|x| + sum x^k / (k k!)."""
    x = mp.mpf(x)
    with mp.workdps(80):
        s = mp.mpf(0)
        term = mp.mpf(1)
        k = 1
        while True:
            term *= x / k
            add = term / k
            s += add
            if abs(add) < mp.mpf(10) ** (-60) * (abs(s) + 1):
                break
            k += 1
        return mp.euler + mp.log(abs(x)) + s


def digamma(x):
    """psi(x) by upward shift and the Stirling/Bernoulli series."""
    x = mp.mpf(x)
    shift = mp.mpf(0)
    while x < 30:
        shift -= 1 / x
        x += 1
    s = mp.log(x) - 1 / (2 * x)
    for k in range(1, 20):
        s -= mp.bernoulli(2 * k) / (2 * k * x ** (2 * k))
    return s + shift


def simulate_delta(n_same, n_other, n_draws, rng, chunk=200_000):
    """Draws of |sum_aligned xi + sum_random xi e^{j omega}|^2 built from raw CN(0,1) channels."""
    import numpy as np

    N = n_same + n_other
    out = []
    left = n_draws
    while left > 0:
        m = min(chunk, left)
        h1 = (rng.standard_normal((m, N)) + 1j * rng.standard_normal((m, N))) * np.sqrt(0.5)
        h2 = (rng.standard_normal((m, N)) + 1j * rng.standard_normal((m, N))) * np.sqrt(0.5)
        xi = np.abs(h1) * np.abs(h2)
        omega = np.zeros((m, N))
        omega[:, n_same:] = rng.uniform(-np.pi, np.pi, (m, n_other))
        out.append(np.abs(np.sum(xi * np.exp(1j * omega), axis=1)) ** 2)
        left -= m
    return np.concatenate(out)
