"""Cancellation-safe trigonometric kernels for complex spectral scale mu.

The closed-form evolution and noise formulas only ever need sin/cos through
the combinations below, which stay finite as mu -> 0 (exceptional point) and
continue analytically to hyperbolic behavior for imaginary mu.  Near mu*t = 0
the direct expressions lose all significant digits to cancellation, so each
kernel switches to a truncated power series in x = (mu*t)^2 for |mu*t| < 0.1;
eight terms keep both branches at full double precision.
"""

from __future__ import annotations

import numpy as np

_SWITCH = 0.1
_NTERMS = 8

def _factorial(n: int) -> float:
    out = 1.0
    for i in range(2, n + 1):
        out *= i
    return out


_C_SIN = [(-1.0) ** n / _factorial(2 * n + 1) for n in range(_NTERMS + 1)]
_C_SIN2 = [(-1.0) ** n * 2.0 ** (2 * n + 1) / _factorial(2 * n + 2) for n in range(_NTERMS + 1)]
_C_SCT3 = [(-1.0) ** n * 2.0 ** (2 * n) / _factorial(2 * n + 1) for n in range(1, _NTERMS + 2)]


def _horner(coeffs, x):
    acc = np.zeros_like(x) + coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _split(mu, t):
    mu = np.asarray(mu, dtype=complex)
    t = np.asarray(t, dtype=float)
    mt = mu * t
    small = np.abs(mt) < _SWITCH
    return mu, t, mt, small


def sin_over_mu(mu, t):
    """sin(mu t)/mu, equal to t at mu = 0."""
    mu, t, mt, small = _split(mu, t)
    x = mt * mt
    series = t * _horner(_C_SIN, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.where(small, series, np.sin(np.where(small, 1.0, mt)) / np.where(small, 1.0, mu))
    return direct


def sin2_over_mu2(mu, t):
    """sin^2(mu t)/mu^2 = (1 - cos(2 mu t))/(2 mu^2), equal to t^2 at mu = 0."""
    mu, t, mt, small = _split(mu, t)
    x = mt * mt
    series = t * t * _horner(_C_SIN2, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.sin(np.where(small, 1.0, mt))
        direct = np.where(small, series, (s * s) / np.where(small, 1.0, mu * mu))
    return direct


def sincos_minus_t_over_mu3(mu, t):
    """(sin(mu t) cos(mu t) - mu t)/mu^3, equal to -(2/3) t^3 at mu = 0.

    This is the kernel of every secular (linear-in-t) noise term; evaluating
    it directly near the exceptional point subtracts two nearly equal numbers
    of size mu*t to produce a result of size (mu*t)^3.
    """
    mu, t, mt, small = _split(mu, t)
    x = mt * mt
    series = t**3 * _horner(_C_SCT3, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        mts = np.where(small, 1.0, mt)
        direct = np.where(
            small, series, (0.5 * np.sin(2.0 * mts) - mts) / np.where(small, 1.0, mu**3)
        )
    return direct


def sincos_over_mu(mu, t):
    """sin(mu t) cos(mu t)/mu = sin(2 mu t)/(2 mu), equal to t at mu = 0."""
    return sin_over_mu(2.0 * np.asarray(mu, dtype=complex), t)


def exprel(z):
    """(exp(z) - 1)/z with the removable singularity filled in (exprel(0)=1)."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-3
    series = 1.0 + z / 2.0 + z**2 / 6.0 + z**3 / 24.0 + z**4 / 120.0 + z**5 / 720.0
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.where(small, series, (np.exp(z) - 1.0) / np.where(small, 1.0, z))
    return direct
