"""Branch cross-checks for the cancellation-safe trig kernels."""

import mpmath as mp
import numpy as np
import pytest

from ptmodes._trig import (
    exprel,
    sin2_over_mu2,
    sin_over_mu,
    sincos_minus_t_over_mu3,
    sincos_over_mu,
)

mp.mp.dps = 200


def _reference(mu: complex, t: float):
    if mu == 0:
        # exact mu -> 0 limits
        return t, t * t, -(2.0 / 3.0) * t**3, t
    m = mp.mpmathify(mu)
    tt = mp.mpf(t)
    return (
        complex(mp.sin(m * tt) / m),
        complex(mp.sin(m * tt) ** 2 / m**2),
        complex((mp.sin(m * tt) * mp.cos(m * tt) - m * tt) / m**3),
        complex(mp.sin(2 * m * tt) / (2 * m)),
    )


MUS = [0, 1e-9, 1e-5, 1e-3, 0.05, 0.09999, 0.10001, 0.5, 1.0, 0.3j, 0.09j, 1.7j, 0.7]
TS = [0.0, 0.01, 0.1, 1.0, 7.3, 19.7]


@pytest.mark.parametrize("mu", MUS)
@pytest.mark.parametrize("t", TS)
def test_kernels_match_high_precision_reference(mu, t):
    ref = _reference(complex(mu), t)
    got = (
        complex(sin_over_mu(mu, t)),
        complex(sin2_over_mu2(mu, t)),
        complex(sincos_minus_t_over_mu3(mu, t)),
        complex(sincos_over_mu(mu, t)),
    )
    for g, r in zip(got, ref):
        assert abs(g - r) <= 1e-13 * max(1.0, abs(r))


def test_branch_continuity_at_switch():
    # values straddling |mu t| = 0.1 must agree to near machine precision
    t = 1.0
    for mu in (0.0999999, 0.1000001, 0.0999999j, 0.1000001j):
        a = complex(sincos_minus_t_over_mu3(mu, t))
        b = _reference(complex(mu), t)[2]
        assert abs(a - b) <= 1e-14 * max(1.0, abs(b))


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(7)
    mus = rng.uniform(-1, 1, 50) + 1j * rng.uniform(-1, 1, 50)
    ts = rng.uniform(0, 10, 50)
    vec = sin2_over_mu2(mus, ts)
    for i in range(50):
        one = complex(sin2_over_mu2(mus[i], ts[i]))
        assert abs(vec[i] - one) <= 1e-13 * max(1.0, abs(one))


def test_exprel_small_and_zero():
    assert complex(exprel(np.array(0.0 + 0j))) == 1.0
    z = 1e-5j
    want = complex((mp.exp(mp.mpmathify(z)) - 1) / mp.mpmathify(z))
    assert abs(complex(exprel(np.array(z))) - want) < 1e-16
