"""Coefficients of the normal characteristic function for Gaussian states.

For coherent-state (and in particular vacuum) inputs the state stays Gaussian
and is fully described by the mean amplitudes plus six second-moment
coefficients

    B_j  = <delta a_j^+ delta a_j>          (real, >= 0 for physical models)
    C_j  = <(delta a_j)^2>
    D    = <delta a_1 delta a_2>
    Dbar = -<delta a_1^+ delta a_2>

obtained from the propagator blocks and the force moments:
B_j = sum_l |V_jl|^2 + <f_j^+ f_j>, C_j = sum_l U_jl V_jl + <f_j^2>,
D = sum_l U_1l V_2l + <f_1 f_2>, Dbar = -(sum_l V_1l^* V_2l + <f_1^+ f_2>).

Every model admits closed forms for vacuum input.  Writing s = sin(2 mu t),
c = cos(2 mu t), the full-physical reservoir gives

    B_1  = k^2 (1-c)/(2 mu^2) - e^2 g s/(2 mu^3) + e^2 g t/mu^2
    B_2  = (k^2+2g^2)(1-c)/(2 mu^2) + g(2 mu^2 - e^2) s/(2 mu^3) + e^2 g t/mu^2
    C_j  = -e k (1-c)/(2 mu^2) + e k g s/(2 mu^3) - e k g t/mu^2
    D    = -i [k s/(2 mu) + k g (1-c)/(2 mu^2)]
    Dbar = -i [e g (1-c)/(2 mu^2) - e g^2 s/(2 mu^3) + e g^2 t/mu^2]

(each checked against the independent moment-ODE route; the coefficient of
the B_2 and D oscillatory terms differs from naive transcription of the
source formulas, which do not satisfy dB_2/dt(0) = 2 gamma).  The sink model
is the same set with every explicitly linear-in-t term removed; the
semiclassical model keeps only the |V|^2 / U V parts; the asymptotic set is
the linear terms alone, which dominate the full model at long times.

All closed forms are assembled from the cancellation-safe kernels of
:mod:`ptmodes._trig`, so the exceptional-point limits of the full and
semiclassical families are exact (the sink and asymptotic families genuinely
diverge there).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._trig import sin2_over_mu2, sincos_minus_t_over_mu3, sincos_over_mu
from .core import EPDegenerateError, ModelParams, Regime, build_system, derive_scales
from .dynamics import ReservoirModel, ff_from_L0, noise_moments_full, propagator, tailor_reservoir

__all__ = [
    "CoefficientModel",
    "CoefficientConsistencyError",
    "GaussianCoeffs",
    "GaussianState",
    "coeffs_general",
    "coeffs_closed_form",
    "closed_form_coefficient_arrays",
    "mean_amplitudes",
    "evolve_state",
]

#: nominally real coefficients may carry an imaginary residue from complex-mu
#: arithmetic up to this tolerance (absolute for O(1) values, relative beyond)
IMAG_RESIDUE_TOL = 1e-9


class CoefficientModel(enum.Enum):
    """Closed-form coefficient families for vacuum input."""

    FULL = "full"
    SEMICLASSICAL = "semiclassical"
    SINK_PERIODIC = "sink"
    ASYMPTOTIC = "asymptotic"


class CoefficientConsistencyError(ValueError):
    """A nominally real coefficient carried a non-negligible imaginary part."""


def _real_or_raise(value: complex, name: str) -> float:
    v = complex(value)
    if abs(v.imag) > IMAG_RESIDUE_TOL * max(1.0, abs(v.real)):
        raise CoefficientConsistencyError(
            f"{name} should be real, got imaginary residue {v.imag:.3e}"
        )
    return v.real


@dataclass(frozen=True)
class GaussianCoeffs:
    """The six fluctuation coefficients; B_j validated real on construction."""

    B1: float
    B2: float
    C1: complex
    C2: complex
    D: complex
    Dbar: complex

    @classmethod
    def from_complex(cls, B1, B2, C1, C2, D, Dbar) -> "GaussianCoeffs":
        return cls(
            _real_or_raise(B1, "B1"),
            _real_or_raise(B2, "B2"),
            complex(C1),
            complex(C2),
            complex(D),
            complex(Dbar),
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.B1, self.B2, self.C1, self.C2, self.D, self.Dbar], dtype=complex)


@dataclass(frozen=True)
class GaussianState:
    """Mean amplitudes plus fluctuation coefficients at time t.

    The mean evolution is reservoir-model independent (forces average to
    zero); only the coefficients distinguish the models.
    """

    alpha1: complex
    alpha2: complex
    coeffs: GaussianCoeffs
    t: float
    model: ReservoirModel


def mean_amplitudes(params: ModelParams, alpha0, t: float):
    """Coherent mean evolution alpha(t) = U(t) alpha(0) + V(t) alpha(0)^*."""
    prop = propagator(params, t)
    a0 = np.asarray(alpha0, dtype=complex)
    out = prop.U @ a0 + prop.V @ a0.conj()
    return complex(out[0]), complex(out[1])


def coeffs_general(
    model: ReservoirModel, params: ModelParams, t: float
) -> GaussianCoeffs:
    """Coefficients from the propagator blocks plus the model's force moments.

    This is the reference route: U, V from the closed-form propagator and the
    force moments from the full-physical closed form, the sink eigen-integral,
    or zero (semiclassical).  Sink moments require the oscillatory regime.
    """
    prop = propagator(params, t)
    if model is ReservoirModel.FULL_PHYSICAL:
        moments = noise_moments_full(params, t)
    elif model is ReservoirModel.SINK:
        _, L_sink = tailor_reservoir(params)
        moments = ff_from_L0(build_system(params), L_sink, t)
    elif model is ReservoirModel.SEMICLASSICAL:
        moments = None
    else:  # pragma: no cover
        raise ValueError(model)

    U, V = prop.U, prop.V
    if moments is None:
        n1 = n2 = sq1 = sq2 = f1f2 = f1df2 = 0.0
    else:
        n1, n2, sq1, sq2, f1f2, f1df2 = moments.force_moments()
    B1 = np.sum(np.abs(V[0, :]) ** 2) + n1
    B2 = np.sum(np.abs(V[1, :]) ** 2) + n2
    C1 = np.sum(U[0, :] * V[0, :]) + sq1
    C2 = np.sum(U[1, :] * V[1, :]) + sq2
    D = np.sum(U[0, :] * V[1, :]) + f1f2
    Dbar = -(np.sum(V[0, :].conj() * V[1, :]) + f1df2)
    return GaussianCoeffs.from_complex(B1, B2, C1, C2, D, Dbar)


def closed_form_coefficient_arrays(model: CoefficientModel, kappa, gamma, t, epsilon=1.0):
    """Vectorized closed-form coefficients for vacuum input.

    ``kappa``, ``gamma``, ``t`` broadcast together (all in units of
    ``epsilon`` and 1/``epsilon``).  Returns a dict with keys
    B1, B2, C1, C2, D, Dbar of broadcast shape; B entries are real arrays.
    Sink and asymptotic families contain 1/mu^2 factors and yield inf/nan on
    cells at or beyond the exceptional points; callers mask by regime.
    """
    e = float(epsilon)
    k = np.asarray(kappa, dtype=float)
    g = np.asarray(gamma, dtype=float)
    t = np.asarray(t, dtype=float)
    k, g, t = np.broadcast_arrays(k, g, t)
    mu = np.sqrt((e * e - k * k - g * g).astype(complex))

    s22 = sin2_over_mu2(mu, t)          # (1 - cos 2 mu t)/(2 mu^2)
    sct3 = sincos_minus_t_over_mu3(mu, t)  # (sin(2 mu t)/2 - mu t)/mu^3
    scm = sincos_over_mu(mu, t)         # sin(2 mu t)/(2 mu)

    if model is CoefficientModel.ASYMPTOTIC:
        with np.errstate(divide="ignore", invalid="ignore"):
            m2 = (e * e - k * k - g * g).astype(float)
            B = e * e * g * t / m2
            C = -e * k * g * t / m2
            D = np.zeros_like(B, dtype=complex)
            Dbar = -1j * e * g * g * t / m2
        return {"B1": B, "B2": B.copy(), "C1": C.astype(complex), "C2": C.astype(complex), "D": D, "Dbar": Dbar}

    if model is CoefficientModel.SEMICLASSICAL:
        B = (k * k * s22).real
        C = -e * k * s22
        D = -1j * (k * scm - k * g * s22)
        Dbar = np.zeros_like(D)
        return {"B1": B, "B2": B.copy(), "C1": C, "C2": C.copy(), "D": D, "Dbar": Dbar}

    # full-physical; the sink family removes the explicit linear terms
    B1 = (k * k * s22 - e * e * g * sct3).real
    B2 = ((k * k + 2.0 * g * g) * s22 + 2.0 * g * scm - e * e * g * sct3).real
    C = -e * k * s22 + e * k * g * sct3
    D = -1j * (k * scm + k * g * s22)
    Dbar = -1j * (e * g * s22 - e * g * g * sct3)
    if model is CoefficientModel.SINK_PERIODIC:
        with np.errstate(divide="ignore", invalid="ignore"):
            m2 = (e * e - k * k - g * g).astype(float)
            lin = g * t / m2
        B1 = B1 - e * e * lin
        B2 = B2 - e * e * lin
        C = C + e * k * lin
        Dbar = Dbar + 1j * e * g * lin
    return {"B1": B1, "B2": B2, "C1": C, "C2": C.copy(), "D": D, "Dbar": Dbar}


def coeffs_closed_form(
    model: CoefficientModel, params: ModelParams, t: float
) -> GaussianCoeffs:
    """Scalar closed-form coefficients; see :func:`closed_form_coefficient_arrays`.

    Raises EPDegenerateError for the sink and asymptotic families outside the
    oscillatory regime, where their 1/mu^2 terms lose meaning.
    """
    if model in (CoefficientModel.SINK_PERIODIC, CoefficientModel.ASYMPTOTIC):
        regime = derive_scales(params).regime
        if regime is not Regime.OSCILLATORY:
            raise EPDegenerateError(
                f"{model.value} coefficients require the oscillatory regime, got {regime.value}"
            )
    arrs = closed_form_coefficient_arrays(
        model, params.kappa, params.gamma, t, epsilon=params.epsilon
    )
    return GaussianCoeffs.from_complex(
        arrs["B1"], arrs["B2"], arrs["C1"], arrs["C2"], arrs["D"], arrs["Dbar"]
    )


def evolve_state(
    model: ReservoirModel, params: ModelParams, alpha0, t: float
) -> GaussianState:
    """Full Gaussian state at time t for a coherent input alpha0 = (a1, a2)."""
    a1, a2 = mean_amplitudes(params, alpha0, t)
    return GaussianState(a1, a2, coeffs_general(model, params, t), float(t), model)
