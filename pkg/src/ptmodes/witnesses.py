"""Nonclassicality depths, logarithmic negativity and per-period extrema.

The global nonclassicality depth is the largest positive eigenvalue of the
Hermitian ordering-parameter matrix

    K = [[-B1, C1*, Dbar*, D], [C1, -B1, D*, Dbar],
         [Dbar, D, -B2, C2*], [D*, Dbar*, C2, -B2]]

(the quasi-distribution with ordering parameter s stays a classical function
exactly while K - ((1-s)/2) I has no positive eigenvalue, so the threshold
shift equals lambda_max).  Per mode the same construction collapses to
tau_j = max(0, |C_j| - B_j).  Entanglement is quantified by the logarithmic
negativity E_N = max(0, -ln nu_minus), with nu_minus the smaller symplectic
eigenvalue of the covariance matrix with mode 2 partially transposed,
nu_pm^2 = delta/2 +- sqrt(delta^2/4 - det sigma).

Depths above 0.5 are incompatible with a Gaussian state and depths above 1
are outright nonphysical; both are reported as flags, never clamped, because
where the simplified reservoir models produce them is itself a result.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .coeffs import CoefficientModel, GaussianCoeffs, closed_form_coefficient_arrays
from .core import EPDegenerateError, ModelParams, Regime, derive_scales

__all__ = [
    "WitnessFlag",
    "WitnessQuantity",
    "WitnessReport",
    "CovariancePT",
    "NonHermitianInputError",
    "ComplexSymplecticEigenvalueError",
    "assemble_ordering_matrix",
    "nonclassicality_depth",
    "covariance_pt",
    "negativity",
    "witness_report",
    "period",
    "max_over_period",
]


class NonHermitianInputError(ValueError):
    """The assembled ordering-parameter matrix is not Hermitian."""


class ComplexSymplecticEigenvalueError(ValueError):
    """delta^2/4 - Delta < -1e-12: the symplectic eigenvalue is complex.

    Expected for sink/semiclassical coefficient sets in their flagged
    nonphysical regions.
    """


class WitnessFlag(enum.Flag):
    NONE = 0
    EXCEEDS_GAUSSIAN_BOUND = enum.auto()  # tau > 0.5
    NONPHYSICAL = enum.auto()             # tau > 1

    def tokens(self) -> list[str]:
        out = []
        if self & WitnessFlag.EXCEEDS_GAUSSIAN_BOUND:
            out.append("exceeds_gaussian_bound")
        if self & WitnessFlag.NONPHYSICAL:
            out.append("nonphysical")
        return out


class WitnessQuantity(enum.Enum):
    TAU = "tau"
    TAU1 = "tau1"
    TAU2 = "tau2"
    EN = "EN"


@dataclass(frozen=True)
class WitnessReport:
    """Depths, negativity and physicality flags at one time point."""

    tau: float
    tau1: float
    tau2: float
    EN: float
    flags: WitnessFlag

    def __post_init__(self):
        if not (self.tau >= max(self.tau1, self.tau2) - 1e-9):
            raise ValueError("eigenvalue interlacing violated: tau < max(tau1, tau2)")


@dataclass(frozen=True, eq=False)
class CovariancePT:
    """Partially transposed covariance matrix and its symplectic invariants."""

    sigma: np.ndarray
    Delta: float
    delta: float
    nu_minus_symp: float
    nu_plus_symp: float

    def __post_init__(self):
        self.sigma.setflags(write=False)


def assemble_ordering_matrix(coeffs, hermiticity_tol: float = 1e-10) -> np.ndarray:
    """Build K from coefficients, verifying Hermiticity.

    Accepts a :class:`GaussianCoeffs` or any 6-sequence (B1, B2, C1, C2, D,
    Dbar); B entries may then be complex, in which case an imaginary part
    beyond ``hermiticity_tol`` (relative for large entries) raises
    NonHermitianInputError - the signal for corrupted upstream coefficients.
    """
    if isinstance(coeffs, GaussianCoeffs):
        B1, B2, C1, C2, D, Db = coeffs.as_array()
    else:
        B1, B2, C1, C2, D, Db = (complex(v) for v in coeffs)
    K = np.array(
        [
            [-B1, np.conj(C1), np.conj(Db), D],
            [C1, -B1, np.conj(D), Db],
            [Db, D, -B2, np.conj(C2)],
            [np.conj(D), np.conj(Db), C2, -B2],
        ],
        dtype=complex,
    )
    resid = np.abs(K - K.conj().T).max()
    scale = max(1.0, float(np.abs(K).max()))
    if not np.isfinite(resid) or resid > hermiticity_tol * scale:
        raise NonHermitianInputError(
            f"ordering-parameter matrix fails Hermiticity by {resid:.3e}"
        )
    return K


def nonclassicality_depth(coeffs):
    """Global and per-mode depths: (tau, tau1, tau2, flags)."""
    K = assemble_ordering_matrix(coeffs)
    tau = max(0.0, float(np.linalg.eigvalsh(K)[-1]))
    B1, B2 = -K[0, 0].real, -K[2, 2].real
    C1, C2 = K[1, 0], K[3, 2]
    tau1 = max(0.0, abs(C1) - B1)
    tau2 = max(0.0, abs(C2) - B2)
    flags = WitnessFlag.NONE
    if tau > 0.5:
        flags |= WitnessFlag.EXCEEDS_GAUSSIAN_BOUND
    if tau > 1.0:
        flags |= WitnessFlag.NONPHYSICAL
    return tau, tau1, tau2, flags


def covariance_pt(coeffs: GaussianCoeffs) -> np.ndarray:
    """sigma with mode 2 partially transposed, ordering (q1, p1, q2, -p2)."""
    B1, B2 = coeffs.B1, coeffs.B2
    C1, C2, D, Db = coeffs.C1, coeffs.C2, coeffs.D, coeffs.Dbar
    s1 = np.array(
        [[1 + 2 * B1 + 2 * C1.real, 2 * C1.imag], [2 * C1.imag, 1 + 2 * B1 - 2 * C1.real]]
    )
    s2 = np.array(
        [[1 + 2 * B2 + 2 * C2.real, -2 * C2.imag], [-2 * C2.imag, 1 + 2 * B2 - 2 * C2.real]]
    )
    s12 = 2.0 * np.array(
        [[(D - Db).real, (-D + Db).imag], [(D + Db).imag, (D + Db).real]]
    )
    return np.block([[s1, s12], [s12.T, s2]])


def negativity(coeffs: GaussianCoeffs):
    """Logarithmic negativity: (EN, CovariancePT).

    Raises ComplexSymplecticEigenvalueError when the symplectic spectrum of
    the partially transposed covariance matrix leaves the real axis, which
    happens only for nonphysical coefficient sets.
    """
    sig = covariance_pt(coeffs)
    det1 = float(np.linalg.det(sig[:2, :2]))
    det2 = float(np.linalg.det(sig[2:, 2:]))
    det12 = float(np.linalg.det(sig[:2, 2:]))
    delta = det1 + det2 + 2.0 * det12
    Delta = float(np.linalg.det(sig))
    disc = 0.25 * delta * delta - Delta
    # thresholds are relative to the determinant scale: for strongly mixed
    # states delta^2/4 and Delta are huge and nearly cancel, so an absolute
    # cutoff would misread their roundoff as a complex eigenvalue
    disc_tol = 1e-12 * max(1.0, 0.25 * delta * delta, abs(Delta))
    if disc < -disc_tol:
        raise ComplexSymplecticEigenvalueError(
            f"delta^2/4 - Delta = {disc:.3e} < 0: complex symplectic eigenvalue"
        )
    root = math.sqrt(max(disc, 0.0))
    nu_m2 = 0.5 * delta - root
    nu_p2 = 0.5 * delta + root
    if nu_m2 < -1e-12 * max(1.0, abs(delta)):
        raise ComplexSymplecticEigenvalueError(
            f"nu_minus^2 = {nu_m2:.3e} < 0: complex symplectic eigenvalue"
        )
    nu_m = math.sqrt(max(nu_m2, 0.0))
    nu_p = math.sqrt(max(nu_p2, 0.0))
    EN = -math.log(nu_m) if 0.0 < nu_m < 1.0 else (math.inf if nu_m == 0.0 else 0.0)
    return EN, CovariancePT(sig, Delta, delta, nu_m, nu_p)


def witness_report(coeffs: GaussianCoeffs) -> WitnessReport:
    """Depths and negativity in one report (negativity may raise; see above)."""
    tau, tau1, tau2, flags = nonclassicality_depth(coeffs)
    EN, _ = negativity(coeffs)
    return WitnessReport(tau, tau1, tau2, EN, flags)


def period(params: ModelParams) -> float:
    """Period of the coherent evolution, T = 2 pi / mu.

    Equals 2 pi / sqrt(1 - (kappa^2 + gamma^2)/epsilon^2) in units of
    1/epsilon.  Defined in the oscillatory regime only; T diverges at the
    exceptional points.
    """
    scales = derive_scales(params)
    if scales.regime is not Regime.OSCILLATORY:
        raise EPDegenerateError(
            f"period requires the oscillatory regime, got {scales.regime.value}"
        )
    return float(2.0 * np.pi / scales.mu.real)


def _quantity_arrays(model: CoefficientModel, params: ModelParams, ts: np.ndarray):
    arrs = closed_form_coefficient_arrays(
        model, params.kappa, params.gamma, ts, epsilon=params.epsilon
    )
    tau, tau1, tau2, EN, _, flags = backend.witness_batch(
        arrs["B1"], arrs["B2"], arrs["C1"], arrs["C2"], arrs["D"], arrs["Dbar"]
    )
    return {
        WitnessQuantity.TAU: tau,
        WitnessQuantity.TAU1: tau1,
        WitnessQuantity.TAU2: tau2,
        WitnessQuantity.EN: EN,
    }, flags


def max_over_period(
    model: CoefficientModel,
    params: ModelParams,
    quantity: WitnessQuantity,
    n_samples: int = 512,
    period_index: int = 0,
):
    """Maximize a witness over one period window [k*T, (k+1)*T].

    Uniform sampling (``n_samples`` points; the coefficients oscillate at
    frequency 2 mu, so 512 points oversample the period by more than a
    hundredfold) followed by golden-section refinement of the best bracket to
    a relative time resolution of 1e-6 * T.  Returns (value, argmax_t).
    """
    T = period(params)
    t0 = period_index * T
    ts = t0 + np.linspace(0.0, T, n_samples)
    values, _ = _quantity_arrays(model, params, ts)
    vals = values[quantity]
    if np.all(np.isnan(vals)):
        return float("nan"), float(t0)
    i = int(np.nanargmax(vals))

    def f(t: float) -> float:
        v = _quantity_arrays(model, params, np.array([t]))[0][quantity][0]
        return -math.inf if np.isnan(v) else float(v)

    a = ts[max(i - 1, 0)]
    b = ts[min(i + 1, n_samples - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = f(x1), f(x2)
    while (b - a) > 1e-6 * T:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = f(x1)
    t_best = 0.5 * (a + b)
    v_best = f(t_best)
    # the coarse scan already saw the global basin; keep whichever is higher
    if vals[i] > v_best:
        return float(vals[i]), float(ts[i])
    return float(v_best), float(t_best)
