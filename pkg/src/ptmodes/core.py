"""System parameters, spectral scales and the 4x4 dynamical matrix.

Two bosonic modes exchange energy at rate ``epsilon``, are pair-coupled by a
parametric nonlinearity ``kappa``, and see balanced loss/gain ``gamma`` (mode 1
damped, mode 2 amplified).  In the operator ordering (a1, a1+, a2, a2+) the
dynamics is governed by a non-Hermitian matrix M whose spectrum is
{+mu, +mu, -mu, -mu} with mu = sqrt(epsilon^2 - kappa^2 - gamma^2):

    M = [[-i*gamma, 0,        epsilon,  kappa   ],
         [0,        -i*gamma, -kappa,   -epsilon],
         [epsilon,  kappa,    i*gamma,  0       ],
         [-kappa,   -epsilon, 0,        i*gamma ]]

Heisenberg-Langevin time evolution is generated by -iM, i.e. the propagator is
P(t) = exp(-iMt).  Keeping M itself (real spectrum in the unbroken phase,
eigenvalue collapse mu -> 0 at the exceptional points kappa^2+gamma^2 =
epsilon^2) makes the regime structure explicit, while every evolution formula
downstream consistently uses the generator -iM.

All quantities scale with epsilon: only kappa/epsilon, gamma/epsilon and
epsilon*t matter, so callers typically fix epsilon = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "EP_TOL_DEFAULT",
    "EPDegenerateError",
    "Regime",
    "ModelParams",
    "DerivedScales",
    "DynamicalSystem",
    "derive_scales",
    "build_system",
]

#: Relative threshold on |mu^2|/epsilon^2 below which the eigenbasis is
#: treated as degenerate and closed forms switch to their series limits.
EP_TOL_DEFAULT = 1e-9


class EPDegenerateError(ValueError):
    """Eigendecomposition unavailable: parameters sit on a degeneracy locus.

    Raised at the exceptional points (mu -> 0) and on the kappa = epsilon line
    (xi -> 0) where the analytic eigenvector columns coalesce.  Callers must
    use the limit formulas or an ODE fallback instead.
    """


class Regime(enum.Enum):
    """Spectral phase of the coupled-mode matrix."""

    OSCILLATORY = "oscillatory"
    EXCEPTIONAL_POINT = "exceptional_point"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class ModelParams:
    """The three real rates defining the system, in units of inverse time.

    epsilon : energy-exchange coupling, > 0
    kappa   : parametric pair coupling, >= 0
    gamma   : damping of mode 1 = amplification of mode 2, >= 0
    """

    epsilon: float
    kappa: float
    gamma: float = 0.0

    def __post_init__(self):
        if not np.isfinite([self.epsilon, self.kappa, self.gamma]).all():
            raise ValueError("rates must be finite")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("kappa and gamma must be >= 0")

    @property
    def mu_squared(self) -> float:
        """epsilon^2 - kappa^2 - gamma^2, the squared spectral scale (exact)."""
        return self.epsilon**2 - self.kappa**2 - self.gamma**2


@dataclass(frozen=True)
class DerivedScales:
    """Spectral quantities derived from the rates, as principal complex roots.

    xi = sqrt(epsilon^2 - kappa^2), mu = sqrt(epsilon^2 - kappa^2 - gamma^2),
    zeta_pm = sqrt(epsilon +- xi), psi_pm = (mu +- i gamma)/xi.  In the
    exponential regime mu is purely imaginary and the trigonometric evolution
    formulas continue analytically to hyperbolic behavior with no extra code
    path.
    """

    xi: complex
    mu: complex
    zeta_plus: complex
    zeta_minus: complex
    psi_plus: complex
    psi_minus: complex
    regime: Regime


def derive_scales(params: ModelParams, ep_tol: float = EP_TOL_DEFAULT) -> DerivedScales:
    """Compute the derived spectral scales and classify the regime.

    The regime is Oscillatory for mu^2 > ep_tol*epsilon^2, ExceptionalPoint for
    |mu^2| <= ep_tol*epsilon^2 and Exponential otherwise.  Complex arithmetic
    handles every branch; at kappa = epsilon the psi_pm fields are infinite
    (xi = 0) and only the eigenbasis construction is affected.
    """
    e, k, g = params.epsilon, params.kappa, params.gamma
    xi = np.sqrt(complex(e * e - k * k))
    mu2 = params.mu_squared
    mu = np.sqrt(complex(mu2))
    zeta_plus = np.sqrt(e + xi)
    zeta_minus = np.sqrt(e - xi)
    with np.errstate(divide="ignore", invalid="ignore"):
        psi_plus = (mu + 1j * g) / xi if xi != 0 else complex("inf")
        psi_minus = (mu - 1j * g) / xi if xi != 0 else complex("inf")
    if abs(mu2) <= ep_tol * e * e:
        regime = Regime.EXCEPTIONAL_POINT
    elif mu2 > 0:
        regime = Regime.OSCILLATORY
    else:
        regime = Regime.EXPONENTIAL
    return DerivedScales(xi, mu, zeta_plus, zeta_minus, psi_plus, psi_minus, regime)


def dynamical_matrix(params: ModelParams) -> np.ndarray:
    """The 4x4 coupled-mode matrix M in the ordering (a1, a1+, a2, a2+)."""
    e, k, g = params.epsilon, params.kappa, params.gamma
    return np.array(
        [
            [-1j * g, 0.0, e, k],
            [0.0, -1j * g, -k, -e],
            [e, k, 1j * g, 0.0],
            [-k, -e, 0.0, 1j * g],
        ],
        dtype=complex,
    )


@dataclass(frozen=True, eq=False)
class DynamicalSystem:
    """M together with its analytic eigendecomposition M = T diag(Lambda) T^-1.

    ``Lambda_M`` is mu*(1, 1, -1, -1).  ``generator`` (= -iM) is the matrix
    that actually generates time evolution, P(t) = exp(generator * t); its
    eigenvalues are -i*Lambda_M in the same eigenbasis.
    """

    params: ModelParams
    scales: DerivedScales
    M: np.ndarray
    T: np.ndarray
    T_inv: np.ndarray
    Lambda_M: np.ndarray
    generator: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "generator", -1j * self.M)
        for a in (self.M, self.T, self.T_inv, self.Lambda_M, self.generator):
            a.setflags(write=False)

    @property
    def generator_eigenvalues(self) -> np.ndarray:
        """Eigenvalues of -iM, i.e. -i*mu*(1, 1, -1, -1)."""
        return -1j * self.Lambda_M


def build_system(params: ModelParams, ep_tol: float = EP_TOL_DEFAULT) -> DynamicalSystem:
    """Assemble M, T, T^-1 and the eigenvalues for non-degenerate parameters.

    Columns of T are the analytic eigenvectors

        T_{1,2} = (zeta^pm, -zeta^mp, +-zeta^pm psi^+, -+zeta^mp psi^+) / (2 sqrt(eps))
        T_{3,4} = (zeta^pm, -zeta^mp, -+zeta^pm psi^-, +-zeta^mp psi^-) / (2 sqrt(eps))

    and T^-1 follows in closed form from the block identities z^2 = 2*xi*I and
    psi^+ + psi^- = 2*mu/xi, with overall prefactor sqrt(eps)/(2*mu).

    Raises:
        EPDegenerateError: at the exceptional points (|mu^2| small) and on the
            kappa = epsilon line (|xi^2| small) where the columns coalesce.
    """
    scales = derive_scales(params, ep_tol)
    e = params.epsilon
    if scales.regime is Regime.EXCEPTIONAL_POINT:
        raise EPDegenerateError(
            f"eigenbasis degenerates at the exceptional point (mu^2 = {params.mu_squared:.3e})"
        )
    if abs(scales.xi**2) <= ep_tol * e * e:
        raise EPDegenerateError(
            "eigenbasis degenerates at kappa = epsilon (xi = 0); use the ODE fallback"
        )
    zp, zm = scales.zeta_plus, scales.zeta_minus
    pp, pm = scales.psi_plus, scales.psi_minus
    mu = scales.mu

    pref = 1.0 / (2.0 * np.sqrt(e))
    T = pref * np.array(
        [
            [zp, zm, zp, zm],
            [-zm, -zp, -zm, -zp],
            [zp * pp, -zm * pp, -zp * pm, zm * pm],
            [-zm * pp, zp * pp, zm * pm, -zp * pm],
        ],
        dtype=complex,
    )
    z = np.array([[zp, zm], [-zm, -zp]], dtype=complex)
    sz = np.array([[zp, zm], [zm, zp]], dtype=complex)  # diag(1,-1) @ z
    T_inv = (np.sqrt(e) / (2.0 * mu)) * np.block([[pm * z, sz], [pp * z, -sz]])
    Lambda_M = mu * np.array([1.0, 1.0, -1.0, -1.0], dtype=complex)
    return DynamicalSystem(params, scales, dynamical_matrix(params), T, T_inv, Lambda_M)
