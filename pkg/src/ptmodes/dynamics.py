"""Coherent propagator, reservoir noise budgets and reservoir tailoring.

The solution of the Heisenberg-Langevin equations splits into a coherent part,
a(t) = U(t) a(0) + V(t) a^+(0), and accumulated force noise f(t) whose
equal-time second moments form a 4x4 Hermitian matrix FF(t).  Three reservoir
models are supported:

* ``FULL_PHYSICAL`` - both modes coupled to their physical reservoirs
  (vacuum for the lossy mode, inverted for the amplified one); FF carries
  secular terms growing linearly in t on top of the periodic motion.
* ``SINK`` - a tailored common reservoir whose delta-correlation matrix is
  chosen to cancel exactly the secular terms; its correlation matrix has a
  negative eigenvalue (it removes noise), which is why it is nonphysical.
* ``SEMICLASSICAL`` - the fluctuating forces dropped altogether, violating
  the fluctuation-dissipation balance; FF = 0.

Two independent routes compute FF for an arbitrary strength matrix L0: the
hand-transcribed closed form (`noise_moments_full`, full-physical reservoir
only) and the eigenbasis integral (`ff_from_L0`); they cross-check each other
and the Runge-Kutta oracle in :mod:`ptmodes.oracle`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._trig import exprel, sin2_over_mu2, sin_over_mu, sincos_minus_t_over_mu3, sincos_over_mu
from .core import (
    EP_TOL_DEFAULT,
    DynamicalSystem,
    EPDegenerateError,
    ModelParams,
    Regime,
    derive_scales,
)

__all__ = [
    "ReservoirModel",
    "ReservoirSpec",
    "Propagator",
    "NoiseMoments",
    "SinkDiagnostics",
    "propagator",
    "full_propagator_matrix",
    "reservoir_spec",
    "noise_moments_full",
    "ff_from_L0",
    "tailor_reservoir",
    "sink_diagnostics",
    "equal_time_commutators",
]


class ReservoirModel(enum.Enum):
    FULL_PHYSICAL = "full"
    SINK = "sink"
    SEMICLASSICAL = "semiclassical"


@dataclass(frozen=True, eq=False)
class ReservoirSpec:
    """A reservoir model together with its delta-correlation strength matrix.

    L0 is defined by <L(t) L^+T(t')> = L0 * delta(t - t') in the operator
    ordering (l1, l1+, l2, l2+).
    """

    model: ReservoirModel
    L0: np.ndarray

    def __post_init__(self):
        self.L0.setflags(write=False)


@dataclass(frozen=True, eq=False)
class Propagator:
    """Coherent evolution blocks at time t: a(t) = U a(0) + V a*(0).

    U(0) = 1, V(0) = 0; V is anti-diagonal and symmetric at all times.
    """

    U: np.ndarray
    V: np.ndarray
    t: float

    def __post_init__(self):
        self.U.setflags(write=False)
        self.V.setflags(write=False)


@dataclass(frozen=True, eq=False)
class NoiseMoments:
    """Equal-time force correlations <F(t) F^+T(t)> in (f1, f1+, f2, f2+)."""

    FF: np.ndarray
    t: float

    def __post_init__(self):
        self.FF.setflags(write=False)

    @property
    def F1(self) -> np.ndarray:
        return self.FF[:2, :2]

    @property
    def F2(self) -> np.ndarray:
        return self.FF[2:, 2:]

    @property
    def F12(self) -> np.ndarray:
        return self.FF[:2, 2:]

    def force_moments(self):
        """The six noise moments entering the characteristic-function coefficients.

        Returns (<f1+ f1>, <f2+ f2>, <f1^2>, <f2^2>, <f1 f2>, <f1+ f2>).
        """
        FF = self.FF
        return FF[1, 1], FF[3, 3], FF[0, 1], FF[2, 3], FF[0, 3], FF[1, 3]


@dataclass(frozen=True)
class SinkDiagnostics:
    """Eigenvalue pair and total strength of the tailored sink reservoir.

    nu_plus and nu_minus are each doubly degenerate; Lambda = 2*(nu+ + nu-)
    = 4*gamma*(1 - epsilon^2/mu^2) is <= 0 in the oscillatory regime and
    diverges to -inf at the exceptional points (``divergent`` flags that).
    """

    nu_plus: float
    nu_minus: float
    Lambda: float
    divergent: bool = False


def propagator(params: ModelParams, t: float) -> Propagator:
    """Evaluate U(t), V(t) in closed form, valid in every regime.

    With s = sin(mu t), c = cos(mu t),

        U = [[c - gamma s/mu, -i eps s/mu], [-i eps s/mu, c + gamma s/mu]]
        V = -(i kappa s/mu) [[0, 1], [1, 0]]

    s/mu is evaluated by its series near mu t = 0, so the exceptional-point
    limits (s/mu -> t, c -> 1) come out exactly.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    e, k, g = params.epsilon, params.kappa, params.gamma
    mu = derive_scales(params).mu
    som = complex(sin_over_mu(mu, t))
    c = complex(np.cos(mu * t))
    U = np.array(
        [[c - g * som, -1j * e * som], [-1j * e * som, c + g * som]], dtype=complex
    )
    V = -1j * k * som * np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    return Propagator(U, V, float(t))


def full_propagator_matrix(prop: Propagator) -> np.ndarray:
    """Assemble the 4x4 P(t) in (a1, a1+, a2, a2+) from the U, V blocks."""
    P = np.zeros((4, 4), dtype=complex)
    ix_a = np.ix_([0, 2], [0, 2])
    ix_c = np.ix_([1, 3], [1, 3])
    P[ix_a] = prop.U
    P[np.ix_([0, 2], [1, 3])] = prop.V
    P[ix_c] = prop.U.conj()
    P[np.ix_([1, 3], [0, 2])] = prop.V.conj()
    return P


def _sink_matrix(params: ModelParams) -> np.ndarray:
    e, k, g = params.epsilon, params.kappa, params.gamma
    m2 = params.mu_squared
    pref = e * g / m2
    return pref * np.array(
        [
            [2.0 * m2 / e - e, k, 1j * g, 0.0],
            [k, -e, 0.0, -1j * g],
            [-1j * g, 0.0, -e, k],
            [0.0, 1j * g, k, 2.0 * m2 / e - e],
        ],
        dtype=complex,
    )


def reservoir_spec(
    model: ReservoirModel, params: ModelParams, ep_tol: float = EP_TOL_DEFAULT
) -> ReservoirSpec:
    """Build the delta-correlation strength matrix L0 for a reservoir model.

    The full-physical matrix is diag(2 gamma, 0, 0, 2 gamma); the semiclassical
    one is zero; the sink matrix requires the oscillatory regime (it diverges
    at the exceptional points and has no meaning beyond them).
    """
    g = params.gamma
    if model is ReservoirModel.FULL_PHYSICAL:
        L0 = np.diag([2.0 * g, 0.0, 0.0, 2.0 * g]).astype(complex)
    elif model is ReservoirModel.SEMICLASSICAL:
        L0 = np.zeros((4, 4), dtype=complex)
    elif model is ReservoirModel.SINK:
        regime = derive_scales(params, ep_tol).regime
        if regime is not Regime.OSCILLATORY:
            raise EPDegenerateError(
                f"sink reservoir requires the oscillatory regime, got {regime.value}"
            )
        L0 = _sink_matrix(params)
    else:  # pragma: no cover
        raise ValueError(model)
    return ReservoirSpec(model, L0)


def noise_moments_full(params: ModelParams, t: float) -> NoiseMoments:
    """Closed-form <F F^+T>(t) for the full-physical reservoir.

    Block layout [[F1, F12], [F12^*T, F2]] with, writing s = sin(mu t),
    c = cos(mu t) and Fa = [[-eps, kappa], [kappa, -eps]]:

        F1  = (2g/mu)(sc - g s^2/mu) [[1,0],[0,0]] + (g eps/mu^3)(sc - mu t) Fa
        F2  = (2g/mu)(sc + g s^2/mu) [[0,0],[0,1]] + (g eps/mu^3)(sc - mu t) Fa
        F12 = (i eps g^2/mu^3)(sc - mu t) diag(1,-1) + (i g/mu^2) s^2 [[eps,-2k],[0,eps]]

    All mu-singular combinations are evaluated through their series kernels,
    so exceptional-point limits are exact and FF(0) = 0, and FF vanishes
    identically for gamma = 0 (no damping, no noise).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    e, k, g = params.epsilon, params.kappa, params.gamma
    mu = derive_scales(params).mu
    scm = complex(sincos_over_mu(mu, t))        # sc/mu
    s22 = complex(sin2_over_mu2(mu, t))         # s^2/mu^2
    sct3 = complex(sincos_minus_t_over_mu3(mu, t))  # (sc - mu t)/mu^3
    Fa = np.array([[-e, k], [k, -e]], dtype=complex)
    F1 = 2.0 * g * (scm - g * s22) * np.array([[1.0, 0.0], [0.0, 0.0]]) + g * e * sct3 * Fa
    F2 = 2.0 * g * (scm + g * s22) * np.array([[0.0, 0.0], [0.0, 1.0]]) + g * e * sct3 * Fa
    F12 = 1j * e * g * g * sct3 * np.diag([1.0, -1.0]) + 1j * g * s22 * np.array(
        [[e, -2.0 * k], [0.0, e]], dtype=complex
    )
    FF = np.block([[F1, F12], [F12.conj().T, F2]])
    return NoiseMoments(FF, float(t))


def ff_from_L0(system: DynamicalSystem, L0: np.ndarray, t: float) -> NoiseMoments:
    """Accumulated noise moments for an arbitrary strength matrix L0.

    In the eigenbasis of the generator -iM the double time integral collapses
    entrywise: with G = T^-1 L0 (T^-1)^+ and lam the generator eigenvalues,
    entry (i, j) integrates to t * exprel((lam_i + lam_j^*) t), which reduces
    to plain t on the secular positions lam_i + lam_j^* = 0.  The result is
    mapped back through T ... T^+.

    The construction needs a well-conditioned eigenbasis, hence a
    :class:`DynamicalSystem`; close to the degeneracies callers should fall
    back to :func:`ptmodes.oracle.moment_ode_oracle`.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    lam = system.generator_eigenvalues
    G = system.T_inv @ np.asarray(L0, dtype=complex) @ system.T_inv.conj().T
    S = lam[:, None] + lam[None, :].conj()
    E = t * exprel(S * t)
    FF = system.T @ (G * E) @ system.T.conj().T
    return NoiseMoments(FF, float(t))


def tailor_reservoir(params: ModelParams, ep_tol: float = EP_TOL_DEFAULT):
    """Invert the noise map: split the physical reservoir into secular + sink parts.

    Returns (L_t, L_sink) where L_t is the strength matrix that alone
    reproduces exactly the linear-in-t noise terms,

        L_t = (eps*gamma/mu^2) * [[eps, -k, -i g, 0], [-k, eps, 0, i g],
                                  [i g, 0, eps, -k], [0, -i g, -k, eps]],

    and L_sink = L0_full - L_t (entrywise identity, no tolerance needed).
    Feeding L_sink to :func:`ff_from_L0` yields strictly periodic noise.
    """
    regime = derive_scales(params, ep_tol).regime
    if regime is not Regime.OSCILLATORY:
        raise EPDegenerateError(
            f"reservoir tailoring requires the oscillatory regime, got {regime.value}"
        )
    e, k, g = params.epsilon, params.kappa, params.gamma
    m2 = params.mu_squared
    L_t = (e * g / m2) * np.array(
        [
            [e, -k, -1j * g, 0.0],
            [-k, e, 0.0, 1j * g],
            [1j * g, 0.0, e, -k],
            [0.0, -1j * g, -k, e],
        ],
        dtype=complex,
    )
    L_full = np.diag([2.0 * g, 0.0, 0.0, 2.0 * g]).astype(complex)
    return L_t, L_full - L_t


def sink_diagnostics(params: ModelParams, ep_tol: float = EP_TOL_DEFAULT) -> SinkDiagnostics:
    """Eigenvalues and strength of the sink reservoir matrix.

        nu_pm  = (g/mu^2) * (-k^2 - g^2 +- sqrt(mu^4 + eps^2 (k^2 + g^2)))
        Lambda = 2 (nu+ + nu-) = 4 g (1 - eps^2/mu^2)

    nu_minus < 0 whenever mu > 0 and gamma > 0: the tailored reservoir takes
    noise out of the system.  At the exceptional points Lambda -> -inf, which
    is reported as signed infinity with ``divergent=True``.  Outside the
    oscillatory regime the sink model is undefined and EPDegenerateError is
    raised.
    """
    e, k, g = params.epsilon, params.kappa, params.gamma
    regime = derive_scales(params, ep_tol).regime
    if regime is Regime.EXPONENTIAL:
        raise EPDegenerateError("sink diagnostics require the oscillatory regime")
    if regime is Regime.EXCEPTIONAL_POINT:
        if g == 0.0:
            return SinkDiagnostics(0.0, 0.0, 0.0)
        return SinkDiagnostics(float(g), float("-inf"), float("-inf"), divergent=True)
    m2 = params.mu_squared
    root = np.sqrt(m2 * m2 + e * e * (k * k + g * g))
    nu_plus = (g / m2) * (-k * k - g * g + root)
    nu_minus = (g / m2) * (-k * k - g * g - root)
    Lambda = 4.0 * g * (1.0 - e * e / m2)
    return SinkDiagnostics(float(nu_plus), float(nu_minus), float(Lambda))


def equal_time_commutators(prop: Propagator, moments: NoiseMoments) -> np.ndarray:
    """The 2x2 matrix [a_j(t), a_k^+(t)] from the coherent and force parts.

    Equals the identity whenever the reservoir satisfies the
    fluctuation-dissipation balance (full-physical and sink models); the
    semiclassical model's deviation from identity quantifies its violation.
    """
    U, V, FF = prop.U, prop.V, moments.FF
    force = np.array(
        [[FF[2 * j, 2 * k] - FF[2 * k + 1, 2 * j + 1] for k in range(2)] for j in range(2)]
    )
    return U @ U.conj().T - V @ V.conj().T + force
