"""Independent brute-force verifiers for the analytic fast paths.

Nothing here shares code with the closed forms it checks: the matrix
exponential is scaling-and-squaring with a plain Taylor core, the
second-moment route integrates d Sigma/dt = G Sigma + Sigma G^+ + L0 with
classical RK4, and the depth oracle locates the classicality threshold of the
ordering parameter by bisection using a determinant-based positive-
semidefiniteness test (no eigensolver).  ``run_verification`` bundles the
agreement suites behind the CLI ``verify`` subcommand; all sampling is seeded
and the report is byte-reproducible for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coeffs import CoefficientModel, GaussianCoeffs, closed_form_coefficient_arrays, coeffs_general
from .core import ModelParams, build_system, dynamical_matrix
from .dynamics import (
    ReservoirModel,
    equal_time_commutators,
    ff_from_L0,
    full_propagator_matrix,
    noise_moments_full,
    propagator,
    tailor_reservoir,
)
from .witnesses import assemble_ordering_matrix, nonclassicality_depth, period

__all__ = [
    "OracleConfig",
    "CheckResult",
    "VerificationReport",
    "expm_oracle",
    "moment_ode_oracle",
    "moment_ode_batch",
    "s_scan_depth_oracle",
    "run_verification",
]

DEFAULT_TOLERANCES = {
    "propagator_vs_expm": 1e-9,
    "noise_closed_vs_ode": 1e-7,
    "noise_closed_vs_eigenpath": 1e-10,
    "sink_periodicity": 1e-9,
    "secular_decomposition": 1e-9,
    "commutator_preservation": 1e-8,
    "depth_eigen_vs_sscan": 1e-7,
    "coeffs_dual_path": 1e-9,
    "rk4_convergence": 1.0,  # 8/(error ratio when halving the step) must be <= 1
}


@dataclass(frozen=True)
class OracleConfig:
    """Knobs for the verification suites.

    ``tol_scale`` multiplies every tolerance (useful to demonstrate that the
    suite actually fails when the bar is impossible).
    """

    expm_terms: int = 20
    ode_steps_per_period: int = 1000
    s_scan_bounds: tuple[float, float] = (-3.0, 1.0)
    s_scan_tol: float = 1e-8
    n_samples: int = 200
    seed: int = 20230917
    tol_scale: float = 1.0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def __post_init__(self):
        if self.ode_steps_per_period < 1000:
            raise ValueError("ode_steps_per_period must be >= 1000")
        if any(t <= 0 for t in self.tolerances.values()):
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


@dataclass(frozen=True)
class VerificationReport:
    seed: int
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def format(self) -> str:
        lines = [f"verification suite (seed={self.seed})"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(
                f"  {c.name:28s} max deviation {c.deviation:.3e}  (tol {c.tolerance:.1e})  {status}"
            )
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def expm_oracle(M: np.ndarray, t: float, terms: int = 20) -> np.ndarray:
    """exp(M t) by scaling-and-squaring around a plain Taylor core."""
    A = np.asarray(M, dtype=complex) * t
    norm = np.abs(A).sum(axis=0).max()
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    B = A / (2.0**squarings)
    out = np.eye(4, dtype=complex)
    term = np.eye(4, dtype=complex)
    for k in range(1, terms + 1):
        term = term @ B / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def moment_ode_oracle(M: np.ndarray, L0: np.ndarray, t: float, steps: int) -> np.ndarray:
    """RK4 integration of d Sigma/dt = M Sigma + Sigma M^+ + L0 from Sigma(0)=0.

    ``M`` is the evolution generator (for this library, ``system.generator``).
    """
    out = moment_ode_batch(
        np.asarray(M, dtype=complex)[None], np.asarray(L0, dtype=complex)[None],
        np.array([t], dtype=float), steps,
    )
    return out[0]


def moment_ode_batch(Ms: np.ndarray, L0s: np.ndarray, ts: np.ndarray, steps: int) -> np.ndarray:
    """Vectorized RK4 over a batch of (generator, strength, horizon) triples."""
    Ms = np.asarray(Ms, dtype=complex)
    L0s = np.asarray(L0s, dtype=complex)
    ts = np.asarray(ts, dtype=float)
    n = Ms.shape[0]
    S = np.zeros((n, 4, 4), dtype=complex)
    h = (ts / steps)[:, None, None]
    Mh = Ms.conj().transpose(0, 2, 1)

    def rhs(S):
        return Ms @ S + S @ Mh + L0s

    for _ in range(steps):
        k1 = rhs(S)
        k2 = rhs(S + 0.5 * h * k1)
        k3 = rhs(S + 0.5 * h * k2)
        k4 = rhs(S + h * k3)
        S = S + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return S


def _char_poly_psd(A: np.ndarray, tol: float = 1e-11) -> bool:
    """Hermitian A is PSD iff every elementary symmetric sum of its spectrum
    is nonnegative; those are the sums of principal k-minors."""
    scale = max(1.0, float(np.abs(A).max()))
    e1 = float(np.trace(A).real)
    e2 = 0.0
    idx = range(4)
    for i in idx:
        for j in range(i + 1, 4):
            e2 += (A[i, i] * A[j, j] - A[i, j] * A[j, i]).real
    e3 = 0.0
    for drop in idx:
        keep = [k for k in idx if k != drop]
        e3 += float(np.linalg.det(A[np.ix_(keep, keep)]).real)
    e4 = float(np.linalg.det(A).real)
    return (
        e1 >= -tol * scale
        and e2 >= -tol * scale**2
        and e3 >= -tol * scale**3
        and e4 >= -tol * scale**4
    )


def s_scan_depth_oracle(
    coeffs,
    s_bounds: tuple[float, float] = (-3.0, 1.0),
    s_tol: float = 1e-8,
) -> float:
    """Depth from bisection on the ordering parameter.

    The s-ordered quasi-distribution is classical while K - ((1-s)/2) I has no
    positive eigenvalue; the threshold s_th gives tau = (1 - s_th)/2.  The
    classicality test uses principal-minor sums, fully independent of the
    eigenvalue route.
    """
    K = assemble_ordering_matrix(coeffs)

    def classical(s: float) -> bool:
        shifted = -(K - 0.5 * (1.0 - s) * np.eye(4))
        return _char_poly_psd(shifted)

    lo, hi = s_bounds
    if classical(hi):
        return 0.0
    if not classical(lo):
        raise ValueError(f"depth exceeds scan range: tau > {(1 - lo) / 2}")
    while hi - lo > s_tol:
        mid = 0.5 * (lo + hi)
        if classical(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (1.0 - 0.5 * (lo + hi))


# ---------------------------------------------------------------------------
# verification suite
# ---------------------------------------------------------------------------


def _sample_params(rng: np.random.Generator, n: int, mu_t_cap: float = 8.0):
    """Seeded parameter/time triples spanning oscillatory, exponential and
    near-degenerate regions, with |mu| t capped so that identity checks are
    meaningful at double precision (entries stay below ~e^16)."""
    out = []
    while len(out) < n:
        k = rng.uniform(0.0, 1.5)
        g = rng.uniform(0.0, 1.5)
        t = rng.uniform(0.0, 20.0)
        absmu = abs(np.sqrt(complex(1.0 - k * k - g * g)))
        if absmu * t > mu_t_cap:
            t = mu_t_cap / absmu * rng.uniform(0.2, 1.0)
        out.append((ModelParams(1.0, k, g), t))
    return out


def _random_coeffs(rng: np.random.Generator) -> GaussianCoeffs:
    B1, B2 = rng.uniform(0.0, 0.6, 2)
    z = rng.normal(0.0, 0.3, 8)
    return GaussianCoeffs(
        B1, B2, complex(z[0], z[1]), complex(z[2], z[3]), complex(z[4], z[5]), complex(z[6], z[7])
    )


def run_verification(config: OracleConfig | None = None) -> VerificationReport:
    """Run the oracle agreement suites and return a deterministic report."""
    cfg = config or OracleConfig()
    rng = np.random.default_rng(cfg.seed)
    tol = {k: v * cfg.tol_scale for k, v in cfg.tolerances.items()}
    checks = []

    samples = _sample_params(rng, cfg.n_samples)

    # 1. closed-form propagator vs expm oracle (scale-normalized)
    dev = 0.0
    for params, t in samples:
        P = full_propagator_matrix(propagator(params, t))
        Q = expm_oracle(build_generator(params), t, cfg.expm_terms)
        dev = max(dev, float(np.abs(P - Q).max() / max(1.0, np.abs(Q).max())))
    checks.append(CheckResult("propagator_vs_expm", dev, tol["propagator_vs_expm"]))

    # 2. closed-form noise moments vs RK4 moment ODE (scale-normalized)
    sub = samples[:: max(1, len(samples) // 40)]
    Ms = np.array([build_generator(p) for p, _ in sub])
    L0s = np.array([np.diag([2.0 * p.gamma, 0, 0, 2.0 * p.gamma]) for p, _ in sub], dtype=complex)
    ts = np.array([t for _, t in sub])
    steps = max(cfg.ode_steps_per_period * 4, 4000)
    Sig = moment_ode_batch(Ms, L0s, ts, steps)
    dev = 0.0
    for i, (params, t) in enumerate(sub):
        FF = noise_moments_full(params, t).FF
        dev = max(dev, float(np.abs(FF - Sig[i]).max() / max(1.0, np.abs(Sig[i]).max())))
    checks.append(CheckResult("noise_closed_vs_ode", dev, tol["noise_closed_vs_ode"]))

    # 3. hand transcription vs eigenbasis integral, away from degeneracies
    dev = 0.0
    for params, t in samples:
        if abs(params.mu_squared) < 1e-3 or abs(params.epsilon - params.kappa) < 0.05:
            continue
        sys_ = build_system(params)
        L0 = np.diag([2.0 * params.gamma, 0, 0, 2.0 * params.gamma]).astype(complex)
        FF_eig = ff_from_L0(sys_, L0, t).FF
        dev = max(
            dev,
            float(
                np.abs(noise_moments_full(params, t).FF - FF_eig).max()
                / max(1.0, np.abs(FF_eig).max())
            ),
        )
    checks.append(CheckResult("noise_closed_vs_eigenpath", dev, tol["noise_closed_vs_eigenpath"]))

    # 4/5. sink noise is periodic and carries exactly the non-secular part
    params = ModelParams(1.0, 0.5, 0.3)
    sys_ = build_system(params)
    L_t, L_sink = tailor_reservoir(params)
    T = period(params)
    dev_p = dev_s = 0.0
    for t in (0.37 * T, 0.81 * T, 2.6 * T):
        a = ff_from_L0(sys_, L_sink, t).FF
        b = ff_from_L0(sys_, L_sink, t + T).FF
        dev_p = max(dev_p, float(np.abs(a - b).max()))
        full = noise_moments_full(params, t).FF
        secular = ff_from_L0(sys_, L_t, t).FF
        dev_s = max(dev_s, float(np.abs(full - a - secular).max()))
    checks.append(CheckResult("sink_periodicity", dev_p, tol["sink_periodicity"]))
    checks.append(CheckResult("secular_decomposition", dev_s, tol["secular_decomposition"]))

    # 6. canonical commutators preserved by full and sink reservoirs
    dev = 0.0
    for params, t in samples[:40]:
        prop = propagator(params, t)
        dev = max(
            dev,
            float(
                np.abs(equal_time_commutators(prop, noise_moments_full(params, t)) - np.eye(2)).max()
            ),
        )
        if params.mu_squared > 1e-3 and params.gamma > 0:
            _, L_sink = tailor_reservoir(params)
            m = ff_from_L0(build_system(params), L_sink, t)
            dev = max(
                dev, float(np.abs(equal_time_commutators(prop, m) - np.eye(2)).max())
            )
    checks.append(CheckResult("commutator_preservation", dev, tol["commutator_preservation"]))

    # 7. eigenvalue route vs ordering-parameter bisection
    dev = 0.0
    for _ in range(100):
        c = _random_coeffs(rng)
        tau_eig = nonclassicality_depth(c)[0]
        tau_scan = s_scan_depth_oracle(c, cfg.s_scan_bounds, cfg.s_scan_tol)
        dev = max(dev, abs(tau_eig - tau_scan))
    checks.append(CheckResult("depth_eigen_vs_sscan", dev, tol["depth_eigen_vs_sscan"]))

    # 8. general coefficient route vs closed forms (oscillatory regime)
    dev = 0.0
    count = 0
    while count < 60:
        k = rng.uniform(0.0, 1.0)
        g = rng.uniform(0.0, 1.0)
        if 1.0 - k * k - g * g < 1e-2:
            continue
        count += 1
        params = ModelParams(1.0, k, g)
        t = rng.uniform(0.0, 3.0 * period(params))
        cg = coeffs_general(ReservoirModel.FULL_PHYSICAL, params, t).as_array()
        arrs = closed_form_coefficient_arrays(CoefficientModel.FULL, k, g, t)
        cc = np.array([arrs[n] for n in ("B1", "B2", "C1", "C2", "D", "Dbar")], dtype=complex)
        dev = max(dev, float(np.abs(cg - cc).max()))
    checks.append(CheckResult("coeffs_dual_path", dev, tol["coeffs_dual_path"]))

    # 9. RK4 order: halving the step cuts the moment error by >= 8x
    params = ModelParams(1.0, 0.5, 0.3)
    G = build_generator(params)
    L0 = np.diag([0.6, 0, 0, 0.6]).astype(complex)
    truth = noise_moments_full(params, 2.0).FF
    e_coarse = np.abs(moment_ode_oracle(G, L0, 2.0, 200) - truth).max()
    e_fine = np.abs(moment_ode_oracle(G, L0, 2.0, 400) - truth).max()
    ratio = float(e_coarse / e_fine)
    checks.append(CheckResult("rk4_convergence", 8.0 / ratio, tol["rk4_convergence"]))

    return VerificationReport(cfg.seed, tuple(checks))


def build_generator(params: ModelParams) -> np.ndarray:
    """The Heisenberg-Langevin generator -iM without the eigenbasis guard."""
    return -1j * dynamical_matrix(params)
