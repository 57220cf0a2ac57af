"""Propagator blocks, noise budgets, reservoir tailoring and sink diagnostics."""

import numpy as np
import pytest
import scipy.linalg

from ptmodes.core import EPDegenerateError, ModelParams, build_system, derive_scales
from ptmodes.dynamics import (
    ReservoirModel,
    equal_time_commutators,
    ff_from_L0,
    full_propagator_matrix,
    noise_moments_full,
    propagator,
    reservoir_spec,
    sink_diagnostics,
    tailor_reservoir,
)
from ptmodes.oracle import build_generator, moment_ode_oracle
from ptmodes.witnesses import period

P_BEAMSPLITTER = ModelParams(1.0, 0.0, 0.0)
P_REF = ModelParams(1.0, 0.5, 0.3)


def test_propagator_boundary_condition():
    prop = propagator(P_REF, 0.0)
    assert np.array_equal(prop.U, np.eye(2))
    assert np.array_equal(prop.V, np.zeros((2, 2)))


def test_propagator_beam_splitter_swap():
    prop = propagator(P_BEAMSPLITTER, np.pi / 2)
    want = np.array([[0, -1j], [-1j, 0]])
    assert np.abs(prop.U - want).max() < 1e-15
    assert np.abs(prop.V).max() == 0.0


def test_propagator_V_antidiagonal_symmetric():
    for t in (0.3, 1.7, 6.0):
        V = propagator(P_REF, t).V
        assert V[0, 0] == 0 and V[1, 1] == 0
        assert V[0, 1] == V[1, 0]


def test_propagator_matches_expm_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        k, g = rng.uniform(0, 1.5, 2)
        t = rng.uniform(0, 8)
        p = ModelParams(1.0, k, g)
        P = full_propagator_matrix(propagator(p, t))
        Q = scipy.linalg.expm(build_generator(p) * t)
        assert np.abs(P - Q).max() < 1e-10 * max(1.0, np.abs(Q).max())


def test_propagator_ep_limit():
    p = ModelParams(1.0, 0.6, 0.8)
    t = 1.3
    prop = propagator(p, t)
    want_U = np.array([[1 - 0.8 * t, -1j * t], [-1j * t, 1 + 0.8 * t]])
    assert np.abs(prop.U - want_U).max() < 1e-12
    assert np.abs(prop.V + 1j * 0.6 * t * np.array([[0, 1], [1, 0]])).max() < 1e-12


def test_propagator_satisfies_equation_of_motion():
    # central finite differences of P against generator * P
    rng = np.random.default_rng(5)
    for k, g in [(0.5, 0.3), (1.2, 0.9)]:
        p = ModelParams(1.0, k, g)
        G = build_generator(p)
        for t in rng.uniform(0.1, 5.0, 10):
            h = 1e-6
            Pp = full_propagator_matrix(propagator(p, t + h))
            Pm = full_propagator_matrix(propagator(p, t - h))
            P0 = full_propagator_matrix(propagator(p, t))
            dP = (Pp - Pm) / (2 * h)
            scale = max(1.0, np.abs(P0).max()) * np.abs(G).max()
            assert np.abs(dP - G @ P0).max() < 1e-5 * scale


def test_noise_zero_at_t0_and_for_zero_damping():
    assert np.abs(noise_moments_full(P_REF, 0.0).FF).max() == 0.0
    p = ModelParams(1.0, 0.7, 0.0)
    for t in (0.5, 3.0):
        assert np.abs(noise_moments_full(p, t).FF).max() == 0.0


def test_noise_hermitian_and_psd_full_model():
    T = period(P_REF)
    for t in np.linspace(0.01, 2 * T, 25):
        FF = noise_moments_full(P_REF, t).FF
        assert np.abs(FF - FF.conj().T).max() < 1e-12
        assert np.linalg.eigvalsh(FF).min() > -1e-10


def test_noise_matches_moment_ode():
    G = build_generator(P_REF)
    L0 = reservoir_spec(ReservoirModel.FULL_PHYSICAL, P_REF).L0
    got = moment_ode_oracle(G, L0, 2.0, 20000)
    want = noise_moments_full(P_REF, 2.0).FF
    assert np.abs(got - want).max() < 1e-8


def test_noise_matches_ode_near_ep():
    # |mu| ~ 1e-4: closed form must hold through the series limits
    g = np.sqrt(1.0 - 0.36 - 1e-8)
    p = ModelParams(1.0, 0.6, g)
    G = build_generator(p)
    L0 = np.diag([2 * p.gamma, 0, 0, 2 * p.gamma]).astype(complex)
    got = moment_ode_oracle(G, L0, 5.0, 40000)
    want = noise_moments_full(p, 5.0).FF
    assert np.abs(got - want).max() < 1e-8


def test_ff_from_L0_zero_strength():
    sys_ = build_system(P_REF)
    assert np.abs(ff_from_L0(sys_, np.zeros((4, 4)), 3.0).FF).max() == 0.0


def test_ff_from_L0_reproduces_closed_form():
    sys_ = build_system(P_REF)
    L0 = reservoir_spec(ReservoirModel.FULL_PHYSICAL, P_REF).L0
    for t in (0.02, 1.0, 4.7):
        a = ff_from_L0(sys_, L0, t).FF
        b = noise_moments_full(P_REF, t).FF
        assert np.abs(a - b).max() < 1e-10


def test_sink_noise_periodic():
    sys_ = build_system(P_REF)
    L0 = reservoir_spec(ReservoirModel.SINK, P_REF).L0
    T = period(P_REF)
    for t in (0.4, 2.9):
        a = ff_from_L0(sys_, L0, t).FF
        b = ff_from_L0(sys_, L0, t + T).FF
        assert np.abs(a - b).max() < 1e-9


def test_reservoir_spec_full_structure():
    spec = reservoir_spec(ReservoirModel.FULL_PHYSICAL, P_REF)
    want = np.zeros((4, 4))
    want[0, 0] = want[3, 3] = 0.6
    assert np.array_equal(spec.L0, want)
    assert np.allclose(sorted(np.linalg.eigvalsh(spec.L0)), [0, 0, 0.6, 0.6])


def test_reservoir_spec_semiclassical_zero():
    assert np.abs(reservoir_spec(ReservoirModel.SEMICLASSICAL, P_REF).L0).max() == 0.0


def test_reservoir_spec_sink_negative_eigenvalue():
    spec = reservoir_spec(ReservoirModel.SINK, P_REF)
    ev = np.linalg.eigvalsh(spec.L0)
    assert ev.min() < 0
    assert np.abs(spec.L0 - spec.L0.conj().T).max() < 1e-15


def test_tailor_reservoir_identity_and_values():
    L_t, L_sink = tailor_reservoir(P_REF)
    L_full = reservoir_spec(ReservoirModel.FULL_PHYSICAL, P_REF).L0
    assert np.abs(L_sink - (L_full - L_t)).max() < 1e-12
    assert np.abs(L_sink - reservoir_spec(ReservoirModel.SINK, P_REF).L0).max() < 1e-15
    # entry value: L_t[0,0] = eps*gamma*eps/mu^2 = 1.0 at kappa = gamma = 0.5
    L_t2, _ = tailor_reservoir(ModelParams(1.0, 0.5, 0.5))
    assert L_t2[0, 0] == pytest.approx(1.0, abs=1e-14)


def test_tailor_reservoir_vanishes_without_damping():
    L_t, L_sink = tailor_reservoir(ModelParams(1.0, 0.5, 0.0))
    assert np.abs(L_t).max() == 0.0
    assert np.abs(L_sink).max() == 0.0


def test_tailor_reservoir_requires_oscillatory():
    with pytest.raises(EPDegenerateError):
        tailor_reservoir(ModelParams(1.0, 0.6, 0.8))
    with pytest.raises(EPDegenerateError):
        tailor_reservoir(ModelParams(1.0, 1.2, 0.5))


def test_secular_decomposition():
    sys_ = build_system(P_REF)
    L_t, L_sink = tailor_reservoir(P_REF)
    for t in (0.7, 3.1, 9.6):
        full = noise_moments_full(P_REF, t).FF
        periodic = ff_from_L0(sys_, L_sink, t).FF
        secular = ff_from_L0(sys_, L_t, t).FF
        assert np.abs(full - periodic - secular).max() < 1e-9


def test_sink_noise_has_negative_eigenvalue_somewhere():
    # the tailored reservoir removes noise: within the first period the
    # accumulated moment matrix must lose positive semidefiniteness
    sys_ = build_system(P_REF)
    L0 = reservoir_spec(ReservoirModel.SINK, P_REF).L0
    T = period(P_REF)
    ts = np.linspace(1e-4, T, 200)
    mins = np.array([np.linalg.eigvalsh(ff_from_L0(sys_, L0, t).FF).min() for t in ts])
    first = ts[np.argmax(mins < -1e-9)]
    assert mins.min() < -1e-6
    assert 0.0 < first < T
    # the physical reservoir never does
    for t in ts[::20]:
        assert np.linalg.eigvalsh(noise_moments_full(P_REF, t).FF).min() > -1e-10


def test_sink_no_secular_growth():
    sys_ = build_system(P_REF)
    _, L_sink = tailor_reservoir(P_REF)
    T = period(P_REF)
    a = np.abs(ff_from_L0(sys_, L_sink, 10 * T + 0.3 * T).FF).max()
    b = np.abs(ff_from_L0(sys_, L_sink, 0.3 * T).FF).max()
    assert abs(a - b) < 1e-8


def test_sink_diagnostics_values():
    d = sink_diagnostics(ModelParams(1.0, 0.5, 0.5))
    assert d.Lambda == pytest.approx(-2.0, abs=1e-12)
    assert 2 * (d.nu_plus + d.nu_minus) == pytest.approx(d.Lambda, rel=1e-10)
    assert not d.divergent


def test_sink_diagnostics_no_damping():
    d = sink_diagnostics(ModelParams(1.0, 0.5, 0.0))
    assert d.nu_plus == 0.0 and d.nu_minus == 0.0 and d.Lambda == 0.0


def test_sink_diagnostics_negative_branch_and_matrix_agreement():
    d = sink_diagnostics(P_REF)
    assert d.nu_minus < 0
    ev = np.sort(np.linalg.eigvalsh(reservoir_spec(ReservoirModel.SINK, P_REF).L0))
    assert np.allclose(ev, [d.nu_minus, d.nu_minus, d.nu_plus, d.nu_plus], atol=1e-12)
    assert d.Lambda <= 0.0


def test_sink_diagnostics_divergence_at_ep():
    d = sink_diagnostics(ModelParams(1.0, 0.6, 0.8))
    assert d.divergent and d.Lambda == float("-inf")
    with pytest.raises(EPDegenerateError):
        sink_diagnostics(ModelParams(1.0, 1.2, 0.8))


def test_commutators_preserved_full_and_sink():
    sys_ = build_system(P_REF)
    _, L_sink = tailor_reservoir(P_REF)
    for t in (0.3, 1.4, 5.2):
        prop = propagator(P_REF, t)
        c_full = equal_time_commutators(prop, noise_moments_full(P_REF, t))
        assert np.abs(c_full - np.eye(2)).max() < 1e-8
        c_sink = equal_time_commutators(prop, ff_from_L0(sys_, L_sink, t))
        assert np.abs(c_sink - np.eye(2)).max() < 1e-8


def test_commutators_violated_semiclassically():
    from ptmodes.dynamics import NoiseMoments

    zero = NoiseMoments(np.zeros((4, 4), dtype=complex), 1.0)
    dev = np.abs(
        equal_time_commutators(propagator(P_REF, 1.0), zero) - np.eye(2)
    ).max()
    assert dev > 1e-3
