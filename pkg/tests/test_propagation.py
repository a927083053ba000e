import numpy as np
import pytest

from floqsim.floquet import DriveConfig, build_floquet_hamiltonian, calibrate_ising_chi, xi_averaged
from floqsim.models import (AnnealSchedule, IsingDriveParams, TimeDependentHamiltonian, build_ising_driven,
                            build_target_ising, build_target_ising_anneal, build_target_xyz, build_xy_chain)
from floqsim.propagation import (ConvergenceCertificate, PropagationConfig, PropagationError, all_down, certify,
                                 ghz_target, ground_space, ground_state, magnetization, propagate, propagator,
                                 run_anneal, stroboscopic_fidelities, subspace_fidelity, time_grid)
from floqsim.tensor import ChainSpec, OperatorError, expm_hermitian, fidelity, product_state, unitarity_error


def random_state(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def driven_n2(omega=40.0, hz=0.8):
    chain = ChainSpec(2)
    p = IsingDriveParams.from_rotation_angle(-1.0, hz, calibrate_ising_chi(), omega)
    return chain, build_ising_driven(chain, p)


def test_config_validation():
    with pytest.raises(ValueError):
        PropagationConfig(8)
    with pytest.raises(ValueError):
        PropagationConfig(steps_total=0)
    with pytest.raises(ValueError):
        PropagationConfig(scheme="rk4")
    assert PropagationConfig(32, 10).refined() == PropagationConfig(64, 20)


def test_time_grid_hits_period_multiples():
    grid = time_grid(0.0, 2.5, PropagationConfig(16), period=1.0)
    assert np.all(np.diff(grid) > 0)
    for k in (1.0, 2.0):
        assert np.min(np.abs(grid - k)) == 0.0
    assert np.max(np.diff(grid)) <= 1 / 16 + 1e-12
    back = time_grid(2.5, 0.0, PropagationConfig(16), period=1.0)
    np.testing.assert_array_equal(back, grid[::-1])


def test_static_hamiltonian_exact():
    rng = np.random.default_rng(2)
    chain = ChainSpec(3)
    h0 = build_target_xyz(chain, 1.0, 0.4, -0.3, 0.2)
    h = TimeDependentHamiltonian(chain, h0)
    psi0 = random_state(rng, 8)
    for steps in (1, 7):
        traj = propagate(h, psi0, 0.0, 2.3, PropagationConfig(steps_total=steps))
        np.testing.assert_allclose(traj.final_state, expm_hermitian(h0, 2.3) @ psi0, atol=1e-10)


def test_energy_conserved_for_static_hamiltonian():
    rng = np.random.default_rng(4)
    chain = ChainSpec(4)
    h0 = build_target_ising(chain, -1.0, 0.6)
    traj = propagate(TimeDependentHamiltonian(chain, h0), random_state(rng, 16), 0.0, 10.0,
                     PropagationConfig(steps_total=200), sample_every=1)
    energies = np.real(np.einsum("ni,ij,nj->n", traj.states.conj(), h0, traj.states))
    assert np.max(np.abs(energies - energies[0])) < 1e-9


def test_norm_and_round_trip():
    chain, h = driven_n2()
    psi0 = random_state(np.random.default_rng(6), 4)
    cfg = PropagationConfig(128)
    fwd = propagate(h, psi0, 0.0, 3.0, cfg, sample_every=5)
    assert np.max(np.abs(np.linalg.norm(fwd.states, axis=1) - 1)) < 1e-8
    assert np.all(np.diff(fwd.times) > 0)
    back = propagate(h, fwd.final_state, 3.0, 0.0, cfg)
    assert 1 - fidelity(back.final_state, psi0) < 1e-8


def test_propagation_rejects_bad_input():
    chain, h = driven_n2()
    with pytest.raises(OperatorError):
        propagate(h, np.ones(4), 0.0, 1.0)
    with pytest.raises(OperatorError):
        propagate(h, np.array([1.0, 0.0]), 0.0, 1.0)


def test_driven_self_convergence():
    chain, h = driven_n2()
    psi0 = all_down(chain)
    t1 = 10 * h.period

    def final(m):
        return propagate(h, psi0, 0.0, t1, PropagationConfig(m)).final_state

    states = {m: final(m) for m in (256, 512, 1024, 4096, 8192)}
    d256 = np.linalg.norm(states[256] - states[512])
    d512 = np.linalg.norm(states[512] - states[1024])
    # second-order scheme: doubling M cuts the change by about 4
    assert 3.5 < d256 / d512 < 4.5
    assert np.linalg.norm(states[4096] - states[8192]) < 1e-6
    ref = propagate(h, psi0, 0.0, t1, PropagationConfig(8 * 4096)).final_state
    assert abs(fidelity(states[4096], ref) - 1.0) < 1e-8


def test_propagator_is_unitary():
    _, h = driven_n2()
    assert unitarity_error(propagator(h, 0.0, h.period, PropagationConfig(64))) < 1e-10


def test_vector_steps_match_operator_steps():
    # states take the Taylor path, full propagators the eigh path
    _, h = driven_n2()
    psi0 = random_state(np.random.default_rng(8), 4)
    cfg = PropagationConfig(64)
    u = propagator(h, 0.0, 5 * h.period, cfg)
    psi = propagate(h, psi0, 0.0, 5 * h.period, cfg).final_state
    np.testing.assert_allclose(psi, u @ psi0, atol=1e-13)


def test_stroboscopic_fidelity_zero_drive():
    chain = ChainSpec(3)
    h0 = build_xy_chain(chain, -1.0)
    h = TimeDependentHamiltonian(chain, h0, ((lambda t: 0 * t, np.eye(8)),), period=0.5)
    psi0 = random_state(np.random.default_rng(8), 8)
    f = stroboscopic_fidelities(propagate(h, psi0, 0.0, 5.0, PropagationConfig(16)), h0, psi0)
    assert len(f) == 11 and f[0] == pytest.approx(1.0)
    assert np.max(np.abs(f - 1)) < 1e-9


def test_floquet_consistency_improves_with_omega():
    chain = ChainSpec(2)
    hz = 0.6
    target = build_floquet_hamiltonian(chain, -1.0, xi_averaged(DriveConfig.ising(1.0, calibrate_ising_chi())))
    target = target + hz * (np.kron(np.diag([1, -1]), np.eye(2)) + np.kron(np.eye(2), np.diag([1, -1])))
    np.testing.assert_allclose(target, build_target_ising(chain, -1.0, hz), atol=1e-9)
    psi0 = product_state([[1, 0], [1, 1j]]) / np.sqrt(2)
    infid = []
    for omega in (50.0, 100.0, 200.0, 400.0):
        p = IsingDriveParams.from_rotation_angle(-1.0, hz, calibrate_ising_chi(), omega)
        h = build_ising_driven(chain, p)
        traj = propagate(h, psi0, 0.0, 40 * p.period, PropagationConfig(512))
        infid.append(float(np.max(1 - stroboscopic_fidelities(traj, target, psi0))))
    assert all(a > b for a, b in zip(infid, infid[1:]))
    assert infid[-1] < 1e-3


def test_magnetization_examples():
    chain = ChainSpec(4)
    assert magnetization(all_down(chain), chain, "z") == pytest.approx(-1.0)
    plus = product_state([np.array([1, 1]) / np.sqrt(2)] * 4)
    assert magnetization(plus, chain, "x") == pytest.approx(1.0)
    odd = np.array([1, -1j]) / np.sqrt(2)
    psi = product_state([odd, [1, 0], odd, [1, 0]])
    assert magnetization(psi, chain, "z") == pytest.approx(0.5)
    assert magnetization(psi, chain, "y") == pytest.approx(-0.5)
    assert magnetization(psi, chain, "x") == pytest.approx(0.0, abs=1e-15)


def test_ground_state():
    gs = ground_state(np.diag([1.0, -1.0]))
    assert gs.energy == -1.0 and gs.degeneracy == 1
    np.testing.assert_array_equal(gs.state, [0, 1])
    assert ground_state(build_target_ising(ChainSpec(4), -1.0, 0.0)).degenerate
    h = build_target_xyz(ChainSpec(4), -1.0, -2 / 3, -1 / 3)
    gs = ground_state(h)
    assert gs.energy == pytest.approx(np.linalg.eigvalsh(h)[0], abs=1e-12)
    assert not gs.degenerate and gs.gap > 0
    lead = np.flatnonzero(np.abs(gs.state) > 1e-12)[0]
    assert gs.state[lead].imag == 0 and gs.state[lead].real > 0


def test_ghz_target():
    psi = ghz_target(4)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    assert magnetization(psi, ChainSpec(4), "x") == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ValueError):
        ghz_target(1)
    # the GHZ state lies in the degenerate ground space of the field-free Ising chain
    space = ground_space(build_target_ising(ChainSpec(4), -1.0, 0.0))
    assert space.shape[1] == 2
    assert subspace_fidelity(psi, space)[0] == pytest.approx(1.0)
    # and is the limit of the small-field ground state
    gs = ground_state(build_target_ising(ChainSpec(4), -1.0, 1e-4))
    assert fidelity(gs.state, psi) > 1 - 1e-6


def test_slow_anneal_reaches_ghz():
    chain = ChainSpec(4)
    sched = AnnealSchedule(500.0)
    h = build_target_ising_anneal(chain, -1.0, 1.0, sched)
    r = run_anneal(h, all_down(chain), 500.0, PropagationConfig(steps_total=5000))
    assert r.final_fidelity > 0.999
    assert np.all((r.fidelities >= 0) & (r.fidelities <= 1))
    assert r.metadata["report_time"] == "final"


def test_certify_refines_until_converged():
    calls = []

    def run(cfg):
        calls.append(cfg.substeps_per_period)
        return [1.0 / cfg.substeps_per_period]

    _, _, cert = certify(run, PropagationConfig(16), tol=1e-3, max_refinements=5)
    assert isinstance(cert, ConvergenceCertificate) and cert.passed
    assert cert.substeps == 512
    _, _, cert = certify(run, PropagationConfig(16), tol=1e-3, max_refinements=0)
    assert not cert.passed


def test_propagation_error_type():
    assert issubclass(PropagationError, RuntimeError)
