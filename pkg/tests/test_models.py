import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from floqsim.floquet import calibrate_ising_chi
from floqsim.models import (AnnealSchedule, IsingDriveParams, TimeDependentHamiltonian, TransmonParams,
                            XYZDriveParams, build_ising_driven, build_target_ising, build_target_xyz,
                            build_transmon_chain, build_transmon_ising_anneal, build_xy_chain, build_xyz_driven,
                            qubit_to_transmon_isometry, total_spin)
from floqsim.special import bessel_j0
from floqsim.tensor import ChainSpec, OperatorError, embed, hermiticity_error, pauli


def test_xy_chain_two_sites():
    h = build_xy_chain(ChainSpec(2), 0.8)
    # |01> is index 1, |10> index 2
    assert h[1, 2] == pytest.approx(1.6)
    np.testing.assert_array_equal(np.diag(h), 0)
    with pytest.raises(OperatorError):
        build_xy_chain(ChainSpec(1), 1.0)


def test_xy_chain_conserves_total_z():
    chain = ChainSpec(4)
    h = build_xy_chain(chain, -1.0)
    sz = total_spin(chain, "z")
    assert np.max(np.abs(h @ sz - sz @ h)) == 0


def test_xy_single_excitation_block():
    J = 0.9
    chain = ChainSpec(3)
    h = build_xy_chain(chain, J)
    one_up = [i for i in range(8) if bin(i).count("1") == 2]  # qubit index 1 = down
    block = h[np.ix_(one_up, one_up)]
    hop = np.diag([2 * J, 2 * J], 1)
    np.testing.assert_allclose(np.linalg.eigvalsh(block), np.linalg.eigvalsh(hop + hop.T), atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(block), 2 * J * np.array([-np.sqrt(2), 0, np.sqrt(2)]), atol=1e-12)


def test_target_ising():
    chain = ChainSpec(2)
    w = np.linalg.eigvalsh(build_target_ising(chain, -0.7, 0.0))
    np.testing.assert_allclose(w, [-0.7, -0.7, 0.7, 0.7], atol=1e-14)
    chain4 = ChainSpec(4)
    h = build_target_ising(chain4, -1.0, 0.0)
    parity = np.eye(16)
    for j in range(1, 5):
        parity = parity @ embed(pauli("z"), j, chain4)
    assert np.max(np.abs(h @ parity - parity @ h)) == 0


def test_target_ising_ground_energy_n4():
    # independent construction from explicit Kronecker products
    sx, sz, i2 = np.array([[0, 1], [1, 0]]), np.diag([1, -1]), np.eye(2)

    def op(single, site):
        mats = [i2] * 4
        mats[site] = single
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    J, hz = -1.0, -1.0
    ref = sum(J * op(sx, j) @ op(sx, j + 1) for j in range(3)) + sum(hz * op(sz, j) for j in range(4))
    e_ref = np.linalg.eigvalsh(ref)[0]
    assert np.linalg.eigvalsh(build_target_ising(ChainSpec(4), J, hz))[0] == pytest.approx(e_ref, abs=1e-12)


def test_target_xyz():
    chain = ChainSpec(4)
    np.testing.assert_allclose(build_target_xyz(chain, 1.3, 1.3, 0.0), build_xy_chain(chain, 1.3), atol=1e-14)
    h = build_target_xyz(chain, 0.5, 0.5, 0.5)
    for a in "xyz":
        s = total_spin(chain, a)
        assert np.max(np.abs(h @ s - s @ h)) < 1e-13


def test_drive_parameter_validation():
    with pytest.raises(ValueError):
        IsingDriveParams(-1, 1, 0.0, 10)
    with pytest.raises(ValueError):
        IsingDriveParams(-1, 1, 1.0, -1)
    with pytest.raises(ValueError):
        XYZDriveParams(-1, 0.0, 10)
    p = IsingDriveParams.from_rotation_angle(-1.0, 1.0, 2.4, 10.0)
    assert p.lambda_text == pytest.approx(1.2)
    assert p.chi == pytest.approx(2.4)


def test_ising_drive_small_amplitude_limit():
    chain = ChainSpec(4)
    p = IsingDriveParams(-1.0, 0.7, 1e-9, 20.0)
    h = build_ising_driven(chain, p)
    expected = build_xy_chain(chain, -1.0) + 0.7 * total_spin(chain, "z")
    for t in (0.0, 0.1, 0.27):
        np.testing.assert_allclose(h.evaluate(t), expected, atol=1e-6)


def test_ising_even_field_at_t0():
    chain = ChainSpec(2)
    lam, hz = 1.20241, 0.9
    h = build_ising_driven(chain, IsingDriveParams(-1.0, hz, lam, 20.0))
    coefs = h.coefficients([0.0])[:, 0]
    # terms: x-drive (even), z envelope (even), z (odd)
    assert coefs[0] == pytest.approx(lam * 20.0)
    assert coefs[1] == pytest.approx(2 * hz / (1 + bessel_j0(4 * lam)))
    assert coefs[2] == pytest.approx(hz)


def test_ising_drive_rotation_angle():
    # accumulated angle 2 int_0^t c = chi sin(omega t)
    p = IsingDriveParams.from_rotation_angle(-1.0, 1.0, calibrate_ising_chi(), 7.0)
    t = np.linspace(0, 0.4, 4001)
    angle = 2 * np.trapezoid(p.x_drive(t), t)
    assert angle == pytest.approx(p.chi * np.sin(7.0 * 0.4), abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 50))
def test_driven_models_hermitian(t):
    chain = ChainSpec(3)
    sched = AnnealSchedule(10.0)
    hs = [
        build_ising_driven(chain, IsingDriveParams(-1.0, 1.0, 1.2, 9.8), sched),
        build_xyz_driven(chain, XYZDriveParams(-1.0, 0.9, 5.0, 1.0), sched),
        build_transmon_ising_anneal(ChainSpec(2, 3), IsingDriveParams(-1.0, 1.0, 1.2, 9.8), sched, 300.0),
    ]
    for h in hs:
        assert hermiticity_error(h.evaluate(t)) < 1e-12 * max(1.0, np.max(np.abs(h.evaluate(t))))


def test_xyz_drive_coefficients():
    chain = ChainSpec(2)
    p = XYZDriveParams(-1.0, 0.9, 4.0)
    # antisymmetric about T/4, symmetric about T/2
    quarter, half = p.period / 4, p.period / 2
    for tau in (0.1, 0.3, 0.6):
        assert p.x_drive(quarter - tau) == pytest.approx(-p.x_drive(quarter + tau))
        assert p.x_drive(half - tau) == pytest.approx(p.x_drive(half + tau))
    t = np.linspace(0, 1.1, 5001)
    assert 2 * np.trapezoid(p.x_drive(t), t) == pytest.approx(0.9 * np.sin(4.0 * 1.1), abs=1e-6)
    zero = build_xyz_driven(chain, XYZDriveParams(-1.0, 1e-12, 4.0))
    np.testing.assert_allclose(zero.evaluate(0.2), build_xy_chain(chain, -1.0), atol=1e-10)


def test_schedule():
    s = AnnealSchedule(12.5)
    assert s.field(0.0) == 1.0 and s.field(12.5) == 0.0 and s.field(20.0) == 0.0
    vals = s.field(np.linspace(-1, 14, 50))
    assert np.all(np.diff(vals) <= 0)
    assert s.coupling(0.0) == 0.0 and s.coupling(12.5) == 1.0
    assert AnnealSchedule(3.0, ramp_coupling=False).coupling(1.0) == 1.0
    with pytest.raises(ValueError):
        AnnealSchedule(0.0)


def test_time_dependent_hamiltonian_validation():
    chain = ChainSpec(2)
    with pytest.raises(OperatorError):
        TimeDependentHamiltonian(chain, np.eye(3))
    with pytest.raises(OperatorError):
        TimeDependentHamiltonian(chain, np.eye(4), ((lambda t: t, np.triu(np.ones((4, 4)))),))
    with pytest.raises(OperatorError):
        TimeDependentHamiltonian(chain, np.eye(4), ((1.0, np.eye(4)),))


def test_transmon_chain_terms():
    chain = ChainSpec(2, 3)
    h = build_transmon_chain(chain, TransmonParams(0.5, 200.0, {}, {})).static
    # |1,0> <-> |0,1> hopping is 2J; |2,0> sits at A
    i10, i01, i20 = 3, 1, 6
    assert h[i10, i01] == pytest.approx(1.0)
    assert h[i20, i20] == pytest.approx(200.0)
    with pytest.raises(OperatorError):
        build_transmon_chain(ChainSpec(2), TransmonParams(0.5, 200.0, {}, {}))
    with pytest.raises(ValueError):
        TransmonParams(0.5, -1.0, {}, {})


def test_transmon_subspace_matches_xy_chain():
    for A in (5.0, 300.0):
        chain = ChainSpec(3, 3)
        h = build_transmon_chain(chain, TransmonParams(-1.0, A, {}, {})).static
        v = qubit_to_transmon_isometry(3)
        np.testing.assert_allclose(v.conj().T @ h @ v, build_xy_chain(ChainSpec(3), -1.0), atol=1e-14)


def test_transmon_dictionary():
    # Omega = h^x, Delta = 2 h^z reproduce h^x sigma^x + h^z sigma^z up to a constant
    hx, hz = 0.37, -0.61
    chain = ChainSpec(1, 3)
    h = build_transmon_chain(chain, TransmonParams(1.0, 100.0, {1: lambda t: 2 * hz + 0 * t},
                                                   {1: lambda t: hx + 0j * t})).evaluate(0.0)
    v = qubit_to_transmon_isometry(1)
    proj = v.conj().T @ h @ v
    expected = hx * pauli("x") + hz * pauli("z") + hz * np.eye(2)
    np.testing.assert_allclose(proj, expected, atol=1e-14)
    # complex drive: Omega a + Omega^* a^dag
    h2 = build_transmon_chain(chain, TransmonParams(1.0, 100.0, {}, {1: lambda t: 0.2 - 0.3j + 0 * t})).evaluate(0)
    a = np.diag([1.0, np.sqrt(2)], 1)
    np.testing.assert_allclose(h2 - np.diag([0, 0, 100.0]), (0.2 - 0.3j) * a + (0.2 + 0.3j) * a.T, atol=1e-12)


def test_transmon_anneal_end_has_no_detuning():
    chain = ChainSpec(2, 3)
    sched = AnnealSchedule(5.0)
    h = build_transmon_ising_anneal(chain, IsingDriveParams(-1.0, 1.0, 1.2, 9.8), sched, 300.0)
    coefs = h.coefficients([5.0])[:, 0]
    # terms: coupling ramp, x-drive, even detuning, odd detuning
    assert coefs[2] == 0.0 and coefs[3] == 0.0
    with pytest.raises(ValueError):
        build_transmon_ising_anneal(chain, IsingDriveParams(-1.0, 1.0, 1.2, 9.8), sched, 0.0)
