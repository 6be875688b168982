"""Inverse design: formal splits, local jump sets, feasibility gates."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gausschain import (HatanoNelsonParams, InfeasibilityError, JumpSet,
                        JumpVector, ParameterError, SshParams, ValidationError,
                        build_hatano_nelson, build_ssh, hn_jump_decomposition,
                        inverse_design, jump_set_payload, realization_payload,
                        solve_lyapunov_direct, ssh_jump_decomposition,
                        validate_jump_set)


def hn_target(n, t_right=1.0, t_left=0.17, kappa=1.5, gamma=0.1):
    x = build_hatano_nelson(HatanoNelsonParams(n, t_right, t_left, kappa))
    return x, gamma * np.eye(n)


def by_label(jumps):
    out = {}
    for v in (*jumps.loss_vectors, *jumps.gain_vectors):
        out[v.label] = v
    return out


def test_two_site_split_gives_antisymmetric_imaginary_hopping():
    tr, tl = 1.0, 0.17
    x, y = hn_target(2, t_right=tr, t_left=tl)
    real = inverse_design(x, y)
    expected_h = 0.5 * (tr - tl) * np.array([[0.0, -1.0j], [1.0j, 0.0]])
    assert_allclose(real.hamiltonian, expected_h, atol=1e-15)
    assert np.abs(real.hamiltonian - real.hamiltonian.conj().T).max() <= 1e-12
    assert_allclose(real.gain_gram, y, atol=1e-15)


def test_hermitian_target_with_zero_source_has_no_hamiltonian():
    x = build_hatano_nelson(HatanoNelsonParams(4, 0.7, 0.7, 2.0))
    real = inverse_design(x, np.zeros((4, 4)))
    assert np.abs(real.hamiltonian).max() <= 1e-15
    assert_allclose(real.loss_gram, 2.0 * np.asarray(x.entries), atol=1e-15)
    assert real.physical


def test_round_trip_identity_random_targets():
    rng = np.random.default_rng(61)
    for _ in range(15):
        dim = int(rng.integers(1, 8))
        x = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        y = a @ a.conj().T
        real = inverse_design(x, y)
        scale = max(1.0, float(np.abs(x).max()), float(np.abs(y).max()))
        assert np.abs(real.rebuild_relaxation() - x).max() <= 1e-14 * scale
        assert np.abs(real.gain_gram - y).max() <= 1e-14 * scale
        assert np.abs(real.hamiltonian - real.hamiltonian.conj().T).max() \
            <= 1e-12 * scale


def test_inverse_design_rejects_bad_sources():
    x, _ = hn_target(2)
    with pytest.raises(ParameterError):
        inverse_design(x, np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ParameterError):
        inverse_design(x, np.diag([1.0, -1e-6]))
    with pytest.raises(ParameterError):
        inverse_design(x, np.zeros((3, 3)))
    # A rounding-level negative eigenvalue is tolerated.
    inverse_design(x, np.diag([1.0, -1e-13]))


def test_unphysical_target_is_reported_not_rejected():
    # The reference-chain damping is below the local-realization threshold; the
    # formal split still reproduces the target but is flagged.
    x, _ = hn_target(8, kappa=0.91, gamma=0.03)
    y = np.zeros((8, 8))
    y[0, 0] = 0.03
    real = inverse_design(x, y)
    assert not real.physical
    assert real.loss_min_eigenvalue < -0.1
    assert np.abs(real.rebuild_relaxation() - np.asarray(x.entries)).max() <= 1e-14


def test_hn_decomposition_worked_example():
    params = HatanoNelsonParams(3, 1.0, 0.17, 1.5)
    jumps = hn_jump_decomposition(params, 0.1)
    vecs = by_label(jumps)
    w_bond = math.sqrt(1.17)
    assert_allclose(vecs["bond(1)"].vector, [w_bond, -w_bond, 0.0], atol=1e-15)
    assert_allclose(vecs["bond(2)"].vector, [0.0, w_bond, -w_bond], atol=1e-15)
    # delta = 2*1.5 - 0.1 = 2.9, beta = 1.17: edges sqrt(1.73), bulk sqrt(0.56).
    assert vecs["onsite(1)"].vector[0] == pytest.approx(math.sqrt(1.73), rel=1e-12)
    assert vecs["onsite(3)"].vector[2] == pytest.approx(math.sqrt(1.73), rel=1e-12)
    assert vecs["onsite(2)"].vector[1] == pytest.approx(math.sqrt(0.56), rel=1e-12)
    for j in (1, 2, 3):
        assert_allclose(vecs[f"pump({j})"].vector[j - 1], math.sqrt(0.1), rtol=1e-14)
    # Onsite coefficients are real and nonnegative by construction.
    for v in jumps.loss_vectors:
        if v.label.startswith("onsite"):
            assert np.all(v.vector.imag == 0.0)
            assert np.all(v.vector.real >= 0.0)
    x, y = hn_target(3)
    report = validate_jump_set(jumps, inverse_design(x, y))
    assert report.passed
    assert report.relaxation_error <= 1e-12
    assert float(np.linalg.eigvalsh(jumps.loss_gram()).min()) >= -1e-12


def test_hn_decomposition_reference_damping_is_infeasible():
    params = HatanoNelsonParams(3, 1.0, 0.17, 0.91)
    with pytest.raises(InfeasibilityError) as err:
        hn_jump_decomposition(params, 0.03)
    (context, deficit), = err.value.deficits
    assert deficit == pytest.approx(-0.55, abs=1e-12)
    assert "0.55" in str(err.value)


def test_hn_zero_hopping_is_pure_onsite():
    params = HatanoNelsonParams(3, 0.0, 0.0, 1.5)
    jumps = hn_jump_decomposition(params, 0.1)
    assert all(not v.label.startswith("bond") for v in jumps.loss_vectors)
    assert len(jumps.loss_vectors) == 3
    assert_allclose(jumps.loss_gram(), 2.9 * np.eye(3), atol=1e-14)
    real = inverse_design(1.5 * np.eye(3), 0.1 * np.eye(3))
    assert validate_jump_set(jumps, real).passed


def test_hn_single_site_boundary_occupation():
    kappa = 1.5
    params = HatanoNelsonParams(1, 0.0, 0.0, kappa)
    jumps = hn_jump_decomposition(params, 2.0 * kappa)
    # At the feasibility boundary the onsite loss weight vanishes and the
    # steady occupation saturates at one.
    (onsite,) = [v for v in jumps.loss_vectors if v.label.startswith("onsite")]
    assert np.abs(onsite.vector).max() == 0.0
    c = solve_lyapunov_direct(np.array([[kappa]]), np.array([[2.0 * kappa]]))
    assert_allclose(c.entries, [[1.0]], rtol=1e-15)
    with pytest.raises(InfeasibilityError):
        hn_jump_decomposition(params, 2.0 * kappa * (1.0 + 1e-6))


def test_ssh_decomposition_boundary_case_at_reciprocal_point():
    params = SshParams(4, 0.5, 1.0, 0.0, 1.5)
    jumps = ssh_jump_decomposition(params, 1e-8)
    vecs = by_label(jumps)
    # Outer sites keep weight sqrt(delta - beta1) ~ sqrt(2); every
    # interior squared weight sits at the boundary and clamps to zero.
    assert vecs["onsite(1A)"].vector[0] == pytest.approx(math.sqrt(2.0), rel=1e-8)
    assert vecs["onsite(4B)"].vector[7] == pytest.approx(math.sqrt(2.0), rel=1e-8)
    for label, v in vecs.items():
        if label.startswith("onsite") and label not in ("onsite(1A)", "onsite(4B)"):
            assert np.abs(v.vector).max() <= 1e-4
    # The clamped interior weights shift the Gram by the 1e-8 slack, so
    # validation passes at that scale, not at 1e-12.
    real = inverse_design(build_ssh(params), 1e-8 * np.eye(8))
    report = validate_jump_set(jumps, real, tolerance=1e-7)
    assert report.passed
    assert report.loss_gram_error <= 2e-8


def test_ssh_decomposition_infeasible_off_reciprocal():
    params = SshParams(4, 0.5, 1.0, 0.2, 1.5)
    with pytest.raises(InfeasibilityError) as err:
        ssh_jump_decomposition(params, 1e-8)
    (_, deficit), = err.value.deficits
    assert deficit == pytest.approx(3.0 - 3.0 * math.cosh(0.2), abs=1e-6)


def test_ssh_single_cell_has_no_intercell_bonds():
    params = SshParams(1, 0.5, 1.0, 0.1, 1.5)
    jumps = ssh_jump_decomposition(params, 0.2)
    bonds = [v.label for v in jumps.loss_vectors if v.label.startswith("bond")]
    assert bonds == ["bond(1A)"]
    real = inverse_design(build_ssh(params), 0.2 * np.eye(2))
    assert validate_jump_set(jumps, real).passed


def test_site_profile_feasible_and_gated_per_site():
    params = HatanoNelsonParams(3, 1.0, 0.17, 1.5)
    profile = np.array([0.1, 0.0, 0.0])
    jumps = hn_jump_decomposition(params, profile)
    gains = [v.label for v in jumps.gain_vectors]
    assert gains == ["pump(1)"]
    x = build_hatano_nelson(params)
    real = inverse_design(x, np.diag(profile))
    assert validate_jump_set(jumps, real).passed

    ssh = SshParams(2, 0.5, 1.0, 0.0, 2.0)
    bad = np.array([0.1, 5.0, 0.1, 0.1])
    with pytest.raises(InfeasibilityError) as err:
        ssh_jump_decomposition(ssh, bad)
    labels = [label for label, _ in err.value.deficits]
    assert labels == ["1B"]
    assert err.value.deficits[0][1] == pytest.approx(4.0 - 5.0 - 3.0, abs=1e-12)


def test_pump_profile_validation():
    params = HatanoNelsonParams(3, 1.0, 0.17, 1.5)
    with pytest.raises(ParameterError):
        hn_jump_decomposition(params, 0.0)
    with pytest.raises(ParameterError):
        hn_jump_decomposition(params, -0.1)
    with pytest.raises(ParameterError):
        hn_jump_decomposition(params, np.array([0.1, 0.1]))
    with pytest.raises(ParameterError):
        hn_jump_decomposition(params, np.array([0.1, -0.1, 0.1]))


def test_validation_pinpoints_a_corrupted_bond():
    params = HatanoNelsonParams(3, 1.0, 0.17, 1.5)
    jumps = hn_jump_decomposition(params, 0.1)
    corrupted = []
    for v in jumps.loss_vectors:
        if v.label == "bond(1)":
            flipped = v.vector.copy()
            flipped[1] = -flipped[1]
            corrupted.append(JumpVector(v.label, v.kind, flipped))
        else:
            corrupted.append(v)
    bad = JumpSet(3, tuple(corrupted), jumps.gain_vectors)
    x, y = hn_target(3)
    real = inverse_design(x, y)
    with pytest.raises(ValidationError) as err:
        validate_jump_set(bad, real)
    assert "loss_gram" in str(err.value)
    assert "(1, 2)" in str(err.value)
    assert not err.value.report.passed
    assert err.value.report.loss_gram_error == pytest.approx(2 * 1.17, rel=1e-12)


def test_feasible_realizations_keep_occupations_physical():
    cases = [hn_target(2, kappa=1.5, gamma=0.1),
             hn_target(3, kappa=1.5, gamma=0.5),
             hn_target(4, kappa=1.3, gamma=0.2)]
    ssh = SshParams(3, 0.5, 1.0, 0.0, 1.6)
    cases.append((build_ssh(ssh), 0.1 * np.eye(6)))
    for x, y in cases:
        real = inverse_design(x, y)
        assert real.physical
        occ = np.linalg.eigvalsh(solve_lyapunov_direct(x, y).entries)
        assert occ.min() >= -1e-10
        assert occ.max() <= 1.0 + 1e-10


def test_jump_container_validation():
    with pytest.raises(ParameterError):
        JumpVector("x", "sideways", np.array([1.0]))
    with pytest.raises(ParameterError):
        JumpVector("x", "loss", np.array([]))
    with pytest.raises(ParameterError):
        JumpVector("x", "loss", np.array([np.nan]))
    good = JumpVector("x", "loss", np.array([1.0, 0.0]))
    with pytest.raises(ParameterError):
        JumpSet(3, (good,), ())
    x, y = hn_target(2)
    real = inverse_design(x, y)
    with pytest.raises(ParameterError):
        real.with_jumps(JumpSet(3, (), ()))


def test_payload_structures():
    params = HatanoNelsonParams(2, 1.0, 0.17, 1.5)
    jumps = hn_jump_decomposition(params, 0.1)
    payload = jump_set_payload(jumps)
    assert payload["dim"] == 2
    assert [v["label"] for v in payload["loss"]] == ["bond(1)", "onsite(1)", "onsite(2)"]
    assert all(v["kind"] == "gain" for v in payload["gain"])
    x, y = hn_target(2)
    real = inverse_design(x, y).with_jumps(jumps)
    rp = realization_payload(real)
    assert rp["physical"] is True
    assert set(rp) == {"dim", "hamiltonian", "gain_gram", "loss_gram",
                       "loss_min_eigenvalue", "physical"}
    assert real.jumps is jumps
