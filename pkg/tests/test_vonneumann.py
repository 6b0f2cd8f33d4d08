"""Tests for the pointer-coupling construction and correlation conditions."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PAULI_Z, random_hermitian
from qmeas.linalg import State, random_state, schmidt_decompose, tensor
from qmeas.observables import Observable, born_probabilities
from qmeas.processes import check_probability_reproducibility, induced_povm, outcome_distribution
from qmeas.vonneumann import (
    CONDITION_NAMES,
    build_vn_process,
    check_observable_entanglement,
    entangled_state,
    find_entangled_observables,
    verify_perfect_correlation,
)


def joint_oracle(a1, a2, phi):
    """Direct double loop over lifted projector pairs."""
    vec = phi.amplitudes
    out = np.zeros((len(a1.labels), len(a2.labels)))
    for k, p in enumerate(a1.spectral.projectors):
        for m, q in enumerate(a2.spectral.projectors):
            op = np.kron(p, np.eye(a2.dim)) @ np.kron(np.eye(a1.dim), q)
            out[k, m] = np.real(np.vdot(vec, op @ vec))
    return out


# ---------------------------------------------------------------------------
# build_vn_process


def test_coupling_is_branch_controlled_shift():
    a = Observable.from_matrix(np.diag([1.0, 2.0]))
    mp = build_vn_process(a)
    shift = np.array([[0.0, 1.0], [1.0, 0.0]])
    want = tensor(np.diag([1.0, 0.0]), np.eye(2)) + tensor(np.diag([0.0, 1.0]), shift)
    np.testing.assert_allclose(mp.coupling, want, atol=1e-14)


def test_single_branch_observable_couples_trivially():
    a = Observable.from_matrix(np.eye(3))
    mp = build_vn_process(a)
    assert mp.ancilla_dim == 1
    np.testing.assert_allclose(mp.coupling, np.eye(3), atol=1e-14)
    assert check_probability_reproducibility(mp, a)


def test_meter_carries_observable_labels():
    a = Observable.from_matrix(np.diag([1.0, 2.0, 3.0]))
    assert build_vn_process(a).meter.labels == (1.0, 2.0, 3.0)


def test_pointer_process_induces_the_spectral_family():
    a = Observable.from_matrix(np.diag([1.0, 2.0, 3.0]))
    got = induced_povm(build_vn_process(a))
    for effect, proj in zip(got.effects, a.spectral.projectors):
        assert np.linalg.norm(effect - proj) <= 1e-10


def test_degenerate_observable_gets_one_pointer_slot_per_branch():
    a = Observable.from_matrix(np.diag([1.0, 1.0, 2.0]))
    mp = build_vn_process(a)
    assert mp.ancilla_dim == 2
    assert check_probability_reproducibility(mp, a, tol=1e-10)


@settings(max_examples=15, deadline=None, derandomize=True)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=4))
def test_pointer_statistics_match_born_rule(seed, dim):
    rng = np.random.default_rng(seed)
    a = Observable.from_matrix(random_hermitian(dim, rng))
    psi = random_state(dim, seed=seed)
    born = born_probabilities(a, psi).as_dict()
    meter = outcome_distribution(build_vn_process(a), psi).as_dict()
    for label, p in born.items():
        assert meter[label] == pytest.approx(p, abs=1e-12)


# ---------------------------------------------------------------------------
# entangled_state


def test_entangled_state_weights_branches_by_amplitude():
    a = Observable.from_matrix(np.diag([1.0, 2.0]))
    alpha, beta = 0.6j, 0.8
    phi = entangled_state(State(np.array([alpha, beta])), a)
    np.testing.assert_allclose(phi.amplitudes, [alpha, 0.0, 0.0, beta], atol=1e-14)


def test_entangled_state_general_formula():
    rng = np.random.default_rng(8)
    a = Observable.from_matrix(random_hermitian(3, rng))
    psi = random_state(3, seed=8)
    phi = entangled_state(psi, a)
    n = len(a.labels)
    want = sum(
        np.kron(proj @ psi.amplitudes, np.eye(n)[:, k])
        for k, proj in enumerate(a.spectral.projectors)
    )
    np.testing.assert_allclose(phi.amplitudes, want, atol=1e-12)


def test_entangled_state_balanced_superposition_is_maximally_entangled():
    plus = State.normalized([1.0, 1.0])
    phi = entangled_state(plus, Observable.from_matrix(PAULI_Z))
    coeffs, _, _ = schmidt_decompose(phi, 2, 2)
    np.testing.assert_allclose(coeffs, [1 / np.sqrt(2)] * 2, atol=1e-12)


def test_entangled_state_eigenstate_stays_product():
    phi = entangled_state(State.basis(2, 0), Observable.from_matrix(PAULI_Z))
    # |0> lives in the second (larger-eigenvalue) branch, so the pointer lands
    # on the second slot
    np.testing.assert_allclose(phi.amplitudes, [0.0, 1.0, 0.0, 0.0], atol=1e-14)
    coeffs, _, _ = schmidt_decompose(phi, 2, 2)
    assert len(coeffs) == 1


def test_entangled_state_dimension_mismatch():
    with pytest.raises(ValueError):
        entangled_state(State.basis(3, 0), Observable.from_matrix(PAULI_Z))


# ---------------------------------------------------------------------------
# check_observable_entanglement


def test_bell_state_perfectly_correlates_matching_spins():
    bell = State(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2))
    z = Observable.from_matrix(PAULI_Z)
    report = check_observable_entanglement(z, z, bell)
    np.testing.assert_allclose(report.joint, joint_oracle(z, z, bell), atol=1e-12)
    np.testing.assert_allclose(report.joint, np.diag([0.5, 0.5]), atol=1e-12)
    assert report.pairing == ((0, 0), (1, 1))
    assert report.is_entangled
    assert report.max_violation <= 1e-12
    assert set(report.condition_results) == set(CONDITION_NAMES)


def test_product_state_fails_all_pairings():
    phi = State.basis(2, 0).tensor(State.normalized([1.0, 1.0]))
    z = Observable.from_matrix(PAULI_Z)
    report = check_observable_entanglement(z, z, phi)
    # oracle: both injective pairings of two branches leave half the mass out
    joint = joint_oracle(z, z, phi)
    assert max(joint[0, 0] + joint[1, 1], joint[0, 1] + joint[1, 0]) == pytest.approx(0.5)
    assert not report.is_entangled
    assert report.max_violation == pytest.approx(0.5, abs=1e-12)
    assert not report.condition_results["off_pairing_vanishes"]
    assert not report.condition_results["paired_mass_unity"]


def test_deterministic_branch_counts_as_correlated():
    a = Observable.from_matrix(np.diag([1.0, 2.0]))
    phi = entangled_state(State.basis(2, 0), a)
    report = check_observable_entanglement(a, build_vn_process(a).meter, phi)
    assert report.is_entangled
    assert report.joint[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_pointer_outputs_always_pass_all_five_conditions():
    for seed, dim in [(0, 2), (1, 3), (2, 4)]:
        rng = np.random.default_rng(seed)
        a = Observable.from_matrix(random_hermitian(dim, rng))
        psi = random_state(dim, seed=seed)
        phi = entangled_state(psi, a)
        report = check_observable_entanglement(a, build_vn_process(a).meter, phi)
        assert report.is_entangled, f"seed {seed}: violation {report.max_violation}"
        assert all(report.condition_results.values())


def test_paired_labels_follow_pairing():
    bell = State(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2))
    z = Observable.from_matrix(PAULI_Z)
    report = check_observable_entanglement(z, z, bell)
    assert report.paired_labels() == ((-1.0, -1.0), (1.0, 1.0))


def test_mismatched_branch_counts_still_compare():
    # first observable has three branches, second only two: the pairing is an
    # injection of the smaller side
    a1 = Observable.from_matrix(np.diag([1.0, 2.0, 3.0]))
    a2 = Observable.from_matrix(PAULI_Z)
    phi = State.basis(6, 0)  # |0> x |0>: a1 reads 1, a2 reads +1
    report = check_observable_entanglement(a1, a2, phi)
    assert len(report.pairing) == 2
    assert report.is_entangled


def test_entanglement_dimension_mismatch_raises():
    z = Observable.from_matrix(PAULI_Z)
    with pytest.raises(ValueError):
        check_observable_entanglement(z, z, State.basis(5, 0))


def test_conditions_agree_when_leading_one_holds():
    # once no probability escapes the pairing, the remaining conditions follow
    # within a small multiple of the tolerance
    tol = 1e-9
    for seed in range(10):
        rng = np.random.default_rng(seed)
        a = Observable.from_matrix(random_hermitian(3, rng))
        phi = entangled_state(random_state(3, seed=seed), a)
        report = check_observable_entanglement(a, build_vn_process(a).meter, phi, tol=tol)
        if report.condition_results["off_pairing_vanishes"]:
            assert report.max_violation <= 10 * tol


# ---------------------------------------------------------------------------
# find_entangled_observables


def test_find_observables_for_bell_state():
    bell = State(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2))
    a1, a2 = find_entangled_observables(bell, 2, 2)
    assert a1.labels == (1.0, 2.0)
    assert a2.labels == (1.0, 2.0)
    assert check_observable_entanglement(a1, a2, bell).is_entangled


def test_find_observables_for_product_state():
    phi = State.basis(2, 0).tensor(State.basis(2, 0))
    a1, a2 = find_entangled_observables(phi, 2, 2)
    report = check_observable_entanglement(a1, a2, phi)
    assert report.is_entangled
    # all mass sits on the single Schmidt branch
    assert report.joint[0, 0] == pytest.approx(1.0, abs=1e-12)


def test_find_observables_unequal_factors():
    phi = random_state(6, seed=77)
    a1, a2 = find_entangled_observables(phi, 2, 3)
    assert a1.dim == 2 and a2.dim == 3
    assert check_observable_entanglement(a1, a2, phi).is_entangled


@settings(max_examples=15, deadline=None, derandomize=True)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_find_observables_random_bipartite(seed):
    dims = [(2, 2), (2, 3), (3, 3), (2, 4)][seed % 4]
    phi = random_state(dims[0] * dims[1], seed=seed)
    a1, a2 = find_entangled_observables(phi, *dims)
    assert check_observable_entanglement(a1, a2, phi).is_entangled


# ---------------------------------------------------------------------------
# verify_perfect_correlation


def test_pointer_output_is_perfectly_correlated():
    a = Observable.from_matrix(np.diag([1.0, 2.0, 3.0]))
    phi = entangled_state(random_state(3, seed=5), a)
    assert verify_perfect_correlation(a, build_vn_process(a).meter, phi)


def test_product_state_is_not_perfectly_correlated():
    phi = State.basis(2, 0).tensor(State.normalized([1.0, 1.0]))
    z = Observable.from_matrix(PAULI_Z)
    assert not verify_perfect_correlation(z, z, phi)


def test_bell_state_is_perfectly_correlated():
    bell = State(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2))
    z = Observable.from_matrix(PAULI_Z)
    assert verify_perfect_correlation(z, z, bell)
