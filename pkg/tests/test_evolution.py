"""Trotter evolution: config handling, exactness limits, convergence order."""

import numpy as np
import pytest

from triganneal import (
    CapacityError,
    EvolutionConfig,
    GroundTruth,
    SpinProblem,
    TriggerSpec,
    ValidationError,
    brute_force_solve,
    build_operator_terms,
    dense_hamiltonian,
    evolve,
    exact_propagator_evolve,
    init_uniform_state,
    schedule_coeffs,
    success_probability,
    trotter_step,
)

from conftest import random_problem, random_sat_problem


# ---------------------------------------------------------------------------
# configuration


def test_config_validation():
    with pytest.raises(ValidationError):
        EvolutionConfig(t_anneal=0.0)
    with pytest.raises(ValidationError):
        EvolutionConfig(t_anneal=-1.0)
    with pytest.raises(ValidationError):
        EvolutionConfig(t_anneal=1.0, tau=0.0)
    with pytest.raises(ValidationError):
        EvolutionConfig(t_anneal=1.0, tau=2.0)
    with pytest.raises(ValidationError):
        EvolutionConfig(t_anneal=1.0, record_stride=-1)


def test_step_count_rounding():
    cfg = EvolutionConfig(t_anneal=1.0, tau=0.3)
    assert cfg.n_steps == 3
    assert cfg.tau_effective == pytest.approx(1.0 / 3.0)
    exact = EvolutionConfig(t_anneal=100.0, tau=0.01)
    assert exact.n_steps == 10000
    assert exact.tau_effective == 0.01


def test_uniform_state():
    psi = init_uniform_state(5)
    assert psi.shape == (32,)
    assert psi.dtype == np.complex128
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-15)
    assert np.ptp(psi.real) == 0.0 and np.all(psi.imag == 0.0)


def test_uniform_state_capacity():
    with pytest.raises(CapacityError):
        init_uniform_state(0)
    with pytest.raises(CapacityError):
        init_uniform_state(27)


# ---------------------------------------------------------------------------
# unitarity and exact limits


def test_norm_conserved_to_roundoff():
    rng = np.random.default_rng(3)
    problem = random_problem(6, rng, nonstoquastic=True)
    result = evolve(problem, TriggerSpec("antiferro", 1.5),
                    EvolutionConfig(t_anneal=5.0, tau=0.05))
    assert abs(result.final_norm - 1.0) < 1e-12


def test_single_spin_free_evolution_is_exact():
    """With H = -(1-s) sigma^x every factor commutes and the product formula
    is exact for any tau: the uniform state only picks up the phase
    exp(i integral (1-s) dt) = exp(i T/2), midpoint sums included."""
    problem = SpinProblem(n=1, h_z=np.zeros(1), z_couplings=())
    t_anneal = 1.0
    result = evolve(problem, TriggerSpec("none", 0.0),
                    EvolutionConfig(t_anneal=t_anneal, tau=0.25))
    expected = np.exp(1j * t_anneal / 2.0) * init_uniform_state(1)
    assert np.allclose(result.final_state, expected, atol=1e-13)


def test_single_spin_adiabatic_limit():
    """Slow annealing of one biased spin ends in its ground state."""
    problem = SpinProblem(n=1, h_z=np.array([1.0]), z_couplings=())
    result = evolve(problem, TriggerSpec("none", 0.0),
                    EvolutionConfig(t_anneal=20.0, tau=0.01))
    assert result.success_probability > 0.99
    assert result.ground_energy == -1.0


def test_trotter_step_matches_single_step_evolve():
    rng = np.random.default_rng(7)
    problem = random_problem(4, rng, nonstoquastic=True)
    trig = TriggerSpec("ferro", 0.8)
    terms = build_operator_terms(problem, trig)
    tau = 0.3
    # one step at T = tau puts the midpoint at s = 1/2
    result = evolve(problem, trig, EvolutionConfig(t_anneal=tau, tau=tau))
    psi0 = init_uniform_state(problem.n)
    stepped = trotter_step(psi0, terms, 0.5, tau)
    assert np.allclose(result.final_state, stepped, atol=1e-14)
    assert np.all(psi0 == init_uniform_state(problem.n))  # input untouched


def test_second_order_convergence():
    """Halving tau cuts the final-state error close to fourfold."""
    rng = np.random.default_rng(11)
    problem = random_problem(4, rng)
    trig = TriggerSpec("ferro", 1.0)
    errs = []
    for tau in (0.02, 0.01):
        cfg = EvolutionConfig(t_anneal=1.0, tau=tau)
        approx = evolve(problem, trig, cfg)
        oracle = exact_propagator_evolve(problem, trig, cfg)
        errs.append(np.linalg.norm(approx.final_state - oracle.final_state))
    ratio = errs[0] / errs[1]
    assert 3.3 < ratio < 4.7


def test_evolve_agrees_with_exact_propagator_at_small_tau():
    rng = np.random.default_rng(13)
    problem = random_problem(3, rng, nonstoquastic=True)
    trig = TriggerSpec("antiferro", 1.0)
    cfg = EvolutionConfig(t_anneal=1.0, tau=0.005)
    p_split = evolve(problem, trig, cfg).success_probability
    p_exact = exact_propagator_evolve(problem, trig, cfg).success_probability
    assert p_split == pytest.approx(p_exact, abs=1e-5)


def test_exact_propagator_capacity():
    problem = SpinProblem(n=9, h_z=np.zeros(9), z_couplings=((1, 2, 1.0),))
    with pytest.raises(CapacityError):
        exact_propagator_evolve(problem, TriggerSpec("none", 0.0),
                                EvolutionConfig(t_anneal=1.0, tau=0.5))


# ---------------------------------------------------------------------------
# success probability


def test_success_probability_nondegenerate():
    truth = GroundTruth(bitstring=(1, -1, 1), energy=-1.0, degeneracy=1,
                        first_excited_energy=0.0, first_excited_degeneracy=1)
    psi = np.zeros(8, dtype=complex)
    psi[0b010] = np.sqrt(0.7)
    psi[0b111] = 1j * np.sqrt(0.3)
    assert success_probability(psi, truth) == pytest.approx(0.7)


def test_success_probability_degenerate_sums_minimizers():
    truth = GroundTruth(bitstring=(1, 1), energy=0.0, degeneracy=2,
                        first_excited_energy=1.0, first_excited_degeneracy=1,
                        minimizer_indices=(0, 3))
    psi = np.array([0.6, 0.0, 0.0, 0.8], dtype=complex)
    assert success_probability(psi, truth) == pytest.approx(1.0)


def test_success_probability_requires_minimizer_list():
    truth = GroundTruth(bitstring=(1, 1), energy=0.0, degeneracy=2,
                        first_excited_energy=1.0, first_excited_degeneracy=1,
                        minimizer_indices=None)
    with pytest.raises(ValidationError):
        success_probability(np.zeros(4, dtype=complex), truth)


def test_evolve_degenerate_ground_state():
    problem = SpinProblem(n=3, h_z=np.zeros(3), z_couplings=((1, 2, 1.0),),
                          label="degenerate pair")
    result = evolve(problem, TriggerSpec("none", 0.0),
                    EvolutionConfig(t_anneal=10.0, tau=0.01))
    truth = brute_force_solve(problem)
    manual = sum(abs(result.final_state[k]) ** 2 for k in truth.minimizer_indices)
    assert result.success_probability == pytest.approx(manual, abs=1e-12)
    assert 0.0 < result.success_probability <= 1.0 + 1e-12


def test_evolve_y_coupled_success_uses_true_ground_state():
    """For a nonstoquastic problem the final-state overlap is taken against
    the actual (non-basis) eigenvectors of H_P; checked here against a dense
    eigendecomposition."""
    _, problem, _ = random_sat_problem(4, seed=9, nonstoquastic=True)
    result = evolve(problem, TriggerSpec("none", 0.0),
                    EvolutionConfig(t_anneal=10.0, tau=0.01))
    terms = build_operator_terms(problem, TriggerSpec("none", 0.0))
    h1 = dense_hamiltonian(terms, schedule_coeffs(1.0))
    w, v = np.linalg.eigh(h1)
    p_dense = sum(abs(np.vdot(v[:, i], result.final_state)) ** 2
                  for i in range(len(w)) if w[i] - w[0] <= 1e-8)
    assert result.success_probability == pytest.approx(p_dense, abs=1e-9)
    assert result.ground_energy == pytest.approx(w[0], abs=1e-9)


# ---------------------------------------------------------------------------
# recording and bookkeeping


def test_recording_grid():
    problem = SpinProblem(n=2, h_z=np.array([1.0, 0.0]),
                          z_couplings=((1, 2, 1.0),))
    cfg = EvolutionConfig(t_anneal=1.0, tau=0.1, record_stride=3)
    result = evolve(problem, TriggerSpec("none", 0.0), cfg)
    assert np.allclose(result.recorded_s, [0.0, 0.3, 0.6, 0.9, 1.0])
    assert len(result.recorded_states) == 5
    assert np.allclose(result.recorded_states[0], init_uniform_state(2))
    assert np.allclose(result.recorded_states[-1], result.final_state)
    for psi in result.recorded_states:
        assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-13)


def test_recording_disabled_by_default():
    problem = SpinProblem(n=2, h_z=np.array([1.0, 0.0]), z_couplings=())
    result = evolve(problem, TriggerSpec("none", 0.0),
                    EvolutionConfig(t_anneal=1.0, tau=0.2))
    assert result.recorded_s is None
    assert result.recorded_states is None


def test_result_bookkeeping():
    _, problem, truth = random_sat_problem(4, seed=2, label="bookkeeping")
    cfg = EvolutionConfig(t_anneal=2.0, tau=0.3)
    result = evolve(problem, TriggerSpec("antiferro", 0.7), cfg)
    assert result.label == "bookkeeping"
    assert result.trigger_kind == "antiferro"
    assert result.g == 0.7
    assert result.n_steps == 7
    assert result.tau == 0.3
    assert result.tau_effective == pytest.approx(2.0 / 7.0)
    assert result.ground_energy == truth.energy
    assert result.wall_time > 0.0


def test_result_reports_zero_g_for_no_trigger():
    problem = SpinProblem(n=2, h_z=np.array([1.0, 0.0]), z_couplings=())
    result = evolve(problem, TriggerSpec("none", 5.0),
                    EvolutionConfig(t_anneal=1.0, tau=0.5))
    assert result.g == 0.0
