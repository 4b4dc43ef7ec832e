"""Time evolution under the annealing Hamiltonian.

The integrator is the symmetric second-order Suzuki-Trotter product formula
with the schedule frozen at the midpoint of every step, giving a global
error O(tau^2) at fixed annealing time. Every factor is an exact unitary,
so the norm is conserved to round-off regardless of tau.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CapacityError, ValidationError
from .operator import OperatorTerms, dense_hamiltonian, schedule_coeffs
from .problems import brute_force_solve

MAX_EVOLVE_N = 26

# eigenvalues closer than this are treated as one degenerate cluster when
# projecting on instantaneous eigenstates
DEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class EvolutionConfig:
    """Run parameters. tau is adjusted to divide t_anneal exactly.

    record_stride > 0 makes evolve() store the state every that many steps
    (plus the initial and final states); 0 disables recording.
    """

    t_anneal: float
    tau: float = 0.01
    record_stride: int = 0

    def __post_init__(self):
        if self.t_anneal <= 0:
            raise ValidationError("t_anneal must be positive")
        if self.tau <= 0 or self.tau > self.t_anneal:
            raise ValidationError("need 0 < tau <= t_anneal")
        if self.record_stride < 0:
            raise ValidationError("record_stride must be >= 0")

    @property
    def n_steps(self):
        return max(1, round(self.t_anneal / self.tau))

    @property
    def tau_effective(self):
        return self.t_anneal / self.n_steps


@dataclass
class AnnealResult:
    """Output of one evolution run."""

    label: str
    trigger_kind: str
    g: float
    t_anneal: float
    tau: float
    tau_effective: float
    n_steps: int
    final_state: np.ndarray
    success_probability: float
    final_norm: float
    recorded_s: np.ndarray | None = None
    recorded_states: list | None = None
    wall_time: float = 0.0
    ground_energy: float = field(default=math.nan)


def init_uniform_state(n):
    """Uniform superposition, the ground state of H_I with h^x = 1."""
    if not (1 <= n <= MAX_EVOLVE_N):
        raise CapacityError(f"state vectors supported for 1 <= n <= {MAX_EVOLVE_N}")
    dim = 1 << n
    psi = np.full(dim, 2.0 ** (-n / 2.0), dtype=np.complex128)
    return psi


def trotter_step(psi, terms, s_mid, tau):
    """One second-order step with coefficients frozen at s_mid.

    Returns a new state; the caller's psi is untouched.
    """
    coeffs = schedule_coeffs(s_mid)
    out = np.array(psi, dtype=np.complex128, copy=True)
    kernels.trotter_step_inplace(
        out, terms.diag_energy, terms.n, terms.x_field,
        terms._xx_lo, terms._xx_hi, terms._xx_w,
        terms._yy_lo, terms._yy_hi, terms._yy_w,
        coeffs.a_init, coeffs.b_prob, coeffs.c_trig, tau)
    return out


def success_probability(final_state, truth):
    """Squared overlap with the known diagonal ground state.

    Sums |<sigma|psi>|^2 over all minimizers when the ground state is
    degenerate (requires truth.minimizer_indices in that case).
    """
    final_state = np.asarray(final_state)
    if truth.degeneracy == 1:
        return float(abs(final_state[truth.index]) ** 2)
    if truth.minimizer_indices is None:
        raise ValidationError(
            "degenerate ground state with no stored minimizer list")
    idx = np.fromiter(truth.minimizer_indices, dtype=np.int64)
    if idx.max() >= final_state.shape[0]:
        raise ValidationError("minimizer index exceeds state dimension")
    return float(np.sum(np.abs(final_state[idx]) ** 2))


def _problem_ground_overlap(problem, terms, psi):
    """Success probability against the true ground state of H_P.

    For a diagonal problem this is the bitstring overlap. A y-coupled H_P
    has a non-basis ground state; its Lanczos eigenvectors are used instead,
    summing over a near-degenerate cluster. Returns (p, E0).
    """
    if problem.y_coupling_strength == 0.0:
        truth = brute_force_solve(problem)
        return success_probability(psi, truth), truth.energy
    from .spectrum import lanczos_lowest  # late import, spectrum is higher level

    sample = lanczos_lowest(terms, schedule_coeffs(1.0), k=3, seed=7,
                            want_vectors=True)
    e0 = sample.energies[0]
    p = 0.0
    for e, vec in zip(sample.energies, sample.eigenvectors):
        if e - e0 <= DEGENERACY_TOL:
            p += abs(np.vdot(vec.astype(np.complex128), psi)) ** 2
    return float(p), float(e0)


def evolve(problem, trigger, config, terms=None):
    """Anneal from the uniform state; returns an AnnealResult.

    The success probability is measured against the exact ground state of
    the problem Hamiltonian (brute force for diagonal problems, Lanczos for
    y-coupled ones).
    """
    t0 = time.perf_counter()
    if terms is None:
        terms = OperatorTerms(problem, trigger)
    psi = init_uniform_state(problem.n)
    m = config.n_steps
    tau = config.tau_effective
    stride = config.record_stride
    rec_s = [0.0] if stride else None
    rec_states = [psi.copy()] if stride else None
    for j in range(m):
        s_mid = (j + 0.5) * tau / config.t_anneal
        a = 1.0 - s_mid
        kernels.trotter_step_inplace(
            psi, terms.diag_energy, terms.n, terms.x_field,
            terms._xx_lo, terms._xx_hi, terms._xx_w,
            terms._yy_lo, terms._yy_hi, terms._yy_w,
            a, s_mid, s_mid * a, tau)
        if stride and ((j + 1) % stride == 0 or j + 1 == m):
            rec_s.append((j + 1) * tau / config.t_anneal)
            rec_states.append(psi.copy())
    p, e0 = _problem_ground_overlap(problem, terms, psi)
    return AnnealResult(
        label=problem.label,
        trigger_kind=trigger.kind,
        g=trigger.g if trigger.kind != "none" else 0.0,
        t_anneal=config.t_anneal,
        tau=config.tau,
        tau_effective=tau,
        n_steps=m,
        final_state=psi,
        success_probability=p,
        final_norm=float(np.linalg.norm(psi)),
        recorded_s=np.array(rec_s) if stride else None,
        recorded_states=rec_states,
        wall_time=time.perf_counter() - t0,
        ground_energy=e0,
    )


def exact_propagator_evolve(problem, trigger, config, terms=None):
    """Oracle integrator: dense eigendecomposition of each frozen step.

    Same midpoint freezing as evolve(), but every step applies the exact
    exponential, so differences against evolve() isolate the splitting
    error. Capped at n = 8.
    """
    if problem.n > 8:
        raise CapacityError("exact propagator capped at n=8")
    t0 = time.perf_counter()
    if terms is None:
        terms = OperatorTerms(problem, trigger)
    psi = init_uniform_state(problem.n)
    m = config.n_steps
    tau = config.tau_effective
    stride = config.record_stride
    rec_s = [0.0] if stride else None
    rec_states = [psi.copy()] if stride else None
    for j in range(m):
        s_mid = (j + 0.5) * tau / config.t_anneal
        h = dense_hamiltonian(terms, schedule_coeffs(s_mid))
        w, v = np.linalg.eigh(h)
        psi = v @ (np.exp(-1j * tau * w) * (v.conj().T @ psi))
        if stride and ((j + 1) % stride == 0 or j + 1 == m):
            rec_s.append((j + 1) * tau / config.t_anneal)
            rec_states.append(psi.copy())
    p, e0 = _problem_ground_overlap(problem, terms, psi)
    return AnnealResult(
        label=problem.label,
        trigger_kind=trigger.kind,
        g=trigger.g if trigger.kind != "none" else 0.0,
        t_anneal=config.t_anneal,
        tau=config.tau,
        tau_effective=tau,
        n_steps=m,
        final_state=psi,
        success_probability=p,
        final_norm=float(np.linalg.norm(psi)),
        recorded_s=np.array(rec_s) if stride else None,
        recorded_states=rec_states,
        wall_time=time.perf_counter() - t0,
        ground_energy=e0,
    )
