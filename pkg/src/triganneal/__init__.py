"""Desk-scale simulator for quantum annealing with trigger Hamiltonians.

The model anneals H(s) = (1-s) H_I + s(1-s) H_T + s H_P, with a transverse
field start, an optional ferromagnetic or antiferromagnetic xx trigger, and
an Ising problem Hamiltonian mapped from 2-SAT (optionally with yy couplings
that make it nonstoquastic). The package covers instance generation, dense
and matrix-free operator application, Suzuki-Trotter time evolution, Lanczos
gap scans with anticrossing detection, Landau-Zener fits, and a closed-form
two-spin model, plus a command-line front end (``triganneal``).
"""

from .errors import (
    CapacityError,
    FitError,
    GenerationError,
    LanczosError,
    ValidationError,
)
from .problems import (
    Clause,
    GroundTruth,
    SatFormula,
    SpinProblem,
    TriggerSpec,
    brute_force_solve,
    diagonal_energies,
    generate_2sat_instance,
    load_instance,
    map_clause_to_terms,
    map_formula_to_problem,
    parse_instance,
    save_instance,
    serialize_instance,
)
from .fixtures import FIXTURE_LABELS, load_fixture
from .operator import (
    OperatorTerms,
    ScheduleCoefficients,
    apply_hamiltonian,
    build_operator_terms,
    dense_hamiltonian,
    is_stoquastic,
    schedule_coeffs,
)
from .evolution import (
    AnnealResult,
    EvolutionConfig,
    evolve,
    exact_propagator_evolve,
    init_uniform_state,
    success_probability,
    trotter_step,
)
from .spectrum import (
    GapProfile,
    SpectrumSample,
    count_anticrossings,
    counted_anticrossings,
    gap_profile,
    lanczos_lowest,
    profile_table,
    stretch_width,
)
from .analysis import (
    LzFitResult,
    OverlapTrace,
    TwoSpinParams,
    average_energy_trace,
    lz_fit,
    overlap_trace,
    twospin_eigenvalues_paper,
    twospin_gap_leading_order,
    twospin_spectrum_numeric,
    twospin_table,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "FitError",
    "GenerationError",
    "LanczosError",
    "ValidationError",
    "Clause",
    "SatFormula",
    "SpinProblem",
    "TriggerSpec",
    "GroundTruth",
    "generate_2sat_instance",
    "map_clause_to_terms",
    "map_formula_to_problem",
    "brute_force_solve",
    "diagonal_energies",
    "serialize_instance",
    "parse_instance",
    "load_instance",
    "save_instance",
    "FIXTURE_LABELS",
    "load_fixture",
    "ScheduleCoefficients",
    "schedule_coeffs",
    "OperatorTerms",
    "build_operator_terms",
    "apply_hamiltonian",
    "dense_hamiltonian",
    "is_stoquastic",
    "EvolutionConfig",
    "AnnealResult",
    "evolve",
    "exact_propagator_evolve",
    "init_uniform_state",
    "success_probability",
    "trotter_step",
    "SpectrumSample",
    "GapProfile",
    "lanczos_lowest",
    "gap_profile",
    "count_anticrossings",
    "counted_anticrossings",
    "stretch_width",
    "profile_table",
    "LzFitResult",
    "lz_fit",
    "OverlapTrace",
    "overlap_trace",
    "average_energy_trace",
    "TwoSpinParams",
    "twospin_eigenvalues_paper",
    "twospin_spectrum_numeric",
    "twospin_gap_leading_order",
    "twospin_table",
    "__version__",
]
