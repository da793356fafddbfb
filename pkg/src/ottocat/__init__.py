"""Quantum Otto machines, two-stroke and autonomous, with qubit catalysts.

The package models one physical machine in two pictures and proves —
numerically, on every run — that they agree:

* :mod:`~ottocat.discrete`: a two-stroke engine whose work stroke is a
  permutation of energy levels and whose heat stroke rethermalizes two
  bath qubits, optionally threading a catalyst whose state must return
  intact each cycle;
* :mod:`~ottocat.continuous`: the autonomous counterpart, a local
  Lindblad generator driven to its steady state, with heat currents and
  power read off the stationary transfer rates.

:mod:`~ottocat.mapping` bridges the pictures via per-cycle flow =
stationary rate x characteristic time; :mod:`~ottocat.analytic` holds
the closed forms used as independent oracles; :mod:`~ottocat.verify`
packages the full self-audit behind the ``ottocat verify`` command.

Units: hbar = k_B = 1 throughout; energies are angular frequencies.
"""

from __future__ import annotations

from .analytic import (
    RateConstants,
    SignedDeltaP,
    TauBreakdown,
    cat_current,
    cat_delta_p,
    cat_population,
    cat_tau,
    design_efficiencies,
    efficiencies,
    one_minus_kappa,
    one_minus_zeta,
    otto_current,
    otto_delta_p,
    otto_tau,
    rate_constants,
)
from .continuous import (
    SteadyStateReport,
    Superoperator,
    build_dissipator,
    build_interaction,
    build_liouvillian,
    currents_and_power,
    entropy_production_rate,
    ness_condition_checks,
    probability_currents,
    stationary_state,
    steady_state_report,
)
from .discrete import (
    CatalystState,
    CycleReport,
    build_initial_state,
    clausius_check,
    heat_stroke,
    permutation_matrix,
    probability_flows,
    run_cycle,
    solve_catalyst,
)
from .engine_spec import (
    BathParams,
    EngineSpec,
    PairEnergetics,
    SwapPair,
    energy_differences,
    hamiltonians,
    otto_spec,
    otto_spec_from_baths,
    qubit_catalyst_spec,
    qubit_catalyst_spec_from_baths,
    validate,
)
from .mapping import (
    EfficiencyComparison,
    EngineFamily,
    EquivalenceReport,
    compare_at_efficiency,
    table_correspondence_residuals,
    verify_equivalence,
)
from .qstate import (
    DensityMatrix,
    HilbertLayout,
    Operator,
    expectation,
    gibbs_qubit,
    partial_trace,
    tensor,
    tensor_all,
    von_neumann_entropy,
)
from .verify import CheckResult, format_report, run_suite

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # states and operators
    "HilbertLayout",
    "Operator",
    "DensityMatrix",
    "gibbs_qubit",
    "tensor",
    "tensor_all",
    "partial_trace",
    "expectation",
    "von_neumann_entropy",
    # engine construction
    "BathParams",
    "SwapPair",
    "EngineSpec",
    "PairEnergetics",
    "otto_spec",
    "otto_spec_from_baths",
    "qubit_catalyst_spec",
    "qubit_catalyst_spec_from_baths",
    "hamiltonians",
    "energy_differences",
    "validate",
    # two-stroke picture
    "CatalystState",
    "CycleReport",
    "permutation_matrix",
    "build_initial_state",
    "probability_flows",
    "heat_stroke",
    "solve_catalyst",
    "run_cycle",
    "clausius_check",
    # autonomous picture
    "Superoperator",
    "SteadyStateReport",
    "build_interaction",
    "build_dissipator",
    "build_liouvillian",
    "stationary_state",
    "probability_currents",
    "currents_and_power",
    "ness_condition_checks",
    "entropy_production_rate",
    "steady_state_report",
    # closed forms
    "RateConstants",
    "TauBreakdown",
    "SignedDeltaP",
    "otto_delta_p",
    "otto_current",
    "otto_tau",
    "cat_population",
    "cat_delta_p",
    "rate_constants",
    "cat_current",
    "cat_tau",
    "one_minus_zeta",
    "one_minus_kappa",
    "design_efficiencies",
    "efficiencies",
    # the bridge
    "EquivalenceReport",
    "EngineFamily",
    "EfficiencyComparison",
    "verify_equivalence",
    "table_correspondence_residuals",
    "compare_at_efficiency",
    # self-audit
    "CheckResult",
    "run_suite",
    "format_report",
]
