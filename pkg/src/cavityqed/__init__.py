"""Dissipative cavity-QED dynamics and quantum-correlation measures.

The package has five layers:

* :mod:`cavityqed.linalg` — dense Hermitian eigensolvers, Kronecker
  products, partial traces, and matrix exponentials.
* :mod:`cavityqed.models` — Hamiltonians, jump operators, and initial
  states for a two-level/cavity system and a three-part molecular model.
* :mod:`cavityqed.solver` — split-step Lindblad integrator plus an
  independent superoperator-exponential oracle.
* :mod:`cavityqed.measures` — entropy, concurrence, mutual information,
  classical correlation, and quantum discord.
* :mod:`cavityqed.scenarios` / :mod:`cavityqed.cli` — config-driven runs,
  sweeps, CSV trajectories, and plots.
"""

from .measures import (
    CorrelationReport,
    MeasurementBasis,
    classical_correlation,
    concurrence,
    conditional_ensemble,
    discord,
    mutual_information,
    projective_basis,
    von_neumann_entropy,
)
from .models import (
    JcmParams,
    ModelSystem,
    OhPlusParams,
    RwaReport,
    RwaWarning,
    build_jcm,
    build_ohplus,
    check_rwa,
    initial_state_jcm,
    initial_state_ohplus,
)
from .scenarios import (
    ConfigError,
    ScenarioConfig,
    SweepConfig,
    parse_config,
    render_plot,
    run_scenario,
    run_sweep,
    write_csv,
)
from .solver import (
    IntegrationConfig,
    InvariantError,
    TrajectoryRecord,
    evolve,
    exact_oracle,
    liouvillian,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CorrelationReport",
    "IntegrationConfig",
    "InvariantError",
    "JcmParams",
    "MeasurementBasis",
    "ModelSystem",
    "OhPlusParams",
    "RwaReport",
    "RwaWarning",
    "ScenarioConfig",
    "SweepConfig",
    "TrajectoryRecord",
    "build_jcm",
    "build_ohplus",
    "check_rwa",
    "classical_correlation",
    "concurrence",
    "conditional_ensemble",
    "discord",
    "evolve",
    "exact_oracle",
    "initial_state_jcm",
    "initial_state_ohplus",
    "liouvillian",
    "mutual_information",
    "parse_config",
    "projective_basis",
    "render_plot",
    "run_scenario",
    "run_sweep",
    "von_neumann_entropy",
    "write_csv",
]
