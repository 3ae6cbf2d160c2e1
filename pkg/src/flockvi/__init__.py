"""Distance-based formation-shape control with velocity consensus (flocking).

Simulates double-integrator agents steered by quartic distance potentials
and graph-Laplacian velocity consensus. The workhorse is a forced
variational integrator: an explicit two-step scheme with one precomputed
s x s solve per step that conserves total linear momentum exactly and
tracks the dissipated energy faithfully. Explicit Euler and a classical
4th-order method are included as baselines and accuracy oracles.

The stepping kernels are compiled (Cython) when the extension is built,
with a pure-numpy fallback selected automatically at import; see
``flockvi.backend``.
"""

from .backend import available_backends, backend_name
from .diagnostics import (
    StepDiagnostics,
    discrete_energy,
    edge_errors,
    energy_decay_slope,
    momentum,
    velocity_disagreement,
)
from .dynamics import (
    accelerations,
    agent_energy,
    pair_gradient,
    pair_potential,
    stacked_gamma,
    total_energy,
)
from .graph import (
    AgentIndexError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    FormationGraph,
    GraphError,
    NonPositiveDistanceError,
    SelfLoopError,
    build_graph,
    inflated_laplacian,
    neighbors,
)
from .integrators import (
    DiscretePair,
    PhaseState,
    StepperMatrices,
    bootstrap,
    discrete_el_residual,
    euler_step,
    precompute_stepper,
    refined_bootstrap,
    rk4_step,
    run,
    variant_target_scales,
    vi_step,
)
from .scenario import (
    Scenario,
    ScenarioError,
    TrajectoryRecord,
    UnknownPresetError,
    load_scenario,
    load_scenario_file,
    preset,
    preset_names,
    read_csv,
    serialize_scenario,
    write_csv,
)
from .svg import EmptyPlotError, PlotStyle, emit_svg
from .verification import (
    ConvergenceReport,
    convergence_order,
    energy_deviation,
    reference_solution,
    residual_audit,
    trajectory_deviation,
)

__version__ = "0.1.0"
