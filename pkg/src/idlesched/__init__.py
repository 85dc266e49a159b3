"""Minimum-idle-energy scheduling for a single machine with a fixed task
order, with idle energy costs derived from a bilinear furnace model."""

__version__ = "0.1.0"

from .baseline import (
    Mode,
    StandbyOption,
    Transition,
    TransitionGraph,
    average_idle_power,
    derive_transition_graph,
    dp_solve,
    gap_cost,
    load_transition_graph,
    save_transition_graph,
)
from .energy_functions import (
    ConcavityVerdict,
    IdleEnergyFunction,
    PiecewiseLinear,
    PiecewiseLinearConcave,
    check_concavity,
    from_transition_graph,
    load_function,
    save_function,
)
from .errors import (
    DegenerateHorizon,
    DivisionByZeroTemperature,
    FullyUtilised,
    IdleSchedError,
    InfeasibleOrder,
    InvalidSchedule,
    NegativeDuration,
    NoPath,
    NonConcaveFunction,
    NonConcaveInduced,
    NotAdmissible,
    NotATaskVertex,
    OutOfRange,
    SingularSystem,
    TooLarge,
    TooShortSeries,
)
from .furnace import (
    BilinearFurnaceModel,
    ControlSegment,
    Trajectory,
    bang_bang_segments,
    fit_parameters,
    full_reheat_energy,
    heat_up_time,
    idle_energy,
    mape,
    simulate,
    switching_time,
    switching_time_derivative,
    tabulate,
    trim_power,
)
from .instances import (
    GeneratorConfig,
    Instance,
    Schedule,
    Task,
    generate_instance,
    idle_gaps,
    left_aligned_schedule,
    load_instance,
    load_schedule,
    propagate_windows,
    save_instance,
    save_schedule,
    total_idle_energy,
    utilization,
    validate_schedule,
)
from .scheduler import (
    EnergyGraph,
    GraphPath,
    SupportVertex,
    brute_force_solve,
    build_energy_graph,
    edge_feasible,
    extract_schedule,
    idle_gap,
    min_switches_solve,
    normalize_to_block_form,
    shortest_path,
    solve,
)

__all__ = [
    "__version__",
    "Mode", "StandbyOption", "Transition", "TransitionGraph",
    "average_idle_power", "derive_transition_graph", "dp_solve", "gap_cost",
    "load_transition_graph", "save_transition_graph",
    "ConcavityVerdict", "IdleEnergyFunction", "PiecewiseLinear",
    "PiecewiseLinearConcave", "check_concavity", "from_transition_graph",
    "load_function", "save_function",
    "DegenerateHorizon", "DivisionByZeroTemperature", "FullyUtilised",
    "IdleSchedError", "InfeasibleOrder", "InvalidSchedule",
    "NegativeDuration", "NoPath", "NonConcaveFunction", "NonConcaveInduced",
    "NotAdmissible", "NotATaskVertex", "OutOfRange", "SingularSystem",
    "TooLarge", "TooShortSeries",
    "BilinearFurnaceModel", "ControlSegment", "Trajectory",
    "bang_bang_segments", "fit_parameters", "full_reheat_energy",
    "heat_up_time", "idle_energy", "mape", "simulate", "switching_time",
    "switching_time_derivative", "tabulate", "trim_power",
    "GeneratorConfig", "Instance", "Schedule", "Task", "generate_instance",
    "idle_gaps", "left_aligned_schedule", "load_instance", "load_schedule",
    "propagate_windows", "save_instance", "save_schedule",
    "total_idle_energy", "utilization", "validate_schedule",
    "EnergyGraph", "GraphPath", "SupportVertex", "brute_force_solve",
    "build_energy_graph", "edge_feasible", "extract_schedule", "idle_gap",
    "min_switches_solve", "normalize_to_block_form", "shortest_path", "solve",
]
