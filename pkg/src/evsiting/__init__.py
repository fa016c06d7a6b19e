"""Charging-station siting as a penalized QUBO, with annealing and exact solvers."""

from .distance import (
    DistanceBackend,
    DistanceMatrixSet,
    MatrixCache,
    build_matrices,
    cached_build_matrices,
    haversine_km,
    osrm_table,
)
from .generate import GridSpec, edwardsville_like_instance, generate_grid_instance
from .metrics import SolutionSummary, StationMetrics, export_geojson, station_metrics
from .model import (
    GeoPoint,
    Objective,
    ProblemInstance,
    Site,
    SiteKind,
    ValidationError,
    Weights,
    default_weights,
    objective_components,
    validate_instance,
)
from .qubo import Qubo, build_qubo, energy
from .solvers import (
    AnnealSchedule,
    BudgetExceeded,
    SolveReport,
    best_of,
    solve,
    solve_exact,
    solve_greedy,
    solve_random,
    solve_repeated,
    solve_sa_qubo,
    solve_sa_swap,
)

__version__ = "0.1.0"
