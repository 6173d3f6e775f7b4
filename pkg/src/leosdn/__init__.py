"""Dynamic SDN controller assignment for LEO satellite constellations."""
from .assign import (
    ActivationVector,
    AssignmentMatrix,
    ObjectiveValue,
    ObjectiveWeights,
    SolveOutcome,
    count_reassignments,
    evaluate_objective,
    feasible,
    replay_assignment,
    solve_dsca,
    solve_opt_dsca,
    solve_ssca,
)
from .config import ConfigError, ScenarioConfig, load_scenario, parse_scenario
from .delay import DelayMatrix, NormalizationBounds, delay_matrix, normalization_bounds, normalize
from .metrics import Approach, CdfSeries, ScenarioResult, build_cdf, reassignment_series, timeline
from .orbit import ConstellationConfig, GroundStation, SatelliteState, SlotIndex, propagate, station_position
from .topology import IslPolicy, NetworkGraph, build_graph, elevation_deg

__version__ = "0.1.0"
