"""Connected multi-agent path finding: CCBS, an A* baseline and a brute-force oracle."""
from .astar_od import astar_od_solve
from .ccbs import CCBS, Conflict, CTNode, SolverConfig, VARIANTS, detect_conflict, solve
from .graph import (Execution, GraphError, Instance, TopologicalGraph, ValidationReport, Violation,
                    disconnected_agents, is_connected, is_connected_execution, is_sight_moveable,
                    sight_moveable_violations, sm_construct_execution, sm_witness_path,
                    validate_execution)
from .grid import CommModel, GridMap, MapFormatError, discretize, generate_instance, parse_map
from .lowlevel import Constraint, ConstraintConflict, ConstraintSet, constrained_shortest_path
from .oracle import OracleBudgetError, oracle_solve
from .results import SearchResult, Stats, Status

__version__ = "0.1.0"
