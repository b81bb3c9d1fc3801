"""Random walks with and without resetting on hypergraphs."""
from ._kernels import BACKEND
from .analytics import (
    mfpt,
    mfpt_matrix,
    occupation_probability,
    reset_mfpt,
    reset_mfpt_matrix,
    reset_occupation,
    reset_stationary,
    stationary,
)
from .errors import (
    ConnectivityError,
    HyperwalkError,
    IsolatedNodeError,
    NumericalError,
    OptimizationWarning,
    ParseError,
)
from .generators import load_instance, random_connected_hypergraph
from .hypergraph import (
    Hypergraph,
    build_generalized_adjacency,
    build_transition,
    largest_connected_component,
    parse_hyperedge_list,
    read_hyperedge_list,
)
from .montecarlo import cover_time, gamma_sweep_cover, simulate_hitting_time
from .optimizer import find_optimal_gamma, gamma_curve, resetting_helps
from .ranking import compare_rankings, rank_clique, rank_hypergraph
from .spectral import ResetWalkSpec, decompose, decompose_hypergraph, reset_spectrum

__all__ = [name for name in dir() if not name.startswith("_")]
