"""Local refinement of multi-path routes in wireless mesh networks."""

from .mra import classify_pairs, build_conflict_graph, enlarge_single, refine, refine_detailed
from .routing import Method, Path, PathSet, RoutingConfig, route
from .scheduler import SimConfig, simulate_tdma
from .topology import GenerationConfig, Network, comm_radius, generate_network

__version__ = "0.1.0"
