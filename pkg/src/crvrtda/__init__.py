"""Topological analysis of weighted networks with cropped reciprocal
Vietoris-Rips filtrations, plus Louvain and WSBM baselines."""
__version__ = "0.1.0"

from .network import (NetworkFormatError, NetworkValidationError, WeightedNetwork, degree, load_network,
                      loads_network, dumps_network, save_network, strength, weighted_clustering)
from .netgen import (BlockSpec, generate_block_network, generate_er_weighted, generate_noisy_block_network,
                     make_rng)
from .crvr import (DistanceMatrix, Filtration, FiltrationError, FiltrationTooLarge, build_flag_filtration,
                   crvr_distance, load_filtration, save_filtration)
from .persistence import Barcode, Interval, betti_oracle, compute_persistence
from .diagram import classify_structure, emit_diagram_csv, emit_diagram_svg, extract_features
from .community import Partition, louvain, modularity
from .wsbm import WsbmConfig, WsbmFit, WsbmState, ari, fit, free_energy, log_likelihood

__all__ = [
    "WeightedNetwork", "NetworkFormatError", "NetworkValidationError", "strength", "degree",
    "weighted_clustering", "load_network", "save_network", "loads_network", "dumps_network",
    "BlockSpec", "generate_block_network", "generate_noisy_block_network", "generate_er_weighted", "make_rng",
    "DistanceMatrix", "Filtration", "FiltrationError", "FiltrationTooLarge", "crvr_distance",
    "build_flag_filtration", "load_filtration", "save_filtration",
    "Barcode", "Interval", "compute_persistence", "betti_oracle",
    "extract_features", "classify_structure", "emit_diagram_csv", "emit_diagram_svg",
    "Partition", "louvain", "modularity",
    "WsbmConfig", "WsbmState", "WsbmFit", "fit", "free_energy", "log_likelihood", "ari",
]
