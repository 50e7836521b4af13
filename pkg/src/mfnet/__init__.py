"""Multilayer network community detection for multi-frequency signals.

The pipeline: time-frequency transform trial signals (rid_rihaczek),
measure within-band phase locking and cross-band phase-amplitude
coupling (build_network), pick the modularity resolution and inter-layer
scale against surrogate baselines (select_params), maximize multilayer
modularity (leiden_maximize), consense repeated runs across subjects
(group_structure), and compare partitions and networks (metrics).
"""

__version__ = "0.1.0"

from .core import (MultilayerNetwork, NumericError, Partition,
                   ValidationError, block_total, layer_strength)
from .io import (load_config, load_network, load_partition, load_trials,
                 parse_config, save_network, save_partition, save_table,
                 save_trials)
from .modularity import (GainBasis, LocalMoveState, ModularityParams,
                         NullModel, apply_move, gain_matrix, leiden_maximize,
                         modularity, modularity_gain, null_model_weight,
                         single_layer_modularity)
from .params import ParamGrid, default_grid, select_params, surrogate
from .metrics import ari, band_similarity, contingency, js_distance, nmi, vi
from .consensus import (CoClusteringMatrix, MultiviewGraph, co_clustering,
                        group_structure, mean_community_count, scml,
                        subject_coclusters)
from .tfd import (TfdConfig, TimeFrequencyMap, amplitude_envelope,
                  intra_layer_weight, inter_layer_weight, low_freq_phase,
                  modulation_index, phase_difference, plv, rid_rihaczek)
from .connectivity import (Band, BandSet, TrialTensor, build_network,
                           default_bands)
from .synth import (PacLink, PhaseLock, PlantedSpec, coupled_trials,
                    independent_blueprint, mixed_blueprint,
                    planted_multilayer, spanning_blueprint)

__all__ = [
    "MultilayerNetwork", "NumericError", "Partition", "ValidationError",
    "block_total", "layer_strength",
    "load_config", "load_network", "load_partition", "load_trials",
    "parse_config", "save_network", "save_partition", "save_table",
    "save_trials",
    "GainBasis", "LocalMoveState", "ModularityParams", "NullModel",
    "apply_move", "gain_matrix", "leiden_maximize", "modularity",
    "modularity_gain", "null_model_weight", "single_layer_modularity",
    "ParamGrid", "default_grid", "select_params", "surrogate",
    "ari", "band_similarity", "contingency", "js_distance", "nmi", "vi",
    "CoClusteringMatrix", "MultiviewGraph", "co_clustering",
    "group_structure", "mean_community_count", "scml", "subject_coclusters",
    "TfdConfig", "TimeFrequencyMap", "amplitude_envelope",
    "intra_layer_weight", "inter_layer_weight", "low_freq_phase",
    "modulation_index", "phase_difference", "plv", "rid_rihaczek",
    "Band", "BandSet", "TrialTensor", "build_network", "default_bands",
    "PacLink", "PhaseLock", "PlantedSpec", "coupled_trials",
    "independent_blueprint", "mixed_blueprint", "planted_multilayer",
    "spanning_blueprint",
    "__version__",
]
