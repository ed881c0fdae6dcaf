"""Feedforward displacement receiver for weak 3-/4-PSK coherent states,
prior optimization for mutual information and cutoff rate, and baselines."""
from .baselines import HeterodyneSpec, helstrom_error_psk, heterodyne_channel_matrix
from .info import (
    OptimizationReport,
    average_error_rate,
    bhattacharyya_matrix,
    cutoff_rate_at,
    decoding_error_bound,
    maximize_mutual_information,
    minimize_cutoff_objective,
    mutual_information,
    required_code_length,
)
from .receiver import (
    ChannelMatrix,
    DecisionTree,
    ReceiverConfig,
    build_decision_tree,
    exact_channel_matrix,
    off_probability,
    residual_distance_sq,
)
from .appendix import appendix_matrix
from .simulate import SimulationSpec, estimate_channel_matrix, simulate_trial

__version__ = "0.1.0"
