"""Binary beam-pointing channel: optimal probing, block-end estimation, minimum distortion."""

from .analysis import min_distortion, predicted_class_stats
from .channel import channel_output, run_block, sample_state
from .core import BlockConfig, InputMask, hamming_distortion, validate_config
from .estimator import estimate, init_ambiguity, posterior, update_ambiguity
from .oracle import evaluate_policy_exact, minimize_over_policies, policy_tree
from .policy import compute_schedule, optimal_policy, parse_policy, random_policy, sweep_policy
from .simulate import run_experiment

__all__ = [
    "BlockConfig", "InputMask", "channel_output", "compute_schedule", "estimate",
    "evaluate_policy_exact", "hamming_distortion", "init_ambiguity", "min_distortion",
    "minimize_over_policies", "optimal_policy", "parse_policy", "policy_tree", "posterior",
    "predicted_class_stats", "random_policy", "run_block", "run_experiment", "sample_state",
    "sweep_policy", "update_ambiguity", "validate_config",
]
