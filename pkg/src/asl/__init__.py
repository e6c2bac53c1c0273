"""asl: exact desk-scale analysis of goal representations for control.

The package builds the Discrete Cube environment and its shortest-path
oracle, evaluates libraries of goal encodings for value/action sufficiency
with exact information quantities, measures control success of
representation-conditioned mixed policies, and certifies the log-loss
actor-training bounds numerically.
"""

from .cube import Action, CubeId, CubeState, CubeWorld, Goal, HELD, build_world
from .info import InfoReport, PairLaw, order_consistency_ratio
from .lab import CubeLab
from .oracle import OracleTables, compute_oracle
from .policy import RolloutConfig, RolloutOutcome, build_mixed_policy, evaluate
from .reps import RepresentationSpec, baseline, baselines, sample_library

__version__ = "0.1.0"

__all__ = [
    "Action",
    "CubeId",
    "CubeLab",
    "CubeState",
    "CubeWorld",
    "Goal",
    "HELD",
    "InfoReport",
    "OracleTables",
    "PairLaw",
    "RepresentationSpec",
    "RolloutConfig",
    "RolloutOutcome",
    "__version__",
    "baseline",
    "baselines",
    "build_mixed_policy",
    "build_world",
    "compute_oracle",
    "evaluate",
    "order_consistency_ratio",
    "sample_library",
]
