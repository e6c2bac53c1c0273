"""Relative-position features and the per-feature transforms.

For a state and a goal ``(t, p_g)`` let ``(x_a, y_a)`` be the agent,
``(x_t, y_t)`` the target cube (set to the agent's cell while the target is
held) and ``(x_g, y_g)`` the goal cell.  The feature vector is

    h     gripper status (0 none, 1 red, 2 blue)
    t     target cube id (0 red, 1 blue)
    dx1, dy1 = (x_t - x_a, y_t - y_a)    agent -> target cube
    dx2, dy2 = (x_g - x_t, y_g - y_t)    target cube -> goal
    d_at  = |dx1| + |dy1|
    d_bg  = |dx2| + |dy2|
    v     optimal value V*(s, g)

Transforms are small total functions on one feature; directional kinds apply
to dx/dy, distance kinds to d_at/d_bg, value kinds to v.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cube import CubeState, CubeWorld, Goal
from .oracle import UNREACHABLE, OracleTables, UnreachableError

__all__ = [
    "DIRECTIONAL_TRANSFORMS",
    "DISTANCE_TRANSFORMS",
    "FEATURE_NAMES",
    "FeatureVector",
    "VALUE_TRANSFORMS",
    "apply_transform",
    "feature_matrix",
    "features",
]

FEATURE_NAMES = ("h", "t", "dx1", "dy1", "dx2", "dy2", "d_at", "d_bg", "v")
F_H, F_T, F_DX1, F_DY1, F_DX2, F_DY2, F_DAT, F_DBG, F_V = range(9)
DIR_COLS = (F_DX1, F_DY1, F_DX2, F_DY2)
DIST_COLS = (F_DAT, F_DBG)


@dataclass(frozen=True)
class FeatureVector:
    h: int
    t: int
    dx1: int
    dy1: int
    dx2: int
    dy2: int
    d_at: int
    d_bg: int
    v: int


def feature_matrix(
    world: CubeWorld,
    oracle: OracleTables,
    s_idx: np.ndarray,
    g_idx: np.ndarray,
) -> np.ndarray:
    """(P, 9) int16 feature rows for the given state/goal index vectors."""
    s_idx = np.asarray(s_idx, dtype=np.int64)
    g_idx = np.asarray(g_idx, dtype=np.int64)
    agent = world.agent_xy[s_idx].astype(np.int16)
    tgt_is_blue = (world.goal_target[g_idx] == 1)[:, None]
    target = np.where(tgt_is_blue, world.blue_xy[s_idx], world.red_xy[s_idx]).astype(np.int16)
    goal = world.goal_xy[g_idx].astype(np.int16)

    d1 = target - agent
    d2 = goal - target
    out = np.empty((s_idx.size, 9), dtype=np.int16)
    out[:, F_H] = world.gripper[s_idx]
    out[:, F_T] = world.goal_target[g_idx]
    out[:, F_DX1] = d1[:, 0]
    out[:, F_DY1] = d1[:, 1]
    out[:, F_DX2] = d2[:, 0]
    out[:, F_DY2] = d2[:, 1]
    out[:, F_DAT] = np.abs(d1).sum(axis=1)
    out[:, F_DBG] = np.abs(d2).sum(axis=1)
    out[:, F_V] = -oracle.dist[s_idx, g_idx]
    return out


def features(s: CubeState, g: Goal, world: CubeWorld, oracle: OracleTables) -> FeatureVector:
    """Scalar feature extraction for one (state, goal) pair."""
    si = world.state_index[s]
    gi = world.goal_index(g)
    if oracle.dist[si, gi] == UNREACHABLE:
        raise UnreachableError(f"no path for pair ({s}, {g})")
    row = feature_matrix(world, oracle, np.array([si]), np.array([gi]))[0]
    return FeatureVector(*(int(x) for x in row))


DIRECTIONAL_TRANSFORMS = (
    "raw",
    "sign",
    "abs",
    "clip_1",
    "clip_2",
    "clip_3",
    "parity",
    "sgn_bucket_2",
    "sgn_bucket_3",
)
DISTANCE_TRANSFORMS = ("raw", "bucket_2", "bucket_3", "bucket_4", "dist_parity")
VALUE_TRANSFORMS = ("value_raw", "value_bucket_3")


def apply_transform(kind: str, x):
    """Apply one named transform; works on scalars and integer arrays.

    raw            x
    sign           sgn(x)
    abs            |x|
    clip_k         max(-k, min(k, x))
    parity         |x| mod 2
    sgn_bucket_k   sgn(x) * min(|x|, k)
    bucket_k       min(x, k)                (distances)
    dist_parity    x mod 2                  (distances)
    value_raw      v
    value_bucket_3 min(-v, 4)               (cost buckets 0,1,2,3,>=4)
    """
    x = np.asarray(x)
    if kind == "raw":
        out = x
    elif kind == "sign":
        out = np.sign(x)
    elif kind == "abs":
        out = np.abs(x)
    elif kind.startswith("clip_"):
        k = int(kind.split("_")[1])
        out = np.clip(x, -k, k)
    elif kind == "parity":
        out = np.abs(x) % 2
    elif kind.startswith("sgn_bucket_"):
        k = int(kind.split("_")[2])
        out = np.sign(x) * np.minimum(np.abs(x), k)
    elif kind.startswith("bucket_"):
        k = int(kind.split("_")[1])
        out = np.minimum(x, k)
    elif kind == "dist_parity":
        out = x % 2
    elif kind == "value_raw":
        out = x
    elif kind == "value_bucket_3":
        out = np.minimum(-x, 4)
    else:
        raise ValueError(f"unknown transform {kind!r}")
    if out.ndim == 0:
        return int(out)
    return out.astype(np.int64)
