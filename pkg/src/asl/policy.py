"""Representation-conditioned mixed policies and Monte-Carlo control evaluation.

The mixed policy for an encoding z = phi(s, g) is the posterior mixture of the
optimal action law under the uniform pair distribution:

    pi_phi(a | s, z) = mean of P*(a | s, g') over valid goals g' with
                       phi(s, g') = z and D*(s, g') > 0.

Control success is measured by seeded rollouts: sample start tasks (s0, g)
with an empty gripper and the target cube away from the goal, give each a
step budget min(D*(s0, g) + margin, cap), and at every step sample an action
from pi_phi(. | s_t, phi(s_t, g)).

Rollouts leave the filtered-pair support routinely -- every carry ends with
the agent standing on the goal cell, a configuration the pair filter
excludes -- so the table is extended beyond the law's support: a key
(s, z) with no valid-pair entry gets the mean of P*(.|s, g') over the
*unfiltered* non-success pairs that produce it.  On-support rows are exactly
the law's conditional (the spec of the mixture), extension rows are its
natural completion, and every step served by an extension row is tallied in
``off_support_steps``.  A key with no producing pair at all (cannot occur
when every pair is success-reachable) falls back to the uniform
distribution and is counted as well.

All randomness is positional -- uniforms are hashed from
(seed, task, rollout, step) -- so outcomes are bit-identical under any
parallel or chunked execution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .info import combine_keys
from .lab import CubeLab
from .reps import RepresentationSpec

__all__ = [
    "MixedPolicy",
    "RolloutConfig",
    "RolloutOutcome",
    "build_mixed_policy",
    "evaluate",
    "sample_tasks",
]


@dataclass(frozen=True)
class MixedPolicy:
    """Action distributions per (state, encoding) plus a full lookup table."""

    spec_id: str
    rows: np.ndarray  # (R, 6) float64, each row sums to 1
    rows_cdf: np.ndarray  # (R, 6) cumulative, last column forced to 1
    keys: np.ndarray  # (R,) sorted packed (s, z) keys
    extension: np.ndarray  # (R,) bool, True for off-support completion rows
    row_of_flat: np.ndarray  # (S*G,) int32, -1 where no key exists at all
    pair_rows: np.ndarray  # (P,) int32 row of each valid pair

    def distribution(self, s_idx: int, g_idx: int, n_goals: int) -> np.ndarray:
        """pi_phi(. | s, phi(s, g)); uniform if no producing pair exists."""
        r = int(self.row_of_flat[s_idx * n_goals + g_idx])
        if r < 0:
            return np.full(6, 1.0 / 6.0)
        return self.rows[r]


def _mean_action_rows(adist: np.ndarray, inv: np.ndarray, n_rows: int) -> np.ndarray:
    counts = np.bincount(inv, minlength=n_rows).astype(np.float64)
    rows = np.empty((n_rows, 6), dtype=np.float64)
    for a in range(6):
        rows[:, a] = np.bincount(inv, weights=adist[:, a], minlength=n_rows)
    return rows / counts[:, None]


def _action_dist_rows(oracle, flat: np.ndarray) -> np.ndarray:
    mask = oracle.opt_mask.reshape(-1)[flat]
    bits = ((mask[:, None] >> np.arange(6, dtype=np.uint8)) & 1).astype(np.float64)
    return bits / bits.sum(axis=1, keepdims=True)


def build_mixed_policy(lab: CubeLab, spec: RepresentationSpec) -> MixedPolicy:
    world = lab.world
    mat_all = lab.encode_all(spec)
    z_all = combine_keys([mat_all[:, k] for k in range(mat_all.shape[1])])
    s_all = np.repeat(np.arange(world.n_states, dtype=np.int64), world.n_goals)
    keys_all = combine_keys([s_all, z_all])

    # on-support rows: the law's conditional E[P*(.|s,G) | s, z]
    keys_valid = keys_all[lab.flat_valid]
    uk, inv = np.unique(keys_valid, return_inverse=True)
    rows_valid = _mean_action_rows(lab.law.adist, inv, uk.size)

    # completion rows for keys produced only by filtered-out pairs
    dist_flat = lab.oracle.dist.reshape(-1)
    candidates = np.flatnonzero(dist_flat > 0)
    pos = np.searchsorted(uk, keys_all[candidates])
    seen = (uk[np.minimum(pos, uk.size - 1)] == keys_all[candidates]) & (pos < uk.size)
    extra = candidates[~seen]
    if extra.size:
        uk_ext, inv_ext = np.unique(keys_all[extra], return_inverse=True)
        rows_ext = _mean_action_rows(_action_dist_rows(lab.oracle, extra), inv_ext, uk_ext.size)
    else:
        uk_ext = np.zeros(0, dtype=np.int64)
        rows_ext = np.zeros((0, 6), dtype=np.float64)

    keys = np.concatenate([uk, uk_ext])
    rows = np.vstack([rows_valid, rows_ext])
    ext_flag = np.r_[np.zeros(uk.size, dtype=bool), np.ones(uk_ext.size, dtype=bool)]
    order = np.argsort(keys, kind="stable")
    keys, rows, ext_flag = keys[order], rows[order], ext_flag[order]

    pos = np.searchsorted(keys, keys_all)
    pos_c = np.minimum(pos, keys.size - 1)
    hit = keys[pos_c] == keys_all
    row_of_flat = np.where(hit, pos_c, -1).astype(np.int32)

    cdf = np.cumsum(rows, axis=1)
    cdf[:, -1] = 1.0
    return MixedPolicy(
        spec_id=spec.id,
        rows=rows,
        rows_cdf=cdf,
        keys=keys,
        extension=ext_flag,
        row_of_flat=row_of_flat,
        pair_rows=row_of_flat[lab.flat_valid].copy(),
    )


@dataclass(frozen=True)
class RolloutConfig:
    n_tasks: int = 600
    n_rollouts_per_task: int = 50
    margin: int = 6
    horizon_cap: int = 30
    seed: int = 0

    def __post_init__(self):
        if self.n_tasks < 1 or self.n_rollouts_per_task < 1:
            raise ValueError("task and rollout counts must be >= 1")
        if self.margin < 0 or self.horizon_cap < 1:
            raise ValueError("margin must be >= 0 and horizon cap >= 1")


def horizon_for(dist: np.ndarray, margin: int, cap: int) -> np.ndarray:
    return np.minimum(np.asarray(dist, dtype=np.int64) + margin, cap)


def sample_tasks(
    cfg: RolloutConfig, lab: CubeLab
) -> tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
    """Start states, goals and step budgets; uniform over eligible pairs.

    Eligible: filtered pairs whose state has an empty gripper (these already
    have the target cube away from the goal).  Sampling is without
    replacement whenever enough pairs exist; the flag reports otherwise.
    """
    law = lab.law
    eligible = np.flatnonzero(lab.world.gripper[law.s_ids] == 0)
    if eligible.size == 0:
        raise ValueError("no eligible start pairs")
    gen = rng.substream(cfg.seed, rng.STREAM_TASKS)
    replace = eligible.size < cfg.n_tasks
    if replace:
        pick = gen.integers(0, eligible.size, size=cfg.n_tasks)
    else:
        pick = gen.choice(eligible.size, size=cfg.n_tasks, replace=False)
    chosen = eligible[pick]
    s0 = law.s_ids[chosen]
    g = law.g_ids[chosen]
    d0 = lab.oracle.dist[s0, g].astype(np.int64)
    return s0, g, horizon_for(d0, cfg.margin, cfg.horizon_cap), replace


@dataclass(frozen=True)
class RolloutOutcome:
    success_rate: float
    per_task_successes: np.ndarray  # (n_tasks,)
    total_rollouts: int
    off_support_steps: int
    tasks_with_replacement: bool

    def __post_init__(self):
        expect = self.per_task_successes.sum() / self.total_rollouts
        if abs(self.success_rate - expect) > 1e-12:
            raise ValueError("success_rate inconsistent with per-task counts")


def evaluate(
    lab: CubeLab,
    spec: RepresentationSpec,
    cfg: RolloutConfig,
    policy: MixedPolicy | None = None,
) -> RolloutOutcome:
    """Pooled success rate of the mixed policy over seeded rollouts."""
    if policy is None:
        policy = build_mixed_policy(lab, spec)
    task_s, task_g, task_h, replaced = sample_tasks(cfg, lab)
    T, R = cfg.n_tasks, cfg.n_rollouts_per_task
    E = T * R

    trans = lab.world.transitions
    G = lab.world.n_goals
    success_flat = lab.world.success.reshape(-1)

    task_id = np.repeat(np.arange(T, dtype=np.int64), R)
    roll_id = np.tile(np.arange(R, dtype=np.int64), T)
    cur = np.repeat(task_s, R).astype(np.int64)
    goal = np.repeat(task_g, R).astype(np.int64)
    budget = np.repeat(task_h, R)

    done = success_flat[cur * G + goal].copy()  # success at t=0 (none by construction)
    succeeded = done.copy()
    off_support = 0
    uniform_cdf = np.arange(1, 7, dtype=np.float64) / 6.0

    for t in range(int(budget.max())):
        active = np.flatnonzero(~done & (t < budget))
        if active.size == 0:
            break
        u = rng.uniform_at(cfg.seed, task_id[active], roll_id[active], t)
        row = policy.row_of_flat[cur[active] * G + goal[active]]
        missing = row < 0
        off_support += int(missing.sum()) + int(policy.extension[row[~missing]].sum())
        cdf = policy.rows_cdf[np.maximum(row, 0)]
        if missing.any():
            cdf = np.where(missing[:, None], uniform_cdf[None, :], cdf)
        act = np.minimum((cdf < u[:, None]).sum(axis=1), 5)
        nxt = trans[cur[active], act]
        cur[active] = nxt
        hit = success_flat[nxt * G + goal[active]]
        succeeded[active[hit]] = True
        done[active[hit]] = True

    per_task = succeeded.reshape(T, R).sum(axis=1)
    return RolloutOutcome(
        success_rate=float(succeeded.sum() / E),
        per_task_successes=per_task,
        total_rollouts=E,
        off_support_steps=off_support,
        tasks_with_replacement=replaced,
    )
