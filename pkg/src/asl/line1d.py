"""Integer-line thought experiment: value-preserving encodings can break control.

A walker on the integers moves by +-1 toward a goal; under the shortest-path
reward the optimal value is the closed form

    v*(s, g) = -(1 - gamma^|s-g|) / (1 - gamma).

Two encoders are compared:

    phi_sign(s, g) = s - g      signed offset; determines the optimal action
    phi_dist(s, g) = |s - g|    distance only; determines the value exactly

``phi_dist`` collides the goals ``s-1`` and ``s+1``, whose optimal actions
are opposite, so the mixed policy conditioned on it is a fair coin wherever
both candidate goals exist -- value sufficiency with broken control.

For exact enumeration the line is truncated to ``[-radius, radius]`` with
reflecting (clipped) moves; states, goals and rollout horizons stay inside
the window, which leaves optimal actions unchanged.  The information report
reuses the exact grouping machinery on the uniform law over ordered pairs
with ``s != g``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .info import InfoReport, PairLaw, combine_keys, report_from_encoding

__all__ = [
    "LineConfig",
    "LineOutcome",
    "build_line_law",
    "exact_success_by_distance",
    "line_info_report",
    "line_mixed_policy_eval",
    "phi_dist",
    "phi_sign",
    "v_star_line",
]

# action order on the line: index 0 -> step -1, index 1 -> step +1
LINE_ACTIONS = (-1, +1)


@dataclass(frozen=True)
class LineConfig:
    radius: int = 6
    gamma: float = 0.9
    horizon: int | None = None  # default: 2 * radius, enough for any pair
    n_rollouts_per_pair: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.radius < 1:
            raise ValueError("radius must be >= 1")
        if not (0.0 < self.gamma < 1.0):
            raise ValueError("gamma must lie in (0, 1)")
        if self.horizon is not None and self.horizon < self.radius:
            raise ValueError("horizon must be >= radius")

    @property
    def steps(self) -> int:
        return 2 * self.radius if self.horizon is None else self.horizon


def v_star_line(s: int, g: int, gamma: float) -> float:
    """Optimal discounted value on the line; 0 at the goal, -1 one step away."""
    d = abs(s - g)
    return -(1.0 - gamma**d) / (1.0 - gamma)


def phi_sign(s, g):
    return s - g


def phi_dist(s, g):
    return abs(s - g)


_PHIS = {"sign": phi_sign, "dist": phi_dist}


def _phi_fn(phi):
    return _PHIS[phi] if isinstance(phi, str) else phi


def _pairs(cfg: LineConfig):
    n = 2 * cfg.radius + 1
    s = np.repeat(np.arange(n), n) - cfg.radius
    g = np.tile(np.arange(n), n) - cfg.radius
    keep = s != g
    return s[keep], g[keep]


def build_line_law(cfg: LineConfig) -> PairLaw:
    """Uniform law over ordered (s, g), s != g, with the expert action law.

    The optimal action is deterministic (step toward the goal); the value
    label is -|s - g|, a strictly monotone relabeling of v* that induces
    identical level sets.
    """
    s, g = _pairs(cfg)
    toward = np.sign(g - s)
    adist = np.zeros((s.size, 2), dtype=np.float64)
    adist[:, 0] = toward < 0
    adist[:, 1] = toward > 0
    return PairLaw.build(s + cfg.radius, g + cfg.radius, -np.abs(s - g), adist)


def line_info_report(cfg: LineConfig, phi) -> InfoReport:
    law = build_line_law(cfg)
    s, g = _pairs(cfg)
    z = np.asarray(_phi_fn(phi)(s, g), dtype=np.int64)
    return report_from_encoding(law, [z])


@dataclass(frozen=True)
class LineMixedPolicy:
    """P(step = +1) per (state, encoding) key, uniform goal-marginalized."""

    keys: np.ndarray  # (R,) sorted packed (s, z)
    p_plus: np.ndarray  # (R,)
    s_lo: int
    z_lo: int
    z_span: int

    def step_up_prob(self, s: np.ndarray, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.int64)
        if np.any(z < self.z_lo) or np.any(z >= self.z_lo + self.z_span):
            raise RuntimeError("encoding value outside the mixed-policy support")
        keys = (np.asarray(s, dtype=np.int64) - self.s_lo) * self.z_span + (z - self.z_lo)
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, self.keys.size - 1)
        if not np.all(self.keys[pos] == keys):
            raise RuntimeError("state-encoding pair outside the mixed-policy support")
        return self.p_plus[pos]


def build_line_policy(cfg: LineConfig, phi) -> LineMixedPolicy:
    law = build_line_law(cfg)
    s, g = _pairs(cfg)
    z = np.asarray(_phi_fn(phi)(s, g), dtype=np.int64)
    z_lo = int(z.min())
    z_span = int(z.max()) - z_lo + 1
    keys = (s.astype(np.int64) + cfg.radius) * z_span + (z - z_lo)
    uk, inv = np.unique(keys, return_inverse=True)
    counts = np.bincount(inv, minlength=uk.size).astype(np.float64)
    plus_mass = np.bincount(inv, weights=law.adist[:, 1], minlength=uk.size)
    return LineMixedPolicy(
        keys=uk,
        p_plus=plus_mass / counts,
        s_lo=-cfg.radius,
        z_lo=z_lo,
        z_span=z_span,
    )


@dataclass(frozen=True)
class LineOutcome:
    """Success rates grouped by start distance |s0 - g|."""

    distances: np.ndarray  # (D,) sorted distance classes present
    success_rates: np.ndarray  # (D,)
    episodes: np.ndarray  # (D,) rollouts per class


def _pooled_by_distance(d0: np.ndarray, values: np.ndarray) -> LineOutcome:
    dists = np.unique(d0)
    rates = np.array([values[d0 == d].mean() for d in dists])
    counts = np.array([int((d0 == d).sum()) for d in dists])
    return LineOutcome(distances=dists, success_rates=rates, episodes=counts)


def line_mixed_policy_eval(cfg: LineConfig, phi) -> LineOutcome:
    """Seeded rollouts of the mixed policy, grouped by start distance.

    All ordered in-window pairs are evaluated (including s0 = g, the trivial
    distance-0 class) with ``n_rollouts_per_pair`` episodes each.
    """
    fn = _phi_fn(phi)
    N = cfg.radius
    n = 2 * N + 1
    s0 = np.repeat(np.arange(n), n) - N
    g0 = np.tile(np.arange(n), n) - N
    policy = build_line_policy(cfg, phi)

    R = cfg.n_rollouts_per_pair
    pair_id = np.repeat(np.arange(s0.size, dtype=np.int64), R)
    roll_id = np.tile(np.arange(R, dtype=np.int64), s0.size)
    cur = np.repeat(s0, R).astype(np.int64)
    goal = np.repeat(g0, R).astype(np.int64)

    done = cur == goal
    succeeded = done.copy()
    for t in range(cfg.steps):
        active = np.flatnonzero(~done)
        if active.size == 0:
            break
        z = np.asarray(fn(cur[active], goal[active]), dtype=np.int64)
        p_up = policy.step_up_prob(cur[active], z)
        u = rng.uniform_at(cfg.seed, pair_id[active], roll_id[active], t)
        move = np.where(u < p_up, 1, -1)
        cur[active] = np.clip(cur[active] + move, -N, N)
        hit_goal = cur[active] == goal[active]
        succeeded[active[hit_goal]] = True
        done[active[hit_goal]] = True

    d0 = np.abs(np.repeat(s0, R) - goal)
    return _pooled_by_distance(d0, succeeded.astype(np.float64))


def exact_success_by_distance(cfg: LineConfig, phi) -> LineOutcome:
    """Exact hit probabilities by dynamic programming over the policy chain.

    Independent oracle for the Monte-Carlo evaluator: for every goal,
    propagate the start-state-indexed distribution of the policy-induced
    chain with the goal absorbing, then pool by start distance.
    """
    fn = _phi_fn(phi)
    N = cfg.radius
    n = 2 * N + 1
    policy = build_line_policy(cfg, phi)
    states = np.arange(n) - N

    d0_list: list[int] = []
    p_list: list[float] = []
    for g in states:
        s_arr = states[states != g]
        z = np.asarray(fn(s_arr, g), dtype=np.int64)
        up = np.zeros(n)
        up[s_arr + N] = policy.step_up_prob(s_arr, z)
        live = np.eye(n)  # row: start position, col: current position
        absorbed = live[:, g + N].copy()
        live[:, g + N] = 0.0
        for _ in range(cfg.steps):
            nxt = np.zeros_like(live)
            for si in range(n):
                col = live[:, si]
                if not col.any():
                    continue
                nxt[:, min(si + 1, n - 1)] += col * up[si]
                nxt[:, max(si - 1, 0)] += col * (1.0 - up[si])
            absorbed += nxt[:, g + N]
            nxt[:, g + N] = 0.0
            live = nxt
        for s in states:
            d0_list.append(abs(int(s) - int(g)))
            p_list.append(float(absorbed[s + N]))
    return _pooled_by_distance(np.array(d0_list), np.array(p_list))
