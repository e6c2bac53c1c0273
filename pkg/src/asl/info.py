"""Exact information quantities over the uniform law on filtered pairs.

Everything here is closed-form accounting over a finite table: the uniform
distribution on valid (state, goal) pairs, the optimal-action distribution
``P*(a|s,g)`` on each pair, the optimal value ``V*`` and an encoding
``Z = phi(S, G)``.  Conditional entropies are computed by exact grouping:

    H(A|S,G)    per-pair entropy of P*
    H(A|S,Z)    entropy of the group-mean action distribution per (s, z)
    H(V|S,Z)    entropy of the value histogram per (s, z)
    H(A|S,V)    grouping by (s, V*)
    H(A|S,V,Z)  grouping by (s, V*, z)

from which the report derives (all in nats)

    delta_a  = I(A;G|S,Z) = H(A|S,Z) - H(A|S,G)
    delta_v  = I(V;G|S,Z) = H(V|S,Z)            (H(V|S,G) = 0)
    i_az_sv  = H(A|S,V) - H(A|S,V,Z)
    i_ag_sv  = H(A|S,V) - H(A|S,G)
    i_av_sz  = H(A|S,Z) - H(A|S,V,Z)

By the chain rule these satisfy
``delta_a = i_ag_sv - i_az_sv + i_av_sz`` exactly; `chain_rule_residual`
re-evaluates that identity numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .cube import CubeWorld, Goal
from .oracle import OracleTables

__all__ = [
    "InfoReport",
    "PairLaw",
    "StrictnessWitness",
    "VerificationError",
    "chain_rule_residual",
    "check_goal_only_strictness",
    "nats_to_bits",
    "order_consistency_ratio",
    "pinsker_lower_bound",
    "report_from_encoding",
    "value_constant_on_groups",
]

LOG_BASE = "nats"


class VerificationError(RuntimeError):
    """A paper identity or bound failed numerically."""


def nats_to_bits(x: float) -> float:
    return x / math.log(2.0)


@dataclass(frozen=True)
class InfoReport:
    """All quantities in nats; see the module docstring for definitions."""

    delta_a: float
    delta_v: float
    i_az_sv: float
    i_ag_sv: float
    i_av_sz: float
    h_a_sg: float
    h_a_sz: float
    h_v_sz: float

    def __post_init__(self):
        for name in self.__dataclass_fields__:
            if getattr(self, name) < -1e-9:
                raise VerificationError(f"{name} negative beyond tolerance: {getattr(self, name)}")
        if abs(self.delta_a - (self.h_a_sz - self.h_a_sg)) > 1e-9:
            raise VerificationError("delta_a inconsistent with entropies")
        if abs(self.delta_v - self.h_v_sz) > 1e-9:
            raise VerificationError("delta_v inconsistent with H(V|S,Z)")


def chain_rule_residual(r: InfoReport) -> float:
    """|delta_a - (I(A;G|S,V) - I(A;Z|S,V) + I(A;V|S,Z))|; < 1e-9 always."""
    return abs(r.delta_a - (r.i_ag_sv - r.i_az_sv + r.i_av_sz))


# --- grouping machinery -------------------------------------------------------


def combine_keys(cols: Sequence[np.ndarray]) -> np.ndarray:
    """Pack integer columns into one int64 key (lexicographic, overflow-checked)."""
    key = np.zeros(len(cols[0]), dtype=np.int64)
    span = 1
    for c in cols:
        c = np.asarray(c, dtype=np.int64)
        lo = int(c.min())
        r = int(c.max()) - lo + 1
        span *= r
        if span > 1 << 62:
            raise OverflowError("key space too large for int64 packing")
        key = key * r + (c - lo)
    return key


def _entropy_rows(p: np.ndarray) -> np.ndarray:
    plogp = np.zeros_like(p)
    mask = p > 0
    plogp[mask] = p[mask] * np.log(p[mask])
    return -plogp.sum(axis=1)


def _groups(keys: np.ndarray):
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    starts = np.flatnonzero(np.r_[True, sk[1:] != sk[:-1]])
    counts = np.diff(np.r_[starts, sk.size])
    return order, starts, counts


def grouped_action_entropy(adist: np.ndarray, keys: np.ndarray) -> float:
    """H(A | grouping) for the group-mean action distributions."""
    order, starts, counts = _groups(keys)
    sums = np.add.reduceat(adist[order], starts, axis=0)
    means = sums / counts[:, None]
    ents = _entropy_rows(means)
    return float((ents * counts).sum() / keys.size)


def grouped_level_entropy(keys: np.ndarray, levels: np.ndarray) -> float:
    """H(level | grouping) from exact subgroup counts.

    Evaluated as -sum over subgroups of (c/P) log(c/C); a subgroup equal to
    its group contributes log(1.0) = 0 exactly, so deterministic levels give
    an exact zero.
    """
    levels = np.asarray(levels, dtype=np.int64)
    sub = combine_keys([keys, levels])  # nests inside the key grouping
    order = np.argsort(sub, kind="stable")
    ss = sub[order]
    ks = keys[order]
    sub_starts = np.flatnonzero(np.r_[True, ss[1:] != ss[:-1]])
    sub_counts = np.diff(np.r_[sub_starts, ss.size])
    head = ks[sub_starts]  # group key per subgroup, grouped contiguously
    grp_starts = np.flatnonzero(np.r_[True, head[1:] != head[:-1]])
    grp_totals = np.add.reduceat(sub_counts, grp_starts)
    totals_per_sub = np.repeat(grp_totals, np.diff(np.r_[grp_starts, head.size]))
    terms = (sub_counts / keys.size) * np.log(sub_counts / totals_per_sub)
    return float(-terms.sum())


# --- the pair law --------------------------------------------------------------


@dataclass(frozen=True)
class PairLaw:
    """Uniform distribution over filtered pairs plus the expert action law.

    ``v`` holds integer value labels (any strictly monotone relabeling of V*
    induces the same partitions, hence the same quantities).  The
    spec-independent entropies are cached at construction.
    """

    s_ids: np.ndarray  # (P,) int64
    g_ids: np.ndarray  # (P,) int64
    v: np.ndarray  # (P,) int64
    adist: np.ndarray  # (P, A) float64
    h_a_sg: float
    h_a_sv: float
    i_ag_sv: float

    @property
    def n_pairs(self) -> int:
        return int(self.s_ids.size)

    @classmethod
    def build(cls, s_ids, g_ids, v, adist) -> "PairLaw":
        s_ids = np.asarray(s_ids, dtype=np.int64)
        if s_ids.size == 0:
            raise ValueError("empty pair set")
        g_ids = np.asarray(g_ids, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        adist = np.asarray(adist, dtype=np.float64)
        h_a_sg = float(_entropy_rows(adist).sum() / s_ids.size)
        h_a_sv = grouped_action_entropy(adist, combine_keys([s_ids, v]))
        return cls(s_ids, g_ids, v, adist, h_a_sg, h_a_sv, h_a_sv - h_a_sg)

    @classmethod
    def from_cube(cls, world: CubeWorld, oracle: OracleTables) -> "PairLaw":
        flat = world.pair_flat(world.pair_state, world.pair_goal)
        d = oracle.dist.reshape(-1)[flat].astype(np.int64)
        if np.any(d < 1):
            # the pair filter must already exclude success and unreachable states
            raise VerificationError("filtered pair set contains dist <= 0 entries")
        mask = oracle.opt_mask.reshape(-1)[flat]
        bits = ((mask[:, None] >> np.arange(6, dtype=np.uint8)) & 1).astype(np.float64)
        adist = bits / bits.sum(axis=1, keepdims=True)
        return cls.build(world.pair_state, world.pair_goal, -d, adist)


def report_from_encoding(law: PairLaw, z_cols: Sequence[np.ndarray]) -> InfoReport:
    """InfoReport for the encoding given as integer columns over the pairs."""
    key_sz = combine_keys([law.s_ids, *z_cols])
    key_svz = combine_keys([law.s_ids, law.v, *z_cols])
    h_a_sz = grouped_action_entropy(law.adist, key_sz)
    h_v_sz = grouped_level_entropy(key_sz, law.v)
    h_a_svz = grouped_action_entropy(law.adist, key_svz)
    return InfoReport(
        delta_a=h_a_sz - law.h_a_sg,
        delta_v=h_v_sz,
        i_az_sv=law.h_a_sv - h_a_svz,
        i_ag_sv=law.i_ag_sv,
        i_av_sz=h_a_sz - h_a_svz,
        h_a_sg=law.h_a_sg,
        h_a_sz=h_a_sz,
        h_v_sz=h_v_sz,
    )


def value_constant_on_groups(law: PairLaw, z_cols: Sequence[np.ndarray]) -> bool:
    """Whether V* is a function of (S, Z): constant within every (s, z) group."""
    key_sz = combine_keys([law.s_ids, *z_cols])
    order, starts, _ = _groups(key_sz)
    v = law.v[order]
    vmax = np.maximum.reduceat(v, starts)
    vmin = np.minimum.reduceat(v, starts)
    return bool(np.all(vmax == vmin))


def verify_value_functional_dependence(
    law: PairLaw, z_cols: Sequence[np.ndarray], report: InfoReport
) -> bool:
    """Value-sufficient encodings must determine V*; vacuously true otherwise."""
    if report.delta_v >= 1e-9:
        return True
    return value_constant_on_groups(law, z_cols)


# --- bounds and auxiliary metrics ----------------------------------------------


def pinsker_lower_bound(law: PairLaw) -> tuple[float, float]:
    """Max over singleton action events of 2 E[Var(P(A=a|S,V,G)|S,V)], and the CMI.

    Verifies the variance lower bound ``2 E[Var] <= I(A;G|S,V)`` for every
    action before returning.
    """
    keys = combine_keys([law.s_ids, law.v])
    order, starts, counts = _groups(keys)
    po = law.adist[order]
    sums = np.add.reduceat(po, starts, axis=0)
    sums2 = np.add.reduceat(po * po, starts, axis=0)
    # per-group Var = E[p^2] - E[p]^2, then expectation with weight C/P
    evar = (sums2 - sums * sums / counts[:, None]).sum(axis=0) / law.n_pairs
    bounds = 2.0 * evar
    cmi = law.i_ag_sv
    if np.any(bounds > cmi + 1e-9):
        worst = int(np.argmax(bounds))
        raise VerificationError(
            f"variance bound {bounds[worst]:.3e} exceeds I(A;G|S,V)={cmi:.3e} for action {worst}"
        )
    return float(bounds.max()), cmi


@dataclass(frozen=True)
class StrictnessWitness:
    """Two colliding goals and a state whose optimal values tell them apart."""

    goal_a: Goal
    goal_b: Goal
    state_index: int
    value_a: int
    value_b: int


def check_goal_only_strictness(
    psi: Callable[[Goal], object], world: CubeWorld, oracle: OracleTables
) -> StrictnessWitness | None:
    """For a goal-only encoder, exhibit a strict-value-sufficiency violation.

    If ``psi`` collides two goals, some state separates their value columns
    (e.g. a success state of one), so no function of (s, psi(g)) can equal
    V*.  Returns the first witness in canonical order; None when ``psi`` is
    injective (strictness can hold).
    """
    by_value: dict[object, int] = {}
    for gi, g in enumerate(world.goals):
        z = psi(g)
        if z in by_value:
            ga = by_value[z]
            da = oracle.dist[:, ga].astype(np.int64)
            db = oracle.dist[:, gi].astype(np.int64)
            differ = np.flatnonzero((da >= 0) & (db >= 0) & (da != db))
            if differ.size:
                s = int(differ[0])
                return StrictnessWitness(
                    goal_a=world.goals[ga],
                    goal_b=g,
                    state_index=s,
                    value_a=-int(da[s]),
                    value_b=-int(db[s]),
                )
        else:
            by_value[z] = gi
    return None


def order_consistency_ratio(values: Sequence[float], k: int) -> float:
    """Fraction of k-step-apart positions whose later value is strictly larger.

    ``values`` are V(s_t, g) along one trajectory, t = 0..T; requires T >= k.
    """
    v = np.asarray(values, dtype=np.float64)
    t_last = v.size - 1
    if k < 1 or t_last < k:
        raise ValueError(f"trajectory too short for gap {k}: T={t_last}")
    wins = v[k:] > v[:-k]
    return float(wins.sum() / (t_last - k + 1))
