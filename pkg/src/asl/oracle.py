"""Exact shortest-path oracle for the Discrete Cube.

For every goal, a backward breadth-first search from the goal's success states
labels each state with the optimal distance-to-success ``D*(s, g)``; the
optimal value is ``V*(s, g) = -D*(s, g)`` and an action is optimal iff it
moves one step down the distance field.  Ties broken uniformly.

The search runs level-synchronously over all goals at once: at wave ``d`` a
state joins if any action leads into the wave-``(d-1)`` set.  This touches
each (state, action, goal) triple once per wave and is bit-reproducible.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cube import CubeWorld

__all__ = [
    "OracleTables",
    "UNREACHABLE",
    "UnreachableError",
    "compute_oracle",
    "load_oracle",
    "load_or_compute",
    "optimal_policy",
    "save_oracle",
    "value",
]

UNREACHABLE = -1
_MAGIC = b"ASLORCL\x00"
_FORMAT_VERSION = 1


class UnreachableError(ValueError):
    """Queried a (state, goal) pair with no path to success."""


@dataclass(frozen=True)
class OracleTables:
    """Distance and optimal-action tables, (S, G), immutable after build.

    ``dist`` holds D*(s, g) as int16 with -1 marking unreachable pairs;
    ``opt_mask`` is a 6-bit action-set mask, nonzero exactly where
    ``dist > 0``.
    """

    n: int
    dist: np.ndarray  # (S, G) int16
    opt_mask: np.ndarray  # (S, G) uint8
    n_unreachable: int

    @property
    def values(self) -> np.ndarray:
        """V* = -D* with unreachable left at +1 sentinel (callers must mask)."""
        return -self.dist


def compute_oracle(world: CubeWorld) -> OracleTables:
    S, G = world.n_states, world.n_goals
    dist = np.full((S, G), UNREACHABLE, dtype=np.int16)
    dist[world.success] = 0

    frontier = world.success.copy()  # states at the current wave, per goal
    d = 0
    while frontier.any():
        d += 1
        # s joins wave d if some action reaches wave d-1 and s is unlabeled
        into_prev = frontier[world.transitions].any(axis=1)
        newly = into_prev & (dist == UNREACHABLE)
        dist[newly] = d
        frontier = newly

    dnext = dist[world.transitions]  # (S, 6, G)
    reach = dnext >= 0
    optimal = reach & (dnext == (dist[:, None, :] - 1))
    bits = np.uint8(1) << np.arange(6, dtype=np.uint8)
    opt_mask = (optimal.astype(np.uint8) * bits[None, :, None]).sum(axis=1, dtype=np.uint8)

    flat = world.pair_flat(world.pair_state, world.pair_goal)
    n_unreachable = int((dist.reshape(-1)[flat] == UNREACHABLE).sum())
    return OracleTables(n=world.n, dist=dist, opt_mask=opt_mask, n_unreachable=n_unreachable)


def value(t: OracleTables, s: int, g: int) -> int:
    d = int(t.dist[s, g])
    if d == UNREACHABLE:
        raise UnreachableError(f"goal {g} unreachable from state {s}")
    return -d


def optimal_policy(t: OracleTables, s: int, g: int) -> np.ndarray:
    """Uniform distribution over the optimal actions at (s, g)."""
    d = int(t.dist[s, g])
    if d == UNREACHABLE:
        raise UnreachableError(f"goal {g} unreachable from state {s}")
    if d == 0:
        raise ValueError(f"state {s} already satisfies goal {g}; no action defined")
    mask = int(t.opt_mask[s, g])
    acts = np.array([(mask >> a) & 1 for a in range(6)], dtype=np.float64)
    return acts / acts.sum()


def save_oracle(t: OracleTables, path: str | Path) -> None:
    """Binary cache: magic, version, n, state/goal counts, dist rows, masks."""
    S, G = t.dist.shape
    header = _MAGIC + struct.pack("<IIII", _FORMAT_VERSION, t.n, S, G)
    payload = t.dist.astype("<i2").tobytes() + t.opt_mask.tobytes()
    Path(path).write_bytes(header + payload)


def load_oracle(path: str | Path, n: int) -> OracleTables | None:
    """Read a cache written by `save_oracle`; None on any header mismatch."""
    p = Path(path)
    if not p.is_file():
        return None
    raw = p.read_bytes()
    if len(raw) < len(_MAGIC) + 16 or raw[: len(_MAGIC)] != _MAGIC:
        return None
    version, fn, S, G = struct.unpack_from("<IIII", raw, len(_MAGIC))
    if version != _FORMAT_VERSION or fn != n:
        return None
    off = len(_MAGIC) + 16
    need = off + S * G * 2 + S * G
    if len(raw) != need:
        return None
    dist = np.frombuffer(raw, dtype="<i2", count=S * G, offset=off).reshape(S, G).astype(np.int16)
    opt_mask = np.frombuffer(raw, dtype=np.uint8, count=S * G, offset=off + S * G * 2)
    opt_mask = opt_mask.reshape(S, G).copy()
    flat_unreach = int((dist == UNREACHABLE).sum())
    return OracleTables(n=fn, dist=dist, opt_mask=opt_mask, n_unreachable=flat_unreach)


def load_or_compute(world: CubeWorld, cache: str | Path | None = None) -> OracleTables:
    """Use a cache file when its header matches (n, version); else rebuild it."""
    if cache is not None:
        cached = load_oracle(cache, world.n)
        if cached is not None and cached.dist.shape == (world.n_states, world.n_goals):
            flat = world.pair_flat(world.pair_state, world.pair_goal)
            n_unreach = int((cached.dist.reshape(-1)[flat] == UNREACHABLE).sum())
            return OracleTables(cached.n, cached.dist, cached.opt_mask, n_unreach)
    tables = compute_oracle(world)
    if cache is not None:
        save_oracle(tables, cache)
    return tables
