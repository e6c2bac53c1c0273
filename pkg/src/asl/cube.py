"""Discrete Cube: a deterministic pick-and-place gridworld.

An ``n x n`` grid (default 4) holds an agent and two cubes, Red and Blue.
A state is ``(agent, red, blue, gripper)`` where a cube is either at a floor
cell or held by the agent (then it moves with the agent).  Six actions:
four unit moves clipped at the borders, ``PICK`` and ``PLACE``.

* ``PICK`` succeeds iff the gripper is empty and the agent stands on a cube.
* ``PLACE`` succeeds iff a cube is held and the agent's cell is not occupied
  by the other cube.
* Failed manipulations are no-ops; dynamics are fully deterministic.

A goal names a target cube and a cell; a state is successful for the goal iff
the target cube sits at that cell and is not currently held.

Coordinate convention: positions are ``(x, y)`` with ``0 <= x, y < n``;
``UP``/``DOWN`` move ``y`` by +1/-1, ``LEFT``/``RIGHT`` move ``x`` by -1/+1.

States are enumerated constructively: every tuple satisfying the state
invariants is a state (floor cubes never co-located; held cube <=> gripper).
For ``n = 4`` this yields 4,352 states, and the filtered state-goal pair set
(see `valid_pair_mask`) has 120,960 entries.  Enumeration order is
lexicographic on ``(gripper, agent, red, blue)`` with the held marker sorting
before any coordinate, so indices are stable across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

__all__ = [
    "Action",
    "ConfigError",
    "CubeId",
    "CubeState",
    "CubeWorld",
    "Goal",
    "HELD",
    "build_world",
    "enumerate_states",
    "is_success",
    "step",
    "valid_pairs",
]


class ConfigError(ValueError):
    """Invalid environment configuration (e.g. grid too small)."""


class CubeId(IntEnum):
    RED = 0
    BLUE = 1


class Action(IntEnum):
    UP = 0
    DOWN = 1
    LEFT = 2
    RIGHT = 3
    PICK = 4
    PLACE = 5


class _Held:
    """Marker for a cube currently in the gripper (distinct from any cell)."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover - repr only
        return "HELD"


HELD = _Held()

GridPos = tuple[int, int]


@dataclass(frozen=True)
class CubeState:
    agent: GridPos
    red: GridPos | _Held
    blue: GridPos | _Held
    gripper: CubeId | None

    def validate(self, n: int) -> None:
        """Raise ValueError unless all state invariants hold for grid size n."""
        _check_pos(self.agent, n)
        if (self.red is HELD) != (self.gripper == CubeId.RED):
            raise ValueError(f"red/gripper mismatch in {self}")
        if (self.blue is HELD) != (self.gripper == CubeId.BLUE):
            raise ValueError(f"blue/gripper mismatch in {self}")
        if self.red is not HELD:
            _check_pos(self.red, n)
        if self.blue is not HELD:
            _check_pos(self.blue, n)
        if self.gripper is None and self.red == self.blue:
            raise ValueError(f"floor cubes co-located in {self}")

    def cube_pos(self, cube: CubeId) -> GridPos:
        """Position of a cube; a held cube is at the agent's cell."""
        raw = self.red if cube == CubeId.RED else self.blue
        return self.agent if raw is HELD else raw  # type: ignore[return-value]


@dataclass(frozen=True)
class Goal:
    target: CubeId
    pos: GridPos


def _check_pos(pos, n: int) -> None:
    x, y = pos
    if not (0 <= x < n and 0 <= y < n):
        raise ValueError(f"position {pos} outside {n}x{n} grid")


_MOVES = {
    Action.UP: (0, 1),
    Action.DOWN: (0, -1),
    Action.LEFT: (-1, 0),
    Action.RIGHT: (1, 0),
}


def step(s: CubeState, a: Action, n: int) -> CubeState:
    """Deterministic transition; failed PICK/PLACE return ``s`` unchanged."""
    a = Action(a)
    if a in _MOVES:
        dx, dy = _MOVES[a]
        x = min(max(s.agent[0] + dx, 0), n - 1)
        y = min(max(s.agent[1] + dy, 0), n - 1)
        return CubeState((x, y), s.red, s.blue, s.gripper)
    if a == Action.PICK:
        if s.gripper is not None:
            return s
        if s.red == s.agent:
            return CubeState(s.agent, HELD, s.blue, CubeId.RED)
        if s.blue == s.agent:
            return CubeState(s.agent, s.red, HELD, CubeId.BLUE)
        return s
    # PLACE
    if s.gripper is None:
        return s
    other = s.blue if s.gripper == CubeId.RED else s.red
    if other == s.agent:
        return s
    if s.gripper == CubeId.RED:
        return CubeState(s.agent, s.agent, s.blue, None)
    return CubeState(s.agent, s.red, s.agent, None)


def is_success(s: CubeState, g: Goal) -> bool:
    """Target cube at the goal cell and not held."""
    if s.gripper == g.target:
        return False
    return s.cube_pos(g.target) == g.pos


def _cells(n: int) -> list[GridPos]:
    return [(x, y) for x in range(n) for y in range(n)]


def enumerate_states(n: int) -> tuple[list[CubeState], dict[CubeState, int]]:
    """All invariant-satisfying states in canonical order, plus the index map.

    Order: gripper (none < red < blue), then agent, red, blue lexicographic
    with HELD before any coordinate.
    """
    if n < 2:
        raise ConfigError(f"grid size must be >= 2, got {n}")
    cells = _cells(n)
    states: list[CubeState] = []
    for gripper in (None, CubeId.RED, CubeId.BLUE):
        for agent in cells:
            red_opts = [HELD] if gripper == CubeId.RED else cells
            for red in red_opts:
                blue_opts = [HELD] if gripper == CubeId.BLUE else cells
                for blue in blue_opts:
                    if gripper is None and red == blue:
                        continue
                    states.append(CubeState(agent, red, blue, gripper))
    index = {s: i for i, s in enumerate(states)}
    return states, index


def enumerate_goals(n: int) -> list[Goal]:
    """All goals in canonical order: target (red < blue), then cell (x, y)."""
    return [Goal(t, pos) for t in (CubeId.RED, CubeId.BLUE) for pos in _cells(n)]


@dataclass(frozen=True)
class CubeWorld:
    """Array-backed tables for one grid size; shared, read-only after build.

    All per-state arrays follow the canonical enumeration order.  ``red_xy``
    and ``blue_xy`` store the *effective* cube position (agent cell while
    held); ``gripper`` disambiguates 0=none, 1=red, 2=blue.
    """

    n: int
    states: tuple[CubeState, ...]
    state_index: dict[CubeState, int]
    goals: tuple[Goal, ...]
    agent_xy: np.ndarray  # (S, 2) int16
    red_xy: np.ndarray  # (S, 2) int16, effective position
    blue_xy: np.ndarray  # (S, 2) int16, effective position
    gripper: np.ndarray  # (S,) int8
    transitions: np.ndarray  # (S, 6) int32
    goal_target: np.ndarray  # (G,) int8
    goal_xy: np.ndarray  # (G, 2) int16
    success: np.ndarray  # (S, G) bool
    valid: np.ndarray  # (S, G) bool
    pair_state: np.ndarray  # (P,) int32, row-major over (s, g)
    pair_goal: np.ndarray  # (P,) int32

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_goals(self) -> int:
        return len(self.goals)

    @property
    def n_pairs(self) -> int:
        return int(self.pair_state.size)

    def goal_index(self, g: Goal) -> int:
        return int(g.target) * self.n * self.n + g.pos[0] * self.n + g.pos[1]

    def pair_flat(self, s_idx: np.ndarray, g_idx: np.ndarray) -> np.ndarray:
        return np.asarray(s_idx, dtype=np.int64) * self.n_goals + np.asarray(g_idx)


def valid_pair_mask(world: CubeWorld) -> np.ndarray:
    """Filtered (state, goal) pairs used for every information quantity.

    gripper none : red, blue and goal cells mutually distinct;
    gripper held : agent, floor-cube and goal cells mutually distinct.
    (Floor cubes are never co-located, so the first clause only adds the
    two cube-vs-goal constraints.)
    """
    n = world.n
    agent = world.agent_xy[:, 0].astype(np.int32) * n + world.agent_xy[:, 1]
    red = world.red_xy[:, 0].astype(np.int32) * n + world.red_xy[:, 1]
    blue = world.blue_xy[:, 0].astype(np.int32) * n + world.blue_xy[:, 1]
    goal = world.goal_xy[:, 0].astype(np.int32) * n + world.goal_xy[:, 1]

    none_mask = world.gripper == 0
    floor = np.where(world.gripper == 1, blue, red)  # the cube not in the gripper
    ok_none = (red[:, None] != goal[None, :]) & (blue[:, None] != goal[None, :])
    ok_held = (
        (agent[:, None] != goal[None, :])
        & (floor[:, None] != goal[None, :])
        & (agent != floor)[:, None]
    )
    return np.where(none_mask[:, None], ok_none, ok_held)


def build_world(n: int = 4) -> CubeWorld:
    """Enumerate states/goals and precompute transition, success, pair tables."""
    states, index = enumerate_states(n)
    goals = enumerate_goals(n)
    S, G = len(states), len(goals)

    agent_xy = np.zeros((S, 2), dtype=np.int16)
    red_xy = np.zeros((S, 2), dtype=np.int16)
    blue_xy = np.zeros((S, 2), dtype=np.int16)
    gripper = np.zeros(S, dtype=np.int8)
    for i, s in enumerate(states):
        agent_xy[i] = s.agent
        red_xy[i] = s.cube_pos(CubeId.RED)
        blue_xy[i] = s.cube_pos(CubeId.BLUE)
        gripper[i] = 0 if s.gripper is None else int(s.gripper) + 1

    transitions = np.zeros((S, 6), dtype=np.int32)
    for i, s in enumerate(states):
        for a in Action:
            transitions[i, a] = index[step(s, a, n)]

    goal_target = np.array([int(g.target) for g in goals], dtype=np.int8)
    goal_xy = np.array([g.pos for g in goals], dtype=np.int16)

    target_xy = np.where((goal_target == 0)[None, :, None], red_xy[:, None, :], blue_xy[:, None, :])
    at_goal = (target_xy == goal_xy[None, :, :]).all(axis=2)
    holding_target = gripper[:, None] == (goal_target + 1)[None, :]
    success = at_goal & ~holding_target

    world = CubeWorld(
        n=n,
        states=tuple(states),
        state_index=index,
        goals=tuple(goals),
        agent_xy=agent_xy,
        red_xy=red_xy,
        blue_xy=blue_xy,
        gripper=gripper,
        transitions=transitions,
        goal_target=goal_target,
        goal_xy=goal_xy,
        success=success,
        valid=np.zeros((S, G), dtype=bool),
        pair_state=np.zeros(0, dtype=np.int32),
        pair_goal=np.zeros(0, dtype=np.int32),
    )
    valid = valid_pair_mask(world)
    ps, pg = np.nonzero(valid)
    object.__setattr__(world, "valid", valid)
    object.__setattr__(world, "pair_state", ps.astype(np.int32))
    object.__setattr__(world, "pair_goal", pg.astype(np.int32))
    return world


def valid_pairs(n: int) -> list[tuple[int, int]]:
    """(state index, goal index) pairs passing the filter, in row-major order."""
    world = build_world(n)
    return list(zip(world.pair_state.tolist(), world.pair_goal.tolist()))
