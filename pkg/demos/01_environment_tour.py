"""Tour of the Discrete Cube: states, actions, goals, and the pair filter.

The environment is a 4x4 grid with an agent and two cubes (Red and Blue).
This script enumerates the state space, walks a short scripted episode, and
shows how the state-goal pair filter shapes the analysis set.
"""

from asl.cube import Action, CubeId, CubeState, Goal, build_world, is_success, step

world = build_world(4)
print(f"grid 4x4: {world.n_states} states, {world.n_goals} goals, "
      f"{world.n_pairs} filtered (state, goal) pairs")

# a tiny scripted episode: walk to the red cube, pick it, carry it, place it
s = CubeState(agent=(0, 0), red=(2, 0), blue=(3, 3), gripper=None)
goal = Goal(CubeId.RED, (2, 2))
script = [Action.RIGHT, Action.RIGHT, Action.PICK, Action.UP, Action.UP, Action.PLACE]

print(f"\nstart: {s}")
print(f"goal:  move Red to {goal.pos}")
for a in script:
    s = step(s, a, world.n)
    held = s.gripper.name if s.gripper is not None else "-"
    print(f"  {a.name:6s} -> agent={s.agent} red={s.red} blue={s.blue} "
          f"gripper={held} success={is_success(s, goal)}")

# the filter drops degenerate pairs: goal already satisfied, or cells colliding
g_idx = world.goal_index(goal)
kept = world.valid[:, g_idx].sum()
print(f"\nfor this goal, {kept} of {world.n_states} states form valid analysis pairs")
print("dropped examples: target already at the goal cell, the other cube "
      "parked on the goal cell, or the agent holding a cube while standing there")
