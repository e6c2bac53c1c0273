"""The representation zoo: four baselines and the randomized template library.

A goal representation z = phi(s, g) compresses the goal adaptively to the
state.  The baselines anchor the extremes; the template sampler fills the
space between them with 2000 reproducible variants.
"""

from collections import Counter

from asl.cube import CubeId, CubeState, Goal, build_world
from asl.oracle import compute_oracle
from asl.reps import baselines, encode, sample_library

world = build_world(4)
oracle = compute_oracle(world)

s = CubeState(agent=(0, 0), red=(2, 1), blue=(3, 0), gripper=None)
g_right = Goal(CubeId.RED, (3, 3))
g_left = Goal(CubeId.RED, (0, 2))  # same distance from the cube, other direction

print(f"state: agent={s.agent} red={s.red} blue={s.blue}")
print(f"two goals at equal distance: {g_right.pos} and {g_left.pos}\n")
for spec in baselines():
    za = encode(spec, s, g_right, world, oracle)
    zb = encode(spec, s, g_left, world, oracle)
    tag = "collides them" if za == zb else "separates them"
    print(f"  {spec.id:11s} z_right={za!s:24s} z_left={zb!s:24s} {tag}")

lib = sample_library(2000, seed=0)
hist = Counter(spec.name for spec in lib)
print("\n2000-spec library by template:")
for name, count in sorted(hist.items(), key=lambda kv: -kv[1]):
    print(f"  {name:15s} {count:4d}")

print("\nevery spec records its parameters in its id, e.g.")
for spec in lib[:3]:
    print(f"  {spec.id}")
