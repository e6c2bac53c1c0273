"""The shortest-path oracle: exact distances, values, and optimal actions.

Backward BFS from each goal's success set labels every state with the exact
distance-to-success D*(s, g); the optimal value is V* = -D* and the optimal
policy is uniform over the actions that step down the distance field.
"""

import numpy as np

from asl.cube import build_world
from asl.features import F_DAT, F_DBG, F_H
from asl.info import order_consistency_ratio
from asl.lab import CubeLab
from asl.oracle import optimal_policy

lab = CubeLab.build(4)
dist = lab.oracle.dist

print(f"distance table: {dist.shape[0]} states x {dist.shape[1]} goals, "
      f"max D* = {dist.max()}, unreachable pairs = {lab.oracle.n_unreachable}")

# on filtered empty-gripper pairs the BFS distance reduces to a closed form:
# walk to the target (d_at), pick, carry to the goal (d_bg), place
f = lab.feats_valid
free = f[:, F_H] == 0
d = dist[lab.law.s_ids[free], lab.law.g_ids[free]].astype(int)
closed = f[free, F_DAT].astype(int) + f[free, F_DBG].astype(int) + 2
print(f"empty-gripper pairs where D* = d_at + d_bg + 2: "
      f"{(d == closed).sum()} / {d.size}")

# follow the optimal policy greedily: each step lowers D* by exactly one
p = 4321
s, g = int(lab.law.s_ids[p]), int(lab.law.g_ids[p])
values = [-int(dist[s, g])]
print(f"\ngreedy rollout from V* = {values[0]}:")
while dist[s, g] > 0:
    probs = optimal_policy(lab.oracle, s, g)
    a = int(np.argmax(probs))
    s = int(lab.world.transitions[s, a])
    values.append(-int(dist[s, g]))
print("  V* along the trajectory:", values)
print("  order consistency ratio (k=1):", order_consistency_ratio(values, 1))
