import numpy as np
import pytest

from asl.cube import Action, CubeId, CubeState, Goal, HELD
from asl.features import F_DAT, F_DBG, F_H, F_T
from asl.oracle import (
    OracleTables,
    UNREACHABLE,
    UnreachableError,
    load_or_compute,
    load_oracle,
    optimal_policy,
    save_oracle,
    value,
)

from naive import naive_forward_dist


def test_dist_zero_iff_success(lab4):
    assert np.array_equal(lab4.oracle.dist == 0, lab4.world.success)


def test_everything_reachable(lab2, lab3, lab4):
    for lab in (lab2, lab3, lab4):
        assert lab.oracle.n_unreachable == 0
        assert (lab.oracle.dist >= 0).all()


def test_bellman_consistency(lab4):
    dist = lab4.oracle.dist.astype(np.int32)
    dnext = dist[lab4.world.transitions]  # (S, 6, G)
    positive = dist > 0
    assert np.array_equal(dnext.min(axis=1)[positive], dist[positive] - 1)


def test_opt_mask_definition(lab4):
    dist = lab4.oracle.dist.astype(np.int32)
    dnext = dist[lab4.world.transitions]
    expected = (dnext == dist[:, None, :] - 1) & (dist > 0)[:, None, :]
    bits = (lab4.oracle.opt_mask[:, None, :] >> np.arange(6, dtype=np.uint8)[None, :, None]) & 1
    assert np.array_equal(bits.astype(bool), expected)
    assert (lab4.oracle.opt_mask[dist > 0] != 0).all()
    assert (lab4.oracle.opt_mask[dist <= 0] == 0).all()


def test_forward_bfs_crosscheck_n2(lab2):
    world = lab2.world
    for s in range(world.n_states):
        for g in range(world.n_goals):
            assert naive_forward_dist(world, s, g) == int(lab2.oracle.dist[s, g])


def test_closed_form_distances_on_filtered_pairs(lab4):
    """On filtered pairs the BFS distance has a closed form per gripper case."""
    f = lab4.feats_valid
    d = lab4.oracle.dist[lab4.law.s_ids, lab4.law.g_ids].astype(np.int64)
    d_at = f[:, F_DAT].astype(np.int64)
    d_bg = f[:, F_DBG].astype(np.int64)
    h = f[:, F_H].astype(np.int64)
    t = f[:, F_T].astype(np.int64)
    free = h == 0
    holding_target = (h > 0) & (h == t + 1)
    holding_other = (h > 0) & (h != t + 1)
    assert np.array_equal(d[free], d_at[free] + d_bg[free] + 2)
    assert np.array_equal(d[holding_target], d_bg[holding_target] + 1)
    assert np.array_equal(d[holding_other], d_at[holding_other] + d_bg[holding_other] + 3)


def test_value_and_policy_api(lab4):
    dist = lab4.oracle.dist
    s, g = np.argwhere(dist == 7)[0]
    assert value(lab4.oracle, int(s), int(g)) == -7
    p = optimal_policy(lab4.oracle, int(s), int(g))
    nz = p[p > 0]
    assert abs(p.sum() - 1.0) < 1e-12
    assert np.allclose(nz, 1.0 / nz.size)

    s0, g0 = np.argwhere(dist == 0)[0]
    with pytest.raises(ValueError):
        optimal_policy(lab4.oracle, int(s0), int(g0))

    doctored = OracleTables(
        n=lab4.n,
        dist=np.full_like(dist, UNREACHABLE),
        opt_mask=np.zeros_like(lab4.oracle.opt_mask),
        n_unreachable=dist.size,
    )
    with pytest.raises(UnreachableError):
        value(doctored, 0, 0)
    with pytest.raises(UnreachableError):
        optimal_policy(doctored, 0, 0)


def test_single_optimal_action_is_deterministic(lab4):
    dist = lab4.oracle.dist
    masks = lab4.oracle.opt_mask
    singles = np.argwhere((dist > 0) & (np.bitwise_count(masks) == 1))
    s, g = singles[0]
    p = optimal_policy(lab4.oracle, int(s), int(g))
    assert p.max() == 1.0


def test_greedy_rollout_takes_exactly_dist_steps(lab4, lab2):
    rng = np.random.default_rng(123)
    for lab, n_samples in ((lab4, 300), (lab2, None)):
        P = lab.world.n_pairs
        idx = range(P) if n_samples is None else rng.choice(P, n_samples, replace=False)
        for p in idx:
            s = int(lab.law.s_ids[p])
            g = int(lab.law.g_ids[p])
            d = int(lab.oracle.dist[s, g])
            for _ in range(d):
                mask = int(lab.oracle.opt_mask[s, g])
                a = (mask & -mask).bit_length() - 1  # lowest optimal action
                s = int(lab.world.transitions[s, a])
            assert lab.oracle.dist[s, g] == 0


def test_every_optimal_action_decreases_dist(lab4):
    dist = lab4.oracle.dist.astype(np.int32)
    bits = (lab4.oracle.opt_mask[:, None, :] >> np.arange(6, dtype=np.uint8)[None, :, None]) & 1
    dnext = dist[lab4.world.transitions]
    chosen = bits.astype(bool)
    assert np.array_equal(dnext[chosen], (np.broadcast_to(dist[:, None, :] - 1, dnext.shape))[chosen])


def test_cache_roundtrip(tmp_path, lab2):
    path = tmp_path / "oracle.bin"
    save_oracle(lab2.oracle, path)
    loaded = load_oracle(path, 2)
    assert loaded is not None
    assert np.array_equal(loaded.dist, lab2.oracle.dist)
    assert np.array_equal(loaded.opt_mask, lab2.oracle.opt_mask)
    # header mismatch: wrong grid size is rejected and triggers a rebuild
    assert load_oracle(path, 3) is None
    rebuilt = load_or_compute(lab2.world, path)
    assert np.array_equal(rebuilt.dist, lab2.oracle.dist)


def test_cache_corrupt_file_rejected(tmp_path, lab2):
    path = tmp_path / "oracle.bin"
    save_oracle(lab2.oracle, path)
    raw = bytearray(path.read_bytes())
    raw[0] ^= 0xFF
    path.write_bytes(bytes(raw))
    assert load_oracle(path, 2) is None
    path.write_bytes(b"short")
    assert load_oracle(path, 2) is None
