import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from asl.cube import Goal
from asl.info import (
    InfoReport,
    PairLaw,
    VerificationError,
    chain_rule_residual,
    check_goal_only_strictness,
    combine_keys,
    grouped_action_entropy,
    order_consistency_ratio,
    pinsker_lower_bound,
    value_constant_on_groups,
    verify_value_functional_dependence,
)
from asl.reps import baseline, baselines, sample_library

from naive import make_scalar_encoder, naive_info, naive_pinsker


def _specs_for_crosscheck():
    return baselines() + sample_library(6, seed=21)


@pytest.mark.parametrize("spec", _specs_for_crosscheck(), ids=lambda s: s.id)
def test_report_matches_naive_on_n2(lab2, spec):
    report = lab2.info_report(spec)
    expected = naive_info(lab2.world, lab2.oracle, make_scalar_encoder(lab2, spec))
    for field, want in expected.items():
        assert abs(getattr(report, field) - want) < 1e-10, field


def test_exact_zero_cases(lab4):
    full = lab4.info_report(baseline("full"))
    assert abs(full.delta_a) < 1e-12 and abs(full.delta_v) < 1e-12
    vonly = lab4.info_report(baseline("value_only"))
    assert vonly.delta_v == 0.0
    assert abs(vonly.i_az_sv) < 1e-12
    dist = lab4.info_report(baseline("distances"))
    assert dist.delta_v == 0.0


def test_value_only_gap_equals_cmi(lab4):
    # with I(A;Z|S,V) = 0 the decomposition collapses to delta_a = I(A;G|S,V)
    vonly = lab4.info_report(baseline("value_only"))
    assert abs(vonly.delta_a - vonly.i_ag_sv) < 1e-12


def test_chain_rule_residual(lab4):
    for spec in baselines() + sample_library(20, seed=3):
        assert chain_rule_residual(lab4.info_report(spec)) < 1e-9


def test_data_processing_on_nested_baselines(lab4):
    full = lab4.info_report(baseline("full"))
    for other in ("signs", "distances", "value_only"):
        r = lab4.info_report(baseline(other))
        assert r.delta_a >= full.delta_a - 1e-12
        assert r.delta_v >= full.delta_v - 1e-12


def test_value_functional_dependence(lab4):
    for name in ("value_only", "distances"):
        spec = baseline(name)
        report = lab4.info_report(spec)
        assert report.delta_v < 1e-9
        assert verify_value_functional_dependence(lab4.law, lab4.z_cols(spec), report)
        assert value_constant_on_groups(lab4.law, lab4.z_cols(spec))
    # signs is not value-sufficient: the precondition fails, vacuous pass
    signs = baseline("signs")
    report = lab4.info_report(signs)
    assert report.delta_v >= 1e-9
    assert verify_value_functional_dependence(lab4.law, lab4.z_cols(signs), report)


def test_signs_not_value_constant(lab4):
    spec = baseline("signs")
    assert not value_constant_on_groups(lab4.law, lab4.z_cols(spec))


def test_goal_only_strictness(lab4):
    w, o = lab4.world, lab4.oracle
    assert check_goal_only_strictness(lambda g: 0, w, o) is not None  # constant
    assert check_goal_only_strictness(lambda g: (int(g.target), g.pos), w, o) is None
    witness = check_goal_only_strictness(lambda g: int(g.target), w, o)
    assert witness is not None
    assert witness.value_a != witness.value_b
    # the witness is checkable against the oracle directly
    ga, gb = w.goal_index(witness.goal_a), w.goal_index(witness.goal_b)
    assert o.dist[witness.state_index, ga] != o.dist[witness.state_index, gb]


def test_pinsker_bound_n4(lab4):
    bound, cmi = pinsker_lower_bound(lab4.law)
    assert 0 < bound <= cmi + 1e-9


def test_pinsker_matches_naive_n2(lab2):
    bound, cmi = pinsker_lower_bound(lab2.law)
    nb, ncmi = naive_pinsker(lab2.world, lab2.oracle)
    assert abs(bound - nb) < 1e-10
    assert abs(cmi - ncmi) < 1e-10


def test_pinsker_degenerate_single_goal_levels():
    # two states, one goal each: no within-level goal variation at all
    law = PairLaw.build(
        s_ids=[0, 1],
        g_ids=[0, 1],
        v=[-1, -2],
        adist=np.array([[1.0, 0.0], [0.0, 1.0]]),
    )
    bound, cmi = pinsker_lower_bound(law)
    assert bound == 0.0 and abs(cmi) < 1e-15


def test_order_consistency_ratio():
    assert order_consistency_ratio([1, 2, 3, 4], 1) == 1.0
    assert order_consistency_ratio([2, 2, 2], 1) == 0.0
    assert order_consistency_ratio([0, 2, 1, 3], 2) == 1.0
    with pytest.raises(ValueError):
        order_consistency_ratio([1.0], 1)
    with pytest.raises(ValueError):
        order_consistency_ratio([1.0, 2.0], 0)


def test_order_consistency_along_greedy_trajectory(lab4):
    s = int(lab4.law.s_ids[1234])
    g = int(lab4.law.g_ids[1234])
    values = [-int(lab4.oracle.dist[s, g])]
    while lab4.oracle.dist[s, g] > 0:
        mask = int(lab4.oracle.opt_mask[s, g])
        a = (mask & -mask).bit_length() - 1
        s = int(lab4.world.transitions[s, a])
        values.append(-int(lab4.oracle.dist[s, g]))
    assert order_consistency_ratio(values, 1) == 1.0


def test_info_report_invariants_enforced():
    with pytest.raises(VerificationError):
        InfoReport(
            delta_a=-1.0,
            delta_v=0.0,
            i_az_sv=0.0,
            i_ag_sv=0.0,
            i_av_sz=0.0,
            h_a_sg=0.0,
            h_a_sz=-1.0,
            h_v_sz=0.0,
        )
    with pytest.raises(VerificationError):
        InfoReport(
            delta_a=0.5,  # inconsistent with h_a_sz - h_a_sg
            delta_v=0.0,
            i_az_sv=0.0,
            i_ag_sv=0.5,
            i_av_sz=0.0,
            h_a_sg=1.0,
            h_a_sz=1.0,
            h_v_sz=0.0,
        )


def test_empty_pair_law_rejected():
    with pytest.raises(ValueError):
        PairLaw.build([], [], [], np.zeros((0, 6)))


@given(
    st.lists(
        st.tuples(st.integers(-40, 40), st.integers(-3, 3), st.integers(0, 5)),
        min_size=1,
        max_size=200,
    )
)
@settings(max_examples=60, deadline=None)
def test_combine_keys_equals_tuple_grouping(rows):
    cols = [np.array([r[i] for r in rows], dtype=np.int64) for i in range(3)]
    keys = combine_keys(cols)
    by_key: dict[int, set[tuple]] = {}
    for i, row in enumerate(rows):
        by_key.setdefault(int(keys[i]), set()).add(row)
    # packing is injective: one tuple value per key, and equal tuples share keys
    assert all(len(v) == 1 for v in by_key.values())
    assert len(by_key) == len(set(rows))


@given(
    st.lists(st.integers(0, 4), min_size=1, max_size=120),
    st.integers(0, 1_000_000),
)
@settings(max_examples=40, deadline=None)
def test_grouped_action_entropy_matches_direct(keys_list, seed):
    gen = np.random.default_rng(seed)
    keys = np.array(keys_list, dtype=np.int64)
    adist = gen.dirichlet(np.ones(3), size=keys.size)
    got = grouped_action_entropy(adist, keys)
    want = 0.0
    for k in np.unique(keys):
        rows = adist[keys == k]
        mean = rows.mean(axis=0)
        ent = -sum(p * np.log(p) for p in mean if p > 0)
        want += rows.shape[0] / keys.size * ent
    assert abs(got - want) < 1e-10
