from __future__ import annotations

from fractions import Fraction

import pytest

from fibergraphs.enumeration import enumerate_fiber
from fibergraphs.errors import InvalidDimensionError, MarginMismatchError
from fibergraphs.sampler import (
    ChainState,
    Target,
    VisitCounter,
    WalkConfig,
    acceptance_ratio,
    as_equal_margin_table,
    chi_square_statistic,
    exact_test,
    run_walk,
    step,
    transition_probabilities,
)
from fibergraphs.tables import validate_table

from oracles import hypergeometric_mass

T0 = validate_table(2, 2, [[0, 2], [2, 0]])
T1 = validate_table(2, 2, [[1, 1], [1, 1]])
T2 = validate_table(2, 2, [[2, 0], [0, 2]])


def test_config_validation():
    with pytest.raises(InvalidDimensionError):
        WalkConfig(steps=10, seed=1, burn_in=10)
    with pytest.raises(InvalidDimensionError):
        WalkConfig(steps=10, seed=1, thinning=11)
    with pytest.raises(InvalidDimensionError):
        WalkConfig(steps=-1, seed=1)
    with pytest.raises(InvalidDimensionError):
        WalkConfig(steps=5, seed=2**64)
    WalkConfig(steps=0, seed=0)  # the empty walk is allowed


def test_degree_one_vertex_self_loop_probability():
    # 2 proposals at [[2,0],[0,2]], one valid: stay with probability 1/2
    probs = transition_probabilities(T2, Target.UNIFORM)
    assert probs[T2.entries] == Fraction(1, 2)
    assert probs[T1.entries] == Fraction(1, 2)


def test_hypergeometric_acceptance_ratio():
    assert acceptance_ratio(T1, T2) == Fraction(1, 4)
    assert acceptance_ratio(T2, T1) == Fraction(4)


def test_detailed_balance_uniform():
    pi = {t.entries: Fraction(1, 3) for t in (T0, T1, T2)}
    _assert_detailed_balance(pi, Target.UNIFORM)


def test_detailed_balance_hypergeometric():
    pi = hypergeometric_mass([t.entries for t in (T0, T1, T2)])
    _assert_detailed_balance(pi, Target.HYPERGEOMETRIC)


def _assert_detailed_balance(pi, target):
    tables = (T0, T1, T2)
    rows = {t.entries: transition_probabilities(t, target) for t in tables}
    for a in tables:
        assert sum(rows[a.entries].values()) == 1
        for b in tables:
            if a.entries == b.entries:
                continue
            lhs = pi[a.entries] * rows[a.entries].get(b.entries, Fraction(0))
            rhs = pi[b.entries] * rows[b.entries].get(a.entries, Fraction(0))
            assert lhs == rhs


def test_trajectories_bitwise_reproducible():
    config = WalkConfig(steps=4000, seed=99, target=Target.HYPERGEOMETRIC)
    _, first = run_walk(T2, config)
    _, second = run_walk(T2, config)
    assert [t.entries for t in first] == [t.entries for t in second]


def test_different_seeds_differ():
    a = run_walk(T2, WalkConfig(steps=500, seed=1))[1]
    b = run_walk(T2, WalkConfig(steps=500, seed=2))[1]
    assert [t.entries for t in a] != [t.entries for t in b]


def test_empty_walk():
    state, samples = run_walk(T2, WalkConfig(steps=0, seed=5))
    assert samples == []
    assert state.step_index == 0
    assert state.current.entries == T2.entries


def test_step_preserves_fiber_membership():
    config = WalkConfig(steps=0, seed=31, target=Target.HYPERGEOMETRIC)
    state = ChainState.from_table(T1, config)
    for _ in range(2000):
        step(state, config)
        validate_table(2, 2, state.current.entries)
    assert state.accepted_count <= state.step_index


def test_uniform_walk_visits_whole_fiber():
    fiber = enumerate_fiber(3, 2)
    state, _ = run_walk(fiber[0], WalkConfig(steps=100_000, seed=7))
    assert len(state.visits.counts) == 21


def test_uniform_walk_frequencies_near_stationary():
    # the lazy uniform chain on G(2,2) has uniform stationary distribution
    state, _ = run_walk(T2, WalkConfig(steps=300_000, seed=11))
    total = sum(state.visits.counts.values())
    for count in state.visits.counts.values():
        assert abs(count / total - 1 / 3) < 0.01  # seed-pinned regression


def test_uniform_walk_tv_shrinks_with_run_length():
    # seed-pinned regression: total-variation distance to uniform on the
    # 21-table fiber drops well under 0.05 by a million steps
    fiber = enumerate_fiber(3, 2)
    start = fiber[0]

    def tv(steps: int) -> float:
        state, _ = run_walk(start, WalkConfig(steps=steps, seed=7))
        total = sum(state.visits.counts.values())
        return 0.5 * sum(
            abs(state.visits.counts.get(t.row_major(), 0) / total - 1 / 21)
            for t in fiber
        )

    short, long = tv(10_000), tv(1_000_000)
    assert long < short
    assert long < 0.05


def test_thinning_and_burn_in_sample_count():
    config = WalkConfig(steps=1000, seed=3, burn_in=100, thinning=9)
    _, samples = run_walk(T1, config)
    assert len(samples) == (1000 - 100) // 9 == config.samples_expected


def test_visit_counter_cap_degrades_to_sketch():
    counter = VisitCounter(cap=50)
    for x in range(50):
        counter.record((x,))
    assert not counter.approximate
    for x in range(50, 400):
        counter.record((x,))
    assert counter.approximate
    estimate = counter.distinct_estimate()
    assert 200 <= estimate <= 800  # sketch accuracy, not exactness


def test_chi_square_statistic_values():
    assert chi_square_statistic(validate_table(3, 3, [[1, 1, 1]] * 3)) == 0.0
    assert chi_square_statistic(validate_table(3, 2, [[2, 0, 0], [0, 2, 0], [0, 0, 2]])) == 12.0


def test_as_equal_margin_table_rejects_unequal():
    with pytest.raises(MarginMismatchError):
        as_equal_margin_table([[1, 0], [0, 2]])
    with pytest.raises(MarginMismatchError):
        as_equal_margin_table([[1, 0, 0], [0, 1, 0]])


def test_exact_test_flat_observed_p_one():
    flat = [[1, 1, 1], [1, 1, 1], [1, 1, 1]]
    result = exact_test(flat, WalkConfig(steps=20_000, seed=17, thinning=5))
    assert result.observed_statistic == 0.0
    assert result.p_value_estimate == 1.0


def test_exact_test_extreme_observed_matches_enumeration():
    fiber = enumerate_fiber(3, 2)
    pi = hypergeometric_mass([t.entries for t in fiber])
    observed = validate_table(3, 2, [[2, 0, 0], [0, 2, 0], [0, 0, 2]])
    threshold = chi_square_statistic(observed)
    exact = sum(
        mass
        for entries, mass in pi.items()
        if chi_square_statistic(validate_table(3, 2, entries)) >= threshold
    )
    assert exact == Fraction(1, 15)
    result = exact_test(observed, WalkConfig(steps=400_000, seed=12345, thinning=10))
    assert abs(result.p_value_estimate - float(exact)) <= 3 * result.standard_error


def test_exact_test_monotone_in_threshold():
    fiber = enumerate_fiber(3, 2)
    config = WalkConfig(steps=50_000, seed=2024, thinning=10)
    flat_like = validate_table(3, 2, [[1, 1, 0], [1, 0, 1], [0, 1, 1]])
    middle = validate_table(3, 2, [[2, 0, 0], [0, 1, 1], [0, 1, 1]])
    extreme = validate_table(3, 2, [[2, 0, 0], [0, 2, 0], [0, 0, 2]])
    ps = [exact_test(t, config).p_value_estimate for t in (flat_like, middle, extreme)]
    assert ps[0] == 1.0
    assert ps[0] >= ps[1] >= ps[2]
