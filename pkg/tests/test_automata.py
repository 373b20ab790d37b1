import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdhla.automata import (
    FSLA,
    VASLA,
    VSLA,
    AutomatonState,
    DegenerateVectorError,
    PureChance,
    UpdateScheme,
    fsla_is_action_switching,
    fsla_is_depth_transition,
    fsla_select_action,
    fsla_update,
    make_scheme,
    pure_chance_select,
    vasla_scale,
    vasla_update,
    vsla_update,
)

# Actions are 0-based in code; the 1-based labels of the text map as a -> a-1.


def prob_vectors(min_size=2, max_size=8):
    return st.lists(st.floats(0.001, 1.0), min_size=min_size, max_size=max_size).map(
        lambda w: np.array(w) / np.sum(w)
    )


rates = st.floats(0.0, 1.0)


class TestSchemes:
    def test_presets_follow_rate_patterns(self):
        assert make_scheme("pure_chance") == UpdateScheme(0.0, 0.0)
        assert make_scheme("L_RI", 0.1) == UpdateScheme(0.1, 0.0)
        assert make_scheme("L_PI", 0.0, 0.01) == UpdateScheme(0.0, 0.01)
        assert make_scheme("L_RP", 0.1) == UpdateScheme(0.1, 0.1)
        assert make_scheme("L_ReP", 0.1, 0.01) == UpdateScheme(0.1, 0.01)

    @pytest.mark.parametrize("l1,l2,name", [
        (0, 0, "pure_chance"), (0.1, 0, "L_RI"), (0, 0.1, "L_PI"),
        (0.2, 0.2, "L_RP"), (0.1, 0.01, "L_ReP"),
    ])
    def test_name_roundtrip(self, l1, l2, name):
        assert UpdateScheme(l1, l2).name == name

    def test_rejects_bad_rates(self):
        with pytest.raises(ValueError):
            UpdateScheme(1.5, 0.0)
        with pytest.raises(ValueError):
            make_scheme("L_ReP", 0.01, 0.1)
        with pytest.raises(ValueError):
            make_scheme("nonsense")


class TestFSLA:
    @pytest.mark.parametrize("action,position", [(0, 2), (3, 1), (1, 3)])
    def test_select_is_projection(self, action, position):
        assert fsla_select_action(AutomatonState(action, position)) == action

    def test_reward_moves_inward(self):
        # (1,2) -> (1,1) for K=4, N=2
        assert fsla_update(AutomatonState(0, 2), 1, [2] * 4) == AutomatonState(0, 1)

    def test_penalty_at_boundary_switches_clockwise(self):
        # (1,2) -> (2,2)
        assert fsla_update(AutomatonState(0, 2), 0, [2] * 4) == AutomatonState(1, 2)

    def test_reward_floor(self):
        assert fsla_update(AutomatonState(0, 1), 1, [2] * 4) == AutomatonState(0, 1)

    def test_penalty_inside_moves_outward(self):
        assert fsla_update(AutomatonState(0, 1), 0, [2] * 4) == AutomatonState(0, 2)

    def test_last_action_wraps_to_first(self):
        assert fsla_update(AutomatonState(3, 2), 0, [2] * 4) == AutomatonState(0, 2)

    def test_asymmetric_switch_enters_next_boundary(self):
        assert fsla_update(AutomatonState(0, 1), 0, [1, 3, 2, 3]) == AutomatonState(1, 3)

    def test_switching_predicate(self):
        assert fsla_is_action_switching(AutomatonState(0, 2), 0, 2)
        assert not fsla_is_action_switching(AutomatonState(0, 1), 0, 2)
        assert not fsla_is_action_switching(AutomatonState(0, 2), 1, 2)

    def test_depth_transition_predicate(self):
        assert fsla_is_depth_transition(AutomatonState(1, 2), 1)
        assert fsla_is_depth_transition(AutomatonState(1, 1), 1)
        assert not fsla_is_depth_transition(AutomatonState(1, 3), 1)
        assert not fsla_is_depth_transition(AutomatonState(1, 1), 0)

    def test_starts_on_boundary(self):
        a = FSLA(3, [2, 5, 1], start_action=1)
        assert a.state == AutomatonState(1, 5)

    @pytest.mark.parametrize("k,n,start", [(2, 1, 0), (4, 2, 1), (5, 3, 4)])
    def test_penalty_rotation_is_k_cycle(self, k, n, start):
        a = FSLA(k, n, start_action=start)
        seen = []
        for _ in range(k):
            a.update(0)
            seen.append(a.action)
        assert a.state == AutomatonState(start, n)
        assert sorted(seen) == list(range(k))

    @settings(max_examples=200, deadline=None)
    @given(
        depths=st.lists(st.integers(1, 6), min_size=1, max_size=6),
        signals=st.lists(st.integers(0, 1), max_size=300),
    )
    def test_position_stays_in_bounds(self, depths, signals):
        a = FSLA(len(depths), depths)
        for s in signals:
            a.update(s)
            assert 0 <= a.action < len(depths)
            assert 1 <= a.position <= depths[a.action]

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            FSLA(2, 2).update(0.5)


class TestVSLA:
    def test_reward_example(self):
        # p1 + l1 (1 - p1) = 0.5 + 0.5 * 0.5
        out = vsla_update([0.5, 0.5], 0, 1, UpdateScheme(0.5, 0.0))
        np.testing.assert_allclose(out, [0.75, 0.25], atol=1e-12)

    def test_penalty_example(self):
        # chosen: 0.9 * 0.6; others: 0.1/2 + 0.9 * 0.2
        out = vsla_update([0.2, 0.2, 0.6], 2, 0, UpdateScheme(0.0, 0.1))
        np.testing.assert_allclose(out, [0.23, 0.23, 0.54], atol=1e-12)

    @given(p=prob_vectors(), signal=st.integers(0, 1), data=st.data())
    def test_pure_chance_is_identity(self, p, signal, data):
        chosen = data.draw(st.integers(0, p.size - 1))
        out = vsla_update(p, chosen, signal, UpdateScheme.pure_chance())
        np.testing.assert_allclose(out, p, atol=1e-12)

    @given(p=prob_vectors(), l1=rates, l2=rates, signal=st.integers(0, 1), data=st.data())
    def test_normalisation(self, p, l1, l2, signal, data):
        chosen = data.draw(st.integers(0, p.size - 1))
        out = vsla_update(p, chosen, signal, UpdateScheme(l1, l2))
        assert abs(out.sum() - 1.0) < 1e-9
        assert np.all(out >= 0) and np.all(out <= 1)

    @given(p=prob_vectors(), l1=st.floats(0.01, 1.0), data=st.data())
    def test_reward_monotone(self, p, l1, data):
        chosen = data.draw(st.integers(0, p.size - 1))
        out = vsla_update(p, chosen, 1, UpdateScheme(l1, 0.0))
        assert out[chosen] > p[chosen] or p[chosen] == pytest.approx(1.0)

    def test_automaton_learns_direction(self):
        a = VSLA(2, UpdateScheme(0.1, 0.0))
        rng = np.random.default_rng(0)
        chosen = a.select_action(rng)
        a.update(1)
        assert a.p[chosen] > 0.5

    def test_update_before_select_fails(self):
        with pytest.raises(RuntimeError):
            VSLA(2, UpdateScheme(0.1, 0.0)).update(1)


class TestVASLA:
    def test_scale_subset(self):
        np.testing.assert_allclose(vasla_scale([0.4, 0.3, 0.3], [0, 1]), [4 / 7, 3 / 7])

    def test_scale_full_set(self):
        np.testing.assert_allclose(vasla_scale([1 / 3] * 3, [0, 1, 2]), [1 / 3] * 3)

    def test_scale_singleton(self):
        np.testing.assert_allclose(vasla_scale([0.5, 0.5, 0.0], [0]), [1.0])

    def test_scale_zero_mass(self):
        with pytest.raises(DegenerateVectorError):
            vasla_scale([0.5, 0.5, 0.0], [2])

    def test_update_reward_example(self):
        out = vasla_update([1 / 3] * 3, 0, 1.0, UpdateScheme(0.1, 0.0))
        np.testing.assert_allclose(out, [1 / 3 + 0.1 * 2 / 3, 0.9 / 3, 0.9 / 3], atol=1e-12)
        np.testing.assert_allclose(out, [0.4, 0.3, 0.3], atol=1e-12)

    def test_update_penalty_example(self):
        out = vasla_update([0.2, 0.2, 0.6], 2, 0.0, UpdateScheme(0.0, 0.1), r=3)
        np.testing.assert_allclose(out, [0.23, 0.23, 0.54], atol=1e-12)

    def test_reward_inaction_ignores_penalty(self):
        p = [0.2, 0.5, 0.3]
        np.testing.assert_allclose(vasla_update(p, 1, 0.0, UpdateScheme(0.1, 0.0)), p, atol=1e-15)

    def test_fractional_signal(self):
        # beta = 0.5, l1 = 0.2, l2 = 0.1, r = 2 on [0.5, 0.5]
        # chosen: 0.5 + 0.2*0.5*0.5 - 0.1*0.5*0.5 = 0.525
        out = vasla_update([0.5, 0.5], 0, 0.5, UpdateScheme(0.2, 0.1))
        np.testing.assert_allclose(out, [0.525, 0.475], atol=1e-12)

    @settings(max_examples=300)
    @given(p=prob_vectors(), l1=rates, l2=rates, beta=st.sampled_from([0.0, 1.0]), data=st.data())
    def test_reduces_to_vsla_at_binary_signal(self, p, l1, l2, beta, data):
        chosen = data.draw(st.integers(0, p.size - 1))
        s = UpdateScheme(l1, l2)
        np.testing.assert_allclose(
            vasla_update(p, chosen, beta, s), vsla_update(p, chosen, int(beta), s), atol=1e-12
        )

    @given(p=prob_vectors(), l1=rates, l2=rates, beta=st.floats(0.0, 1.0), data=st.data())
    def test_normalisation(self, p, l1, l2, beta, data):
        chosen = data.draw(st.integers(0, p.size - 1))
        out = vasla_update(p, chosen, beta, UpdateScheme(l1, l2))
        assert abs(out.sum() - 1.0) < 1e-9
        assert np.all(out >= 0)

    def test_subset_update_leaves_unoffered_weight(self):
        a = VASLA(3, UpdateScheme(0.5, 0.0), [0.2, 0.2, 0.6])
        rng = np.random.default_rng(1)
        choice = a.select_action(rng, [0, 1])
        a.update(1.0)
        assert a.p[2] == pytest.approx(0.6)
        assert a.p[choice] == pytest.approx(0.4 * (0.5 + 0.5 * 0.5))
        assert a.p.sum() == pytest.approx(1.0)

    def test_update_without_choice_is_noop(self):
        a = VASLA(3, UpdateScheme(0.5, 0.5))
        assert a.update(1.0) is False
        np.testing.assert_array_equal(a.p, [1 / 3] * 3)

    def test_singleton_subset_is_forced(self):
        a = VASLA(3, UpdateScheme(0.5, 0.5))
        assert a.select_action(np.random.default_rng(0), [1]) == 1
        assert a.update(0.0) is False


class TestPureChance:
    def test_singleton(self):
        assert pure_chance_select(1, np.random.default_rng(0)) == 0

    def test_uniform_frequency(self):
        rng = np.random.default_rng(7)
        draws = np.array([pure_chance_select(2, rng) for _ in range(100_000)])
        assert 0.49 <= np.mean(draws == 0) <= 0.51

    def test_reproducible(self):
        a = [PureChance(5).select_action(np.random.default_rng(3)) for _ in range(3)]
        assert len(set(a)) == 1
