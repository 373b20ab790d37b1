import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vdhla.automata import FSLA, AutomatonState
from vdhla.environments import StationaryEnv
from vdhla.experiments import run_loop
from vdhla.hybrid import AVDHLA, SVDHLA, DepthAction, HybridAutomaton


class FixedRng:
    """Stands in for a Generator: ``choice`` always returns the same index."""

    def __init__(self, index):
        self.index = index

    def choice(self, n, p=None):
        return self.index


def test_controllers_start_uniform():
    h = AVDHLA(4, [1, 3, 2, 3], 0.1, 0.1)
    assert len(h.controllers) == 4
    for c in h.controllers:
        np.testing.assert_allclose(c.p, [1 / 3] * 3)
    assert len(SVDHLA(4, 2, 0.1, 0.1).controllers) == 1


def test_depth_of():
    assert [SVDHLA(2, 4, 0.1, 0.0).depth_of(a) for a in range(2)] == [4, 4]
    h = AVDHLA(4, [1, 3, 2, 3], 0.5, 0.5)
    assert [h.depth_of(a) for a in range(4)] == [1, 3, 2, 3]


def test_symmetric_trace_gives_one_third():
    # Action 2 (index 1) has just been entered at depth 2: reward into the
    # depth state, penalty back out, penalty at the boundary forces a switch.
    h = SVDHLA(4, 2, 0.5, 0.5, start_action=1)
    h.update(1)
    assert (h.depth_counter[0], h.transition_counter[0]) == (1, 1)
    h.update(0)
    assert (h.depth_counter[0], h.transition_counter[0]) == (1, 2)
    h.update(0)
    assert h.last_beta == 1 / 3
    assert h.fsla.action == 2
    assert (h.depth_counter[0], h.transition_counter[0]) == (0, 0)
    assert h.pending_switch == 1


def test_all_depth_rewards_then_switch():
    # n = 3 rewards into the depth state, then one switching penalty: 3 / 4
    h = SVDHLA(2, 1, 0.1, 0.0)
    for _ in range(3):
        h.update(1)
    h.update(0)
    assert h.last_beta == pytest.approx(3 / 4)


def test_immediate_switch_gives_zero():
    h = SVDHLA(2, 1, 0.1, 0.0)
    h.update(0)
    assert h.last_beta == 0.0


def test_asymmetric_example():
    h = AVDHLA(4, [1, 3, 2, 3], 0.1, 0.1, controller_probs=[0.2, 0.2, 0.6])
    ctrl = h.controllers[0]
    ctrl.select_action(FixedRng(DepthAction.SHRINK), [0, 1, 2])
    # Penalty at the edge of action 1: its controller is punished for Shrink.
    h.update(0)
    assert h.last_beta == 0.0
    np.testing.assert_allclose(ctrl.p, [0.23, 0.23, 0.54], atol=1e-12)
    # Depth 1 excludes Shrink; the second offered option is Stop.
    assert h.select_action(FixedRng(1)) == 1
    assert h.depths == [1, 3, 2, 3]
    assert ctrl._last_subset == (DepthAction.GROW, DepthAction.STOP)
    assert h.fsla.state == AutomatonState(1, 3)
    h.update(1)
    assert (h.depth_counter[1], h.transition_counter[1]) == (0, 1)
    h.update(1)
    assert (h.depth_counter[1], h.transition_counter[1]) == (1, 2)


def test_symmetric_grow_moves_every_depth():
    h = SVDHLA(3, 3, 0.1, 0.0)
    h.update(0)
    assert h.pending_switch == 0
    assert h.select_action(FixedRng(DepthAction.GROW)) == 1
    assert h.depths == [4, 4, 4]
    assert h.fsla.state == AutomatonState(1, 4)


def test_asymmetric_shrink_touches_departed_action_only():
    h = AVDHLA(3, [3, 3, 3], 0.1, 0.0)
    h.update(0)
    h.select_action(FixedRng(DepthAction.SHRINK))
    assert h.depths == [2, 3, 3]


def test_no_pending_switch_is_pass_through():
    h = SVDHLA(3, 2, 0.1, 0.0)
    before = h.controllers[0].p.copy()
    assert h.select_action(FixedRng(0)) == 0
    assert h.depths == [2, 2, 2]
    np.testing.assert_array_equal(h.controllers[0].p, before)


def test_grow_at_cap_is_stop():
    h = SVDHLA(2, 2, 0.1, 0.0, max_depth=2)
    h.update(0)
    h.update(0)
    h.select_action(FixedRng(DepthAction.GROW))
    assert h.depths == [2, 2]


def test_rejects_bad_construction():
    with pytest.raises(ValueError):
        HybridAutomaton(2, [1, 2], SVDHLA(2, 1, 0, 0).scheme, symmetric=True)
    with pytest.raises(ValueError):
        SVDHLA(2, 30, 0.1, 0.0)
    with pytest.raises(ValueError):
        SVDHLA(2, 1, 0.1, 0.0).update(2)


@settings(max_examples=60, deadline=None)
@given(
    symmetric=st.booleans(),
    k=st.integers(2, 5),
    depth=st.integers(1, 4),
    seed=st.integers(0, 2**32 - 1),
    steps=st.integers(50, 600),
)
def test_structural_invariants(symmetric, k, depth, seed, steps):
    cls = SVDHLA if symmetric else AVDHLA
    h = cls(k, depth, 0.2, 0.05, max_depth=6)
    rng = np.random.default_rng(seed)
    for _ in range(steps):
        before = h.depths
        pending = h.pending_switch
        a = h.select_action(rng)
        after = h.depths
        changed = [i for i in range(k) if before[i] != after[i]]
        if symmetric:
            assert len(set(after)) == 1
        else:
            assert changed in ([], [pending])
        assert all(1 <= d <= 6 for d in after)
        assert 1 <= h.fsla.position <= h.depth_of(a)
        signal = int(rng.random() < 0.5)
        h.update(signal)
        for dc, tc in zip(h.depth_counter, h.transition_counter):
            assert 0 <= dc <= tc
        if h.pending_switch is not None:
            scope = 0 if symmetric else h.pending_switch
            assert h.depth_counter[scope] == h.transition_counter[scope] == 0
            assert 0.0 <= h.last_beta <= 1.0


def test_forced_stop_matches_fsla():
    env_probs = [0.6, 0.3, 0.5]
    for seed in range(5):
        h = SVDHLA(3, 2, 0.0, 0.0, controller_probs=[0.0, 1.0, 0.0])
        f = FSLA(3, 2)
        streams = [np.random.SeedSequence(seed).spawn(2) for _ in range(2)]
        rngs = [[np.random.default_rng(s) for s in pair] for pair in streams]
        th = run_loop(h, StationaryEnv(env_probs), 2000, *rngs[0])
        tf = run_loop(f, StationaryEnv(env_probs), 2000, *rngs[1])
        np.testing.assert_array_equal(th.actions, tf.actions)
        np.testing.assert_array_equal(th.rewards, tf.rewards)
        assert h.depths == [2, 2, 2]
