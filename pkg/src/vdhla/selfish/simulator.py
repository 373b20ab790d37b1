"""Pool-level proof-of-work simulator: an honest pool against a selfish pool.

Time advances one tick per mined block. The honest pool publishes at once
and mines on the tip its fork-choice policy selects. The selfish pool runs
the Eyal-Sirer withhold/release strategy, measured against the honest
pool's tip. Broadcast is instantaneous apart from deliberate withholding.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .chain import GENESIS, HONEST, SELFISH, BlockTree, choose_branch, longest_branch
from .defense import DefensePolicy, controller_feedback, update_fail_safe

NO_BRANCH = -1


@dataclass
class SimulationSpec:
    total_blocks: int = 10_000
    alpha: float = 0.3
    gamma: float = 0.5
    seeds: list[int] = field(default_factory=lambda: list(range(30)))
    defense: DefensePolicy = field(default_factory=DefensePolicy)

    def validate(self) -> "SimulationSpec":
        if not isinstance(self.total_blocks, int) or self.total_blocks < 1:
            raise ValueError("total_blocks must be a positive integer")
        if not 0.0 <= self.alpha < 0.5:
            raise ValueError("alpha must lie in [0, 0.5)")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        self.defense.validate()
        return self


@dataclass(frozen=True)
class MineEvent:
    tick: int
    block: int
    creator: int
    published: tuple[int, ...]
    honest_tip: int


@dataclass(frozen=True)
class SimulationResult:
    alpha: float
    seed: int
    defense: str
    main_chain: tuple[int, ...]
    selfish_blocks: int
    honest_blocks: int
    final_K: int
    weight_decisions: int
    total_decisions: int
    K_min_seen: int
    K_max_seen: int

    @property
    def weight_decision_fraction(self) -> float:
        return self.weight_decisions / self.total_decisions if self.total_decisions else 0.0


class Simulation:
    """One seeded run. ``rng`` drives mining; the controller has its own stream."""

    def __init__(self, spec: SimulationSpec, seed: int):
        spec.validate()
        self.spec = spec
        self.seed = seed
        mine_ss, ctrl_ss = np.random.SeedSequence(seed).spawn(2)
        self.rng = np.random.default_rng(mine_ss)
        self.controller_rng = np.random.default_rng(ctrl_ss)
        # A fresh copy, so every run starts from the initial K and empty counters.
        self.policy = dataclasses.replace(spec.defense)
        self.tree = BlockTree()
        self.tick = 0
        self.honest_tip = GENESIS
        self.selfish_tip = GENESIS
        self.selfish_public = NO_BRANCH
        self.split = False
        self.racing = False
        self.weight_decisions = 0
        self.total_decisions = 0
        self.K_seen = [self.policy.K, self.policy.K]
        self._settled = None
        self._nik = self.policy.kind == "nik"
        self._u = None
        self._u_pos = 0

    # -- fork choice -------------------------------------------------------

    def _fork_and_weights(self, a: int, b: int) -> tuple[int, int, int]:
        """Fork point of tips ``a`` and ``b`` and their weights, in one walk.

        Same result as ``branch_weight`` on the two paths: only heights both
        branches reach are compared, from the shorter tip down to the fork.
        """
        t = self.tree
        height, parent = t.height, t.parent
        if self.policy.weight_mode == "creation":
            stamps, sign = t.created, 1
        else:
            # Earliest arrival plays the role of the newest block.
            stamps, sign = t.published, -1
        while height[a] > height[b]:
            a = parent[a]
        while height[b] > height[a]:
            b = parent[b]
        w0 = w1 = 0
        while a != b:
            diff = sign * (stamps[a] - stamps[b])
            if diff > 0:
                w0 += 1
            elif diff < 0:
                w1 += 1
            a, b = parent[a], parent[b]
        return a, w0, w1

    def resolve(self) -> None:
        """Re-run the honest pool's fork choice on its current view."""
        rival = self.selfish_public
        if rival == NO_BRANCH:
            self.split = False
            return
        fork, w0, w1 = self._fork_and_weights(self.honest_tip, rival)
        if fork == rival:
            self.selfish_public = NO_BRANCH
            self.split = False
            return
        if fork == self.honest_tip:
            # Plain extension of the honest tip, nothing to choose.
            self._adopt_rival()
            return
        height = self.tree.height
        lengths = [height[self.honest_tip] - height[fork], height[rival] - height[fork]]
        if self._nik:
            decision = choose_branch(lengths, [w0, w1], self.policy.K)
            self.policy.record(decision.by_weight)
            self.total_decisions += 1
            self.weight_decisions += int(decision.by_weight)
        else:
            decision = longest_branch(lengths)
        choice = decision.choice
        if choice is None:
            self.split = True
        elif choice == 1:
            self._adopt_rival()
        else:
            self.split = False

    def _adopt_rival(self) -> None:
        self.honest_tip = self.selfish_public
        self.selfish_public = NO_BRANCH
        self.split = False

    # -- selfish strategy --------------------------------------------------

    def _publish_to(self, block: int) -> list[int]:
        t = self.tree
        out = []
        b = block
        while t.published[b] < 0:
            t.published[b] = self.tick
            out.append(b)
            b = t.parent[b]
        if out:
            self.selfish_public = block
        out.reverse()
        return out

    def _selfish_react(self) -> list[int]:
        t = self.tree
        h_honest = t.height[self.honest_tip]
        lead = t.height[self.selfish_tip] - h_honest
        if lead < 0:
            self.selfish_tip = self.honest_tip
            self.selfish_public = NO_BRANCH
            self.racing = False
            return []
        if lead == 0:
            self.racing = True
            return self._publish_to(self.selfish_tip)
        if lead == 1:
            return self._publish_to(self.selfish_tip)
        return self._publish_to(t.ancestor_at(self.selfish_tip, h_honest))

    # -- main loop ---------------------------------------------------------

    def step(self) -> MineEvent:
        block, creator, published = self._mine()
        return MineEvent(self.tick, block, creator, tuple(published), self.honest_tip)

    def _draws(self) -> np.ndarray:
        # Mining and tie-side uniforms, drawn in bulk: column 0 picks the
        # creator, column 1 the branch honest miners extend during a split.
        if self._u is None or self._u_pos >= len(self._u):
            self._u = self.rng.random((max(self.spec.total_blocks, 1), 2))
            self._u_pos = 0
        row = self._u[self._u_pos]
        self._u_pos += 1
        return row

    def _mine(self) -> tuple[int, int, list[int]]:
        self.tick += 1
        tick, t = self.tick, self.tree
        u_creator, u_side = self._draws()
        if u_creator < self.spec.alpha:
            block = t.add(self.selfish_tip, SELFISH, tick, publish=False)
            self.selfish_tip = block
            published = []
            if self.racing:
                self.racing = False
                published = self._publish_to(block)
                self.resolve()
            creator = SELFISH
        else:
            parent = self.honest_tip
            if self.split and u_side < self.spec.gamma:
                parent = self.selfish_public
            block = t.add(parent, HONEST, tick, publish=True)
            self.honest_tip = block
            if parent == self.selfish_public:
                self.selfish_public = NO_BRANCH
            self.split = False
            self.racing = False
            published = self._selfish_react()
            self.resolve()
            creator = HONEST
        if self._nik and tick % self.policy.tau == 0:
            self._tau_boundary()
        return block, creator, published

    def _tau_boundary(self) -> None:
        self.resolve()
        policy = self.policy
        if self.tick % (policy.tau * policy.theta) == 0:
            controller_feedback(policy, self.controller_rng)
        update_fail_safe(policy, self.controller_rng)
        self.K_seen[0] = min(self.K_seen[0], policy.K)
        self.K_seen[1] = max(self.K_seen[1], policy.K)

    def run(self) -> SimulationResult:
        mine = self._mine
        for _ in range(self.spec.total_blocks - self.tick):
            mine()
        return self.result()

    def main_tip(self) -> int:
        """Tip of the chain the honest pool settles on; a live split is decided by gamma.

        The split draw is made once per tick, so repeated calls agree.
        """
        if self._settled is None or self._settled[0] != self.tick:
            tip = self.honest_tip
            if self.split and self.rng.random() < self.spec.gamma:
                tip = self.selfish_public
            self._settled = (self.tick, tip)
        return self._settled[1]

    def result(self) -> SimulationResult:
        chain = tuple(self.tree.chain(self.main_tip()))
        creators = self.tree.creator
        selfish = sum(creators[b] for b in chain)
        return SimulationResult(
            alpha=self.spec.alpha,
            seed=self.seed,
            defense=self.policy.label,
            main_chain=chain,
            selfish_blocks=selfish,
            honest_blocks=len(chain) - selfish,
            final_K=self.policy.K,
            weight_decisions=self.weight_decisions,
            total_decisions=self.total_decisions,
            K_min_seen=self.K_seen[0],
            K_max_seen=self.K_seen[1],
        )


def mine_step(sim: Simulation) -> MineEvent:
    return sim.step()


def simulate(spec: SimulationSpec, seed: int) -> SimulationResult:
    return Simulation(spec, seed).run()


def relative_revenue(result: SimulationResult) -> dict[str, float]:
    """Share of main-chain blocks credited to each pool."""
    n = result.selfish_blocks + result.honest_blocks
    if n == 0:
        return {"selfish": 0.0, "honest": 0.0}
    return {"selfish": result.selfish_blocks / n, "honest": result.honest_blocks / n}
