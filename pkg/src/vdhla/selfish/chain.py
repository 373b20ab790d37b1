"""Block tree, branches and the fork-choice rules (length vs weight)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

HONEST = 0
SELFISH = 1
GENESIS = 0


@dataclass(frozen=True)
class Block:
    id: int
    parent: int | None
    height: int
    creator: int
    creation_time: int
    publish_time: int | None


class BlockTree:
    """Append-only block store kept as parallel lists for speed."""

    def __init__(self):
        self.parent = [-1]
        self.height = [0]
        self.creator = [HONEST]
        self.created = [0]
        self.published = [0]

    def __len__(self) -> int:
        return len(self.parent)

    def add(self, parent: int, creator: int, tick: int, publish: bool) -> int:
        bid = len(self.parent)
        self.parent.append(parent)
        self.height.append(self.height[parent] + 1)
        self.creator.append(creator)
        self.created.append(tick)
        self.published.append(tick if publish else -1)
        return bid

    def block(self, bid: int) -> Block:
        parent = self.parent[bid]
        pub = self.published[bid]
        return Block(
            id=bid,
            parent=None if parent < 0 else parent,
            height=self.height[bid],
            creator=self.creator[bid],
            creation_time=self.created[bid],
            publish_time=None if pub < 0 else pub,
        )

    def ancestor_at(self, bid: int, height: int) -> int:
        parent, h = self.parent, self.height
        while h[bid] > height:
            bid = parent[bid]
        return bid

    def common_ancestor(self, a: int, b: int) -> int:
        h, parent = self.height, self.parent
        while h[a] > h[b]:
            a = parent[a]
        while h[b] > h[a]:
            b = parent[b]
        while a != b:
            a, b = parent[a], parent[b]
        return a

    def is_ancestor(self, a: int, b: int) -> bool:
        """True when ``a`` lies on the chain ending at ``b`` (inclusive)."""
        return self.height[a] <= self.height[b] and self.ancestor_at(b, self.height[a]) == a

    def path(self, tip: int, stop: int) -> list[int]:
        """Blocks strictly above ``stop`` up to ``tip``, lowest first."""
        out = []
        parent = self.parent
        while tip != stop:
            out.append(tip)
            tip = parent[tip]
        out.reverse()
        return out

    def chain(self, tip: int) -> list[int]:
        return self.path(tip, -1)[1:]

    def branches(self, tips: Sequence[int]) -> list["Branch"]:
        """Branches of the fork spanned by ``tips``, measured from their common ancestor."""
        fork = tips[0]
        for t in tips[1:]:
            fork = self.common_ancestor(fork, t)
        paths = [self.path(t, fork) for t in tips]
        weights = branch_weight([[(self.height[b], self.created[b]) for b in p] for p in paths])
        return [Branch(tip=t, length=len(p), weight=w) for t, p, w in zip(tips, paths, weights)]


@dataclass(frozen=True)
class Branch:
    tip: int
    length: int
    weight: int


@dataclass(frozen=True)
class Decision:
    """Outcome of the fork choice; several candidates mean an unresolved tie."""

    candidates: tuple[int, ...]
    by_weight: bool

    @property
    def choice(self) -> int | None:
        return self.candidates[0] if len(self.candidates) == 1 else None


def branch_weight(branches: Sequence[Sequence[tuple[int, int]]]) -> list[int]:
    """Weight of each branch from ``(height, creation_time)`` pairs.

    At every height present in two or more branches, the branch holding the
    most recently created block there gains one. Equal newest times at a
    height give nobody the point.
    """
    weights = [0] * len(branches)
    by_height: dict[int, list[tuple[int, int]]] = {}
    for idx, blocks in enumerate(branches):
        for height, created in blocks:
            by_height.setdefault(height, []).append((created, idx))
    for entries in by_height.values():
        if len(entries) < 2:
            continue
        newest = max(c for c, _ in entries)
        owners = [i for c, i in entries if c == newest]
        if len(owners) == 1:
            weights[owners[0]] += 1
    return weights


def choose_branch(lengths: Sequence[int], weights: Sequence[int], fail_safe: int) -> Decision:
    """Fork choice with fail-safe margin ``fail_safe``.

    The longest branch wins outright when it leads the runner-up by strictly
    more than ``fail_safe`` blocks; otherwise the heaviest branch wins.
    """
    if len(lengths) < 2 or len(lengths) != len(weights):
        raise ValueError("a fork needs at least two branches with matching weights")
    if len(lengths) == 2:
        (l0, l1), (w0, w1) = lengths, weights
        if abs(l0 - l1) > fail_safe:
            return Decision((0,) if l0 > l1 else (1,), by_weight=False)
        return Decision((0,) if w0 > w1 else (1,) if w1 > w0 else (0, 1), by_weight=True)
    order = sorted(range(len(lengths)), key=lambda i: lengths[i], reverse=True)
    if lengths[order[0]] - lengths[order[1]] > fail_safe:
        return Decision((order[0],), by_weight=False)
    top = max(weights)
    return Decision(tuple(i for i, w in enumerate(weights) if w == top), by_weight=True)


def longest_branch(lengths: Sequence[int]) -> Decision:
    """Plain longest-chain rule; equal lengths are left as a tie."""
    top = max(lengths)
    return Decision(tuple(i for i, l in enumerate(lengths) if l == top), by_weight=False)
