"""Redex enumeration and single-step expansion for the four strategies."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .errors import ExhaustiveNotSchedulableError, InvalidRedexError
from .ptrs import MultiDistribution, Ptrs
from .terms import App, Term, Var, apply_subst, positions, replace_at, subterm_at


class Strategy(Enum):
    FULL = "f"
    INNERMOST = "i"
    LEFTMOST_INNERMOST = "li"
    SIMULTANEOUS_INNERMOST = "sim"


@dataclass(frozen=True)
class Redex:
    """One rewrite opportunity: rule + substitution at parallel positions.

    A singleton position is an ordinary step; several positions describe a
    simultaneous step on structurally equal copies of the same redex.
    """

    positions: tuple
    rule_index: int
    subst: dict = field(compare=False)

    @property
    def position(self):
        return self.positions[0]


def _args_in_nf(t: Term, p: Ptrs) -> bool:
    return isinstance(t, App) and all(p.is_normal_form(a) for a in t.args)


def enumerate_redexes(t: Term, p: Ptrs, strategy: Strategy, all_subsets: bool = False) -> list:
    """All redexes of t under the strategy, in deterministic order.

    Positions are ordered leftmost-outermost lexicographic, ties by rule
    index. For the simultaneous strategy the default listing is every
    singleton innermost redex followed by every maximal group of parallel,
    structurally equal innermost redexes with the same rule; `all_subsets`
    additionally lists every smaller group of size at least two.
    """
    singles = []
    for pos, sub in sorted_positions(t):
        for rule, sigma in p.root_matches(sub):
            if strategy is not Strategy.FULL and not _args_in_nf(sub, p):
                continue
            singles.append((pos, rule.index, sigma, sub))

    if strategy is Strategy.LEFTMOST_INNERMOST and singles:
        best = min(pos for pos, _, _, _ in singles)
        singles = [s for s in singles if s[0] == best]

    redexes = [Redex((pos, ), idx, sigma) for pos, idx, sigma, _ in singles]

    if strategy is Strategy.SIMULTANEOUS_INNERMOST:
        groups: dict = {}
        for pos, idx, sigma, sub in singles:
            groups.setdefault((idx, sub), []).append((pos, sigma))
        group_redexes = []
        for (idx, _), members in groups.items():
            if len(members) < 2:
                continue
            members.sort()
            all_pos = tuple(pos for pos, _ in members)
            sigma = members[0][1]
            if all_subsets:
                for subset in _subsets(all_pos):
                    if len(subset) >= 2:
                        group_redexes.append(Redex(subset, idx, sigma))
            else:
                group_redexes.append(Redex(all_pos, idx, sigma))
        group_redexes.sort(key=lambda r: (r.positions[0], r.rule_index, len(r.positions), r.positions))
        redexes.extend(group_redexes)
    return redexes


def _subsets(items: tuple):
    n = len(items)
    for mask in range(1, 1 << n):
        yield tuple(items[i] for i in range(n) if mask >> i & 1)


def sorted_positions(t: Term):
    """Preorder traversal already yields leftmost-outermost lexicographic order."""
    return positions(t)


def apply_redex(t: Term, r: Redex, p: Ptrs) -> MultiDistribution:
    """Expand one redex into the multi-distribution of result terms.

    Every branch is placed at every position of the redex; multiset
    identity of the rule's branches is preserved.
    """
    try:
        rule = p.rules[r.rule_index]
    except IndexError:
        raise InvalidRedexError(f"no rule with index {r.rule_index}") from None
    expected = apply_subst(r.subst, rule.lhs)
    for pos in r.positions:
        if subterm_at(t, pos) != expected:
            raise InvalidRedexError(
                f"subterm at {pos} does not match rule {r.rule_index}"
            )
    pairs = []
    for prob, branch in rule.rhs:
        instance = apply_subst(r.subst, branch)
        result = t
        for pos in r.positions:
            result = replace_at(result, pos, instance)
        pairs.append((prob, result))
    return MultiDistribution(pairs)


class SchedulerPolicy:
    name = "abstract"

    def choose(self, t: Term, redexes: list) -> Optional[Redex]:
        raise NotImplementedError


class FirstLexicographic(SchedulerPolicy):
    """Smallest position in leftmost-outermost order, then smallest rule."""

    name = "first"

    def choose(self, t, redexes):
        if not redexes:
            return None
        return min(redexes, key=_redex_key)


class RightmostInnermost(SchedulerPolicy):
    """Greatest position in leftmost-outermost order, then smallest rule."""

    name = "rightmost"

    def choose(self, t, redexes):
        if not redexes:
            return None
        best = max(redexes, key=lambda r: r.positions[0])
        candidates = [r for r in redexes if r.positions[0] == best.positions[0]]
        return min(candidates, key=_redex_key)


class RandomUniform(SchedulerPolicy):
    """Seeded uniform choice; the generator state lives on the policy."""

    name = "random"

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def choose(self, t, redexes):
        if not redexes:
            return None
        if len(redexes) == 1:
            return redexes[0]
        return redexes[self.rng.randrange(len(redexes))]


class ExhaustiveBranch(SchedulerPolicy):
    """Marker policy: all choices are explored by the adversarial search."""

    name = "exhaustive"

    def choose(self, t, redexes):
        raise ExhaustiveNotSchedulableError(
            "exhaustive branching is resolved by adversarial_bounds, not schedule()"
        )


def _redex_key(r: Redex):
    return (r.positions[0], r.rule_index, len(r.positions), r.positions)


def schedule(t: Term, redexes: list, policy: SchedulerPolicy) -> Optional[Redex]:
    """Pick the next redex under the policy; None iff no redex exists."""
    if isinstance(policy, ExhaustiveBranch):
        raise ExhaustiveNotSchedulableError(
            "exhaustive branching is resolved by adversarial_bounds, not schedule()"
        )
    return policy.choose(t, redexes)


def make_policy(name: str, seed: int = 0) -> SchedulerPolicy:
    if name == "first":
        return FirstLexicographic()
    if name == "rightmost":
        return RightmostInnermost()
    if name == "random":
        return RandomUniform(seed)
    if name == "exhaustive":
        return ExhaustiveBranch()
    raise ValueError(f"unknown scheduler {name!r}")
