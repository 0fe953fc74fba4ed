"""Bounded rewrite-sequence trees, exact metric prefixes, adversarial bounds
over scheduler choices, and Monte Carlo estimation.

All tree metrics are exact rationals and are valid lower bounds of their
limits: frontier-cut leaves (depth or node budget exhausted) count toward the
expected-derivation-length mass at their depth but never toward convergence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (
    DepthExceedsBuiltError,
    ExhaustiveNotSchedulableError,
    LimitZeroError,
)
from .parser import parse_term
from .ptrs import Ptrs
from .rewriting import (
    ExhaustiveBranch,
    FirstLexicographic,
    Redex,
    SchedulerPolicy,
    Strategy,
    apply_redex,
    enumerate_redexes,
    make_policy,
    schedule,
)
from .terms import App, Term, Var, apply_subst, match_term, replace_at

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class RstNode:
    id: int
    parent: Optional[int]
    prob: Fraction
    term: Term
    depth: int
    kind: str  # "nf" | "cut" | "inner"


class Rst:
    """Leveled rewrite-sequence tree (a DAG when merge coalesces nodes;
    merged nodes record their first contributing parent)."""

    def __init__(self, nodes, levels, strategy, start, built_depth, merged):
        self.nodes = nodes
        self.levels = levels
        self.strategy = strategy
        self.start = start
        self.built_depth = built_depth
        self.merged = merged
        self._nf_at = [ZERO] * (built_depth + 1)
        self._inner_at = [ZERO] * (built_depth + 1)
        self._cut_at = [ZERO] * (built_depth + 1)
        for n in nodes:
            if n.kind == "nf":
                self._nf_at[n.depth] += n.prob
            elif n.kind == "cut":
                self._cut_at[n.depth] += n.prob
            else:
                self._inner_at[n.depth] += n.prob

    def _check_depth(self, depth: int) -> None:
        if depth < 0 or depth > self.built_depth:
            raise DepthExceedsBuiltError(
                f"depth {depth} outside built range 0..{self.built_depth}"
            )

    def conv_prefix(self, depth: int) -> Fraction:
        """Probability mass of normal-form leaves at depth <= given depth."""
        self._check_depth(depth)
        return sum(self._nf_at[: depth + 1], ZERO)

    def edl_prefix(self, depth: int) -> Fraction:
        """Mass of non-normal-form nodes strictly above the given depth."""
        self._check_depth(depth)
        return sum(self._inner_at[:depth], ZERO) + sum(self._cut_at[:depth], ZERO)

    def frontier(self, depth: int) -> Fraction:
        """Mass still unresolved at the given depth: open nodes there plus
        every earlier frontier cut."""
        self._check_depth(depth)
        return (
            self._inner_at[depth]
            + self._cut_at[depth]
            + sum(self._cut_at[:depth], ZERO)
        )

    def metrics(self) -> "Metrics":
        depths = range(self.built_depth + 1)
        return Metrics(
            conv=tuple(self.conv_prefix(d) for d in depths),
            edl=tuple(self.edl_prefix(d) for d in depths),
            frontier=tuple(self.frontier(d) for d in depths),
        )


@dataclass(frozen=True)
class Metrics:
    """Exact per-depth prefixes; index is the depth."""

    conv: tuple
    edl: tuple
    frontier: tuple


class _FirstRedexFinder:
    """Leftmost search for the (position, rule index)-smallest redex.

    Memoized per subterm so the cost is linear in the number of distinct
    shared subterms, not in the tree size (duplicating rules build terms
    whose tree form is exponentially larger than their dag form). Agrees
    with schedule(enumerate_redexes(...), FirstLexicographic) for f/i/li.
    """

    def __init__(self, p: Ptrs, strategy: Strategy):
        self.p = p
        self.strategy = strategy
        self.cache: dict = {}

    def _local(self, t: Term):
        """Relative position and rule index of t's first redex, or None."""
        if isinstance(t, Var):
            return None
        hit = self.cache.get(t, False)
        if hit is not False:
            return hit
        found = None
        if self.strategy is Strategy.FULL:
            for rule, _ in self.p.root_matches(t):
                found = ((), rule.index)
                break
            if found is None:
                for i, a in enumerate(t.args):
                    inner = self._local(a)
                    if inner is not None:
                        found = ((i + 1,) + inner[0], inner[1])
                        break
        else:
            # innermost: the root is a redex only when all arguments are in
            # normal form; otherwise the leftmost reducible argument wins
            if all(self.p.is_normal_form(a) for a in t.args):
                for rule, _ in self.p.root_matches(t):
                    found = ((), rule.index)
                    break
            else:
                for i, a in enumerate(t.args):
                    inner = self._local(a)
                    if inner is not None:
                        found = ((i + 1,) + inner[0], inner[1])
                        break
        self.cache[t] = found
        return found

    def find(self, t: Term) -> Optional[Redex]:
        from .terms import match_term, subterm_at

        loc = self._local(t)
        if loc is None:
            return None
        pos, rule_index = loc
        rule = self.p.rules[rule_index]
        sigma = match_term(rule.lhs, subterm_at(t, pos))
        return Redex((pos,), rule_index, sigma)


def _first_redex(t: Term, p: Ptrs, strategy: Strategy) -> Optional[Redex]:
    return _FirstRedexFinder(p, strategy).find(t)


def build_rst(
    p: Ptrs,
    start: Term,
    strategy: Strategy,
    policy: SchedulerPolicy,
    max_depth: int,
    max_nodes: int = 500_000,
    merge: bool = False,
) -> Rst:
    """Breadth-first expansion with one scheduled redex per open node.

    Expansion stops at max_depth or when the node budget is exhausted;
    remaining open nodes become frontier cuts. With merge=True, structurally
    equal siblings of one level are coalesced by summing probabilities.
    """
    if isinstance(policy, ExhaustiveBranch):
        raise ExhaustiveNotSchedulableError(
            "build_rst needs a deterministic or random policy"
        )
    if max_depth < 0 or max_nodes < 1:
        raise LimitZeroError("max_depth must be >= 0 and max_nodes >= 1")

    fast_first = isinstance(policy, FirstLexicographic) and strategy in (
        Strategy.FULL,
        Strategy.INNERMOST,
        Strategy.LEFTMOST_INNERMOST,
    )
    finder = _FirstRedexFinder(p, strategy) if fast_first else None

    nodes = [RstNode(0, None, ONE, start, 0, "inner")]
    levels = [[0]]
    level = [0]
    budget_hit = len(nodes) >= max_nodes
    for depth in range(max_depth):
        next_ids: dict = {}
        next_level = []
        for nid in level:
            node = nodes[nid]
            if p.is_normal_form(node.term):
                node.kind = "nf"
                continue
            if budget_hit or len(nodes) >= max_nodes:
                budget_hit = True
                node.kind = "cut"
                continue
            if fast_first:
                redex = finder.find(node.term)
            else:
                redex = schedule(
                    node.term, enumerate_redexes(node.term, p, strategy), policy
                )
            node.kind = "inner"
            dist = apply_redex(node.term, redex, p)
            for q, child in dist:
                prob = node.prob * q
                if merge:
                    known = next_ids.get(child)
                    if known is not None:
                        nodes[known].prob += prob
                        continue
                cid = len(nodes)
                nodes.append(RstNode(cid, nid, prob, child, depth + 1, "inner"))
                next_level.append(cid)
                if merge:
                    next_ids[child] = cid
        if not next_level:
            levels.append([])
            level = []
            break
        levels.append(next_level)
        level = next_level
    for nid in level:
        node = nodes[nid]
        node.kind = "nf" if p.is_normal_form(node.term) else "cut"
    while len(levels) < max_depth + 1:
        levels.append([])
    return Rst(nodes, levels, strategy.value, start, max_depth, merge)


def conv_prefix(rst: Rst, depth: int) -> Fraction:
    return rst.conv_prefix(depth)


def edl_prefix(rst: Rst, depth: int) -> Fraction:
    return rst.edl_prefix(depth)


@dataclass(frozen=True)
class AdversarialBounds:
    min_conv: Fraction
    max_edl: Fraction
    partial: bool
    states: int


def adversarial_bounds(
    p: Ptrs,
    start: Term,
    strategy: Strategy,
    max_depth: int,
    max_states: int = 200_000,
    all_subsets: bool = False,
) -> AdversarialBounds:
    """Exact min of conv_prefix and max of edl_prefix over scheduler choices.

    Depth-bounded game-tree evaluation memoized on (term, remaining depth).
    When the state budget is exhausted the search stops: first it follows
    only the first choice per node, and past twice the budget it scores
    unexplored states as non-converged with no further steps. The result is
    then flagged partial and both numbers are conservative: convergence mass
    and adversarial expected derivation length can only be under-reported.
    """
    if max_depth < 0:
        raise LimitZeroError("max_depth must be >= 0")
    memo_conv: dict = {}
    memo_edl: dict = {}
    dist_cache: dict = {}
    state = {"partial": False}

    def states() -> int:
        return len(memo_conv) + len(memo_edl)

    def options(t: Term) -> list:
        """One list of (probability, child) pairs per available choice;
        expansion depends only on the term, so it is cached across depths."""
        hits = dist_cache.get(t)
        if hits is None:
            hits = [
                apply_redex(t, r, p).pairs
                for r in enumerate_redexes(t, p, strategy, all_subsets=all_subsets)
            ]
            dist_cache[t] = hits
        if states() > max_states and len(hits) > 1:
            state["partial"] = True
            return hits[:1]
        return hits

    def min_conv(t: Term, h: int) -> Fraction:
        if p.is_normal_form(t):
            return ONE
        if h == 0:
            return ZERO
        key = (t, h)
        hit = memo_conv.get(key)
        if hit is not None:
            return hit
        if states() > 2 * max_states:
            state["partial"] = True
            return ZERO
        best = ONE
        for pairs in options(t):
            val = ZERO
            for q, child in pairs:
                val += q * min_conv(child, h - 1)
            if val < best:
                best = val
        memo_conv[key] = best
        return best

    def max_edl(t: Term, h: int) -> Fraction:
        if h == 0 or p.is_normal_form(t):
            return ZERO
        key = (t, h)
        hit = memo_edl.get(key)
        if hit is not None:
            return hit
        if states() > 2 * max_states:
            state["partial"] = True
            return ZERO
        best = ZERO
        for pairs in options(t):
            val = ONE
            for q, child in pairs:
                val += q * max_edl(child, h - 1)
            if val > best:
                best = val
        memo_edl[key] = best
        return best

    conv = min_conv(start, max_depth)
    edl = max_edl(start, max_depth)
    return AdversarialBounds(
        conv, edl, state["partial"], len(memo_conv) + len(memo_edl)
    )


# -- Monte Carlo -----------------------------------------------------------


@dataclass(frozen=True)
class McEstimate:
    samples: int
    cap: int
    terminated_fraction: float
    mean_steps: float  # of terminated runs; 0.0 when none terminated
    std_error: float  # standard error of the terminated fraction
    seed: int
    terminated: int


class _Stream:
    """Buffered uniform draws from one per-sample Philox stream."""

    __slots__ = ("gen", "buf", "i")

    def __init__(self, seed_seq):
        self.gen = np.random.Generator(np.random.Philox(seed_seq))
        self.buf = ()
        self.i = 0

    def draw(self) -> float:
        if self.i >= len(self.buf):
            self.buf = self.gen.random(512).tolist()
            self.i = 0
        v = self.buf[self.i]
        self.i += 1
        return v


class _CapReached(Exception):
    pass


def _compile_rules(p: Ptrs):
    """Per root symbol: list of (lhs, cumulative float probs, branch terms)."""
    table: dict = {}
    for rule in p.rules:
        cum = []
        acc = 0.0
        for q, _ in rule.rhs:
            acc += float(q)
            cum.append(acc)
        cum[-1] = 1.0
        table.setdefault(rule.lhs.sym.name, []).append(
            (rule.lhs, cum, rule.rhs.support())
        )
    return table


def _run_fast(p: Ptrs, start: Term, cap: int, stream: _Stream) -> tuple:
    """Leftmost-innermost, first-rule evaluation with an explicit stack.

    Equivalent to the generic stepper under (li, first) and (i, first);
    steps are counted identically and branch draws happen in the same order.
    Terms are interned for the run so normal-form checks are id lookups.
    """
    rules = _compile_rules(p)
    intern: dict = {}
    nf: set = set()
    steps = 0

    def mk(sym, args):
        key = (sym.name, tuple(map(id, args)))
        t = intern.get(key)
        if t is None:
            t = App(sym, args)
            intern[key] = t
        return t

    def mk_var(name):
        t = intern.get(name)
        if t is None:
            t = Var(name)
            intern[name] = t
        return t

    def instantiate(t, sigma):
        if isinstance(t, Var):
            return sigma[t.name]
        return mk(t.sym, tuple(instantiate(a, sigma) for a in t.args))

    def intern_term(t):
        if isinstance(t, Var):
            return mk_var(t.name)
        return mk(t.sym, tuple(intern_term(a) for a in t.args))

    def root_step(t):
        """One root rewrite of t (arguments in NF); returns the new term or
        None when the root matches no rule (then t is a normal form)."""
        nonlocal steps
        for lhs, cum, branches in rules.get(t.sym.name, ()):
            sigma = match_term(lhs, t)
            if sigma is None:
                continue
            if steps >= cap:
                raise _CapReached
            steps += 1
            if len(branches) == 1:
                rhs = branches[0]
            else:
                u = stream.draw()
                k = 0
                while u > cum[k]:
                    k += 1
                rhs = branches[k]
            return instantiate(rhs, sigma)
        return None

    # frame = [symbol, evaluated args, pending args (reversed)]; the bottom
    # frame is a sentinel collecting the final value
    frames = [[None, [], []]]

    def post(t):
        """Route t: record it if in NF, descend into arguments otherwise;
        nullary symbols are root-reduced in place."""
        while True:
            if isinstance(t, Var) or id(t) in nf:
                frames[-1][1].append(t)
                return
            if t.args:
                frames.append([t.sym, [], list(reversed(t.args))])
                return
            nxt = root_step(t)
            if nxt is None:
                nf.add(id(t))
                frames[-1][1].append(t)
                return
            t = nxt

    try:
        post(intern_term(start))
        while len(frames) > 1:
            frame = frames[-1]
            if frame[2]:
                post(frame[2].pop())
                continue
            frames.pop()
            t = mk(frame[0], tuple(frame[1]))
            # arguments are normal forms: reduce at the root, then route the
            # result (which may need further evaluation)
            while True:
                if id(t) in nf:
                    frames[-1][1].append(t)
                    break
                nxt = root_step(t)
                if nxt is None:
                    nf.add(id(t))
                    frames[-1][1].append(t)
                    break
                t = nxt
                if isinstance(t, Var) or id(t) in nf:
                    frames[-1][1].append(t)
                    break
                if t.args:
                    frames.append([t.sym, [], list(reversed(t.args))])
                    break
        return steps, True
    except _CapReached:
        return steps, False


def _run_generic(
    p: Ptrs, start: Term, strategy: Strategy, policy_name: str, cap: int, stream: _Stream
) -> tuple:
    t = start
    steps = 0
    while True:
        redexes = enumerate_redexes(t, p, strategy)
        if not redexes:
            return steps, True
        if steps >= cap:
            return steps, False
        if policy_name == "random" and len(redexes) > 1:
            redex = redexes[int(stream.draw() * len(redexes))]
        elif policy_name == "rightmost":
            best = max(r.positions[0] for r in redexes)
            redex = min(
                (r for r in redexes if r.positions[0] == best),
                key=lambda r: r.rule_index,
            )
        else:
            redex = redexes[0]
        dist = apply_redex(t, redex, p)
        if len(dist) == 1:
            t = dist.pairs[0][1]
        else:
            u = stream.draw()
            acc = 0.0
            t = dist.pairs[-1][1]
            for q, child in dist:
                acc += float(q)
                if u <= acc:
                    t = child
                    break
        steps += 1


def monte_carlo(
    p: Ptrs,
    start: Term,
    strategy: Strategy,
    policy,
    samples: int,
    cap: int,
    seed: int = 0,
) -> McEstimate:
    """Independent single-path runs; each sample draws from its own stream
    derived from (seed, sample index), so results do not depend on the order
    or partitioning in which samples are evaluated."""
    if samples <= 0 or cap <= 0:
        raise LimitZeroError("samples and cap must be positive")
    policy_name = policy.name if isinstance(policy, SchedulerPolicy) else str(policy)
    if policy_name == "exhaustive":
        raise ExhaustiveNotSchedulableError("monte_carlo needs a per-step policy")

    fast = policy_name == "first" and strategy in (
        Strategy.INNERMOST,
        Strategy.LEFTMOST_INNERMOST,
    )
    children = np.random.SeedSequence(seed).spawn(samples)
    terminated = 0
    total_steps_terminated = 0
    for i in range(samples):
        stream = _Stream(children[i])
        if fast:
            steps, ok = _run_fast(p, start, cap, stream)
        else:
            steps, ok = _run_generic(p, start, strategy, policy_name, cap, stream)
        if ok:
            terminated += 1
            total_steps_terminated += steps
    frac = terminated / samples
    mean = total_steps_terminated / terminated if terminated else 0.0
    se = math.sqrt(frac * (1.0 - frac) / samples)
    return McEstimate(samples, cap, frac, mean, se, seed, terminated)


# -- export / import --------------------------------------------------------


def export_rst(rst: Rst, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(
            {
                "strategy": rst.strategy,
                "start": str(rst.start),
                "nodes": [
                    {
                        "id": n.id,
                        "parent": n.parent,
                        "p": str(n.prob),
                        "term": str(n.term),
                        "depth": n.depth,
                        "kind": n.kind,
                    }
                    for n in rst.nodes
                ],
            },
            indent=2,
        )
    if fmt == "dot":
        lines = ["digraph rst {"]
        for n in rst.nodes:
            label = f"{n.prob} : {n.term}".replace('"', '\\"')
            shape = ' shape=box' if n.kind == "nf" else ""
            lines.append(f'  n{n.id} [label="{label}"{shape}];')
        for n in rst.nodes:
            if n.parent is not None:
                lines.append(f"  n{n.parent} -> n{n.id};")
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown export format {fmt!r}")


def import_rst(text: str, p: Optional[Ptrs] = None) -> Rst:
    """Rebuild an Rst from its JSON export (terms parsed in p's context)."""
    data = json.loads(text)
    nodes = [
        RstNode(
            d["id"],
            d["parent"],
            Fraction(d["p"]),
            parse_term(d["term"], p),
            d["depth"],
            d["kind"],
        )
        for d in data["nodes"]
    ]
    built = max((n.depth for n in nodes), default=0)
    levels = [[] for _ in range(built + 1)]
    for n in nodes:
        levels[n.depth].append(n.id)
    return Rst(nodes, levels, data["strategy"], parse_term(data["start"], p), built, False)
