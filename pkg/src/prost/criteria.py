"""Decidable property checkers: linearity, erasure, overlaps, bounded local
confluence, and a sound sufficient check for spareness."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import NotATrsError
from .ptrs import Ptrs, enumerate_basic_terms
from .terms import (
    App,
    Term,
    Var,
    apply_subst,
    is_linear,
    positions,
    rename_vars,
    replace_at,
    unify,
    variables,
)

RENAME_SUFFIX = "_r"


@dataclass(frozen=True)
class Overlap:
    """Left-hand sides of rules i and j unify at position `position` of lhs_i.

    The unifier is over lhs_i's variables and lhs_j's variables renamed with
    the suffix "_r"; `root` marks overlaps at the empty position.
    """

    rule_i: int
    rule_j: int
    position: tuple
    unifier: dict = field(compare=False)
    root: bool = False


def check_linearities(p: Ptrs) -> tuple:
    """(LL, RL, NE) lifted to probabilistic rules branch by branch."""
    ll = all(is_linear(r.lhs) for r in p.rules)
    rl = all(is_linear(t) for r in p.rules for t in r.rhs.support())
    ne = all(
        variables(r.lhs) <= variables(t)
        for r in p.rules
        for t in r.rhs.support()
    )
    return ll, rl, ne


def critical_overlaps(p: Ptrs) -> list:
    """All overlaps between (renamed-apart) rules.

    Self-overlaps at the root are excluded; root overlaps between distinct
    rules are reported once, for the smaller index pair. Output order is
    (rule index, position, partner index).
    """
    out = []
    for i, ri in enumerate(p.rules):
        for j, rj in enumerate(p.rules):
            lhs_j = rename_vars(rj.lhs, RENAME_SUFFIX)
            for pos, sub in positions(ri.lhs):
                if isinstance(sub, Var):
                    continue
                if pos == ():
                    if i == j or i > j:
                        continue
                theta = unify(sub, lhs_j)
                if theta is not None:
                    out.append(Overlap(i, j, pos, theta, pos == ()))
    out.sort(key=lambda o: (o.rule_i, o.position, o.rule_j))
    return out


def check_no_os_or(overlaps: list, left_linear: bool) -> tuple:
    """(NO, OS, OR) from an overlap listing and left-linearity."""
    no = not overlaps
    os_ = all(o.root for o in overlaps)
    return no, os_, no and left_linear


def _successors(t: Term, p: Ptrs) -> set:
    """All one-step full-rewriting successors of t (trivial probabilities)."""
    out = set()
    for pos, sub in positions(t):
        for rule, sigma in p.root_matches(sub):
            for _, r in rule.rhs:
                out.add(replace_at(t, pos, apply_subst(sigma, r)))
    return out


def check_wcr_bounded(p: Ptrs, depth: int, state_cap: int = 5000) -> str:
    """Bounded local-confluence check for trivial-probability systems.

    "yes" when every critical pair joins within `depth` steps on each side;
    "no" when some pair's full reachable sets were exhausted within the bound
    and are disjoint; "unknown" otherwise.
    """
    if not p.trivial_probabilities:
        raise NotATrsError("local confluence is only checked for trivial probabilities")
    if depth < 0:
        raise ValueError("depth must be non-negative")

    verdict = "yes"
    for o in critical_overlaps(p):
        ri = p.rules[o.rule_i]
        rj = p.rules[o.rule_j]
        rhs_i = apply_subst(o.unifier, ri.rhs.support()[0])
        peak = apply_subst(o.unifier, ri.lhs)
        rhs_j = rename_vars(rj.rhs.support()[0], RENAME_SUFFIX)
        inner = replace_at(peak, o.position, apply_subst(o.unifier, rhs_j))
        side_a = {rhs_i}
        side_b = {inner}
        complete_a = complete_b = True
        for _ in range(depth):
            new_a = set()
            for t in side_a:
                new_a |= _successors(t, p)
            new_b = set()
            for t in side_b:
                new_b |= _successors(t, p)
            if not new_a <= side_a or not new_b <= side_b:
                side_a |= new_a
                side_b |= new_b
            else:
                break
            if len(side_a) > state_cap or len(side_b) > state_cap:
                complete_a = complete_b = False
                break
        else:
            # depth exhausted; closures are complete only if the last
            # round added nothing new
            complete_a = all(_successors(t, p) <= side_a for t in side_a)
            complete_b = all(_successors(t, p) <= side_b for t in side_b)
        if side_a & side_b:
            continue
        if complete_a and complete_b:
            return "no"
        verdict = "unknown"
    return verdict


@dataclass(frozen=True)
class SpareResult:
    verdict: str  # "yes" | "no-witness" | "unknown"
    justification: str


def duplicating_defined_symbols(p: Ptrs) -> set:
    """Defined symbols whose own rules duplicate some left-hand-side variable."""
    return {r.lhs.sym for r in p.rules if r.dup_vars}


def check_spare(p: Ptrs, depth: int = 6, start_size: int = 6, budget: int = 20000) -> SpareResult:
    """Three-valued spareness check.

    Tier 1: right-linear systems are spare. Tier 2: spare when every
    right-hand-side occurrence of a duplicating defined symbol has only
    ground constructor arguments. Otherwise a bounded search over rewrites
    from small basic terms looks for a concrete non-spare step; finding one
    yields "no-witness", exhausting the budget yields "unknown".
    """
    _, rl, _ = check_linearities(p)
    if rl:
        return SpareResult("yes", "right-linear")

    dup = duplicating_defined_symbols(p)
    ok = True
    for rule in p.rules:
        for t in rule.rhs.support():
            for _, sub in positions(t):
                if isinstance(sub, App) and sub.sym in dup:
                    if not all(
                        _ground_constructor(a, p) for a in sub.args
                    ):
                        ok = False
    if ok:
        return SpareResult("yes", "ground-constructor-arguments")

    witness = _spare_witness(p, depth, start_size, budget)
    if witness is not None:
        return SpareResult("no-witness", witness)
    return SpareResult("unknown", "sufficient conditions failed; no witness found")


def _ground_constructor(t: Term, p: Ptrs) -> bool:
    return not variables(t) and p.is_constructor_term(t)


def _spare_witness(p: Ptrs, depth: int, start_size: int, budget: int) -> Optional[str]:
    """Search reachable terms from small basic start terms for a step that
    duplicates a reducible instantiation."""
    seen = set()
    frontier = list(enumerate_basic_terms(p, start_size, with_variables=False))
    seen.update(frontier)
    for _ in range(depth):
        nxt = []
        for t in frontier:
            for pos, sub in positions(t):
                for rule, sigma in p.root_matches(sub):
                    for x in rule.dup_vars:
                        bound = sigma.get(x)
                        if bound is not None and not p.is_normal_form(bound):
                            return (
                                f"term {t} rewrites at position "
                                f"{'.'.join(map(str, pos)) or 'root'} with rule "
                                f"{rule.lhs} -> {rule.rhs}, duplicating "
                                f"{x} = {bound} which is not a normal form"
                            )
                    for _, r in rule.rhs:
                        child = replace_at(t, pos, apply_subst(sigma, r))
                        if child not in seen:
                            seen.add(child)
                            nxt.append(child)
                            if len(seen) > budget:
                                return None
        frontier = nxt
        if not frontier:
            break
    return None


@dataclass(frozen=True)
class PropertyReport:
    """Verdicts of all syntactic checks on one system."""

    left_linear: bool
    right_linear: bool
    linear: bool
    non_erasing: bool
    non_overlapping: bool
    overlay: bool
    orthogonal: bool
    spare: SpareResult
    wcr_bounded: str  # "yes" | "no" | "unknown"
    overlaps: tuple
    duplicating_symbols: tuple
    trivial_probabilities: bool

    def to_json(self) -> dict:
        return {
            "LL": self.left_linear,
            "RL": self.right_linear,
            "linear": self.linear,
            "NE": self.non_erasing,
            "NO": self.non_overlapping,
            "OS": self.overlay,
            "OR": self.orthogonal,
            "SP": {"verdict": self.spare.verdict, "justification": self.spare.justification},
            "WCR_bounded": self.wcr_bounded,
            "overlaps": [
                {
                    "rules": [o.rule_i, o.rule_j],
                    "position": list(o.position),
                    "root": o.root,
                }
                for o in self.overlaps
            ],
            "duplicating_symbols": sorted(s.name for s in self.duplicating_symbols),
            "trivial_probabilities": self.trivial_probabilities,
        }


def run_criteria(p: Ptrs, wcr_depth: int = 3, assume_spare: bool = False) -> PropertyReport:
    """Run every checker and assemble a PropertyReport."""
    ll, rl, ne = check_linearities(p)
    overlaps = critical_overlaps(p)
    no, os_, or_ = check_no_os_or(overlaps, ll)
    sp = check_spare(p)
    if assume_spare and sp.verdict != "yes":
        sp = SpareResult("yes", "assumed")
    wcr = check_wcr_bounded(p, wcr_depth) if p.trivial_probabilities else "unknown"
    return PropertyReport(
        left_linear=ll,
        right_linear=rl,
        linear=ll and rl,
        non_erasing=ne,
        non_overlapping=no,
        overlay=os_,
        orthogonal=or_,
        spare=sp,
        wcr_bounded=wcr,
        overlaps=tuple(overlaps),
        duplicating_symbols=tuple(sorted(duplicating_defined_symbols(p), key=lambda s: s.name)),
        trivial_probabilities=p.trivial_probabilities,
    )
