"""Probabilistic rewrite systems: rules with rational multi-distributions.

All probabilities are exact fractions. Multi-distributions keep multiset
identity: duplicate (probability, term) pairs are preserved.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import (
    ArityMismatchError,
    ExtraVariableError,
    ProbabilitySumError,
    VariableLhsError,
)
from .terms import App, Symbol, Term, Var, symbols_of, variables

ONE = Fraction(1)


class MultiDistribution:
    """Finite multiset of (probability, term) pairs summing exactly to 1."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: Iterable):
        pairs = tuple((Fraction(p), t) for p, t in pairs)
        if not pairs:
            raise ProbabilitySumError("multi-distribution must be non-empty")
        for p, _ in pairs:
            if not 0 < p <= 1:
                raise ProbabilitySumError(f"branch probability {p} not in (0, 1]")
        total = sum(p for p, _ in pairs)
        if total != ONE:
            raise ProbabilitySumError(f"branch probabilities sum to {total}, not 1")
        self.pairs = pairs

    def support(self) -> tuple:
        return tuple(t for _, t in self.pairs)

    def __iter__(self) -> Iterator:
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __eq__(self, other):
        return isinstance(other, MultiDistribution) and self.pairs == other.pairs

    def __hash__(self):
        return hash(self.pairs)

    def __repr__(self):
        body = ", ".join(f"{p}: {t}" for p, t in self.pairs)
        return "{" + body + "}"


class ProbRule:
    """One rule lhs -> multi-distribution, with its position in the system."""

    __slots__ = ("lhs", "rhs", "index", "dup_vars")

    def __init__(self, lhs: Term, rhs: MultiDistribution, index: int = 0):
        if isinstance(lhs, Var):
            raise VariableLhsError(f"rule {index}: left-hand side is a variable")
        lhs_vars = variables(lhs)
        for r in rhs.support():
            extra = variables(r) - lhs_vars
            if extra:
                raise ExtraVariableError(
                    f"rule {index}: right-hand side variables {sorted(extra)} "
                    "not bound on the left"
                )
        self.lhs = lhs
        self.rhs = rhs
        self.index = index
        # variables duplicated in some branch; a step is non-spare when one of
        # these is instantiated with a reducible term
        dup = set()
        for r in rhs.support():
            counts: dict = {}
            stack = [r]
            while stack:
                s = stack.pop()
                if isinstance(s, Var):
                    counts[s.name] = counts.get(s.name, 0) + 1
                else:
                    stack.extend(s.args)
            dup.update(n for n, c in counts.items() if c > 1)
        self.dup_vars = frozenset(dup)

    def __eq__(self, other):
        return (
            isinstance(other, ProbRule)
            and self.lhs == other.lhs
            and self.rhs == other.rhs
            and self.index == other.index
        )

    def __hash__(self):
        return hash((self.lhs, self.rhs, self.index))

    def __repr__(self):
        return f"{self.lhs} -> {self.rhs}"


def _check_arities(terms: Iterable[Term], table: dict) -> None:
    for t in terms:
        stack = [t]
        while stack:
            s = stack.pop()
            if isinstance(s, App):
                seen = table.get(s.sym.name)
                if seen is None:
                    table[s.sym.name] = s.sym.arity
                elif seen != s.sym.arity:
                    raise ArityMismatchError(
                        f"symbol {s.sym.name} used with arities {seen} and {s.sym.arity}"
                    )
                stack.extend(s.args)


class Ptrs:
    """An ordered, finite set of probabilistic rewrite rules.

    The signature splits into defined symbols (roots of left-hand sides) and
    constructors (every other symbol). `extra_symbols` widens the signature
    beyond the symbols that occur in rules, which matters for the detectors
    that depend on arities being present in the signature.
    """

    __slots__ = (
        "rules",
        "variables",
        "extra_symbols",
        "defined_symbols",
        "constructor_symbols",
        "signature",
        "_by_root",
        "_nf_cache",
    )

    def __init__(self, rules: Iterable[ProbRule], variables=(), extra_symbols=()):
        self.rules = tuple(rules)
        declared = set(variables)
        for rule in self.rules:
            declared |= terms_variables(rule)
        self.variables = frozenset(declared)
        self.extra_symbols = tuple(extra_symbols)

        table: dict = {}
        all_terms = []
        for rule in self.rules:
            all_terms.append(rule.lhs)
            all_terms.extend(rule.rhs.support())
        _check_arities(all_terms, table)
        for sym in self.extra_symbols:
            seen = table.get(sym.name)
            if seen is not None and seen != sym.arity:
                raise ArityMismatchError(
                    f"symbol {sym.name} declared with arities {seen} and {sym.arity}"
                )
            table[sym.name] = sym.arity

        defined = []
        seen_defined = set()
        for rule in self.rules:
            root = rule.lhs.sym
            if root.name not in seen_defined:
                seen_defined.add(root.name)
                defined.append(root)
        constructors = []
        seen_ctor = set()
        for t in all_terms:
            for pos_sym in _preorder_symbols(t):
                if pos_sym.name not in seen_defined and pos_sym.name not in seen_ctor:
                    seen_ctor.add(pos_sym.name)
                    constructors.append(pos_sym)
        for sym in self.extra_symbols:
            if sym.name not in seen_defined and sym.name not in seen_ctor:
                seen_ctor.add(sym.name)
                constructors.append(sym)
        self.defined_symbols = tuple(defined)
        self.constructor_symbols = tuple(constructors)
        self.signature = {s.name: s for s in defined + constructors}

        by_root: dict = {}
        for rule in self.rules:
            by_root.setdefault(rule.lhs.sym.name, []).append(rule)
        self._by_root = {k: tuple(v) for k, v in by_root.items()}
        self._nf_cache: dict = {}

    # -- queries ---------------------------------------------------------

    def rules_for_root(self, name: str) -> tuple:
        return self._by_root.get(name, ())

    @property
    def trivial_probabilities(self) -> bool:
        return all(len(r.rhs) == 1 for r in self.rules)

    def root_matches(self, t: Term):
        """Yield (rule, sigma) for rules whose lhs matches t at the root."""
        from .terms import match_term

        if isinstance(t, Var):
            return
        for rule in self._by_root.get(t.sym.name, ()):
            sigma = match_term(rule.lhs, t)
            if sigma is not None:
                yield rule, sigma

    def is_normal_form(self, t: Term) -> bool:
        """True iff no subterm of t matches any left-hand side."""
        cache = self._nf_cache
        hit = cache.get(t)
        if hit is not None:
            return hit
        if isinstance(t, Var):
            cache[t] = True
            return True
        result = all(self.is_normal_form(a) for a in t.args)
        if result:
            for _ in self.root_matches(t):
                result = False
                break
        cache[t] = result
        return result

    def is_constructor_term(self, t: Term) -> bool:
        defined = {s.name for s in self.defined_symbols}
        stack = [t]
        while stack:
            s = stack.pop()
            if isinstance(s, App):
                if s.sym.name in defined:
                    return False
                stack.extend(s.args)
        return True

    def is_basic(self, t: Term) -> bool:
        """Defined root applied to constructor terms."""
        if isinstance(t, Var):
            return False
        if t.sym.name not in {s.name for s in self.defined_symbols}:
            return False
        return all(self.is_constructor_term(a) for a in t.args)

    def extend_signature(self, symbols: Iterable[Symbol]) -> "Ptrs":
        return Ptrs(self.rules, self.variables, self.extra_symbols + tuple(symbols))

    def __eq__(self, other):
        return (
            isinstance(other, Ptrs)
            and self.rules == other.rules
            and self.extra_symbols == other.extra_symbols
        )

    def __hash__(self):
        return hash((self.rules, self.extra_symbols))

    def __repr__(self):
        return f"Ptrs({len(self.rules)} rules)"


def terms_variables(rule: ProbRule) -> set:
    out = variables(rule.lhs)
    for r in rule.rhs.support():
        out |= variables(r)
    return out


def _preorder_symbols(t: Term):
    stack = [t]
    order = []
    while stack:
        s = stack.pop()
        if isinstance(s, App):
            order.append(s.sym)
            stack.extend(reversed(s.args))
    return order


def make_ptrs(rules, variables=(), extra_symbols=()) -> Ptrs:
    """Build a Ptrs from (lhs, [(p, rhs), ...]) pairs."""
    built = []
    for i, (lhs, branches) in enumerate(rules):
        built.append(ProbRule(lhs, MultiDistribution(branches), i))
    return Ptrs(built, variables, extra_symbols)


def classify_symbols(p: Ptrs) -> tuple:
    """(defined symbols, constructor symbols) partitioning the signature."""
    return set(p.defined_symbols), set(p.constructor_symbols)


def is_normal_form(t: Term, p: Ptrs) -> bool:
    return p.is_normal_form(t)


def is_basic(t: Term, p: Ptrs) -> bool:
    return p.is_basic(t)


def embed_trs(rules: Iterable[tuple]) -> Ptrs:
    """Embed a classical TRS: each rule l -> r becomes l -> {1: r}."""
    return make_ptrs([(lhs, [(ONE, rhs)]) for lhs, rhs in rules])


def enumerate_basic_terms(p: Ptrs, max_size: int, with_variables: bool = True):
    """All basic terms of size <= max_size, smallest first.

    Variables are drawn canonically (x1, x2, ... in first-occurrence order) so
    the listing covers basic terms up to renaming; both fresh and repeated
    variables are enumerated (e.g. f(x1, x2) as well as f(x1, x1)).
    """

    def ctor_terms(size: int, next_var: int):
        """Constructor terms of exactly `size`, threading var numbering."""
        if size == 1 and with_variables:
            # reuse any earlier canonical variable or introduce the next one
            for j in range(1, next_var + 1):
                yield Var(f"x{j}"), max(next_var, j + 1)
        for sym in p.constructor_symbols:
            if sym.arity == 0:
                if size == 1:
                    yield App(sym), next_var
            elif size >= 1 + sym.arity:
                for args, nv in _arg_tuples(sym.arity, size - 1, next_var, ctor_terms):
                    yield App(sym, args), nv

    results = []
    for root in p.defined_symbols:
        if root.arity == 0:
            if 1 <= max_size:
                results.append(App(root))
            continue
        for total in range(root.arity, max_size):
            for args, _ in _arg_tuples(root.arity, total, 1, ctor_terms):
                results.append(App(root, args))
    results.sort(key=lambda t: (t.size, str(t)))
    return results


def _arg_tuples(k: int, total: int, next_var: int, gen):
    """Tuples of k terms with sizes summing to total; canonical var numbering."""
    if k == 0:
        if total == 0:
            yield (), next_var
        return
    for first in range(1, total - (k - 1) + 1):
        for t, nv in gen(first, next_var):
            for rest, nv2 in _arg_tuples(k - 1, total - first, nv, gen):
                yield (t,) + rest, nv2
