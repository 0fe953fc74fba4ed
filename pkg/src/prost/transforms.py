"""Constructive transformations: generator rules, term variants, the
disjoint-union abstraction, and the infinite-split detectors."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import (
    BvOfVariableError,
    NameClashError,
    SharedSymbolError,
    VariableCapError,
)
from .ptrs import MultiDistribution, ProbRule, Ptrs
from .terms import App, Symbol, Term, Var, fresh_names, match_term, positions, variables

ONE = Fraction(1)

ENC_PREFIX = "enc_"
CONS_PREFIX = "cons_"
ARGENC = "argenc"


@dataclass(frozen=True)
class GeneratorExtension:
    """Fresh symbols and rules that rebuild arbitrary start terms from basic
    encoded variants: enc_f unpacks one level, argenc walks arguments turning
    cons_f back into the defined symbol f."""

    enc: dict
    cons: dict
    argenc: Symbol
    rules: tuple

    def combined_with(self, p: Ptrs) -> Ptrs:
        merged = list(p.rules)
        for rule in self.rules:
            merged.append(ProbRule(rule.lhs, rule.rhs, len(merged)))
        return Ptrs(merged, p.variables, p.extra_symbols)

    def as_ptrs(self) -> Ptrs:
        return Ptrs(self.rules)


def _signature_order(p: Ptrs) -> list:
    """Defined symbols in rule order, then constructors in occurrence order."""
    return list(p.defined_symbols) + list(p.constructor_symbols)


def generator_rules(p: Ptrs) -> GeneratorExtension:
    """The three generator-rule families over p's signature.

    |rules| = |signature| + |defined| + |constructors|; all probabilities
    trivial; fresh symbols are named enc_<f>, cons_<f>, and argenc.
    """
    sig = _signature_order(p)
    taken = set(p.signature)
    fresh = [ARGENC] + [ENC_PREFIX + s.name for s in sig] + [
        CONS_PREFIX + s.name for s in p.defined_symbols
    ]
    clash = sorted(set(fresh) & taken)
    if clash:
        raise NameClashError(f"input already uses reserved names: {', '.join(clash)}")

    argenc = Symbol(ARGENC, 1)
    enc = {s.name: Symbol(ENC_PREFIX + s.name, s.arity) for s in sig}
    cons = {s.name: Symbol(CONS_PREFIX + s.name, s.arity) for s in p.defined_symbols}

    def xs(k: int) -> list:
        return [Var(f"x{i}") for i in range(1, k + 1)]

    rules = []

    def add(lhs: Term, rhs: Term) -> None:
        rules.append(ProbRule(lhs, MultiDistribution([(ONE, rhs)]), len(rules)))

    for s in sig:
        args = xs(s.arity)
        add(
            App(enc[s.name], tuple(args)),
            App(Symbol(s.name, s.arity), tuple(App(argenc, (x,)) for x in args)),
        )
    for s in p.defined_symbols:
        args = xs(s.arity)
        add(
            App(argenc, (App(cons[s.name], tuple(args)),)),
            App(Symbol(s.name, s.arity), tuple(App(argenc, (x,)) for x in args)),
        )
    for s in p.constructor_symbols:
        args = xs(s.arity)
        add(
            App(argenc, (App(Symbol(s.name, s.arity), tuple(args)),)),
            App(Symbol(s.name, s.arity), tuple(App(argenc, (x,)) for x in args)),
        )
    return GeneratorExtension(enc, cons, argenc, tuple(rules))


def constructor_variant(t: Term, p: Ptrs, ext: Optional[GeneratorExtension] = None) -> Term:
    """Replace defined symbols by their cons_<f> stand-ins."""
    ext = ext or generator_rules(p)
    defined = {s.name for s in p.defined_symbols}

    def cv(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        args = tuple(cv(a) for a in t.args)
        if t.sym.name in defined:
            return App(ext.cons[t.sym.name], args)
        return App(t.sym, args)

    return cv(t)


def basic_variant(t: Term, p: Ptrs, ext: Optional[GeneratorExtension] = None) -> Term:
    """enc_<root> applied to the constructor variants of the arguments."""
    if isinstance(t, Var):
        raise BvOfVariableError("the basic variant is defined for applications only")
    ext = ext or generator_rules(p)
    return App(ext.enc[t.sym.name], tuple(constructor_variant(a, p, ext) for a in t.args))


def decoded_variant(t: Term, p: Ptrs, ext: Optional[GeneratorExtension] = None) -> Term:
    """Strip argenc and map enc_<f>/cons_<f> back to f."""
    ext = ext or generator_rules(p)
    back = {}
    for name, sym in ext.enc.items():
        back[sym.name] = p.signature[name]
    for name, sym in ext.cons.items():
        back[sym.name] = p.signature[name]

    def dv(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        if t.sym.name == ARGENC:
            return dv(t.args[0])
        args = tuple(dv(a) for a in t.args)
        orig = back.get(t.sym.name)
        return App(orig, args) if orig is not None else App(t.sym, args)

    return dv(t)


def variants(t: Term, p: Ptrs) -> tuple:
    """(constructor variant, basic variant, decoded basic variant)."""
    ext = generator_rules(p)
    cv = constructor_variant(t, p, ext)
    bv = basic_variant(t, p, ext)
    return cv, bv, decoded_variant(bv, p, ext)


VARIABLE_CAP = 8


def disjoint_abstraction(t: Term, p1: Ptrs, p2: Ptrs) -> tuple:
    """Multisets Abs_1(t), Abs_2(t) of single-signature abstractions of t.

    Each element of A_d keeps t's symbols from one system and turns maximal
    foreign subterms into fresh variables (numbered left to right) or their
    own abstractions; Abs_d closes each element under every identification
    map on its variables, deduplicating images per element only.
    """
    shared = set(p1.signature) & set(p2.signature)
    if shared:
        raise SharedSymbolError(
            f"signatures share symbols: {', '.join(sorted(shared))}"
        )
    return (_abs_side(t, p1), _abs_side(t, p2))


def _abs_side(t: Term, own: Ptrs) -> tuple:
    names = fresh_names(variables(t))

    def a_d(t: Term) -> list:
        if isinstance(t, Var):
            return [Var(next(names))]
        if t.sym.name in own.signature:
            combos = [()]
            for arg in t.args:
                sub = a_d(arg)
                combos = [c + (q,) for c in combos for q in sub]
            return [App(t.sym, c) for c in combos]
        out = [Var(next(names))]
        for arg in t.args:
            out.extend(a_d(arg))
        return out

    result = []
    for q in a_d(t):
        q_vars = sorted(variables(q))
        if len(q_vars) > VARIABLE_CAP:
            raise VariableCapError(
                f"abstraction element has {len(q_vars)} variables (cap {VARIABLE_CAP})"
            )
        images = []
        for phi in _all_maps(q_vars):
            image = _subst_vars(q, phi)
            if image not in images:
                images.append(image)
        result.extend(images)
    return tuple(result)


def _all_maps(names: list):
    """Every function from the name set to itself, in deterministic order."""
    if not names:
        yield {}
        return
    k = len(names)
    idx = [0] * k
    while True:
        yield {names[i]: names[idx[i]] for i in range(k)}
        j = k - 1
        while j >= 0 and idx[j] == k - 1:
            idx[j] = 0
            j -= 1
        if j < 0:
            return
        idx[j] += 1


def _subst_vars(t: Term, phi: dict) -> Term:
    if isinstance(t, Var):
        return Var(phi.get(t.name, t.name))
    return App(t.sym, tuple(_subst_vars(a, phi) for a in t.args))


@dataclass(frozen=True)
class SplitWitness:
    """Evidence that copies of arbitrary terms can be spawned indefinitely.

    kind "arity2-finite": the (finite) system's signature has a symbol of
    arity >= 2. kind "non-erasing-loop": rule `rule_index` has a branch
    (`loop_branch`) containing an instance of its own left-hand side at
    `position` with substitution `subst`, and another branch
    (`other_branch`) that keeps the witness variable."""

    kind: str
    symbol: Optional[Symbol] = None
    rule_index: Optional[int] = None
    loop_branch: Optional[int] = None
    position: Optional[tuple] = None
    subst: Optional[dict] = field(default=None, compare=False)
    variable: Optional[str] = None
    other_branch: Optional[int] = None


def detect_infinite_splits(p: Ptrs) -> Optional[SplitWitness]:
    """First witness in deterministic order, or None.

    The arity criterion fires on the whole declared signature; the loop
    search scans every rule, every branch as the looping context, every
    subterm of it matching the left-hand side, and every other branch.
    """
    for sym in _signature_order(p):
        if sym.arity >= 2:
            return SplitWitness("arity2-finite", symbol=sym)
    for rule in p.rules:
        if len(rule.rhs) < 2:
            continue
        lhs_vars = sorted(variables(rule.lhs))
        branches = rule.rhs.support()
        for bi, branch in enumerate(branches):
            for pos, sub in positions(branch):
                if isinstance(sub, Var):
                    continue
                sigma = match_term(rule.lhs, sub)
                if sigma is None:
                    continue
                for si, other in enumerate(branches):
                    if si == bi:
                        continue
                    other_vars = variables(other)
                    for x in lhs_vars:
                        image = sigma.get(x, Var(x))
                        if x in variables(image) and x in other_vars:
                            return SplitWitness(
                                "non-erasing-loop",
                                rule_index=rule.index,
                                loop_branch=bi,
                                position=pos,
                                subst=sigma,
                                variable=x,
                                other_branch=si,
                            )
    return None
