"""Independent oracle implementations used by the tests.

These deliberately take different routes than the package code: unification
via equation-set transformation, overlap search by exhaustive looping, and
per-system miniature interpreters over plain tuples.
"""

from __future__ import annotations

import random
from fractions import Fraction

from prost.terms import App, Symbol, Term, Var


# -- equation-set unification ------------------------------------------------


def _vars_of(t: Term) -> set:
    if isinstance(t, Var):
        return {t.name}
    out = set()
    for a in t.args:
        out |= _vars_of(a)
    return out


def _sub1(name: str, value: Term, t: Term) -> Term:
    if isinstance(t, Var):
        return value if t.name == name else t
    return App(t.sym, tuple(_sub1(name, value, a) for a in t.args))


def oracle_unify(s: Term, t: Term):
    """Martelli-Montanari-style unification on an explicit equation list."""
    eqs = [(s, t)]
    solved: dict = {}
    while eqs:
        left, right = eqs.pop(0)
        if isinstance(right, Var) and not isinstance(left, Var):
            left, right = right, left
        if isinstance(left, Var):
            if isinstance(right, Var) and right.name == left.name:
                continue
            if left.name in _vars_of(right):
                return None
            eqs = [(_sub1(left.name, right, a), _sub1(left.name, right, b)) for a, b in eqs]
            solved = {k: _sub1(left.name, right, v) for k, v in solved.items()}
            solved[left.name] = right
        else:
            if left.sym != right.sym:
                return None
            eqs = list(zip(left.args, right.args)) + eqs
    return solved


# -- brute-force critical overlaps -------------------------------------------


def _subterms_with_positions(t: Term, pos=()):
    yield pos, t
    if isinstance(t, App):
        for i, a in enumerate(t.args):
            yield from _subterms_with_positions(a, pos + (i + 1,))


def _rename(t: Term, suffix: str) -> Term:
    if isinstance(t, Var):
        return Var(t.name + suffix)
    return App(t.sym, tuple(_rename(a, suffix) for a in t.args))


def oracle_overlaps(p) -> set:
    """Set of (i, j, position) triples, with the package's conventions:
    no self-overlap at the root, root overlaps only for i < j."""
    found = set()
    for i, ri in enumerate(p.rules):
        for j, rj in enumerate(p.rules):
            renamed = _rename(rj.lhs, "_o")
            for pos, sub in _subterms_with_positions(ri.lhs):
                if isinstance(sub, Var):
                    continue
                if pos == () and i >= j:
                    continue
                if oracle_unify(sub, renamed) is not None:
                    found.add((i, j, pos))
    return found


# -- random generators --------------------------------------------------------


def random_term(rng: random.Random, symbols, var_names, max_size: int) -> Term:
    """A random term of size <= max_size over the signature."""
    if max_size <= 1:
        leaves = [Symbol(s.name, 0) for s in symbols if s.arity == 0]
        if var_names and (not leaves or rng.random() < 0.4):
            return Var(rng.choice(var_names))
        return App(rng.choice(leaves))
    sym = rng.choice(symbols)
    if sym.arity == 0:
        if var_names and rng.random() < 0.3:
            return Var(rng.choice(var_names))
        return App(sym)
    budget = max_size - 1
    args = []
    for k in range(sym.arity):
        remaining_slots = sym.arity - k - 1
        size = rng.randint(1, max(1, budget - remaining_slots))
        args.append(random_term(rng, symbols, var_names, size))
        budget -= args[-1].size
    return App(sym, tuple(args))


def random_system(rng: random.Random, max_rules: int = 4, term_size: int = 5):
    """A small random PTRS (sometimes with trivial probabilities only)."""
    from prost.ptrs import make_ptrs
    from prost.terms import variables

    symbols = [
        Symbol("f", 2),
        Symbol("g", 1),
        Symbol("h", 1),
        Symbol("a", 0),
        Symbol("b", 0),
    ]
    var_names = ["x", "y"]
    rules = []
    for _ in range(rng.randint(1, max_rules)):
        while True:
            lhs = random_term(rng, symbols, var_names, term_size)
            if isinstance(lhs, App):
                break
        lhs_vars = sorted(variables(lhs))
        rhs_syms = symbols
        rhs_vars = lhs_vars

        def rhs_term():
            t = random_term(rng, rhs_syms, rhs_vars, term_size)
            return t

        if rng.random() < 0.5:
            branches = [(Fraction(1), rhs_term())]
        else:
            branches = [(Fraction(1, 2), rhs_term()), (Fraction(1, 2), rhs_term())]
        rules.append((lhs, branches))
    return make_ptrs(rules)


# -- miniature interpreters over tuple terms ----------------------------------
#
# Terms are nested tuples ('sym', child, ...). Each stepper rewrites one
# designated redex per non-final term and tracks exact level masses, giving
# conv/edl prefixes without going through the package's tree machinery.


def _tuple_nf_p1(t) -> bool:
    return t[0] not in ("g", "d")


def _p1_innermost_children(t):
    """P1: g -> {3/4: d(g), 1/4: 0}; d(x) -> {1: c(x, x)}; unique innermost redex."""

    def rewrite(t):
        # returns list of (prob, new) or None when t is in normal form
        if t == ("g",):
            return [(Fraction(3, 4), ("d", ("g",))), (Fraction(1, 4), ("0",))]
        if t[0] == "d":
            inner = rewrite(t[1])
            if inner is None:
                x = t[1]
                return [(Fraction(1), ("c", x, x))]
            return [(q, ("d", child)) for q, child in inner]
        if t[0] == "c":
            left = rewrite(t[1])
            if left is not None:
                return [(q, ("c", child, t[2])) for q, child in left]
            right = rewrite(t[2])
            if right is not None:
                return [(q, ("c", t[1], child)) for q, child in right]
            return None
        return None

    return rewrite(t)


def _p2_innermost_children(t):
    """P2: f(x,x) -> {1: f(a,a)}; a -> {1/2: b, 1/2: c}; leftmost innermost."""
    f, left, right = t
    if left == ("a",):
        return [
            (Fraction(1, 2), (f, ("b",), right)),
            (Fraction(1, 2), (f, ("c",), right)),
        ]
    if right == ("a",):
        return [
            (Fraction(1, 2), (f, left, ("b",))),
            (Fraction(1, 2), (f, left, ("c",))),
        ]
    if left == right:
        return [(Fraction(1), (f, ("a",), ("a",)))]
    return None


def level_metrics(start, children, depth: int):
    """(conv_prefix, edl_prefix) per depth from a one-redex-per-term stepper."""
    level = {start: Fraction(1)}
    conv = Fraction(0)
    convs = [Fraction(0)] * (depth + 1)
    edls = [Fraction(0)] * (depth + 1)
    edl = Fraction(0)
    for d in range(depth + 1):
        nxt: dict = {}
        open_mass = Fraction(0)
        for t, q in level.items():
            steps = children(t)
            if steps is None:
                conv += q
            else:
                open_mass += q
                for b, child in steps:
                    nxt[child] = nxt.get(child, Fraction(0)) + q * b
        convs[d] = conv
        edls[d] = edl
        edl += open_mass
        level = nxt
    return convs, edls


def p1_innermost_metrics(depth: int):
    return level_metrics(("g",), _p1_innermost_children, depth)


def p2_innermost_metrics(depth: int):
    return level_metrics(("f", ("a",), ("a",)), _p2_innermost_children, depth)


def p_rw_extinction_by_steps(max_steps: int) -> Fraction:
    """Probability that the symmetric branching walk needs <= max_steps
    rewrites in total, via the total-progeny distribution."""
    # total steps = total individuals; individuals split (prob 1/2) or die
    from math import comb

    total = Fraction(0)
    k = 0
    while 2 * k + 1 <= max_steps:
        catalan = comb(2 * k, k) // (k + 1)
        total += Fraction(catalan, 2 ** (2 * k + 1))
        k += 1
    return total


def p1_full_extinction_by_steps(max_steps: int) -> Fraction:
    """P1 under any duplication-completing schedule: a brancher costs two
    steps (unfold then duplicate), a death one step."""
    from math import comb

    total = Fraction(0)
    k = 0
    while 3 * k + 1 <= max_steps:
        catalan = comb(2 * k, k) // (k + 1)
        total += Fraction(catalan) * Fraction(3, 4) ** k * Fraction(1, 4) ** (k + 1)
        k += 1
    return total


def extinction_fixpoint(p_die: Fraction, rounds: int = 200) -> Fraction:
    """Iterate q -> p_die + (1 - p_die) q^2 from 0."""
    q = Fraction(0)
    for _ in range(rounds):
        q = p_die + (1 - p_die) * q * q
    return q


def birth_death_simulation(samples: int, cap: int, seed: int) -> float:
    """Direct simulation of the symmetric walk on the number of pending
    redexes; returns the fraction finished within cap steps."""
    rng = random.Random(seed)
    done = 0
    for _ in range(samples):
        pending = 1
        steps = 0
        while pending and steps < cap:
            steps += 1
            if rng.random() < 0.5:
                pending += 1
            else:
                pending -= 1
        if pending == 0:
            done += 1
    return done / samples
