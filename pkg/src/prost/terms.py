"""First-order terms: positions, substitutions, matching, and unification.

Terms are immutable and structurally equal. Hash and size are computed once at
construction so terms can serve as dictionary keys in hot loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import InvalidPositionError

Position = tuple  # tuple of positive ints; () is the root position


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int


class Term:
    """Base class; instances are either Var or App."""

    __slots__ = ("_hash", "size")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        # iterative structural comparison; hash and size mismatches
        # short-circuit, and already-visited pairs are skipped so that
        # dag-shared terms compare in time linear in their dag size
        stack = [(self, other)]
        seen = None
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if a._hash != b._hash or type(a) is not type(b):
                return False
            if isinstance(a, Var):
                if a.name != b.name:
                    return False
                continue
            if a.sym != b.sym or a.size != b.size:
                return False
            if a.size > 32:
                if seen is None:
                    seen = set()
                key = (id(a), id(b))
                if key in seen:
                    continue
                seen.add(key)
            stack.extend(zip(a.args, b.args))
        return True

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __str__(self):
        return term_to_str(self)

    def __repr__(self):
        return term_to_str(self)


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash((0x5661, name))
        self.size = 1


class App(Term):
    __slots__ = ("sym", "args")

    def __init__(self, sym: Symbol, args: tuple = ()):
        if len(args) != sym.arity:
            raise ValueError(
                f"symbol {sym.name}/{sym.arity} applied to {len(args)} arguments"
            )
        self.sym = sym
        self.args = args
        h = hash((0x4150, sym.name, sym.arity))
        s = 1
        for a in args:
            h = hash((h, a._hash))
            s += a.size
        self._hash = h
        self.size = s


def term_to_str(t: Term) -> str:
    parts = []
    _render(t, parts)
    return "".join(parts)


def _render(t: Term, out: list) -> None:
    if isinstance(t, Var):
        out.append(t.name)
        return
    out.append(t.sym.name)
    if t.args:
        out.append("(")
        for i, a in enumerate(t.args):
            if i:
                out.append(", ")
            _render(a, out)
        out.append(")")


def positions(t: Term) -> Iterator[tuple]:
    """Yield (position, subterm) pairs in preorder, leftmost first."""
    stack = [((), t)]
    while stack:
        pos, s = stack.pop()
        yield pos, s
        if isinstance(s, App):
            for i in range(len(s.args) - 1, -1, -1):
                stack.append((pos + (i + 1,), s.args[i]))


def subterm_at(t: Term, pos: Position) -> Term:
    for i in pos:
        if not isinstance(t, App) or i < 1 or i > len(t.args):
            raise InvalidPositionError(f"position {pos} not valid")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, pos: Position, r: Term) -> Term:
    if not pos:
        return r
    if not isinstance(t, App) or pos[0] < 1 or pos[0] > len(t.args):
        raise InvalidPositionError(f"position {pos} not valid")
    i = pos[0] - 1
    args = list(t.args)
    args[i] = replace_at(args[i], pos[1:], r)
    return App(t.sym, tuple(args))


def compare_positions(tau: Position, pi: Position) -> str:
    """Classify tau against pi: equal, above, below, left-parallel, right-parallel.

    Parallel positions are ordered by the first index where they diverge.
    """
    n = min(len(tau), len(pi))
    for k in range(n):
        if tau[k] != pi[k]:
            return "left-parallel" if tau[k] < pi[k] else "right-parallel"
    if len(tau) == len(pi):
        return "equal"
    return "above" if len(tau) < len(pi) else "below"


def parallel(tau: Position, pi: Position) -> bool:
    c = compare_positions(tau, pi)
    return c in ("left-parallel", "right-parallel")


def variables(t: Term) -> set:
    """Set of variable names occurring in t."""
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out.add(s.name)
        else:
            stack.extend(s.args)
    return out


def variable_occurrences(t: Term) -> dict:
    """Map variable name -> number of occurrences."""
    out: dict = {}
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Var):
            out[s.name] = out.get(s.name, 0) + 1
        else:
            stack.extend(s.args)
    return out


def is_linear(t: Term) -> bool:
    return all(n == 1 for n in variable_occurrences(t).values())


def symbols_of(t: Term) -> set:
    out = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, App):
            out.add(s.sym)
            stack.extend(s.args)
    return out


def apply_subst(sigma: dict, t: Term) -> Term:
    """Apply a substitution (name -> Term, identity elsewhere)."""
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    changed = False
    args = []
    for a in t.args:
        b = apply_subst(sigma, a)
        changed = changed or b is not a
        args.append(b)
    return App(t.sym, tuple(args)) if changed else t


def match_term(pattern: Term, subject: Term) -> Optional[dict]:
    """One-way matching: sigma with pattern*sigma == subject, else None."""
    sigma: dict = {}
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = sigma.get(p.name)
            if bound is None:
                sigma[p.name] = s
            elif bound != s:
                return None
        else:
            if not isinstance(s, App) or p.sym != s.sym:
                return None
            stack.extend(zip(p.args, s.args))
    return sigma


def _walk(t: Term, sigma: dict) -> Term:
    while isinstance(t, Var):
        b = sigma.get(t.name)
        if b is None:
            return t
        t = b
    return t


def _occurs(name: str, t: Term, sigma: dict) -> bool:
    stack = [t]
    while stack:
        s = _walk(stack.pop(), sigma)
        if isinstance(s, Var):
            if s.name == name:
                return True
        else:
            stack.extend(s.args)
    return False


def unify(s: Term, t: Term) -> Optional[dict]:
    """Most general unifier with occurs-check, or None.

    The returned substitution is idempotent.
    """
    sigma: dict = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a = _walk(a, sigma)
        b = _walk(b, sigma)
        if a is b:
            continue
        if isinstance(a, Var):
            if isinstance(b, Var) and a.name == b.name:
                continue
            if _occurs(a.name, b, sigma):
                return None
            sigma[a.name] = b
        elif isinstance(b, Var):
            if _occurs(b.name, a, sigma):
                return None
            sigma[b.name] = a
        else:
            if a.sym != b.sym:
                return None
            stack.extend(zip(a.args, b.args))
    # resolve binding chains so the result is idempotent
    resolved = {}
    for name in sigma:
        resolved[name] = _resolve(sigma[name], sigma)
    return resolved


def _resolve(t: Term, sigma: dict) -> Term:
    t = _walk(t, sigma)
    if isinstance(t, Var):
        return t
    return App(t.sym, tuple(_resolve(a, sigma) for a in t.args))


def rename_vars(t: Term, suffix: str) -> Term:
    """Append suffix to every variable name."""
    if isinstance(t, Var):
        return Var(t.name + suffix)
    return App(t.sym, tuple(rename_vars(a, suffix) for a in t.args))


FRESH_PREFIX = "_v"


def fresh_names(avoid=()):
    """Yield collision-free fresh variable names _v1, _v2, ...

    Names already in `avoid` are skipped so generated variables never capture
    input variables, even adversarially named ones.
    """
    avoid = set(avoid)
    n = 0
    while True:
        n += 1
        name = f"{FRESH_PREFIX}{n}"
        if name not in avoid:
            yield name
