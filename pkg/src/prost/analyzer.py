"""Decision engine: turns property reports and detector output into cited
transfer claims, decompositions, and an aggregated analysis report."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Optional

from .criteria import PropertyReport, run_criteria
from .explore import adversarial_bounds, build_rst, monte_carlo
from .parser import parse_term
from .ptrs import Ptrs, enumerate_basic_terms
from .rewriting import Strategy, make_policy
from .terms import Term
from .transforms import SplitWitness, detect_infinite_splits, disjoint_abstraction

PSN = ("AST", "PAST", "SAST")


@dataclass(frozen=True)
class PropRef:
    """One side of a claim: property at a strategy over a start set."""

    prop: str
    strategy: str  # "f" | "i" | "li" | "sim" | "par-i"
    start: str  # "all" | "basic"

    def to_json(self) -> dict:
        return {"prop": self.prop, "strategy": self.strategy, "start": self.start}


@dataclass(frozen=True)
class Claim:
    id: str
    relation: str  # "iff" | "implies" | "eq" | "le" | "note"
    lhs: Optional[PropRef]
    rhs: Optional[PropRef]
    cite: str
    prereqs: tuple = ()
    assumed: tuple = ()
    note: str = ""

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "relation": self.relation,
            "lhs": self.lhs.to_json() if self.lhs else None,
            "rhs": self.rhs.to_json() if self.rhs else None,
            "cite": self.cite,
            "prereqs": list(self.prereqs),
            "assumed": list(self.assumed),
            "note": self.note,
        }


def _spare_prereqs(report: PropertyReport):
    """(holds, prereq names, assumed names) for the SP prerequisite."""
    if report.spare.verdict != "yes":
        return False, (), ()
    if report.spare.justification == "assumed":
        return True, ("SP",), ("SP",)
    return True, ("SP",), ()


def applicable_theorems(
    report: PropertyReport, splits: Optional[SplitWitness] = None
) -> list:
    """Evaluate the decision table and emit every enabled claim."""
    claims = []
    r = report

    def emit(cid, relation, lhs, rhs, cite, prereqs, assumed=(), note=""):
        claims.append(Claim(cid, relation, lhs, rhs, cite, tuple(prereqs), tuple(assumed), note))

    sp_ok, sp_pre, sp_assumed = _spare_prereqs(r)

    if r.non_overlapping and r.left_linear and r.right_linear:
        for x in PSN:
            emit("T1", "iff", PropRef(x, "f", "all"), PropRef(x, "i", "all"),
                 "Thm 4.2", ("NO", "LL", "RL"))
    if r.non_overlapping and r.left_linear and r.right_linear and r.non_erasing:
        emit("T2", "iff", PropRef("AST", "f", "all"), PropRef("wAST", "f", "all"),
             "Thm 4.11", ("NO", "LL", "RL", "NE"))
        emit("T2", "iff", PropRef("PAST", "f", "all"), PropRef("wPAST", "f", "all"),
             "Thm 4.11", ("NO", "LL", "RL", "NE"))
    if r.non_overlapping:
        for x in PSN:
            emit("T3", "iff", PropRef(x, "i", "all"), PropRef(x, "li", "all"),
                 "Thm 4.13", ("NO",))
    if r.non_overlapping and r.right_linear:
        for x in PSN:
            emit("T4", "implies", PropRef(x, "sim", "all"), PropRef(x, "f", "all"),
                 "Thm 5.5", ("NO", "RL"))
    if r.orthogonal and sp_ok:
        for x in PSN:
            emit("T5", "iff", PropRef(x, "f", "basic"), PropRef(x, "i", "basic"),
                 "Thm 5.10", ("OR",) + sp_pre, sp_assumed)
    if r.non_overlapping and sp_ok:
        for x in PSN:
            emit("T6", "implies", PropRef(x, "sim", "basic"), PropRef(x, "f", "basic"),
                 "Thm 5.16", ("NO",) + sp_pre, sp_assumed)
        emit("T6", "le", PropRef("erc", "f", "basic"), PropRef("erc", "sim", "basic"),
             "Thm 5.16", ("NO",) + sp_pre, sp_assumed)
    if r.non_overlapping and r.left_linear and r.right_linear:
        emit("T7a", "eq", PropRef("edc", "f", "all"), PropRef("edc", "i", "all"),
             "Thm 4.5", ("NO", "LL", "RL"))
        emit("T7a", "eq", PropRef("erc", "f", "basic"), PropRef("erc", "i", "basic"),
             "Thm 4.5", ("NO", "LL", "RL"))
    if r.non_overlapping:
        emit("T7b", "eq", PropRef("edc", "li", "all"), PropRef("edc", "i", "all"),
             "Thm 4.14", ("NO",))
        emit("T7b", "eq", PropRef("erc", "li", "basic"), PropRef("erc", "i", "basic"),
             "Thm 4.14", ("NO",))
    if r.non_overlapping and r.right_linear:
        emit("T7c", "le", PropRef("edc", "f", "all"), PropRef("edc", "sim", "all"),
             "Thm 5.8", ("NO", "RL"))
        emit("T7c", "le", PropRef("erc", "f", "basic"), PropRef("erc", "sim", "basic"),
             "Thm 5.8", ("NO", "RL"))
    if splits is not None:
        cite = "Thm 3.9" if splits.kind == "arity2-finite" else "Thm 3.10"
        emit("T8", "iff", PropRef("PAST", "f", "all"), PropRef("SAST", "f", "all"),
             cite, (f"infinite-splits:{splits.kind}",))

    if r.trivial_probabilities:
        if r.orthogonal:
            emit("T9.1", "iff", PropRef("SN", "f", "all"), PropRef("SN", "i", "all"),
                 "Thm 2.1", ("OR",))
        if r.non_overlapping:
            emit("T9.2", "iff", PropRef("SN", "f", "all"), PropRef("SN", "i", "all"),
                 "Thm 2.2", ("NO",))
        if r.overlay and r.wcr_bounded == "yes":
            emit("T9.3", "iff", PropRef("SN", "f", "all"), PropRef("SN", "i", "all"),
                 "Thm 2.3", ("OS", "WCR-bounded"))
        if r.non_overlapping and r.non_erasing:
            emit("T9.4", "iff", PropRef("SN", "f", "all"), PropRef("WN", "f", "all"),
                 "Thm 2.4", ("NO", "NE"))
        emit("T9.5", "iff", PropRef("SN", "i", "all"), PropRef("SN", "li", "all"),
             "Thm 2.5", ())
        if r.overlay and sp_ok:
            emit("T9.6", "eq", PropRef("rc", "f", "basic"), PropRef("rc", "i", "basic"),
                 "Thm 2.6", ("OS",) + sp_pre, sp_assumed)
        if r.non_overlapping and r.linear:
            emit("T9.7", "eq", PropRef("dc", "f", "all"), PropRef("dc", "i", "all"),
                 "Cor 4.6", ("NO", "linear"))
            emit("T9.8", "eq", PropRef("dc", "li", "all"), PropRef("dc", "i", "all"),
                 "Cor 4.15", ("NO", "linear"))
            emit("T9.8", "eq", PropRef("rc", "li", "basic"), PropRef("rc", "i", "basic"),
                 "Cor 4.15", ("NO", "linear"))
            emit("T9.9", "eq", PropRef("dc", "f", "all"), PropRef("dc", "par-i", "all"),
                 "Thm 5.9", ("NO", "linear"))
            emit("T9.9", "eq", PropRef("rc", "f", "basic"), PropRef("rc", "par-i", "basic"),
                 "Thm 5.9", ("NO", "linear"))

    emit("T10", "note", None, None, "Thm 3.7", (),
         note="PAST is not closed under signature extensions")
    emit("T10", "note", None, None, "Thm 6.12", (),
         note="AST and SAST are closed under signature extensions")
    return claims


@dataclass(frozen=True)
class Decomposition:
    kind: str  # "disjoint" | "shared-constructor"
    components: tuple  # tuple of tuples of rule indices
    claims: tuple  # modularity statements that apply componentwise
    flags: tuple  # explicit non-modularity warnings

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "components": [list(c) for c in self.components],
            "claims": list(self.claims),
            "flags": list(self.flags),
        }


def decompose(p: Ptrs, kind: str) -> Decomposition:
    """Connected components of the rule graph; adjacency is sharing any
    symbol (disjoint) or any defined symbol (shared-constructor)."""
    if kind not in ("disjoint", "shared-constructor"):
        raise ValueError(f"unknown decomposition kind {kind!r}")
    from .terms import symbols_of

    defined = {s.name for s in p.defined_symbols}
    rule_syms = []
    for rule in p.rules:
        syms = symbols_of(rule.lhs)
        for t in rule.rhs.support():
            syms |= symbols_of(t)
        names = {s.name for s in syms}
        if kind == "shared-constructor":
            names &= defined
        rule_syms.append(names)

    n = len(p.rules)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    by_symbol: dict = {}
    for i, names in enumerate(rule_syms):
        for name in names:
            by_symbol.setdefault(name, []).append(i)
    for members in by_symbol.values():
        for j in members[1:]:
            union(members[0], j)

    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    components = tuple(tuple(groups[k]) for k in sorted(groups))

    claims: list = []
    flags: list = []
    if len(components) > 1:
        report = run_criteria(p)
        if kind == "disjoint":
            claims.append("AST(i) holds iff it holds componentwise (Thm 6.2)")
            claims.append(
                "SAST(i) holds iff it holds componentwise (Thm 6.7; "
                "bound edl(T) <= K * Cmax)"
            )
            if report.non_overlapping and report.linear:
                claims.append("AST(f) holds iff it holds componentwise (Cor 6.9)")
                claims.append("SAST(f) holds iff it holds componentwise (Cor 6.9)")
            flags.append("PAST(i) is not modular for disjoint unions (Counterex. 6.3)")
        else:
            claims.append("AST(i) holds iff it holds componentwise (Thm 6.10)")
            if report.non_overlapping and report.linear:
                claims.append("AST(f) holds iff it holds componentwise (Cor 6.11)")
            flags.append("PAST(i) is not modular for shared constructors (Counterex. 6.3)")
            flags.append(
                "SAST(i) is not modular for shared-constructor unions "
                "(shared-constructor counterexample)"
            )
    return Decomposition(kind, components, tuple(claims), tuple(flags))


def component_system(p: Ptrs, indices) -> Ptrs:
    """A Ptrs containing just the given rules (reindexed)."""
    from .ptrs import ProbRule

    rules = [
        ProbRule(p.rules[i].lhs, p.rules[i].rhs, new)
        for new, i in enumerate(indices)
    ]
    return Ptrs(rules, p.variables)


def disjoint_sast_bound(t: Term, p1: Ptrs, p2: Ptrs, depth: int = 30) -> dict:
    """The K * Cmax bound for the expected derivation height of t.

    K counts the disjoint-union abstraction of t; Cmax is the ceiling of the
    largest adversarial expected-derivation-length prefix among abstraction
    elements, each evaluated in its own system.
    """
    abs1, abs2 = disjoint_abstraction(t, p1, p2)
    k = len(abs1) + len(abs2)
    cmax = 0
    for terms, system in ((abs1, p1), (abs2, p2)):
        for q in terms:
            bounds = adversarial_bounds(system, q, Strategy.INNERMOST, depth)
            cmax = max(cmax, math.ceil(bounds.max_edl))
    return {
        "K": k,
        "Cmax": cmax,
        "bound": k * cmax,
        "text": f"{k} · {cmax} = {k * cmax}",
    }


@dataclass
class AnalyzeOptions:
    assume_spare: bool = False
    wcr_depth: int = 3
    start: Optional[str] = None
    basic_enum: Optional[int] = None
    simulate: Optional[str] = None  # strategy code to gather evidence for
    scheduler: str = "first"
    depth: int = 20
    max_nodes: int = 200_000
    merge: bool = False
    samples: Optional[int] = None
    cap: int = 1000
    seed: int = 0


@dataclass
class AnalysisReport:
    digest: str
    properties: PropertyReport
    claims: list
    decompositions: dict
    split: Optional[SplitWitness]
    evidence: list
    assumptions: list

    def to_json(self) -> dict:
        return {
            "input": {"digest": self.digest},
            "properties": self.properties.to_json(),
            "claims": [c.to_json() for c in self.claims],
            "decomposition": {k: d.to_json() for k, d in self.decompositions.items()},
            "split": _split_json(self.split),
            "evidence": self.evidence,
            "assumptions": list(self.assumptions),
        }


def _split_json(w: Optional[SplitWitness]):
    if w is None:
        return None
    out = {"kind": w.kind}
    if w.kind == "arity2-finite":
        out["symbol"] = {"name": w.symbol.name, "arity": w.symbol.arity}
    else:
        out.update(
            rule=w.rule_index,
            loop_branch=w.loop_branch,
            position=list(w.position),
            variable=w.variable,
            other_branch=w.other_branch,
            subst={k: str(v) for k, v in sorted(w.subst.items())},
        )
    return out


def analyze(p: Ptrs, options: Optional[AnalyzeOptions] = None, source_text: str = "") -> AnalysisReport:
    """Run all checkers, detectors, and decompositions; gather optional
    numeric evidence per the options."""
    options = options or AnalyzeOptions()
    digest = hashlib.sha256(source_text.encode()).hexdigest() if source_text else ""
    report = run_criteria(p, wcr_depth=options.wcr_depth, assume_spare=options.assume_spare)
    split = detect_infinite_splits(p)
    claims = applicable_theorems(report, split)
    decompositions = {
        "disjoint": decompose(p, "disjoint"),
        "shared-constructor": decompose(p, "shared-constructor"),
    }
    assumptions = ["assume-spare"] if options.assume_spare else []

    evidence: list = []
    if options.simulate is not None:
        starts = []
        if options.start is not None:
            starts.append(parse_term(options.start, p))
        elif options.basic_enum is not None:
            starts.extend(enumerate_basic_terms(p, options.basic_enum))
        strategy = Strategy(options.simulate)
        for term in starts:
            if options.scheduler == "exhaustive":
                bounds = adversarial_bounds(
                    p, term, strategy, options.depth, max_states=options.max_nodes
                )
                evidence.append(
                    {
                        "type": "adversarial",
                        "strategy": strategy.value,
                        "start": str(term),
                        "depth": options.depth,
                        "minConv": str(bounds.min_conv),
                        "maxEdl": str(bounds.max_edl),
                        "partial": bounds.partial,
                    }
                )
            else:
                rst = build_rst(
                    p,
                    term,
                    strategy,
                    make_policy(options.scheduler, options.seed),
                    options.depth,
                    options.max_nodes,
                    options.merge,
                )
                evidence.append(
                    {
                        "type": "metrics",
                        "strategy": strategy.value,
                        "start": str(term),
                        "depth": options.depth,
                        "conv_prefix": str(rst.conv_prefix(options.depth)),
                        "edl_prefix": str(rst.edl_prefix(options.depth)),
                        "frontier": str(rst.frontier(options.depth)),
                    }
                )
            if options.samples:
                est = monte_carlo(
                    p,
                    term,
                    strategy if strategy is not Strategy.SIMULTANEOUS_INNERMOST else Strategy.INNERMOST,
                    options.scheduler if options.scheduler != "exhaustive" else "first",
                    options.samples,
                    options.cap,
                    options.seed,
                )
                evidence.append(
                    {
                        "type": "mc",
                        "strategy": strategy.value,
                        "start": str(term),
                        "samples": est.samples,
                        "cap": est.cap,
                        "terminated_fraction": est.terminated_fraction,
                        "mean_steps": est.mean_steps,
                        "std_error": est.std_error,
                        "seed": est.seed,
                    }
                )
    return AnalysisReport(
        digest, report, claims, decompositions, split, evidence, assumptions
    )
