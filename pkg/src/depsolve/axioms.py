"""Inference rules, bounded derivation search, and deduction checking.

Every rule of the four axiom systems is a first-class object that can be
applied to concrete premises and checked against a claimed conclusion.
`derive` saturates the attribute-bounded dependency universe forward,
recording provenance, so a found query yields a replayable deduction and a
completed saturation certifies non-derivability within the system.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .core import FD, IA, IND, Dependency, DependencySet
from .errors import SchemaMismatch

# ---------------------------------------------------------------------------
# Rule catalog


@dataclass(frozen=True)
class Rule:
    id: str
    name: str
    arity: int  # -1 marks the variable-arity cycle family


RULES: dict[str, Rule] = {
    r.id: r
    for r in [
        Rule("I1", "trivial independence", 0),
        Rule("I2", "symmetry", 1),
        Rule("I3", "decomposition", 1),
        Rule("I4", "exchange", 2),
        Rule("I5", "weak composition", 2),
        Rule("F1", "reflexivity", 0),
        Rule("F2", "transitivity", 2),
        Rule("F3", "augmentation", 1),
        Rule("FI1", "constancy", 2),
        Rule("FI2", "composition", 2),
        Rule("U1", "inclusion reflexivity", 0),
        Rule("U2", "inclusion transitivity", 2),
        Rule("U3", "projection and permutation", 1),
        Rule("UI1", "concatenation", 3),
        Rule("UI2", "transfer", 3),
        Rule("UI3", "inclusion symmetry", 2),
        Rule("UI4", "inclusion constancy", 2),
        Rule("UI5", "equality", 4),
        Rule("C", "cycle reversal", -1),
    ]
}


@dataclass(frozen=True)
class RuleSystem:
    name: str
    rules: frozenset[str]

    def __contains__(self, rule_id: str) -> bool:
        return rule_id in self.rules


_IA_RULES = frozenset({"I1", "I2", "I3", "I4", "I5"})
_FD_RULES = frozenset({"F1", "F2", "F3"})
_IND_RULES = frozenset({"U1", "U2", "U3"})
_MIX_RULES = frozenset({"UI1", "UI2", "UI3", "UI4", "UI5"})

SYSTEM_IA = RuleSystem("independence atoms", _IA_RULES)
SYSTEM_FD_IA = RuleSystem("FDs and IAs", _IA_RULES | _FD_RULES | {"FI1", "FI2"})
SYSTEM_FD_IA_CORE = RuleSystem(
    "FDs and IAs, core", SYSTEM_FD_IA.rules - {"I5", "F3"}
)
SYSTEM_IND = RuleSystem("INDs", _IND_RULES)
SYSTEM_IND_IA = RuleSystem("INDs and IAs", _IA_RULES | _IND_RULES | _MIX_RULES)
SYSTEM_DIA_IND = RuleSystem(
    "disjoint IAs and INDs", frozenset({"I1", "I2", "I3", "I4", "UI1", "UI2"}) | _IND_RULES
)
SYSTEM_UNARY_UNRESTRICTED = RuleSystem(
    "unary classes, unrestricted", SYSTEM_FD_IA_CORE.rules | {"U1", "U2", "UI3", "UI4"}
)
SYSTEM_UNARY_FINITE = RuleSystem(
    "unary classes, finite", SYSTEM_FD_IA_CORE.rules | {"U1", "U2", "C"}
)

SYSTEMS = {
    s.name: s
    for s in [
        SYSTEM_IA,
        SYSTEM_FD_IA,
        SYSTEM_FD_IA_CORE,
        SYSTEM_IND,
        SYSTEM_IND_IA,
        SYSTEM_DIA_IND,
        SYSTEM_UNARY_UNRESTRICTED,
        SYSTEM_UNARY_FINITE,
    ]
}


# ---------------------------------------------------------------------------
# Rule application


def _require(cond: bool, msg: str):
    if not cond:
        raise SchemaMismatch(msg)


def _as_ia(dep, msg="expected an independence atom") -> IA:
    _require(isinstance(dep, IA), msg)
    return dep


def _as_fd(dep, msg="expected a functional dependency") -> FD:
    _require(isinstance(dep, FD), msg)
    return dep


def _as_ind(dep, msg="expected an inclusion dependency") -> IND:
    _require(isinstance(dep, IND), msg)
    return dep


def cycle_conclusions(premises: Sequence[Dependency]) -> tuple[Dependency, ...]:
    """Reversals concluded by the cycle rule from an alternating FD/IND chain.

    Premises alternate A1 -> A2, A3 <= A2, A3 -> A4, A5 <= A4, ...,
    closing with A1 <= A2n; each premise is reversed in the conclusion.
    """
    _require(len(premises) >= 2 and len(premises) % 2 == 0, "cycle premises come in pairs")
    n = len(premises) // 2
    chain: list[str] = []
    for i in range(n):
        fd = _as_fd(premises[2 * i], "odd cycle positions are unary FDs")
        _require(len(fd.lhs) == 1 and len(fd.rhs) == 1, f"{fd} is not unary")
        (a,) = fd.lhs
        (b,) = fd.rhs
        if chain:
            _require(a == chain[-1], "cycle chain broken at a functional dependency")
        else:
            chain.append(a)
        chain.append(b)
        ind = _as_ind(premises[2 * i + 1], "even cycle positions are unary INDs")
        _require(ind.arity == 1, f"{ind} is not unary")
        src, dst = ind.lhs_seq[0], ind.rhs_seq[0]
        _require(dst == chain[-1], "cycle chain broken at an inclusion")
        if i < n - 1:
            chain.append(src)
        else:
            _require(src == chain[0], "cycle does not close")
    rel = premises[0].relation
    out: list[Dependency] = []
    for i in range(n):
        fd = premises[2 * i]
        out.append(FD(rel, fd.rhs, fd.lhs))
        ind = premises[2 * i + 1]
        out.append(IND(ind.rhs_rel, ind.rhs_seq, ind.lhs_rel, ind.lhs_seq))
    return tuple(out)


def apply_rule(rule_id: str, premises: Sequence[Dependency], **inst) -> Dependency:
    """Apply one rule instance; raises SchemaMismatch when shapes do not fit.

    Instantiation keywords:
      I1: relation, attrs            F1: relation, lhs, rhs
      I3: keep (subset of the right side)
      F3: extra (augmenting attribute set)
      U1: relation, seq              U3: positions (index tuple)
      UI2: split (length of the left part)
      UI5: target (the dependency to rewrite), replace_left/replace_right or
           replace_positions for inclusions
      C:  index (which conclusion of the cycle to emit)
    """
    premises = list(premises)
    if rule_id == "I1":
        _require(not premises, "axiom takes no premises")
        return IA(inst["relation"], frozenset(), frozenset(inst["attrs"]))
    if rule_id == "I2":
        (p,) = premises
        return _as_ia(p).flipped()
    if rule_id == "I3":
        (p,) = premises
        ia = _as_ia(p)
        keep = frozenset(inst["keep"])
        _require(keep <= ia.right, "decomposition keeps a subset of the right side")
        return IA(ia.relation, ia.left, keep)
    if rule_id == "I4":
        p, q = premises
        ia, ia2 = _as_ia(p), _as_ia(q)
        _require(ia2.left == ia.left | ia.right, "second premise joins both sides of the first")
        _require(ia.relation == ia2.relation, "premises live on one relation")
        return IA(ia.relation, ia.left, ia.right | ia2.right)
    if rule_id == "I5":
        p, q = premises
        ia, ca = _as_ia(p), _as_ia(q)
        _require(ca.left == ca.right, "second premise is a constancy-shaped atom")
        _require(ia.relation == ca.relation, "premises live on one relation")
        return IA(ia.relation, ia.left, ia.right | ca.left)
    if rule_id == "F1":
        _require(not premises, "axiom takes no premises")
        lhs = frozenset(inst["lhs"])
        rhs = frozenset(inst["rhs"])
        _require(rhs <= lhs, "reflexivity concludes a projection of its left side")
        return FD(inst["relation"], lhs, rhs)
    if rule_id == "F2":
        p, q = premises
        f, g = _as_fd(p), _as_fd(q)
        _require(f.rhs == g.lhs, "middle attribute sets must match")
        _require(f.relation == g.relation, "premises live on one relation")
        return FD(f.relation, f.lhs, g.rhs)
    if rule_id == "F3":
        (p,) = premises
        f = _as_fd(p)
        extra = frozenset(inst["extra"])
        return FD(f.relation, f.lhs | extra, f.rhs | extra)
    if rule_id == "FI1":
        p, q = premises
        ia, f = _as_ia(p), _as_fd(q)
        _require(ia.left == f.lhs and ia.right == f.rhs, "atom and FD share both sides")
        _require(ia.relation == f.relation, "premises live on one relation")
        return FD(f.relation, frozenset(), f.rhs)
    if rule_id == "FI2":
        p, q = premises
        ia, f = _as_ia(p), _as_fd(q)
        _require(f.lhs <= ia.right, "FD left side sits inside the atom's right side")
        _require(ia.relation == f.relation, "premises live on one relation")
        return IA(ia.relation, ia.left, ia.right | f.rhs)
    if rule_id == "U1":
        _require(not premises, "axiom takes no premises")
        seq = tuple(inst["seq"])
        return IND(inst["relation"], seq, inst["relation"], seq)
    if rule_id == "U2":
        p, q = premises
        a, b = _as_ind(p), _as_ind(q)
        _require(a.rhs_rel == b.lhs_rel and a.rhs_seq == b.lhs_seq, "middle sequences must match")
        return IND(a.lhs_rel, a.lhs_seq, b.rhs_rel, b.rhs_seq)
    if rule_id == "U3":
        (p,) = premises
        a = _as_ind(p)
        pos = tuple(inst["positions"])
        _require(len(set(pos)) == len(pos), "positions are pairwise distinct")
        _require(all(0 <= i < a.arity for i in pos), "positions index the premise")
        return IND(
            a.lhs_rel,
            [a.lhs_seq[i] for i in pos],
            a.rhs_rel,
            [a.rhs_seq[i] for i in pos],
        )
    if rule_id == "UI1":
        p, q, r = premises
        a, b, ia = _as_ind(p), _as_ind(q), _as_ia(r)
        _require(a.lhs_rel == b.lhs_rel and a.rhs_rel == b.rhs_rel, "inclusions share relations")
        _require(ia.relation == a.rhs_rel, "atom lives on the target relation")
        _require(
            frozenset(a.rhs_seq) == ia.left and frozenset(b.rhs_seq) == ia.right,
            "atom sides match the target sequences",
        )
        return IND(
            a.lhs_rel, a.lhs_seq + b.lhs_seq, a.rhs_rel, a.rhs_seq + b.rhs_seq
        )
    if rule_id == "UI2":
        p, q, r = premises
        a, b, ia = _as_ind(p), _as_ind(q), _as_ia(r)
        _require(
            b.lhs_rel == a.rhs_rel
            and b.rhs_rel == a.lhs_rel
            and b.lhs_seq == a.rhs_seq
            and b.rhs_seq == a.lhs_seq,
            "second inclusion must invert the first",
        )
        k = inst["split"]
        _require(0 <= k <= a.arity, "split inside the sequence")
        _require(ia.relation == a.rhs_rel, "atom lives on the target relation")
        _require(
            frozenset(a.rhs_seq[:k]) == ia.left and frozenset(a.rhs_seq[k:]) == ia.right,
            "atom sides match the split target",
        )
        return IA(a.lhs_rel, frozenset(a.lhs_seq[:k]), frozenset(a.lhs_seq[k:]))
    if rule_id == "UI3":
        p, q = premises
        a, ia = _as_ind(p), _as_ia(q)
        _require(ia.relation == a.rhs_rel, "atom lives on the target relation")
        _require(
            ia.left == ia.right == frozenset(a.rhs_seq), "atom pins the whole target"
        )
        return IND(a.rhs_rel, a.rhs_seq, a.lhs_rel, a.lhs_seq)
    if rule_id == "UI4":
        p, q = premises
        a, ia = _as_ind(p), _as_ia(q)
        _require(ia.relation == a.rhs_rel, "atom lives on the target relation")
        _require(
            ia.left == ia.right == frozenset(a.rhs_seq), "atom pins the whole target"
        )
        return IA(a.lhs_rel, frozenset(a.lhs_seq), frozenset(a.lhs_seq))
    if rule_id == "UI5":
        p, q, r, target = premises
        a, b, ca = _as_ind(p), _as_ind(q), _as_ia(r)
        _require(a.arity == 1 and b.arity == 1, "equality premises are unary inclusions")
        _require(a.rhs_rel == b.rhs_rel and a.rhs_seq == b.rhs_seq, "shared target attribute")
        _require(a.lhs_rel == b.lhs_rel, "sources live on one relation")
        _require(
            ca.relation == a.rhs_rel and ca.left == ca.right == frozenset(a.rhs_seq),
            "target attribute is constant",
        )
        src_a, src_b = a.lhs_seq[0], b.lhs_seq[0]
        return _substitute(target, a.lhs_rel, src_a, src_b, inst)
    if rule_id == "C":
        conclusions = cycle_conclusions(premises)
        return conclusions[inst["index"]]
    raise SchemaMismatch(f"unknown rule {rule_id}")


def _substitute(dep: Dependency, rel: str, a: str, b: str, inst) -> Dependency:
    """Replace chosen occurrences of attribute a with b in a dependency."""
    if isinstance(dep, FD):
        _require(dep.relation == rel, "rewritten dependency lives on the source relation")
        lhs = (dep.lhs - {a}) | {b} if inst.get("replace_left") and a in dep.lhs else dep.lhs
        rhs = (dep.rhs - {a}) | {b} if inst.get("replace_right") and a in dep.rhs else dep.rhs
        return FD(rel, lhs, rhs)
    if isinstance(dep, IA):
        _require(dep.relation == rel, "rewritten dependency lives on the source relation")
        left = (dep.left - {a}) | {b} if inst.get("replace_left") and a in dep.left else dep.left
        right = (dep.right - {a}) | {b} if inst.get("replace_right") and a in dep.right else dep.right
        return IA(rel, left, right)
    positions = set(inst.get("replace_positions", ()))
    lhs_seq = list(dep.lhs_seq)
    rhs_seq = list(dep.rhs_seq)
    if dep.lhs_rel == rel:
        for i in positions & {i for i, x in enumerate(lhs_seq) if x == a}:
            lhs_seq[i] = b
    if dep.rhs_rel == rel:
        for i in positions & {i for i, x in enumerate(rhs_seq) if x == a}:
            rhs_seq[i] = b
    return IND(dep.lhs_rel, lhs_seq, dep.rhs_rel, rhs_seq)


def rule_matches(rule_id: str, premises: Sequence[Dependency], conclusion: Dependency) -> bool:
    """Does the conclusion follow from the premises by one rule application?"""
    try:
        if rule_id == "I1":
            return (
                not premises
                and isinstance(conclusion, IA)
                and not conclusion.left
            )
        if rule_id == "I3":
            (p,) = premises
            return (
                isinstance(p, IA)
                and isinstance(conclusion, IA)
                and conclusion.relation == p.relation
                and conclusion.left == p.left
                and conclusion.right <= p.right
            )
        if rule_id == "F1":
            return (
                not premises
                and isinstance(conclusion, FD)
                and conclusion.rhs <= conclusion.lhs
            )
        if rule_id == "F3":
            (p,) = premises
            if not (isinstance(p, FD) and isinstance(conclusion, FD)):
                return False
            extra = conclusion.lhs - p.lhs
            return conclusion == apply_rule("F3", [p], extra=extra)
        if rule_id == "U1":
            return (
                not premises
                and isinstance(conclusion, IND)
                and conclusion.is_trivial
            )
        if rule_id == "U3":
            (p,) = premises
            if not (isinstance(p, IND) and isinstance(conclusion, IND)):
                return False
            if (p.lhs_rel, p.rhs_rel) != (conclusion.lhs_rel, conclusion.rhs_rel):
                return False
            pairs = set(p.pairs)
            cpairs = conclusion.pairs
            return len(set(cpairs)) == len(cpairs) and set(cpairs) <= pairs
        if rule_id == "UI2":
            for k in range(premises[0].arity + 1 if isinstance(premises[0], IND) else 0):
                try:
                    if apply_rule("UI2", premises, split=k) == conclusion:
                        return True
                except SchemaMismatch:
                    continue
            return False
        if rule_id == "UI5":
            a = premises[0]
            if not isinstance(a, IND):
                return False
            target = premises[3]
            if isinstance(target, (FD, IA)):
                for rl in (False, True):
                    for rr in (False, True):
                        try:
                            if apply_rule(
                                "UI5", premises, replace_left=rl, replace_right=rr
                            ) == conclusion:
                                return True
                        except SchemaMismatch:
                            return False
                return False
            n = target.arity
            for k in range(1 << (2 * n)):
                positions = [i for i in range(2 * n) if k >> i & 1]
                try:
                    if apply_rule(
                        "UI5", premises, replace_positions=positions
                    ) == conclusion:
                        return True
                except SchemaMismatch:
                    continue
            return False
        if rule_id == "C":
            return conclusion in cycle_conclusions(premises)
        # remaining rules are deterministic given their premises
        return apply_rule(rule_id, premises) == conclusion
    except (SchemaMismatch, ValueError):
        return False


# ---------------------------------------------------------------------------
# Deductions


@dataclass(frozen=True)
class DeductionStep:
    dep: Dependency
    rule: Optional[str]  # None marks a hypothesis
    premises: tuple[int, ...] = ()
    inst: tuple = ()  # sorted (key, value) pairs for replay

    def is_hypothesis(self) -> bool:
        return self.rule is None


@dataclass(frozen=True)
class Deduction:
    steps: tuple[DeductionStep, ...]

    @property
    def conclusion(self) -> Dependency:
        return self.steps[-1].dep

    @property
    def rule_steps(self) -> int:
        return sum(1 for s in self.steps if not s.is_hypothesis())

    def pretty(self) -> str:
        lines = []
        for i, s in enumerate(self.steps, start=1):
            if s.is_hypothesis():
                just = "hypothesis"
            else:
                refs = ",".join(str(j + 1) for j in s.premises)
                just = f"{s.rule} ({RULES[s.rule].name})" + (f" from {refs}" if refs else "")
            lines.append(f"{i:3d}. {s.dep}   [{just}]")
        return "\n".join(lines)


def verify_deduction(sigma: Iterable[Dependency], deduction: Deduction) -> bool:
    """Replay a deduction: every step is a hypothesis or a checked rule instance."""
    hypotheses = set(sigma)
    for i, step in enumerate(deduction.steps):
        if step.is_hypothesis():
            if step.dep not in hypotheses:
                return False
            continue
        if any(j >= i for j in step.premises):
            return False
        prem = [deduction.steps[j].dep for j in step.premises]
        if not rule_matches(step.rule, prem, step.dep):
            return False
    return True


@dataclass(frozen=True)
class NotDerivable:
    """Saturation completed without reaching the query; definitive for the system."""

    facts_explored: int = 0


@dataclass(frozen=True)
class DeriveUnknown:
    """Budget exhausted before saturation completed."""

    facts_explored: int = 0


# ---------------------------------------------------------------------------
# Forward-chaining saturation


class _Saturation:
    def __init__(self, sigma: DependencySet, query: Dependency, system: RuleSystem, max_facts: int):
        self.system = system
        self.max_facts = max_facts
        self.query = query
        self.schema = sigma.schema
        deps = list(sigma.deps) + [query]
        self.rel_attrs: dict[str, list[str]] = {}
        for dep in deps:
            if isinstance(dep, (FD, IA)):
                self.rel_attrs.setdefault(dep.relation, [])
            else:
                self.rel_attrs.setdefault(dep.lhs_rel, [])
                self.rel_attrs.setdefault(dep.rhs_rel, [])
        for rel in self.rel_attrs:
            relevant = set()
            for dep in deps:
                if isinstance(dep, (FD, IA)) and dep.relation == rel:
                    relevant |= {a for a in _dep_attrs(dep)}
                elif isinstance(dep, IND):
                    if dep.lhs_rel == rel:
                        relevant |= set(dep.lhs_seq)
                    if dep.rhs_rel == rel:
                        relevant |= set(dep.rhs_seq)
            self.rel_attrs[rel] = sorted(relevant)
        arities = [d.arity for d in deps if isinstance(d, IND)]
        self.max_ind_arity = max(arities + [1])
        if "UI1" in system:
            # concatenation builds inclusions as wide as a query atom's span
            widths = [len(d.left | d.right) for d in deps if isinstance(d, IA)]
            self.max_ind_arity = max([self.max_ind_arity] + widths)

        self.prov: dict[Dependency, tuple] = {}
        self.queue: deque[Dependency] = deque()
        self.fds_by_lhs: dict[tuple[str, frozenset], list[FD]] = {}
        self.fds_by_rhs: dict[tuple[str, frozenset], list[FD]] = {}
        self.ias_by_left: dict[tuple[str, frozenset], list[IA]] = {}
        self.ias_by_union: dict[tuple[str, frozenset], list[IA]] = {}
        self.cas: dict[str, list[IA]] = {}
        self.ias: list[IA] = []
        self.fds: list[FD] = []
        self.inds_by_src: dict[tuple[str, tuple], list[IND]] = {}
        self.inds_by_dst: dict[tuple[str, tuple], list[IND]] = {}
        self.inds: list[IND] = []

    def seed(self, sigma: DependencySet):
        for dep in sigma.deps:
            self.add(dep, None, (), ())
        if "I1" in self.system:
            for rel, attrs in self.rel_attrs.items():
                for k in range(len(attrs) + 1):
                    for xs in itertools.combinations(attrs, k):
                        self.add(
                            IA(rel, frozenset(), frozenset(xs)),
                            "I1",
                            (),
                            (("attrs", tuple(xs)), ("relation", rel)),
                        )
        if "F1" in self.system:
            for rel, attrs in self.rel_attrs.items():
                for k in range(len(attrs) + 1):
                    for xs in itertools.combinations(attrs, k):
                        xset = frozenset(xs)
                        for m in range(len(xs) + 1):
                            for ys in itertools.combinations(xs, m):
                                self.add(
                                    FD(rel, xset, frozenset(ys)),
                                    "F1",
                                    (),
                                    (("lhs", tuple(xs)), ("relation", rel), ("rhs", tuple(ys))),
                                )
        if "U1" in self.system:
            for rel, attrs in self.rel_attrs.items():
                for m in range(1, min(self.max_ind_arity, len(attrs)) + 1):
                    for seq in itertools.permutations(attrs, m):
                        self.add(
                            IND(rel, seq, rel, seq),
                            "U1",
                            (),
                            (("relation", rel), ("seq", seq)),
                        )

    def add(self, dep: Dependency, rule: Optional[str], premises: tuple, inst: tuple) -> bool:
        if isinstance(dep, IND) and dep.arity > self.max_ind_arity:
            return False
        if dep in self.prov:
            return False
        self.prov[dep] = (rule, premises, inst)
        self.queue.append(dep)
        if isinstance(dep, FD):
            self.fds.append(dep)
            self.fds_by_lhs.setdefault((dep.relation, dep.lhs), []).append(dep)
            self.fds_by_rhs.setdefault((dep.relation, dep.rhs), []).append(dep)
        elif isinstance(dep, IA):
            self.ias.append(dep)
            self.ias_by_left.setdefault((dep.relation, dep.left), []).append(dep)
            self.ias_by_union.setdefault((dep.relation, dep.left | dep.right), []).append(dep)
            if dep.left == dep.right:
                self.cas.setdefault(dep.relation, []).append(dep)
        else:
            self.inds.append(dep)
            self.inds_by_src.setdefault((dep.lhs_rel, dep.lhs_seq), []).append(dep)
            self.inds_by_dst.setdefault((dep.rhs_rel, dep.rhs_seq), []).append(dep)
        return True

    def overflown(self) -> bool:
        return len(self.prov) > self.max_facts

    # -- productions -------------------------------------------------------

    def expand(self, dep: Dependency):
        sys = self.system
        if isinstance(dep, IA):
            rel = dep.relation
            if "I2" in sys:
                self.add(dep.flipped(), "I2", (dep,), ())
            if "I3" in sys:
                right = sorted(dep.right)
                for k in range(len(right)):
                    for keep in itertools.combinations(right, k):
                        self.add(
                            IA(rel, dep.left, frozenset(keep)),
                            "I3",
                            (dep,),
                            (("keep", tuple(keep)),),
                        )
            if "I4" in sys:
                for other in self.ias_by_left.get((rel, dep.left | dep.right), ()):
                    self.add(
                        IA(rel, dep.left, dep.right | other.right), "I4", (dep, other), ()
                    )
                for first in self.ias_by_union.get((rel, dep.left), ()):
                    self.add(
                        IA(rel, first.left, first.right | dep.right), "I4", (first, dep), ()
                    )
            if "I5" in sys:
                for ca in self.cas.get(rel, ()):
                    self.add(IA(rel, dep.left, dep.right | ca.left), "I5", (dep, ca), ())
                if dep.left == dep.right:
                    for ia in list(self.ias):
                        if ia.relation == rel:
                            self.add(
                                IA(rel, ia.left, ia.right | dep.left), "I5", (ia, dep), ()
                            )
            if "FI1" in sys:
                for fd in self.fds_by_lhs.get((rel, dep.left), ()):
                    if fd.rhs == dep.right:
                        self.add(FD(rel, frozenset(), fd.rhs), "FI1", (dep, fd), ())
            if "FI2" in sys:
                for (r2, lhs), fds in list(self.fds_by_lhs.items()):
                    if r2 != rel or not lhs <= dep.right:
                        continue
                    for fd in fds:
                        self.add(
                            IA(rel, dep.left, dep.right | fd.rhs), "FI2", (dep, fd), ()
                        )
            if dep.left == dep.right:
                if "UI3" in sys or "UI4" in sys:
                    for (r2, seq), inds in list(self.inds_by_dst.items()):
                        if r2 != rel or frozenset(seq) != dep.left:
                            continue
                        for ind in inds:
                            if "UI3" in sys:
                                self.add(
                                    IND(ind.rhs_rel, ind.rhs_seq, ind.lhs_rel, ind.lhs_seq),
                                    "UI3",
                                    (ind, dep),
                                    (),
                                )
                            if "UI4" in sys:
                                self.add(
                                    IA(ind.lhs_rel, frozenset(ind.lhs_seq), frozenset(ind.lhs_seq)),
                                    "UI4",
                                    (ind, dep),
                                    (),
                                )
            if "UI1" in sys:
                self._ui1_with_atom(dep)
            if "UI2" in sys:
                self._ui2_with_atom(dep)
        elif isinstance(dep, FD):
            rel = dep.relation
            if "F2" in sys:
                for g in self.fds_by_lhs.get((rel, dep.rhs), ()):
                    self.add(FD(rel, dep.lhs, g.rhs), "F2", (dep, g), ())
                for f in self.fds_by_rhs.get((rel, dep.lhs), ()):
                    self.add(FD(rel, f.lhs, dep.rhs), "F2", (f, dep), ())
            if "F3" in sys:
                attrs = self.rel_attrs.get(rel, [])
                for k in range(len(attrs) + 1):
                    for extra in itertools.combinations(attrs, k):
                        self.add(
                            FD(rel, dep.lhs | set(extra), dep.rhs | set(extra)),
                            "F3",
                            (dep,),
                            (("extra", tuple(extra)),),
                        )
            if "FI1" in sys:
                for ia in self.ias_by_left.get((rel, dep.lhs), ()):
                    if ia.right == dep.rhs:
                        self.add(FD(rel, frozenset(), dep.rhs), "FI1", (ia, dep), ())
            if "FI2" in sys:
                for ia in list(self.ias):
                    if ia.relation == rel and dep.lhs <= ia.right:
                        self.add(
                            IA(rel, ia.left, ia.right | dep.rhs), "FI2", (ia, dep), ()
                        )
        else:
            self._expand_ind(dep)

    def _expand_ind(self, dep: IND):
        sys = self.system
        if "U3" in sys:
            n = dep.arity
            for m in range(1, n + 1):
                for pos in itertools.permutations(range(n), m):
                    if m == n and pos == tuple(range(n)):
                        continue
                    self.add(
                        IND(
                            dep.lhs_rel,
                            [dep.lhs_seq[i] for i in pos],
                            dep.rhs_rel,
                            [dep.rhs_seq[i] for i in pos],
                        ),
                        "U3",
                        (dep,),
                        (("positions", pos),),
                    )
        if "U2" in sys:
            for g in self.inds_by_src.get((dep.rhs_rel, dep.rhs_seq), ()):
                self.add(
                    IND(dep.lhs_rel, dep.lhs_seq, g.rhs_rel, g.rhs_seq), "U2", (dep, g), ()
                )
            for f in self.inds_by_dst.get((dep.lhs_rel, dep.lhs_seq), ()):
                self.add(
                    IND(f.lhs_rel, f.lhs_seq, dep.rhs_rel, dep.rhs_seq), "U2", (f, dep), ()
                )
        if ("UI3" in sys or "UI4" in sys):
            for ca in self.cas.get(dep.rhs_rel, ()):
                if ca.left == frozenset(dep.rhs_seq):
                    if "UI3" in sys:
                        self.add(
                            IND(dep.rhs_rel, dep.rhs_seq, dep.lhs_rel, dep.lhs_seq),
                            "UI3",
                            (dep, ca),
                            (),
                        )
                    if "UI4" in sys:
                        self.add(
                            IA(dep.lhs_rel, frozenset(dep.lhs_seq), frozenset(dep.lhs_seq)),
                            "UI4",
                            (dep, ca),
                            (),
                        )
        if "UI1" in sys:
            self._ui1_with_ind(dep)
        if "UI2" in sys:
            self._ui2_with_ind(dep)

    def _ui1_try(self, a: IND, b: IND):
        if a.lhs_rel != b.lhs_rel or a.rhs_rel != b.rhs_rel:
            return
        if set(a.lhs_seq) & set(b.lhs_seq) or set(a.rhs_seq) & set(b.rhs_seq):
            return
        if a.arity + b.arity > self.max_ind_arity:
            return
        for ia in self.ias_by_left.get((a.rhs_rel, frozenset(a.rhs_seq)), ()):
            if ia.right == frozenset(b.rhs_seq):
                self.add(
                    IND(a.lhs_rel, a.lhs_seq + b.lhs_seq, a.rhs_rel, a.rhs_seq + b.rhs_seq),
                    "UI1",
                    (a, b, ia),
                    (),
                )

    def _ui1_with_ind(self, dep: IND):
        for other in list(self.inds):
            self._ui1_try(dep, other)
            self._ui1_try(other, dep)

    def _ui1_with_atom(self, ia: IA):
        for a in self.inds_by_dst_set(ia.relation, ia.left):
            for b in self.inds_by_dst_set(ia.relation, ia.right):
                self._ui1_try(a, b)

    def inds_by_dst_set(self, rel: str, attrs: frozenset) -> list[IND]:
        return [
            ind
            for (r, seq), lst in self.inds_by_dst.items()
            if r == rel and frozenset(seq) == attrs
            for ind in lst
        ]

    def _ui2_core(self, a: IND):
        back = self.inds_by_src.get((a.rhs_rel, a.rhs_seq), ())
        for b in back:
            if b.rhs_rel != a.lhs_rel or b.rhs_seq != a.lhs_seq:
                continue
            for k in range(a.arity + 1):
                left = frozenset(a.rhs_seq[:k])
                right = frozenset(a.rhs_seq[k:])
                for ia in self.ias_by_left.get((a.rhs_rel, left), ()):
                    if ia.right == right:
                        self.add(
                            IA(a.lhs_rel, frozenset(a.lhs_seq[:k]), frozenset(a.lhs_seq[k:])),
                            "UI2",
                            (a, b, ia),
                            (("split", k),),
                        )

    def _ui2_with_ind(self, dep: IND):
        self._ui2_core(dep)
        for a in self.inds_by_dst.get((dep.lhs_rel, dep.lhs_seq), ()):
            if a.lhs_rel == dep.rhs_rel and a.lhs_seq == dep.rhs_seq:
                self._ui2_core(a)

    def _ui2_with_atom(self, ia: IA):
        for a in self.inds_by_dst_set(ia.relation, ia.left | ia.right):
            self._ui2_core(a)

    def cycle_pass(self) -> bool:
        """Find alternating FD/IND cycles and add every licensed reversal.

        Works on the color-alternation product graph; every arc lying on an
        alternating cycle is covered by searching a closing path per arc.
        """
        red = {}
        black = {}
        for fd in self.fds:
            if len(fd.lhs) == 1 and len(fd.rhs) == 1:
                (a,) = fd.lhs
                (b,) = fd.rhs
                red.setdefault(a, {})[b] = fd
        for ind in self.inds:
            if ind.arity == 1:
                s, t = ind.lhs_seq[0], ind.rhs_seq[0]
                black.setdefault(t, {})[s] = ind  # edge target -> source
        adj: dict[tuple, list[tuple]] = {}
        for a, outs in red.items():
            for b in outs:
                adj.setdefault((a, "r"), []).append((b, "b"))
        for a, outs in black.items():
            for b in outs:
                adj.setdefault((a, "b"), []).append((b, "r"))
        added = False
        for tail in sorted(adj):
            for head in sorted(adj[tail]):
                path = self._bfs_path(head, tail, adj)
                if path is None:
                    continue
                cycle = [tail] + path[:-1]
                if cycle[0][1] != "r":
                    cycle = cycle[1:] + cycle[:1]
                try:
                    premises = []
                    for (a, color), (b, _) in zip(cycle, cycle[1:] + [cycle[0]]):
                        premises.append(red[a][b] if color == "r" else black[a][b])
                    conclusions = cycle_conclusions(premises)
                except (SchemaMismatch, KeyError):
                    continue
                for idx, dep in enumerate(conclusions):
                    if self.add(dep, "C", tuple(premises), (("index", idx),)):
                        added = True
        return added

    @staticmethod
    def _bfs_path(src, dst, adj):
        """Shortest node path src..dst in the product graph, or None."""
        if src == dst:
            return [src]
        prev = {src: None}
        dq = deque([src])
        while dq:
            node = dq.popleft()
            for nxt in adj.get(node, ()):
                if nxt in prev:
                    continue
                prev[nxt] = node
                if nxt == dst:
                    path = [nxt]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    path.reverse()
                    return path
                dq.append(nxt)
        return None

    def run(self) -> bool:
        """Saturate; True when the query was derived, False on completion."""
        while True:
            while self.queue:
                if self.query in self.prov:
                    return True
                if self.overflown():
                    raise _Overflow()
                self.expand(self.queue.popleft())
            if self.query in self.prov:
                return True
            if "C" in self.system and self.cycle_pass():
                continue
            return False

    def extract(self, target: Dependency) -> Deduction:
        order: list[Dependency] = []
        index: dict[Dependency, int] = {}

        def visit(dep: Dependency):
            if dep in index:
                return
            rule, premises, _ = self.prov[dep]
            if rule is not None:
                for p in premises:
                    visit(p)
            index[dep] = len(order)
            order.append(dep)

        visit(target)
        steps = []
        for dep in order:
            rule, premises, inst = self.prov[dep]
            steps.append(
                DeductionStep(
                    dep,
                    rule,
                    tuple(index[p] for p in premises) if rule is not None else (),
                    inst,
                )
            )
        return Deduction(tuple(steps))


class _Overflow(Exception):
    pass


def _dep_attrs(dep: Dependency) -> frozenset:
    if isinstance(dep, FD):
        return dep.lhs | dep.rhs
    if isinstance(dep, IA):
        return dep.left | dep.right
    return frozenset(dep.lhs_seq) | frozenset(dep.rhs_seq)


def derive(
    sigma: DependencySet,
    query: Dependency,
    system: RuleSystem,
    max_facts: int = 200_000,
) -> Union[Deduction, NotDerivable, DeriveUnknown]:
    """Saturate the attribute-bounded universe under the system's rules.

    Returns a replayable Deduction when the query is reached, NotDerivable
    when saturation completes without it (definitive: the universe over the
    fixed attributes is finite), and DeriveUnknown if the fact budget runs
    out first.
    """
    sat = _Saturation(sigma, query, system, max_facts)
    sat.seed(sigma)
    try:
        found = sat.run()
    except _Overflow:
        return DeriveUnknown(facts_explored=len(sat.prov))
    if found or query in sat.prov:
        return sat.extract(query)
    return NotDerivable(facts_explored=len(sat.prov))
