"""Domain types for relational dependency reasoning.

Schemas, the three dependency kinds (functional, inclusion, independence),
dependency sets, class profiling, and the structural operations every
decision engine shares: restriction, query decomposition, constancy
normalization, and the unarization rewrite for independence atoms.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Union

from .errors import MalformedDependency, NotFdIa


def _fmt_attrs(attrs) -> str:
    return " ".join(sorted(attrs))


@dataclass(frozen=True)
class Schema:
    """A database schema: an ordered sequence of relation schemata.

    Relation names are distinct and attribute sets of distinct relations are
    disjoint, so an attribute name identifies its relation.
    """

    relations: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        names = [name for name, _ in self.relations]
        if len(set(names)) != len(names):
            raise MalformedDependency(f"duplicate relation names in {names}")
        seen: dict[str, str] = {}
        for rel, attrs in self.relations:
            if len(set(attrs)) != len(attrs):
                raise MalformedDependency(f"duplicate attribute in {rel}({', '.join(attrs)})")
            for a in attrs:
                if not a:
                    raise MalformedDependency("empty attribute name")
                if a in seen:
                    raise MalformedDependency(
                        f"attribute {a} appears in both {seen[a]} and {rel}"
                    )
                seen[a] = rel

    @classmethod
    def single(cls, attrs, name: str = "R") -> "Schema":
        """Uni-relational schema over the given attributes."""
        return cls(((name, tuple(attrs)),))

    @property
    def relation_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    def attributes(self, relation: str) -> tuple[str, ...]:
        for name, attrs in self.relations:
            if name == relation:
                return attrs
        raise MalformedDependency(f"unknown relation {relation}")

    def relation_of(self, attribute: str) -> str:
        for name, attrs in self.relations:
            if attribute in attrs:
                return name
        raise MalformedDependency(f"unknown attribute {attribute}")

    @property
    def all_attributes(self) -> tuple[str, ...]:
        return tuple(a for _, attrs in self.relations for a in attrs)

    def has_relation(self, relation: str) -> bool:
        return any(name == relation for name, _ in self.relations)

    def drop_attributes(self, attrs) -> "Schema":
        """Schema with the given attributes removed from every relation."""
        dropped = set(attrs)
        return Schema(
            tuple(
                (name, tuple(a for a in rel_attrs if a not in dropped))
                for name, rel_attrs in self.relations
            )
        )


@dataclass(frozen=True)
class FD:
    """Functional dependency ``relation: lhs -> rhs`` over attribute sets."""

    relation: str
    lhs: frozenset[str]
    rhs: frozenset[str]

    def __init__(self, relation: str, lhs, rhs):
        object.__setattr__(self, "relation", relation)
        object.__setattr__(self, "lhs", frozenset(lhs))
        object.__setattr__(self, "rhs", frozenset(rhs))

    def __str__(self):
        lhs = _fmt_attrs(self.lhs)
        prefix = f"fd {self.relation}: {lhs} " if lhs else f"fd {self.relation}: "
        return prefix + f"-> {_fmt_attrs(self.rhs)}"

    @property
    def arity(self) -> int:
        return max(len(self.lhs), len(self.rhs))

    @property
    def is_trivial(self) -> bool:
        return self.rhs <= self.lhs


@dataclass(frozen=True)
class IA:
    """Independence atom ``relation: left _|_ right``; sides may overlap."""

    relation: str
    left: frozenset[str]
    right: frozenset[str]

    def __init__(self, relation: str, left, right):
        object.__setattr__(self, "relation", relation)
        object.__setattr__(self, "left", frozenset(left))
        object.__setattr__(self, "right", frozenset(right))

    def __str__(self):
        return f"ia {self.relation}: {_fmt_attrs(self.left)} _|_ {_fmt_attrs(self.right)}"

    @property
    def arity(self) -> int:
        return max(len(self.left), len(self.right))

    @property
    def overlap(self) -> frozenset[str]:
        return self.left & self.right

    @property
    def is_disjoint(self) -> bool:
        return not (self.left & self.right)

    @property
    def is_constancy(self) -> bool:
        return self.left == self.right and len(self.left) == 1

    @property
    def is_trivial(self) -> bool:
        return not self.left or not self.right

    def flipped(self) -> "IA":
        return IA(self.relation, self.right, self.left)

    def canonical(self) -> "IA":
        """Orientation-normalized form: sides ordered lexicographically."""
        a, b = sorted([tuple(sorted(self.left)), tuple(sorted(self.right))])
        return IA(self.relation, a, b)


@dataclass(frozen=True)
class IND:
    """Inclusion dependency ``lhs_rel[lhs_seq] <= rhs_rel[rhs_seq]``."""

    lhs_rel: str
    lhs_seq: tuple[str, ...]
    rhs_rel: str
    rhs_seq: tuple[str, ...]

    def __init__(self, lhs_rel: str, lhs_seq, rhs_rel: str, rhs_seq):
        object.__setattr__(self, "lhs_rel", lhs_rel)
        object.__setattr__(self, "lhs_seq", tuple(lhs_seq))
        object.__setattr__(self, "rhs_rel", rhs_rel)
        object.__setattr__(self, "rhs_seq", tuple(rhs_seq))
        if len(self.lhs_seq) != len(self.rhs_seq):
            raise MalformedDependency(
                f"inclusion sides differ in length: {self.lhs_seq} vs {self.rhs_seq}"
            )
        if len(set(self.lhs_seq)) != len(self.lhs_seq) or len(set(self.rhs_seq)) != len(self.rhs_seq):
            raise MalformedDependency(f"repeated attribute within a sequence of {self}")

    def __str__(self):
        return (
            f"ind {self.lhs_rel}[{','.join(self.lhs_seq)}] <= "
            f"{self.rhs_rel}[{','.join(self.rhs_seq)}]"
        )

    @property
    def arity(self) -> int:
        return len(self.lhs_seq)

    @property
    def pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(zip(self.lhs_seq, self.rhs_seq))

    @property
    def is_trivial(self) -> bool:
        return self.lhs_rel == self.rhs_rel and self.lhs_seq == self.rhs_seq

    def canonical(self) -> "IND":
        """Position order normalized by sorting (source, target) pairs."""
        ps = sorted(self.pairs)
        return IND(self.lhs_rel, [a for a, _ in ps], self.rhs_rel, [b for _, b in ps])

    def unary_parts(self) -> tuple["IND", ...]:
        return tuple(IND(self.lhs_rel, [a], self.rhs_rel, [b]) for a, b in self.pairs)


Dependency = Union[FD, IA, IND]


def dependency_attributes(dep: Dependency) -> frozenset[str]:
    if isinstance(dep, FD):
        return dep.lhs | dep.rhs
    if isinstance(dep, IA):
        return dep.left | dep.right
    return frozenset(dep.lhs_seq) | frozenset(dep.rhs_seq)


def check_wellformed(dep: Dependency, schema: Schema) -> None:
    """Raise MalformedDependency unless dep's attributes live on its relation(s)."""
    if isinstance(dep, (FD, IA)):
        if not schema.has_relation(dep.relation):
            raise MalformedDependency(f"unknown relation {dep.relation} in {dep}")
        rel_attrs = set(schema.attributes(dep.relation))
        bad = dependency_attributes(dep) - rel_attrs
        if bad:
            raise MalformedDependency(f"attributes {sorted(bad)} not on {dep.relation} in {dep}")
    else:
        for rel, seq in ((dep.lhs_rel, dep.lhs_seq), (dep.rhs_rel, dep.rhs_seq)):
            if not schema.has_relation(rel):
                raise MalformedDependency(f"unknown relation {rel} in {dep}")
            bad = set(seq) - set(schema.attributes(rel))
            if bad:
                raise MalformedDependency(f"attributes {sorted(bad)} not on {rel} in {dep}")


@dataclass(frozen=True)
class DependencySet:
    """A finite set of dependencies over one schema."""

    schema: Schema
    deps: tuple[Dependency, ...]

    def __init__(self, schema: Schema, deps):
        object.__setattr__(self, "schema", schema)
        object.__setattr__(self, "deps", tuple(deps))
        for dep in self.deps:
            check_wellformed(dep, schema)

    def __iter__(self) -> Iterator[Dependency]:
        return iter(self.deps)

    def __len__(self) -> int:
        return len(self.deps)

    def fds(self) -> tuple[FD, ...]:
        return tuple(d for d in self.deps if isinstance(d, FD))

    def ias(self) -> tuple[IA, ...]:
        return tuple(d for d in self.deps if isinstance(d, IA))

    def inds(self) -> tuple[IND, ...]:
        return tuple(d for d in self.deps if isinstance(d, IND))

    def with_deps(self, deps) -> "DependencySet":
        return DependencySet(self.schema, deps)


# ---------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Implied:
    """Positive verdict; witness is a deduction, a chase trace, or a note."""

    witness: Any = None


@dataclass(frozen=True)
class NotImplied:
    """Negative verdict; witness, when present, is a counterexample database."""

    witness: Any = None
    note: str = ""


@dataclass(frozen=True)
class Unknown:
    """Budget ran out before the engine reached a definite answer."""

    reason: str = ""
    budget: int = 0


@dataclass(frozen=True)
class Unsupported:
    """No engine covers this class/mode combination; reason names the wall."""

    reason: str


Verdict = Union[Implied, NotImplied, Unknown, Unsupported]


# ---------------------------------------------------------------------------
# Class profiling


@dataclass(frozen=True)
class ClassProfile:
    """Which dependency subclasses occur in a set, and at which arities."""

    has_fd: bool = False
    has_ind: bool = False
    has_ia: bool = False
    max_fd_arity: int = 0
    max_ind_arity: int = 0
    max_ia_arity: int = 0
    all_fds_unary: bool = True
    all_inds_unary: bool = True
    multi_relational: bool = False


def classify(sigma: DependencySet, query: Optional[Dependency] = None) -> ClassProfile:
    """Profile sigma plus an optional query dependency."""
    deps = list(sigma.deps)
    if query is not None:
        check_wellformed(query, sigma.schema)
        deps.append(query)
    has_fd = has_ind = has_ia = False
    max_fd = max_ind = max_ia = 0
    rels: set[str] = set()
    for dep in deps:
        if isinstance(dep, FD):
            has_fd = True
            max_fd = max(max_fd, dep.arity)
            rels.add(dep.relation)
        elif isinstance(dep, IA):
            has_ia = True
            max_ia = max(max_ia, dep.arity)
            rels.add(dep.relation)
        else:
            has_ind = True
            max_ind = max(max_ind, dep.arity)
            rels.update((dep.lhs_rel, dep.rhs_rel))
    return ClassProfile(
        has_fd=has_fd,
        has_ind=has_ind,
        has_ia=has_ia,
        max_fd_arity=max_fd,
        max_ind_arity=max_ind,
        max_ia_arity=max_ia,
        all_fds_unary=max_fd <= 1,
        all_inds_unary=max_ind <= 1,
        multi_relational=len(rels) > 1,
    )


# ---------------------------------------------------------------------------
# Structural operations


def restrict(dep: Dependency, attrs) -> Dependency:
    """Restrict a dependency to the given attribute set, componentwise."""
    keep = set(attrs)
    if isinstance(dep, FD):
        return FD(dep.relation, dep.lhs & keep, dep.rhs & keep)
    if isinstance(dep, IA):
        return IA(dep.relation, dep.left & keep, dep.right & keep)
    pairs = [(a, b) for a, b in dep.pairs if a in keep and b in keep]
    return IND(dep.lhs_rel, [a for a, _ in pairs], dep.rhs_rel, [b for _, b in pairs])


def restrict_set(deps, attrs) -> list[Dependency]:
    return [restrict(d, attrs) for d in deps]


def decompose_ia_query(ia: IA) -> tuple[IA, frozenset[IA]]:
    """Split an IA into a disjoint-sided atom plus one constancy atom per overlap attribute.

    The original atom is implied exactly when all parts are.
    """
    dia = IA(ia.relation, ia.left - ia.right, ia.right - ia.left)
    cas = frozenset(IA(ia.relation, {a}, {a}) for a in ia.left & ia.right)
    return dia, cas


def expand_constancy(ia: IA) -> frozenset[IA]:
    """Normalize X _|_ X to one single-attribute constancy atom per member."""
    if ia.left != ia.right:
        raise MalformedDependency(f"{ia} is not of the form X _|_ X")
    return frozenset(IA(ia.relation, {a}, {a}) for a in ia.left)


def constancy_seeds(deps) -> set[tuple[str, str]]:
    """(relation, attribute) pairs made constant by side overlaps of IAs."""
    seeds = set()
    for dep in deps:
        if isinstance(dep, IA):
            for a in dep.overlap:
                seeds.add((dep.relation, a))
        elif isinstance(dep, FD) and not dep.lhs:
            for a in dep.rhs:
                seeds.add((dep.relation, a))
    return seeds


def unarize_ias(
    sigma: DependencySet, query: Dependency
) -> tuple[DependencySet, Dependency]:
    """Rewrite an FD+IA problem so every assumption IA becomes unary.

    Each IA X _|_ Y is replaced by {A _|_ B, X -> A, A -> X, Y -> B, B -> Y}
    with fresh attributes A, B. An IA query gets the same treatment and turns
    into the fresh unary atom. Implication is preserved in both directions.
    """
    profile = classify(sigma, query)
    if profile.has_ind:
        raise NotFdIa("unarize_ias handles functional dependencies and independence atoms only")
    if profile.multi_relational:
        raise NotFdIa("unarize_ias requires a uni-relational input")
    rel = sigma.schema.relations[0][0]
    attrs = list(sigma.schema.attributes(rel))
    taken = set(attrs)
    counter = itertools.count(1)

    def fresh() -> str:
        while True:
            name = f"F{next(counter)}"
            if name not in taken:
                taken.add(name)
                return name

    new_deps: list[Dependency] = []
    new_attrs = list(attrs)

    def widen(x: frozenset[str], y: frozenset[str]) -> tuple[str, str]:
        a, b = fresh(), fresh()
        new_attrs.extend([a, b])
        new_deps.extend(
            [
                FD(rel, x, {a}),
                FD(rel, {a}, x),
                FD(rel, y, {b}),
                FD(rel, {b}, y),
            ]
        )
        return a, b

    for dep in sigma.deps:
        if isinstance(dep, IA):
            a, b = widen(dep.left, dep.right)
            new_deps.append(IA(rel, {a}, {b}))
        else:
            new_deps.append(dep)

    new_query = query
    if isinstance(query, IA):
        a, b = widen(query.left, query.right)
        new_query = IA(rel, {a}, {b})

    schema = Schema.single(new_attrs, rel)
    return DependencySet(schema, new_deps), new_query
