"""Constructors and a verifier for finite Armstrong databases.

An Armstrong database for a dependency class satisfies exactly the implied
dependencies of that class: a perfect sample. Three constructions are
provided (unary FD + IA; unary FD + unary IND + IA under finite
implication; IND + IA via counterexample products) plus a verifier that
replays the whole bounded candidate space through the decision engines.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .chase import _chase_fixpoint, imply_ind_ia, uind_ca_closure
from .core import (
    FD,
    IA,
    IND,
    Dependency,
    DependencySet,
    Implied,
    Schema,
    classify,
)
from .errors import CombinatorialBlowup, NotUnary, TooManyAttributes
from .polyengine import (
    StarClosure,
    _reachable,
    build_star_closure,
    imply_star,
    star_ia_implied,
    strongly_connected_components,
)
from .semantics import Database, satisfies


@dataclass(frozen=True)
class ArmstrongReport:
    database: Database
    checked_space: str
    violations: tuple[tuple[Dependency, bool, bool], ...]  # (dep, expected, actual)

    @property
    def exact(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class SccCardinalityPlan:
    scc_of: dict[str, int]
    column_sizes: dict[int, int]  # level -> N_i
    clique_counts: dict[int, int]  # level -> M_i (cliques at levels <= i)


# ---------------------------------------------------------------------------
# Candidate enumeration and verification


def _ia_candidates(rel: str, attrs, bound: int, overlapping: bool = True):
    attrs = sorted(attrs)
    sides = [
        frozenset(c)
        for k in range(1, bound + 1)
        for c in itertools.combinations(attrs, k)
    ]
    seen = set()
    for x in sides:
        for y in sides:
            if not overlapping and x & y:
                continue
            key = tuple(sorted([tuple(sorted(x)), tuple(sorted(y))]))
            if key in seen:
                continue
            seen.add(key)
            yield IA(rel, x, y)


def _ufd_candidates(rel: str, attrs):
    attrs = sorted(attrs)
    for b in attrs:
        yield FD(rel, frozenset(), frozenset({b}))
        for a in attrs:
            if a != b:
                yield FD(rel, frozenset({a}), frozenset({b}))


def _ind_candidates(schema: Schema, bound: int):
    for src_rel, src_attrs in schema.relations:
        for dst_rel, dst_attrs in schema.relations:
            for k in range(1, bound + 1):
                for src in itertools.combinations(sorted(src_attrs), k):
                    for dst in itertools.permutations(sorted(dst_attrs), k):
                        ind = IND(src_rel, src, dst_rel, dst)
                        if ind.is_trivial:
                            continue
                        yield ind


def enumerate_candidates(schema: Schema, class_spec: str, bound: int):
    """Deterministic candidate space for a class, arity-bounded per side."""
    out: list[Dependency] = []
    if class_spec in ("ufd_ia", "star_finite"):
        rel, attrs = schema.relations[0]
        out.extend(_ufd_candidates(rel, attrs))
        out.extend(_ia_candidates(rel, attrs, bound))
        if class_spec == "star_finite":
            out.extend(ind for ind in _ind_candidates(schema, 1))
    elif class_spec == "ind_ia":
        for rel, attrs in schema.relations:
            out.extend(_ia_candidates(rel, attrs, bound))
        out.extend(_ind_candidates(schema, bound))
    else:
        raise ValueError(f"unknown class spec {class_spec}")
    return out


def _engine_for(sigma: DependencySet, class_spec: str) -> Callable[[Dependency], bool]:
    if class_spec == "ind_ia":
        return lambda dep: isinstance(imply_ind_ia(sigma, dep, want_witness=False), Implied)
    mode = "finite" if class_spec == "star_finite" else "unrestricted"
    closure = build_star_closure(sigma, mode)
    return lambda dep: isinstance(
        imply_star(sigma, dep, mode, closure=closure, want_witness=False), Implied
    )


def verify_armstrong(
    db: Database,
    sigma: DependencySet,
    class_spec: str,
    arity_bound: int,
) -> ArmstrongReport:
    """Check db against every candidate: held exactly when implied."""
    engine = _engine_for(sigma, class_spec)
    violations = []
    for dep in enumerate_candidates(sigma.schema, class_spec, arity_bound):
        expected = engine(dep)
        actual = satisfies(db, dep)
        if expected != actual:
            violations.append((dep, expected, actual))
    space = f"{class_spec} candidates with side arity <= {arity_bound}"
    return ArmstrongReport(db, space, tuple(violations))


# ---------------------------------------------------------------------------
# Unary FD + IA construction


def _ia_seed_relation(
    attrs: list[str], plus: dict[str, frozenset], atoms: list[IA], rel: str
) -> list[tuple]:
    """The two-constant seed plus one per-attribute tuple, chased under the atoms.

    Attribute block tuples map the closure of their attribute to 0 and the
    rest to a private value; chasing with a fixed fresh fill symbol
    saturates exactly the implied atoms.
    """
    width = len(attrs)
    pos = {a: i for i, a in enumerate(attrs)}
    rows: list[tuple] = [tuple([0] * width), tuple([1] * width)]
    for i, a in enumerate(attrs, start=2):
        row = [i] * width
        for b in plus[a]:
            row[pos[b]] = 0
        rows.append(tuple(row))
    rows = list(dict.fromkeys(rows))
    schema = Schema.single(attrs, rel)
    table = {rel: rows}
    _chase_fixpoint(schema, table, list(atoms), fill="b")
    return table[rel]


def _fold_by_closure(
    rows: Iterable[tuple], attrs: list[str], plus: dict[str, frozenset]
) -> list[tuple]:
    pos = {a: i for i, a in enumerate(attrs)}
    fold_idx = {a: tuple(pos[b] for b in sorted(plus[a])) for a in attrs}
    out = []
    for t in rows:
        out.append(tuple(tuple(t[i] for i in fold_idx[a]) for a in attrs))
    return list(dict.fromkeys(out))


def _red_plus(closure: StarClosure, attrs: list[str]) -> dict[str, frozenset]:
    keep = set(attrs)
    return {
        a: frozenset(_reachable([a], closure.red_adj) & keep) for a in attrs
    }


def armstrong_ufd_ia(
    sigma: DependencySet,
    max_attributes: int = 10,
    verify: bool = True,
    arity_bound: Optional[int] = None,
) -> ArmstrongReport:
    """Finite Armstrong relation for a unary-FD + IA set.

    Constant columns are split off first; the non-constant remainder gets
    the seed-and-chase construction folded through attribute closures, which
    satisfies exactly the implied unary FDs and atoms.
    """
    profile = classify(sigma)
    if profile.has_ind:
        raise NotUnary("this construction covers unary FDs and IAs only")
    closure = build_star_closure(sigma, "unrestricted")
    rel = closure.relation
    all_attrs = list(closure.schema_attrs)
    consts = closure.constants
    rest = [a for a in all_attrs if a not in consts]
    if len(rest) > max_attributes:
        raise TooManyAttributes(
            f"{len(rest)} non-constant attributes exceed the limit {max_attributes}"
        )
    if rest:
        plus = _red_plus(closure, rest)
        atoms = [ia for ia in closure.restricted_atoms()]
        chased = _ia_seed_relation(rest, plus, atoms, rel)
        folded = _fold_by_closure(chased, rest, plus)
    else:
        folded = [()]
    pos = {a: i for i, a in enumerate(rest)}
    rows = []
    for t in folded:
        rows.append(tuple(0 if a in consts else t[pos[a]] for a in all_attrs))
    db = Database(sigma.schema, {rel: rows})
    if not verify:
        return ArmstrongReport(db, "unverified", ())
    bound = arity_bound if arity_bound is not None else len(all_attrs)
    return verify_armstrong(db, sigma, "ufd_ia", bound)


# ---------------------------------------------------------------------------
# Unary FD + unary IND + IA construction (finite implication)


def _mutual_classes(attrs: Iterable[str], adj: dict[str, set[str]]) -> list[list[str]]:
    """Partition attrs into classes mutually reachable in adj (reflexive)."""
    attrs = sorted(attrs)
    reach = {a: _reachable([a], adj) for a in attrs}
    classes: list[list[str]] = []
    assigned: dict[str, int] = {}
    for a in attrs:
        placed = False
        for idx, cls in enumerate(classes):
            b = cls[0]
            if b in reach[a] and a in reach[b]:
                cls.append(a)
                assigned[a] = idx
                placed = True
                break
        if not placed:
            assigned[a] = len(classes)
            classes.append([a])
    return classes


def _normalize_columns(
    rows: list[tuple], attrs: list[str], red_cliques: list[list[str]]
) -> list[tuple]:
    """Rename every column onto an initial segment 1..k, red cliques identical."""
    pos = {a: i for i, a in enumerate(attrs)}
    ordered = sorted(rows, key=repr)
    new_rows = [list(t) for t in ordered]
    for clique in red_cliques:
        rep = clique[0]
        mapping: dict = {}
        for t in ordered:
            mapping.setdefault(t[pos[rep]], len(mapping) + 1)
        for i, t in enumerate(ordered):
            v = mapping[t[pos[rep]]]
            for a in clique:
                new_rows[i][pos[a]] = v
    return list(dict.fromkeys(tuple(t) for t in new_rows))


def armstrong_star_finite(
    sigma: DependencySet,
    max_attributes: int = 8,
    verify: bool = True,
    arity_bound: Optional[int] = None,
) -> ArmstrongReport:
    """Finite-implication Armstrong relation for unary FDs, unary INDs, and IAs.

    Builds the unary-FD+IA relation on the non-constant attributes, lifts
    column cardinalities level by level along the component numbering so
    higher components get strictly more values, then renames per-column so
    that exactly the implied inclusions survive. Constant columns carry one
    token per mutual-inclusion class.
    """
    closure = build_star_closure(sigma, "finite")
    rel = closure.relation
    all_attrs = list(closure.schema_attrs)
    consts = closure.constants
    rest = [a for a in all_attrs if a not in consts]
    if len(rest) > max_attributes:
        raise TooManyAttributes(
            f"{len(rest)} non-constant attributes exceed the limit {max_attributes}"
        )

    red_adj = {
        a: {b for b in closure.red_adj.get(a, ()) if b in set(rest)} for a in rest
    }
    black_adj_all = closure.black_adj
    black_adj = {
        a: {b for b in black_adj_all.get(a, ()) if b in set(rest)} for a in rest
    }
    mixed = {a: red_adj.get(a, set()) | black_adj.get(a, set()) for a in rest}

    # component levels: Tarjan emits reverse-topologically, so level grows
    # against edge direction; shift by one to reserve level 0 for constants
    comps = strongly_connected_components(rest, mixed)
    scc_of = {a: i + 1 for i, comp in enumerate(comps) for a in comp}
    levels = sorted({scc_of[a] for a in rest})

    red_cliques = _mutual_classes(rest, red_adj)
    black_cliques = _mutual_classes(rest, black_adj)
    const_cliques = _mutual_classes(
        consts, {a: {b for b in black_adj_all.get(a, ()) if b in consts} for a in consts}
    )

    def clique_level(cl):
        return scc_of[cl[0]]

    ordered_cliques = sorted(
        [(0, cl) for cl in const_cliques]
        + [(clique_level(cl), cl) for cl in black_cliques],
        key=lambda lc: (lc[0], lc[1][0]),
    )
    scc_prime = {}
    for idx, (_, cl) in enumerate(ordered_cliques, start=1):
        for a in cl:
            scc_prime[a] = idx
    m_counts: dict[int, int] = {}
    for level in [0] + levels:
        m_counts[level] = sum(1 for lv, _ in ordered_cliques if lv <= level)

    # base relation satisfying exactly the implied unary FDs and atoms
    if rest:
        plus = _red_plus(closure, rest)
        atoms = list(closure.restricted_atoms())
        rows = _ia_seed_relation(rest, plus, atoms, rel)
        rows = _fold_by_closure(rows, rest, plus)
    else:
        rows = [()]
    pos = {a: i for i, a in enumerate(rest)}

    n_sizes: dict[int, int] = {0: 1}
    prev = 1
    for level in levels:
        rows = _normalize_columns(rows, rest, red_cliques)
        level_attrs = [a for a in rest if scc_of[a] == level]
        col_max = {a: max(t[pos[a]] for t in rows) for a in level_attrs}
        n_i = max(max(col_max.values()), prev + m_counts[level])
        level_cliques = [cl for cl in red_cliques if scc_of[cl[0]] == level]
        out: list[tuple] = []
        for t in rows:
            variants = [list(t)]
            for cl in level_cliques:
                rep = cl[0]
                if t[pos[rep]] != col_max[rep]:
                    continue
                expanded = []
                for var in variants:
                    for v in range(col_max[rep], n_i + 1):
                        nxt = list(var)
                        for a in cl:
                            nxt[pos[a]] = v
                        expanded.append(nxt)
                variants = expanded
            out.extend(tuple(v) for v in variants)
        rows = list(dict.fromkeys(out))
        rows = _fold_by_closure(rows, rest, plus)
        n_sizes[level] = n_i
        prev = n_i

    if rest:
        rows = _normalize_columns(rows, rest, red_cliques)
    top = prev

    # per-column renaming that kills exactly the non-implied inclusions;
    # reachability includes constant targets so their tokens land in columns
    # that must include them
    black_reach = {a: _reachable([a], black_adj_all) for a in rest}
    final_rows = []
    for t in rows:
        new = list(t)
        for a in rest:
            level = scc_of[a]
            base = n_sizes[sorted([lv for lv in n_sizes if lv < level])[-1]]
            tokens = {
                base + scc_prime[b]: top + scc_prime[b] for b in black_reach[a]
            }
            v = new[pos[a]]
            if v in tokens:
                new[pos[a]] = tokens[v]
        final_rows.append(tuple(new))
    rows = list(dict.fromkeys(final_rows))

    full_rows = []
    for t in rows:
        full_rows.append(
            tuple(
                top + scc_prime[a] if a in consts else t[pos[a]] for a in all_attrs
            )
        )
    db = Database(sigma.schema, {rel: full_rows})
    if not verify:
        return ArmstrongReport(db, "unverified", ())
    bound = arity_bound if arity_bound is not None else len(all_attrs)
    return verify_armstrong(db, sigma, "star_finite", bound)


# ---------------------------------------------------------------------------
# IND + IA construction by counterexample products


def _product_dbs(a: Database, b: Database, row_cap: int) -> Database:
    rows: dict[str, list[tuple]] = {}
    for name, _ in a.schema.relations:
        ra, rb = a.sorted_rows(name), b.sorted_rows(name)
        if len(ra) * len(rb) > row_cap:
            raise CombinatorialBlowup(
                f"product would hold {len(ra) * len(rb)} rows in {name}"
            )
        rows[name] = [
            tuple((x, y) for x, y in zip(t1, t2)) for t1 in ra for t2 in rb
        ]
    return Database(a.schema, rows)


def armstrong_ind_ia(
    sigma: DependencySet,
    arity_bound: int = 2,
    row_cap: int = 20_000,
    verify: bool = True,
) -> ArmstrongReport:
    """Armstrong database for IND+IA relative to an arity-bounded candidate space.

    Every non-implied candidate contributes a counterexample database; their
    full direct product satisfies sigma and falsifies each contributor.
    Candidates already falsified by the running product are skipped.
    """
    profile = classify(sigma)
    if profile.has_fd:
        raise NotUnary("this construction covers INDs and IAs only")
    base_rows = {
        name: [tuple(0 for _ in attrs)] for name, attrs in sigma.schema.relations
    }
    db = Database(sigma.schema, base_rows)
    for dep in enumerate_candidates(sigma.schema, "ind_ia", arity_bound):
        if not satisfies(db, dep):
            continue
        verdict = imply_ind_ia(sigma, dep, want_witness=True)
        if isinstance(verdict, Implied):
            continue
        if verdict.witness is None:
            continue
        db = _product_dbs(db, verdict.witness, row_cap)
    if not verify:
        return ArmstrongReport(db, "unverified", ())
    return verify_armstrong(db, sigma, "ind_ia", arity_bound)
