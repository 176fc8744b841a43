"""Ground-truth model checking and the brute-force implication oracle.

Databases are finite, non-empty relations of value tuples. `satisfies`
evaluates the quantified definitions of the three dependency kinds directly
and is the reference every engine is validated against. The oracle
exhausts all small databases up to value renaming looking for a
counterexample, and `generate_models` repairs random seeds into models.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional

from .core import (
    FD,
    IA,
    IND,
    Dependency,
    DependencySet,
    Schema,
    check_wellformed,
)
from .errors import BudgetExceeded, EmptyRelation, MalformedDependency

Row = tuple  # values in schema attribute order


@dataclass(frozen=True)
class Database:
    """Finite relations keyed by relation name; rows follow schema attribute order."""

    schema: Schema
    relations: Mapping[str, frozenset[Row]]

    def __init__(self, schema: Schema, relations: Mapping[str, Iterable[Row]]):
        object.__setattr__(self, "schema", schema)
        frozen = {name: frozenset(map(tuple, rows)) for name, rows in relations.items()}
        object.__setattr__(self, "relations", frozen)
        for name, attrs in schema.relations:
            if name not in frozen:
                raise EmptyRelation(f"relation {name} missing")
            if not frozen[name]:
                raise EmptyRelation(f"relation {name} is empty")
            for row in frozen[name]:
                if len(row) != len(attrs):
                    raise MalformedDependency(
                        f"row {row} does not match {name}({', '.join(attrs)})"
                    )

    def rows(self, relation: str) -> frozenset[Row]:
        return self.relations[relation]

    def sorted_rows(self, relation: str) -> list[Row]:
        return sorted(self.rows(relation), key=lambda r: tuple(map(repr, r)))

    def indices(self, relation: str, attrs: Iterable[str]) -> tuple[int, ...]:
        order = self.schema.attributes(relation)
        return tuple(order.index(a) for a in attrs)

    def project(self, relation: str, attrs: Iterable[str]) -> set[Row]:
        idx = self.indices(relation, sorted(attrs))
        return {tuple(row[i] for i in idx) for row in self.rows(relation)}

    def total_rows(self) -> int:
        return sum(len(r) for r in self.relations.values())

    def describe(self) -> str:
        parts = []
        for name, attrs in self.schema.relations:
            rows = ", ".join("(" + ",".join(map(str, r)) + ")" for r in self.sorted_rows(name))
            parts.append(f"{name}({','.join(attrs)}) = {{{rows}}}")
        return "; ".join(parts)


def _proj(row: Row, idx: tuple[int, ...]) -> Row:
    return tuple(row[i] for i in idx)


def satisfies(db: Database, dep: Dependency) -> bool:
    """Check one dependency against the database by its quantified definition."""
    check_wellformed(dep, db.schema)
    if isinstance(dep, FD):
        rows = db.rows(dep.relation)
        lidx = db.indices(dep.relation, sorted(dep.lhs))
        ridx = db.indices(dep.relation, sorted(dep.rhs))
        seen: dict[Row, Row] = {}
        for row in rows:
            key, val = _proj(row, lidx), _proj(row, ridx)
            if seen.setdefault(key, val) != val:
                return False
        return True
    if isinstance(dep, IA):
        rows = db.rows(dep.relation)
        lidx = db.indices(dep.relation, sorted(dep.left))
        ridx = db.indices(dep.relation, sorted(dep.right))
        # A combining tuple must exist for every (left, right) value pair, so
        # the achieved pairs must exhaust the product of the two projections.
        pairs = {(_proj(r, lidx), _proj(r, ridx)) for r in rows}
        lefts = {p for p, _ in pairs}
        rights = {q for _, q in pairs}
        return len(pairs) == len(lefts) * len(rights)
    src = db.rows(dep.lhs_rel)
    dst = db.rows(dep.rhs_rel)
    sidx = db.indices(dep.lhs_rel, dep.lhs_seq)
    didx = db.indices(dep.rhs_rel, dep.rhs_seq)
    targets = {_proj(r, didx) for r in dst}
    return all(_proj(r, sidx) in targets for r in src)


def satisfies_all(db: Database, deps: Iterable[Dependency]) -> bool:
    return all(satisfies(db, d) for d in deps)


def violating_witness(db: Database, dep: Dependency):
    """A concrete witness of violation: a tuple pair (FD/IA) or tuple (IND), or None."""
    if satisfies(db, dep):
        return None
    if isinstance(dep, FD):
        lidx = db.indices(dep.relation, sorted(dep.lhs))
        ridx = db.indices(dep.relation, sorted(dep.rhs))
        rows = db.sorted_rows(dep.relation)
        for i, r in enumerate(rows):
            for r2 in rows[i + 1 :]:
                if _proj(r, lidx) == _proj(r2, lidx) and _proj(r, ridx) != _proj(r2, ridx):
                    return (r, r2)
    if isinstance(dep, IA):
        lidx = db.indices(dep.relation, sorted(dep.left))
        ridx = db.indices(dep.relation, sorted(dep.right))
        rows = db.sorted_rows(dep.relation)
        pairs = {(_proj(r, lidx), _proj(r, ridx)) for r in rows}
        for r in rows:
            for r2 in rows:
                if (_proj(r, lidx), _proj(r2, ridx)) not in pairs:
                    return (r, r2)
    if isinstance(dep, IND):
        sidx = db.indices(dep.lhs_rel, dep.lhs_seq)
        didx = db.indices(dep.rhs_rel, dep.rhs_seq)
        targets = {_proj(r, didx) for r in db.rows(dep.rhs_rel)}
        for r in db.sorted_rows(dep.lhs_rel):
            if _proj(r, sidx) not in targets:
                return (r,)
    return None


def division_equals_projection(db: Database, relation: str, x, y) -> bool:
    """Compare the relational division pi_XY(r) / pi_Y(r) with pi_X(r).

    Equality holds exactly when the relation satisfies X _|_ Y, which turns
    the quadratic division into a linear projection.
    """
    xs, ys = sorted(set(x)), sorted(set(y))
    if set(xs) & set(ys):
        raise MalformedDependency("division requires disjoint attribute sets")
    rows = db.rows(relation)
    xidx = db.indices(relation, xs)
    yidx = db.indices(relation, ys)
    px = {_proj(r, xidx) for r in rows}
    py = {_proj(r, yidx) for r in rows}
    pxy = {(_proj(r, xidx), _proj(r, yidx)) for r in rows}
    dividend = {(a, b) for a in px for b in py} - pxy
    division = px - {a for a, _ in dividend}
    return division == px


# ---------------------------------------------------------------------------
# Brute-force counterexample oracle


@dataclass(frozen=True)
class OracleBounds:
    """Search bounds: tuples per database, value domain size, and budgets."""

    max_tuples: int = 4
    domain_size: int = 3
    max_nodes: int = 2_000_000
    time_budget_s: Optional[float] = None

    def __post_init__(self):
        if self.max_tuples < 1 or self.domain_size < 1:
            raise MalformedDependency("oracle bounds must be at least 1")


@dataclass(frozen=True)
class NoCounterexampleFound:
    """The bounded space was exhausted; proves nothing beyond the bounds."""

    searched_nodes: int = 0


class _Budget:
    def __init__(self, bounds: OracleBounds):
        self.nodes = 0
        self.max_nodes = bounds.max_nodes
        self.deadline = (
            time.monotonic() + bounds.time_budget_s if bounds.time_budget_s else None
        )

    def tick(self):
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise BudgetExceeded(
                f"oracle search exceeded {self.max_nodes} nodes", frontier=self.nodes
            )
        if self.deadline is not None and self.nodes % 1024 == 0:
            if time.monotonic() > self.deadline:
                raise BudgetExceeded("oracle search ran out of time", frontier=self.nodes)


def _compositions(total: int, parts: int):
    """All ways to split `total` into `parts` positive summands."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _CompiledDep:
    """A dependency compiled to column indices for fast checks on row lists."""

    __slots__ = ("kind", "rel", "a", "b", "rel2")

    def __init__(self, kind, rel, a, b, rel2=None):
        self.kind = kind
        self.rel = rel
        self.a = a
        self.b = b
        self.rel2 = rel2


def _compile(dep: Dependency, rel_attrs) -> _CompiledDep:
    if isinstance(dep, FD):
        order = rel_attrs[dep.relation]
        return _CompiledDep(
            "fd",
            dep.relation,
            tuple(order.index(x) for x in sorted(dep.lhs)),
            tuple(order.index(x) for x in sorted(dep.rhs)),
        )
    if isinstance(dep, IA):
        order = rel_attrs[dep.relation]
        return _CompiledDep(
            "ia",
            dep.relation,
            tuple(order.index(x) for x in sorted(dep.left)),
            tuple(order.index(x) for x in sorted(dep.right)),
        )
    return _CompiledDep(
        "ind",
        dep.lhs_rel,
        tuple(rel_attrs[dep.lhs_rel].index(x) for x in dep.lhs_seq),
        tuple(rel_attrs[dep.rhs_rel].index(x) for x in dep.rhs_seq),
        dep.rhs_rel,
    )


def _holds(c: _CompiledDep, rel_rows) -> bool:
    if c.kind == "fd":
        seen: dict[Row, Row] = {}
        for r in rel_rows[c.rel]:
            k, v = _proj(r, c.a), _proj(r, c.b)
            if seen.setdefault(k, v) != v:
                return False
        return True
    if c.kind == "ia":
        pairs = {(_proj(r, c.a), _proj(r, c.b)) for r in rel_rows[c.rel]}
        return len(pairs) == len({p for p, _ in pairs}) * len({q for _, q in pairs})
    targets = {_proj(r, c.b) for r in rel_rows[c.rel2]}
    return all(_proj(r, c.a) in targets for r in rel_rows[c.rel])


def find_counterexample(
    sigma: DependencySet, query: Dependency, bounds: OracleBounds = OracleBounds()
):
    """Search all databases up to the bounds for a model of sigma violating the query.

    Databases are enumerated up to value renaming (per column when no
    inclusion dependency links columns, globally otherwise), smallest total
    tuple count first. Returns NotImplied(db) for the first counterexample,
    NoCounterexampleFound on exhaustion, and raises BudgetExceeded otherwise.
    """
    from .core import NotImplied  # local import keeps core free of semantics

    check_wellformed(query, sigma.schema)
    schema = sigma.schema
    deps = list(sigma.deps)
    has_ind = any(isinstance(d, IND) for d in deps + [query])
    budget = _Budget(bounds)

    rel_names = list(schema.relation_names)
    rel_attrs = {name: list(schema.attributes(name)) for name in rel_names}
    compiled = [_compile(d, rel_attrs) for d in deps]
    cquery = _compile(query, rel_attrs)
    fds_by_rel = {n: [c for c in compiled if c.kind == "fd" and c.rel == n] for n in rel_names}
    ias_by_rel = {n: [c for c in compiled if c.kind == "ia" and c.rel == n] for n in rel_names}
    finals = [c for c in compiled if c.kind != "fd"]

    rel_rows: dict[str, list[Row]] = {n: [] for n in rel_names}
    col_used: dict[tuple[str, int], int] = {}
    global_used = [0]

    def row_candidates(rel: str):
        width = len(rel_attrs[rel])
        prev = rel_rows[rel][-1] if rel_rows[rel] else None
        if has_ind:
            # One injective renaming over all columns keeps inclusions intact;
            # fresh values are introduced in first-use order within the row.
            def build(i: int, partial: tuple, used: int):
                if i == width:
                    if prev is None or partial > prev:
                        yield partial
                    return
                top = min(used + 1, bounds.domain_size)
                for v in range(top):
                    yield from build(i + 1, partial + (v,), max(used, v + 1))

            yield from build(0, (), global_used[0])
        else:
            def build(i: int, partial: tuple):
                if i == width:
                    if prev is None or partial > prev:
                        yield partial
                    return
                top = min(col_used.get((rel, i), 0) + 1, bounds.domain_size)
                for v in range(top):
                    yield from build(i + 1, partial + (v,))

            yield from build(0, ())

    def leaf_ok(sizes) -> bool:
        for c in finals:
            if not _holds(c, rel_rows):
                return False
        return not _holds(cquery, rel_rows)

    def fill_relation(rel_i: int, sizes) -> Optional[Database]:
        budget.tick()
        if rel_i == len(rel_names):
            if leaf_ok(sizes):
                return Database(schema, {n: rel_rows[n] for n in rel_names})
            return None
        rel = rel_names[rel_i]
        target = sizes[rel_i]

        def add_rows(count: int) -> Optional[Database]:
            budget.tick()
            if count == target:
                return fill_relation(rel_i + 1, sizes)
            for row in row_candidates(rel):
                ok = True
                for c in fds_by_rel[rel]:
                    nk, nv = _proj(row, c.a), _proj(row, c.b)
                    for r in rel_rows[rel]:
                        if _proj(r, c.a) == nk and _proj(r, c.b) != nv:
                            ok = False
                            break
                    if not ok:
                        break
                if not ok:
                    continue
                rel_rows[rel].append(row)
                feasible = True
                for c in ias_by_rel[rel]:
                    lefts = {_proj(r, c.a) for r in rel_rows[rel]}
                    rights = {_proj(r, c.b) for r in rel_rows[rel]}
                    if len(lefts) * len(rights) > target:
                        feasible = False
                        break
                if feasible:
                    saved_cols = {}
                    saved_global = global_used[0]
                    for i, v in enumerate(row):
                        key = (rel, i)
                        if v + 1 > col_used.get(key, 0):
                            saved_cols[key] = col_used.get(key, 0)
                            col_used[key] = v + 1
                        if v + 1 > global_used[0]:
                            global_used[0] = v + 1
                    found = add_rows(count + 1)
                    for key, old in saved_cols.items():
                        col_used[key] = old
                    global_used[0] = saved_global
                    if found is not None:
                        rel_rows[rel].pop()
                        return found
                rel_rows[rel].pop()
            return None

        return add_rows(0)

    n_rel = len(rel_names)
    for total in range(n_rel, bounds.max_tuples * n_rel + 1):
        for comp in _compositions(total, n_rel):
            if any(c > bounds.max_tuples for c in comp):
                continue
            for n in rel_names:
                rel_rows[n] = []
            col_used.clear()
            global_used[0] = 0
            db = fill_relation(0, comp)
            if db is not None:
                return NotImplied(witness=db)
    return NoCounterexampleFound(searched_nodes=budget.nodes)


# ---------------------------------------------------------------------------
# Model generation by chase repair


def _repair(db_rows: dict[str, list[Row]], schema: Schema, deps, max_steps: int) -> bool:
    """Repair rows in place until all dependencies hold; False if budget ends."""
    rel_attrs = {name: list(schema.attributes(name)) for name in schema.relation_names}

    def idx(rel, attrs):
        order = rel_attrs[rel]
        return tuple(order.index(a) for a in attrs)

    steps = 0
    changed = True
    while changed:
        changed = False
        for dep in deps:
            if steps > max_steps:
                return False
            if isinstance(dep, IND):
                sidx = idx(dep.lhs_rel, dep.lhs_seq)
                didx = idx(dep.rhs_rel, dep.rhs_seq)
                targets = {_proj(r, didx) for r in db_rows[dep.rhs_rel]}
                width = len(rel_attrs[dep.rhs_rel])
                for r in list(db_rows[dep.lhs_rel]):
                    v = _proj(r, sidx)
                    if v not in targets:
                        new = [0] * width
                        for i, val in zip(didx, v):
                            new[i] = val
                        row = tuple(new)
                        if row not in db_rows[dep.rhs_rel]:
                            db_rows[dep.rhs_rel].append(row)
                        targets.add(v)
                        steps += 1
                        changed = True
            elif isinstance(dep, IA):
                lidx = idx(dep.relation, sorted(dep.left))
                ridx = idx(dep.relation, sorted(dep.right))
                rows = db_rows[dep.relation]
                pairs = {(_proj(r, lidx), _proj(r, ridx)) for r in rows}
                lefts = {}
                rights = {}
                for r in rows:
                    lefts.setdefault(_proj(r, lidx), r)
                    rights.setdefault(_proj(r, ridx), r)
                if len(pairs) == len(lefts) * len(rights):
                    continue
                width = len(rel_attrs[dep.relation])
                for lv, lrow in list(lefts.items()):
                    for rv, rrow in list(rights.items()):
                        if (lv, rv) in pairs:
                            continue
                        if set(lidx) & set(ridx) and any(
                            lrow[i] != rrow[i] for i in set(lidx) & set(ridx)
                        ):
                            # overlapping sides disagree; constancy repair below
                            continue
                        new = [0] * width
                        for i in range(width):
                            if i in lidx:
                                new[i] = lrow[i]
                            elif i in ridx:
                                new[i] = rrow[i]
                        row = tuple(new)
                        if row not in rows:
                            rows.append(row)
                            pairs.add((lv, rv))
                            steps += 1
                            changed = True
                if dep.overlap:
                    oidx = idx(dep.relation, sorted(dep.overlap))
                    vals = {_proj(r, oidx) for r in rows}
                    if len(vals) > 1:
                        pick = sorted(vals, key=repr)[0]
                        merged = []
                        for r in rows:
                            new = list(r)
                            for i, v in zip(oidx, pick):
                                new[i] = v
                            merged.append(tuple(new))
                        db_rows[dep.relation] = list(dict.fromkeys(merged))
                        steps += 1
                        changed = True
            else:  # FD: merge offending values pointwise
                lidx = idx(dep.relation, sorted(dep.lhs))
                ridx = idx(dep.relation, sorted(dep.rhs))
                rows = db_rows[dep.relation]
                groups: dict[Row, Row] = {}
                for r in rows:
                    k, v = _proj(r, lidx), _proj(r, ridx)
                    if k in groups and groups[k] != v:
                        keepv = groups[k]
                        merged = []
                        for q in rows:
                            new = list(q)
                            for i, old, newv in zip(ridx, v, keepv):
                                if new[i] == old:
                                    new[i] = newv
                            merged.append(tuple(new))
                        db_rows[dep.relation] = list(dict.fromkeys(merged))
                        steps += 1
                        changed = True
                        break
                    groups.setdefault(k, v)
    return True


def generate_models(
    sigma: DependencySet,
    count: int,
    bounds: OracleBounds = OracleBounds(),
    seed: int = 0,
) -> list[Database]:
    """Random seed databases repaired into models of sigma.

    Every returned database is verified with `satisfies`; seeds whose repair
    exceeds the budget are skipped.
    """
    rng = random.Random(seed)
    schema = sigma.schema
    out: list[Database] = []
    attempts = 0
    while len(out) < count and attempts < count * 20:
        attempts += 1
        rows: dict[str, list[Row]] = {}
        for name, attrs in schema.relations:
            n = rng.randint(1, bounds.max_tuples)
            rel_rows = {
                tuple(rng.randrange(bounds.domain_size) for _ in attrs) for _ in range(n)
            }
            rows[name] = list(rel_rows)
        if not _repair(rows, schema, list(sigma.deps), max_steps=20_000):
            continue
        try:
            db = Database(schema, rows)
        except EmptyRelation:
            continue
        if satisfies_all(db, sigma.deps):
            out.append(db)
    if len(out) < count:
        raise BudgetExceeded(f"generated only {len(out)} of {count} models")
    return out
