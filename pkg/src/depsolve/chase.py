"""Chase-based decision engines.

The terminating chase for inclusion dependencies and independence atoms,
the constancy-reduction preprocessing that removes constancy atoms, the
node-set reachability alternative, and the budgeted graphical chase for
FD+IA in unrestricted mode.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import (
    FD,
    IA,
    IND,
    Dependency,
    DependencySet,
    Implied,
    NotImplied,
    Schema,
    Unknown,
    Verdict,
    classify,
    constancy_seeds,
    decompose_ia_query,
    restrict,
)
from .errors import BudgetExceeded, NotIndIa, UnsupportedQuery
from .polyengine import _reachable, fd_closure, singlevalued_span
from .semantics import Database, satisfies, satisfies_all

# ---------------------------------------------------------------------------
# Constancy closure and reduction


@dataclass(frozen=True)
class ConstancyClosure:
    """Derivably constant attributes plus the unary-inclusion reachability graph."""

    constants: frozenset[str]
    adj: dict[str, set[str]]  # src -> targets, including span reversals

    def derivable_uind(self, src: str, dst: str) -> bool:
        return dst in _reachable([src], self.adj)

    def sources_into(self, dst: str) -> set[str]:
        rev: dict[str, set[str]] = {}
        for s, ts in self.adj.items():
            for t in ts:
                rev.setdefault(t, set()).add(s)
        return _reachable([dst], rev)


def uind_ca_closure(sigma: DependencySet) -> ConstancyClosure:
    """Fixpoint of constancy propagation over the unary-inclusion graph.

    Seeds are overlap attributes of independence atoms; constancy flows
    backward along inclusions, and inclusions into a constant reverse.
    """
    profile = classify(sigma)
    if profile.has_fd:
        raise NotIndIa("constancy closure expects inclusion dependencies and atoms only")
    edges = []
    for ind in sigma.inds():
        edges.extend(ind.pairs)
    seeds = {a for _, a in constancy_seeds(sigma.deps)}
    span = singlevalued_span(seeds, edges)
    adj: dict[str, set[str]] = {}
    for s, t in list(edges) + list(span.extended_uinds):
        adj.setdefault(s, set()).add(t)
    return ConstancyClosure(span.span, adj)


def reduce_ca(sigma: DependencySet, query: Dependency):
    """Rewrite an IND+IA problem into a constancy-free one.

    For an IA query returns (sigma0, query0): both sides restricted to the
    non-constant attributes. For an IND query returns sigma1: atom sides
    stripped of constants, chained atoms making every constant column
    independent of the rest, and reversals of derivable inclusions into
    constants. The query's verdict is preserved either way.
    """
    closure = uind_ca_closure(sigma)
    consts = closure.constants
    if isinstance(query, IA):
        keep = [a for a in sigma.schema.all_attributes if a not in consts]
        schema0 = sigma.schema.drop_attributes(consts)
        deps0 = []
        for dep in sigma.deps:
            r = restrict(dep, keep)
            if isinstance(r, IA) and (not r.left or not r.right):
                continue
            if isinstance(r, IND) and not r.lhs_seq:
                continue
            deps0.append(r)
        return DependencySet(schema0, deps0), restrict(query, keep)
    if isinstance(query, IND):
        deps1: list[Dependency] = list(sigma.inds())
        for ia in sigma.ias():
            left, right = ia.left - consts, ia.right - consts
            if left and right:
                deps1.append(IA(ia.relation, left, right))
        for rel, attrs in sigma.schema.relations:
            const_here = [a for a in attrs if a in consts]
            rest = [a for a in attrs if a not in consts]
            m = len(const_here)
            for j in range(1, m + 1):
                right = set(const_here[j:]) | set(rest)
                if right:
                    deps1.append(IA(rel, set(const_here[:j]), right))
        schema = sigma.schema
        for b in sorted(consts):
            rel_b = schema.relation_of(b)
            for a in sorted(closure.sources_into(b)):
                if a == b:
                    continue
                deps1.append(IND(rel_b, [b], schema.relation_of(a), [a]))
        seen = set()
        unique = []
        for d in deps1:
            key = (str(d.canonical()) if isinstance(d, (IA, IND)) else str(d))
            if key not in seen:
                seen.add(key)
                unique.append(d)
        return DependencySet(schema, unique)
    raise UnsupportedQuery(f"reduce_ca handles IA and IND queries, not {query}")


# ---------------------------------------------------------------------------
# The chase kernel


@dataclass
class ChaseStep:
    kind: str  # "ind" | "ia"
    dep: Dependency
    source: tuple
    other: Optional[tuple]
    added: tuple
    relation: str


@dataclass
class ChaseTrace:
    steps: list[ChaseStep] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            [
                {
                    "rule": s.kind,
                    "dependency": str(s.dep),
                    "relation": s.relation,
                    "source": list(s.source),
                    "other": list(s.other) if s.other is not None else None,
                    "added": list(s.added),
                }
                for s in self.steps
            ],
            indent=2,
        )

    def __len__(self):
        return len(self.steps)


def _chase_fixpoint(
    schema: Schema,
    rows: dict[str, list[tuple]],
    deps: Sequence[Dependency],
    fill=0,
    max_rows: int = 200_000,
) -> ChaseTrace:
    """Saturate under the tuple-generating rules for INDs and disjoint IAs.

    Inclusion rule: an unmatched source tuple adds a target tuple carrying
    its values, other attributes filled. Independence rule: a missing value
    combination adds the combining tuple, other attributes filled. The value
    universe is fixed, so the fixpoint is reached in finitely many steps.
    """
    rel_attrs = {name: list(attrs) for name, attrs in schema.relations}
    membership = {name: set(rs) for name, rs in rows.items()}
    trace = ChaseTrace()

    def idx(rel, attrs):
        order = rel_attrs[rel]
        return tuple(order.index(a) for a in attrs)

    inds = [d for d in deps if isinstance(d, IND)]
    ias = [d for d in deps if isinstance(d, IA)]
    for ia in ias:
        if ia.left & ia.right:
            raise NotIndIa(f"chase requires disjoint atom sides, got {ia}")

    compiled_inds = [
        (d, idx(d.lhs_rel, d.lhs_seq), idx(d.rhs_rel, d.rhs_seq)) for d in inds
    ]
    compiled_ias = [
        (d, idx(d.relation, sorted(d.left)), idx(d.relation, sorted(d.right))) for d in ias
    ]

    changed = True
    while changed:
        changed = False
        for dep, sidx, didx in compiled_inds:
            targets = {tuple(r[i] for i in didx) for r in rows[dep.rhs_rel]}
            width = len(rel_attrs[dep.rhs_rel])
            for r in list(rows[dep.lhs_rel]):
                v = tuple(r[i] for i in sidx)
                if v in targets:
                    continue
                new = [fill] * width
                for i, val in zip(didx, v):
                    new[i] = val
                t_new = tuple(new)
                if t_new not in membership[dep.rhs_rel]:
                    rows[dep.rhs_rel].append(t_new)
                    membership[dep.rhs_rel].add(t_new)
                    trace.steps.append(
                        ChaseStep("ind", dep, r, None, t_new, dep.rhs_rel)
                    )
                targets.add(v)
                changed = True
                if sum(len(r) for r in rows.values()) > max_rows:
                    raise BudgetExceeded("chase exceeded its row budget", frontier=max_rows)
        for dep, lidx, ridx in compiled_ias:
            rel = dep.relation
            width = len(rel_attrs[rel])
            pairs = set()
            lefts: dict[tuple, tuple] = {}
            rights: dict[tuple, tuple] = {}
            for r in rows[rel]:
                lv = tuple(r[i] for i in lidx)
                rv = tuple(r[i] for i in ridx)
                pairs.add((lv, rv))
                lefts.setdefault(lv, r)
                rights.setdefault(rv, r)
            if len(pairs) == len(lefts) * len(rights):
                continue
            for lv in sorted(lefts, key=repr):
                for rv in sorted(rights, key=repr):
                    if (lv, rv) in pairs:
                        continue
                    lt, rt = lefts[lv], rights[rv]
                    new = [fill] * width
                    for i, val in zip(lidx, lv):
                        new[i] = val
                    for i, val in zip(ridx, rv):
                        new[i] = val
                    t_new = tuple(new)
                    if t_new not in membership[rel]:
                        rows[rel].append(t_new)
                        membership[rel].add(t_new)
                        trace.steps.append(ChaseStep("ia", dep, lt, rt, t_new, rel))
                    pairs.add((lv, rv))
                    changed = True
            if sum(len(r) for r in rows.values()) > max_rows:
                raise BudgetExceeded("chase exceeded its row budget", frontier=max_rows)
    return trace


def dia_implies(
    atoms: Sequence[IA],
    left: frozenset[str],
    right: frozenset[str],
    attrs: Sequence[str],
) -> bool:
    """Decide whether disjoint atoms imply the disjoint atom left _|_ right."""
    if not left or not right:
        return True
    rel = atoms[0].relation if atoms else "R"
    schema = Schema.single(attrs, rel)
    ordered = sorted(left) + sorted(right)
    order = list(attrs)
    s = [0] * len(order)
    s2 = [0] * len(order)
    for i, a in enumerate(ordered, start=1):
        if a in left:
            s[order.index(a)] = i
        else:
            s2[order.index(a)] = i
    rows = {rel: [tuple(s), tuple(s2)]}
    _chase_fixpoint(schema, rows, list(atoms))
    want = {order.index(a): i for i, a in enumerate(ordered, start=1)}
    return any(all(r[i] == v for i, v in want.items()) for r in rows[rel])


# ---------------------------------------------------------------------------
# Decision procedures for IND+IA


def _seed_other_relations(schema: Schema, skip: str) -> dict[str, list[tuple]]:
    rows: dict[str, list[tuple]] = {}
    for name, attrs in schema.relations:
        if name != skip:
            rows[name] = [tuple(0 for _ in attrs)]
    return rows


def chase_dia(sigma: DependencySet, query: IA, want_trace: bool = True) -> Verdict:
    """Chase decision for a disjoint IA query against a constancy-free set.

    Seeds the query relation with two marked tuples that disagree on the
    query attributes; the query is implied exactly when the chase produces
    the tuple combining both markings.
    """
    if query.left & query.right:
        raise UnsupportedQuery(f"{query} does not have disjoint sides")
    if not query.left or not query.right:
        return Implied(witness="one side is empty")
    schema = sigma.schema
    rel = query.relation
    order = list(schema.attributes(rel))
    ordered = sorted(query.left) + sorted(query.right)
    s = [0] * len(order)
    s2 = [0] * len(order)
    for i, a in enumerate(ordered, start=1):
        if a in query.left:
            s[order.index(a)] = i
        else:
            s2[order.index(a)] = i
    rows = _seed_other_relations(schema, rel)
    rows[rel] = [tuple(s), tuple(s2)]
    trace = _chase_fixpoint(schema, rows, list(sigma.deps))
    want = {order.index(a): i for i, a in enumerate(ordered, start=1)}
    if any(all(r[i] == v for i, v in want.items()) for r in rows[rel]):
        return Implied(witness=trace if want_trace else None)
    return NotImplied(witness=Database(schema, rows))


def chase_ind(sigma: DependencySet, query: IND, want_trace: bool = True) -> Verdict:
    """Chase decision for an IND query against a constancy-free set.

    Seeds the source relation with a single tuple of pairwise distinct
    values and checks the query on the chase fixpoint.
    """
    schema = sigma.schema
    rel = query.lhs_rel
    order = list(schema.attributes(rel))
    rows = _seed_other_relations(schema, rel)
    rows[rel] = [tuple(range(1, len(order) + 1))]
    trace = _chase_fixpoint(schema, rows, list(sigma.deps))
    db = Database(schema, rows)
    if satisfies(db, query):
        return Implied(witness=trace if want_trace else None)
    return NotImplied(witness=db)


def _constancy_witness(sigma: DependencySet, closure: ConstancyClosure, attr: str) -> Database:
    """Model of sigma where the given non-constant attribute takes two values."""
    linked = _reachable([attr], closure.adj)
    rows: dict[str, list[tuple]] = {}
    for name, attrs in sigma.schema.relations:
        here = [a for a in attrs if a in linked]
        rel_rows = [()]
        for a in attrs:
            vals = (0, 1) if a in here else (0,)
            rel_rows = [r + (v,) for r in rel_rows for v in vals]
        rows[name] = rel_rows
    return Database(sigma.schema, rows)


def _extend_ia_witness(
    sigma: DependencySet, db0: Database, consts: frozenset[str]
) -> Database:
    """Lift a witness over the non-constant attributes to the full schema.

    Constant columns take one fresh value; every other column additionally
    branches between its value and the fresh value, which restores all
    inclusions that mixed constant and non-constant positions.
    """
    fresh = "z*"
    schema = sigma.schema
    rows: dict[str, list[tuple]] = {}
    for name, attrs in schema.relations:
        sub_attrs = [a for a in attrs if a not in consts]
        out = []
        for r in db0.rows(name):
            by_attr = dict(zip(sub_attrs, r))
            variants = [()]
            for a in attrs:
                if a in consts:
                    variants = [v + (fresh,) for v in variants]
                else:
                    variants = [v + (val,) for v in variants for val in (fresh, by_attr[a])]
            out.extend(variants)
        rows[name] = list(dict.fromkeys(out))
    return Database(schema, rows)


def _ind_witness(
    sigma: DependencySet,
    closure: ConstancyClosure,
    chased: Database,
    query: IND,
) -> Optional[Database]:
    """Project the chase fixpoint off the constants and pin one coherent constant block."""
    consts = closure.constants
    schema = sigma.schema
    if not consts:
        return chased

    # mutual derivable inclusion partitions the constants into value classes
    parent: dict[str, str] = {a: a for a in consts}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for a in consts:
        for b in consts:
            if a < b and closure.derivable_uind(a, b) and closure.derivable_uind(b, a):
                union(a, b)

    rel_l = query.lhs_rel
    l_attrs = set(schema.attributes(rel_l))
    anchors = sorted(consts & l_attrs)
    src_idx = {a: i for i, a in enumerate(schema.attributes(rel_l))}

    # membership constraints: a constant source included in a non-constant column
    member_cols: dict[str, list[tuple[str, str]]] = {}
    for ind in sigma.inds():
        for a, b in ind.pairs:
            if a in consts and b not in consts:
                member_cols.setdefault(find(a), []).append((ind.rhs_rel, b))

    didx = chased.indices(query.rhs_rel, query.rhs_seq)
    sidx = chased.indices(query.lhs_rel, query.lhs_seq)
    targets = {tuple(r[i] for i in didx) for r in chased.rows(query.rhs_rel)}
    violating = [
        r
        for r in chased.sorted_rows(rel_l)
        if tuple(r[i] for i in sidx) not in targets
    ]

    for t in violating:
        class_value: dict[str, object] = {}
        ok = True
        for a in anchors:
            root = find(a)
            val = t[src_idx[a]]
            if class_value.setdefault(root, val) != val:
                ok = False
                break
        if not ok:
            continue
        for root in {find(a) for a in consts}:
            allowed = None
            for a in sorted(consts):
                if find(a) != root:
                    continue
                col = {r[chased.indices(schema.relation_of(a), [a])[0]]
                       for r in chased.rows(schema.relation_of(a))}
                allowed = col if allowed is None else allowed & col
            for rel2, b in member_cols.get(root, ()):
                bidx = chased.indices(rel2, [b])[0]
                allowed &= {r[bidx] for r in chased.rows(rel2)}
            if root in class_value:
                if class_value[root] not in allowed:
                    ok = False
                    break
            else:
                if not allowed:
                    ok = False
                    break
                class_value[root] = sorted(allowed, key=repr)[0]
        if not ok:
            continue
        rows: dict[str, list[tuple]] = {}
        for name, attrs in schema.relations:
            nonconst = [a for a in attrs if a not in consts]
            nidx = chased.indices(name, nonconst)
            out = set()
            for r in chased.rows(name):
                proj = dict(zip(nonconst, (r[i] for i in nidx)))
                out.add(
                    tuple(
                        class_value[find(a)] if a in consts else proj[a] for a in attrs
                    )
                )
            rows[name] = sorted(out, key=repr)
        db = Database(schema, rows)
        if satisfies_all(db, sigma.deps) and not satisfies(db, query):
            return db
    return None


def imply_ind_ia(
    sigma: DependencySet, query: Dependency, want_witness: bool = True
) -> Verdict:
    """Complete decision procedure for IND+IA; finite and unrestricted agree.

    Constancy-atom queries reduce to the linear closure; disjoint-IA queries
    chase the constancy-free restriction; IND queries chase the rewritten
    set. Negative verdicts carry a finite counterexample database.
    """
    if any(isinstance(d, FD) for d in sigma.deps):
        raise NotIndIa("assumptions must be inclusion dependencies and independence atoms")
    if isinstance(query, FD):
        if not query.lhs and query.rhs:
            query = IA(query.relation, query.rhs, query.rhs)
        else:
            raise NotIndIa(f"{query} is outside IND+IA")
    closure = uind_ca_closure(sigma)

    if isinstance(query, IA):
        dia, cas = decompose_ia_query(query)
        for ca in sorted(cas, key=str):
            (attr,) = ca.left
            if attr not in closure.constants:
                if not want_witness:
                    return NotImplied()
                db = _constancy_witness(sigma, closure, attr)
                return NotImplied(witness=db)
        if not dia.left or not dia.right:
            return Implied(witness="decomposes into implied constancy atoms")
        sigma0, query0 = reduce_ca(sigma, dia)
        if not query0.left or not query0.right:
            return Implied(witness="non-constant remainder is trivial")
        verdict = chase_dia(sigma0, query0)
        if isinstance(verdict, Implied) or not want_witness:
            return verdict if isinstance(verdict, Implied) else NotImplied()
        if not closure.constants:
            return NotImplied(witness=verdict.witness)
        db = _extend_ia_witness(sigma, verdict.witness, closure.constants)
        if satisfies_all(db, sigma.deps) and not satisfies(db, query):
            return NotImplied(witness=db)
        return _oracle_fallback(sigma, query)

    # IND query
    sigma1 = reduce_ca(sigma, query)
    verdict = chase_ind(sigma1, query)
    if isinstance(verdict, Implied):
        return verdict
    if not want_witness:
        return NotImplied()
    db = _ind_witness(sigma, closure, verdict.witness, query)
    if db is not None:
        return NotImplied(witness=db)
    return _oracle_fallback(sigma, query)


def _oracle_fallback(sigma: DependencySet, query: Dependency) -> Verdict:
    from .semantics import NoCounterexampleFound, OracleBounds, find_counterexample

    try:
        found = find_counterexample(
            sigma, query, OracleBounds(max_tuples=4, domain_size=4, max_nodes=500_000)
        )
    except BudgetExceeded:
        return NotImplied(witness=None, note="witness construction failed within budget")
    if isinstance(found, NoCounterexampleFound):
        return NotImplied(witness=None, note="witness construction failed within bounds")
    return NotImplied(witness=found.witness, note="bounded-search counterexample")


# ---------------------------------------------------------------------------
# Reachability over node sets of inclusions


def _canon_ind(lhs_rel, pairs, rhs_rel) -> tuple:
    ps = tuple(sorted(pairs))
    return (lhs_rel, tuple(a for a, _ in ps), rhs_rel, tuple(b for _, b in ps))


def h_graph_reachable(
    sigma: DependencySet, query: Dependency, max_nodes: int = 200_000
) -> bool:
    """Decide an IND or disjoint-IA query by search over inclusion node sets.

    A node is a set of inclusions whose source sequences partition the query
    source; edges split an inclusion, merge two inclusions licensed by an
    independence atom on the target relation, or rewrite a target through an
    assumption inclusion. Assumes a constancy-free assumption set.
    """
    if isinstance(query, IA):
        if query.left & query.right:
            raise UnsupportedQuery(f"{query} does not have disjoint sides")
        if not query.left or not query.right:
            return True
        rel = query.relation
        start = frozenset(
            {
                _canon_ind(rel, [(a, a) for a in query.left], rel),
                _canon_ind(rel, [(a, a) for a in query.right], rel),
            }
        )
        goal = frozenset({_canon_ind(rel, [(a, a) for a in query.left | query.right], rel)})
    elif isinstance(query, IND):
        start = frozenset({_canon_ind(query.lhs_rel, [(a, a) for a in query.lhs_seq], query.lhs_rel)})
        goal = frozenset({_canon_ind(query.lhs_rel, query.pairs, query.rhs_rel)})
    else:
        raise UnsupportedQuery(f"node-set search handles IND and IA queries, not {query}")

    ias_by_rel: dict[str, list[tuple[frozenset, frozenset]]] = {}
    for ia in sigma.ias():
        ias_by_rel.setdefault(ia.relation, []).append((ia.left, ia.right))
    inds_by_rel: dict[str, list[IND]] = {}
    for ind in sigma.inds():
        inds_by_rel.setdefault(ind.lhs_rel, []).append(ind)

    def successors(node: frozenset):
        members = sorted(node)
        for t in members:
            lrel, lseq, rrel, rseq = t
            pairs = list(zip(lseq, rseq))
            rest = node - {t}
            # split into two nonempty parts
            if len(pairs) >= 2:
                n = len(pairs)
                for mask in range(1, (1 << n) - 1):
                    part0 = [pairs[i] for i in range(n) if mask >> i & 1]
                    part1 = [pairs[i] for i in range(n) if not mask >> i & 1]
                    yield rest | {
                        _canon_ind(lrel, part0, rrel),
                        _canon_ind(lrel, part1, rrel),
                    }
            # rewrite the target through an assumption inclusion
            vset = set(rseq)
            for ind in inds_by_rel.get(rrel, ()):
                srcpos = dict(zip(ind.lhs_seq, ind.rhs_seq))
                if vset <= set(ind.lhs_seq):
                    new_pairs = [(a, srcpos[b]) for a, b in pairs]
                    if len({b for _, b in new_pairs}) == len(new_pairs):
                        yield rest | {_canon_ind(lrel, new_pairs, ind.rhs_rel)}
        # merge two inclusions with a licensing atom on the shared target
        for i, t0 in enumerate(members):
            for t1 in members[i + 1 :]:
                if t0[2] != t1[2]:
                    continue
                v0, v1 = set(t0[3]), set(t1[3])
                if v0 & v1:
                    continue
                licensed = any(
                    (v0 <= x and v1 <= y) or (v0 <= y and v1 <= x)
                    for x, y in ias_by_rel.get(t0[2], ())
                )
                if not licensed:
                    continue
                pairs = list(zip(t0[1], t0[3])) + list(zip(t1[1], t1[3]))
                yield (node - {t0, t1}) | {_canon_ind(t0[0], pairs, t0[2])}

    seen = {start}
    frontier = [start]
    while frontier:
        node = frontier.pop()
        if node == goal:
            return True
        for nxt in successors(node):
            if nxt not in seen:
                if len(seen) >= max_nodes:
                    raise BudgetExceeded(
                        "node-set search exceeded its budget", frontier=len(seen)
                    )
                seen.add(nxt)
                frontier.append(nxt)
    return goal in seen


# ---------------------------------------------------------------------------
# Graphical chase for FD+IA (unrestricted mode)


class _AttrDSU:
    """Per-attribute union-find over chase vertices."""

    def __init__(self, attrs):
        self.parent: dict[tuple[str, int], tuple[str, int]] = {}
        self.attrs = list(attrs)

    def add_vertex(self, v: int):
        for a in self.attrs:
            self.parent[(a, v)] = (a, v)

    def find(self, a: str, v: int):
        key = (a, v)
        while self.parent[key] != key:
            self.parent[key] = self.parent[self.parent[key]]
            key = self.parent[key]
        return key

    def union(self, a: str, u: int, v: int):
        ru, rv = self.find(a, u), self.find(a, v)
        if ru != rv:
            self.parent[ru] = rv

    def connected(self, attrs: Iterable[str], u: int, v: int) -> bool:
        if u == v:
            return True
        return all(self.find(a, u) == self.find(a, v) for a in attrs)


@dataclass
class GraphChaseState:
    vertices: int
    edges: list[tuple[int, int, frozenset]]


def graph_chase_fd_ia(
    sigma: DependencySet,
    query: Dependency,
    max_vertices: int = 10_000,
) -> Verdict:
    """Budgeted graphical chase deciding unrestricted implication for FD+IA.

    Vertices stand for tuples, labeled edges for attribute-wise equalities.
    Each round applies every independence atom to every violating vertex
    pair, then closes under the functional dependencies. The query holds
    exactly when its connectivity condition appears; saturation without it
    refutes the query; running out of vertices returns Unknown because the
    chase may be infinite.
    """
    profile = classify(sigma, query)
    if profile.has_ind:
        raise UnsupportedQuery("graphical chase handles FDs and IAs only")
    if profile.multi_relational:
        raise UnsupportedQuery("graphical chase requires a uni-relational input")
    rel = query.relation if isinstance(query, (FD, IA)) else sigma.schema.relations[0][0]
    attrs = list(sigma.schema.attributes(rel))
    fds = list(sigma.fds())
    ias = list(sigma.ias())

    overlap_cas = [FD(rel, frozenset(), ia.overlap) for ia in ias if ia.overlap]
    if isinstance(query, FD):
        base = query.lhs
    else:
        base = frozenset()
    label0 = fd_closure(fds + overlap_cas, base)

    dsu = _AttrDSU(attrs)
    dsu.add_vertex(0)
    dsu.add_vertex(1)
    edges: list[tuple[int, int, frozenset]] = [(0, 1, frozenset(label0))]
    for a in label0:
        dsu.union(a, 0, 1)
    n_vertices = 2
    fd_sides = [(sorted(fd.lhs), fd.rhs) for fd in fds]

    def signature(v: int, attrs_sorted) -> tuple:
        return tuple(dsu.find(a, v) for a in attrs_sorted)

    def saturate_fds():
        # vertices sharing a left-side signature must share right-side components
        changed = True
        while changed:
            changed = False
            for lhs_sorted, rhs in fd_sides:
                buckets: dict[tuple, list[int]] = {}
                for v in range(n_vertices):
                    buckets.setdefault(signature(v, lhs_sorted), []).append(v)
                for members in buckets.values():
                    base_v = members[0]
                    for v in members[1:]:
                        if not dsu.connected(rhs, base_v, v):
                            edges.append((base_v, v, frozenset(rhs)))
                            for a in rhs:
                                dsu.union(a, base_v, v)
                            changed = True

    def query_holds() -> bool:
        if isinstance(query, FD):
            return dsu.connected(query.rhs, 0, 1)
        ls, rs = sorted(query.left), sorted(query.right)
        want = (signature(0, ls), signature(1, rs))
        return any(
            (signature(w, ls), signature(w, rs)) == want for w in range(n_vertices)
        )

    ia_sides = [(ia, sorted(ia.left), sorted(ia.right)) for ia in ias]
    # a satisfied pair stays satisfied (connectivity only grows), so every
    # ordered vertex pair is examined at most once per atom
    processed = [0] * len(ia_sides)

    saturate_fds()
    if query_holds():
        return Implied(witness=GraphChaseState(n_vertices, list(edges)))
    while True:
        progress = False
        for i, (ia, ls, rs) in enumerate(ia_sides):
            done_n = processed[i]
            cur_n = n_vertices
            if done_n == cur_n:
                continue
            progress = True
            avail = {(signature(w, ls), signature(w, rs)) for w in range(n_vertices)}
            new_pairs = [
                (u, v)
                for u in range(cur_n)
                for v in range(cur_n)
                if u >= done_n or v >= done_n
            ]
            for u, v in new_pairs:
                if (signature(u, ls), signature(v, rs)) in avail:
                    continue
                if n_vertices >= max_vertices:
                    return Unknown(
                        reason="vertex budget exhausted; the chase may be infinite",
                        budget=max_vertices,
                    )
                w = n_vertices
                n_vertices += 1
                dsu.add_vertex(w)
                edges.append((u, w, frozenset(ia.left)))
                for a in ia.left:
                    dsu.union(a, u, w)
                edges.append((v, w, frozenset(ia.right)))
                for a in ia.right:
                    dsu.union(a, v, w)
                saturate_fds()
                if query_holds():
                    return Implied(witness=GraphChaseState(n_vertices, list(edges)))
                avail = {
                    (signature(x, ls), signature(x, rs)) for x in range(n_vertices)
                }
            processed[i] = cur_n
        if not progress:
            return NotImplied(
                witness=None,
                note="graphical chase saturated without the connectivity condition",
            )
