"""Polynomial-time decision engines for unary FDs, unary INDs, and IAs.

Contains the linear FD attribute closure, the quadratic FD+IA widening
fixpoint, the red/black colored-graph closure with SCC symmetrization for
finite implication, the derived characterization queries behind
`imply_star`, the singlevalued span, and the linear UIND+CA engine.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .core import (
    FD,
    IA,
    IND,
    Dependency,
    DependencySet,
    Implied,
    NotImplied,
    Unsupported,
    Verdict,
    classify,
    constancy_seeds,
    decompose_ia_query,
)
from .errors import NotUnary, UnsupportedQuery

# ---------------------------------------------------------------------------
# FD attribute closure (linear counting algorithm)


def fd_closure(fds: Iterable[FD], attrs: Iterable[str]) -> frozenset[str]:
    """All attributes functionally determined by `attrs` under the given FDs."""
    fds = list(fds)
    closure = set(attrs)
    count = [len(fd.lhs) for fd in fds]
    by_attr: dict[str, list[int]] = {}
    for i, fd in enumerate(fds):
        for a in fd.lhs:
            by_attr.setdefault(a, []).append(i)
    todo = list(closure)
    for i, fd in enumerate(fds):
        if count[i] == 0:
            for b in fd.rhs:
                if b not in closure:
                    closure.add(b)
                    todo.append(b)
    while todo:
        a = todo.pop()
        for i in by_attr.get(a, ()):
            count[i] -= 1
            if count[i] == 0:
                for b in fds[i].rhs:
                    if b not in closure:
                        closure.add(b)
                        todo.append(b)
    return frozenset(closure)


# ---------------------------------------------------------------------------
# Graph helpers


def _reachable(starts: Iterable[str], adj: dict[str, set[str]]) -> set[str]:
    seen = set(starts)
    todo = list(seen)
    while todo:
        a = todo.pop()
        for b in adj.get(a, ()):
            if b not in seen:
                seen.add(b)
                todo.append(b)
    return seen


def strongly_connected_components(
    nodes: Iterable[str], adj: dict[str, set[str]]
) -> list[list[str]]:
    """Tarjan's algorithm, iterative; components emitted in reverse topological order."""
    nodes = list(nodes)
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = [0]

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(sorted(adj.get(root, ()))))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(adj.get(w, ())))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


# ---------------------------------------------------------------------------
# Singlevalued span and the linear UIND+CA engine


@dataclass(frozen=True)
class SpanResult:
    """The singlevalued span plus the extension edges it licenses."""

    span: frozenset[str]
    extended_uinds: tuple[tuple[str, str], ...]  # added (src, dst) reversals
    extended_cas: frozenset[str]  # attributes asserted constant


def singlevalued_span(
    constant_attrs: Iterable[str], uind_edges: Iterable[tuple[str, str]]
) -> SpanResult:
    """Minimum attribute set closed under constancy seeds and backward inclusion.

    `uind_edges` are (source, target) pairs of unary inclusions. An attribute
    joins the span if a constancy atom seeds it or if it is included in a
    span member. Reversed edges are added for inclusions whose target lies in
    the span.
    """
    edges = list(uind_edges)
    into: dict[str, set[str]] = {}
    for s, t in edges:
        into.setdefault(t, set()).add(s)
    span = set(constant_attrs)
    todo = list(span)
    while todo:
        b = todo.pop()
        for a in into.get(b, ()):
            if a not in span:
                span.add(a)
                todo.append(a)
    reversed_edges = tuple(sorted({(t, s) for s, t in edges if t in span}))
    return SpanResult(frozenset(span), reversed_edges, frozenset(span))


def _uind_edges_of(sigma: DependencySet) -> list[tuple[str, str]]:
    edges = []
    for dep in sigma.inds():
        edges.extend((a, b) for a, b in dep.pairs)
    return edges


def uind_ca_implies(sigma: DependencySet, query: Dependency) -> bool:
    """Linear-time engine: is a unary inclusion or constancy atom implied?

    Sound and complete for IND+IA assumption sets in both implication modes.
    Only the unary inclusion projections and the overlap-constancy atoms of
    sigma matter for such queries.
    """
    edges = _uind_edges_of(sigma)
    seeds = {a for _, a in constancy_seeds(sigma.deps)}
    result = singlevalued_span(seeds, edges)
    if isinstance(query, IA):
        if query.left != query.right or len(query.left) != 1:
            raise UnsupportedQuery(f"{query} is not a constancy atom")
        (attr,) = query.left
        return attr in result.span
    if isinstance(query, FD):
        if query.lhs or len(query.rhs) != 1:
            raise UnsupportedQuery(f"{query} is not a constancy atom")
        (attr,) = query.rhs
        return attr in result.span
    if query.arity != 1:
        raise UnsupportedQuery(f"{query} is not unary")
    src, dst = query.lhs_seq[0], query.rhs_seq[0]
    adj: dict[str, set[str]] = {}
    for s, t in list(edges) + list(result.extended_uinds):
        adj.setdefault(s, set()).add(t)
    return dst in _reachable([src], adj)


# ---------------------------------------------------------------------------
# Quadratic FD+IA widening fixpoint


@dataclass(frozen=True)
class AlgOneResult:
    """Fixpoint of the FD+IA widening: constants plus closed independence atoms."""

    constants: frozenset[str]
    ia_star: tuple[IA, ...]
    fd_star: tuple[FD, ...]


def algorithm1(fds: Iterable[FD], ias: Iterable[IA]) -> AlgOneResult:
    """Widen each IA side under FD closure, absorbing overlaps into a constant set.

    The output set (fd_star, ia_star) is equivalent to the input and has the
    property that every ia_star side is closed under fd_star consequences.
    """
    fds = list(fds)
    ias = list(ias)
    rel = fds[0].relation if fds else (ias[0].relation if ias else "R")
    sides = [[set(ia.left), set(ia.right)] for ia in ias]
    v: set[str] = set()
    while True:
        z = set(v)
        for pair in sides:
            pair[0] = set(fd_closure(fds, pair[0] | v))
            pair[1] = set(fd_closure(fds, pair[1] | v))
            v |= pair[0] & pair[1]
        if z == v:
            break
    ia_star = tuple(
        IA(ia.relation, pair[0], pair[1]) for ia, pair in zip(ias, sides)
    )
    fd_star = tuple(fds) + ((FD(rel, frozenset(), v),) if v else ())
    return AlgOneResult(frozenset(v), ia_star, fd_star)


# ---------------------------------------------------------------------------
# Red/black colored graph closure (unary FD + unary IND + IA)


@dataclass
class ColoredGraph:
    """Directed multigraph: red edges for A -> B, black edges (A, B) for B <= A."""

    nodes: tuple[str, ...]
    red: set[tuple[str, str]]
    black: set[tuple[str, str]]
    scc_number: Optional[dict[str, int]] = None

    def red_adj(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {}
        for a, b in self.red:
            adj.setdefault(a, set()).add(b)
        return adj

    def black_adj(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {}
        for a, b in self.black:
            adj.setdefault(a, set()).add(b)
        return adj

    def mixed_adj(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {}
        for a, b in self.red | self.black:
            adj.setdefault(a, set()).add(b)
        return adj


@dataclass(frozen=True)
class StarClosure:
    """Closure data answering unary-FD, unary-IND, and IA implication queries."""

    graph: ColoredGraph
    constants: frozenset[str]
    ia_star: tuple[IA, ...]
    mode: str
    relation: str
    schema_attrs: tuple[str, ...]
    red_adj: dict[str, set[str]]
    black_adj: dict[str, set[str]]

    def fd_implied(self, lhs: frozenset[str], rhs_attr: str) -> bool:
        if rhs_attr in self.constants:
            return True
        if rhs_attr in lhs:
            return True
        return any(rhs_attr in _reachable([a], self.red_adj) for a in lhs)

    def uind_implied(self, src: str, dst: str) -> bool:
        if src == dst:
            return True
        # black edge (A, B) records B <= A, so follow edges from dst to src
        return src in _reachable([dst], self.black_adj)

    def restricted_atoms(self) -> tuple[IA, ...]:
        """ia_star projected off the constants; all sides become disjoint."""
        keep: list[IA] = []
        z = self.constants
        for ia in self.ia_star:
            left, right = ia.left - z, ia.right - z
            if left and right:
                keep.append(IA(ia.relation, left, right))
        return tuple(keep)


def _normalize_unary_fds(fds: Iterable[FD]) -> list[FD]:
    out: list[FD] = []
    for fd in fds:
        if len(fd.lhs) > 1:
            raise NotUnary(f"{fd} has a non-unary left-hand side")
        for b in sorted(fd.rhs):
            out.append(FD(fd.relation, fd.lhs, {b}))
    return out


def build_star_closure(sigma: DependencySet, mode: str = "finite") -> StarClosure:
    """Close the red/black graph of a unary FD + unary IND + IA set.

    Finite mode reverses every edge inside a strongly connected component
    (the cardinality argument behind cycle reversal); unrestricted mode
    skips that step. Steps are iterated to a global fixpoint.
    """
    if mode not in ("finite", "unrestricted"):
        raise ValueError(f"unknown mode {mode}")
    profile = classify(sigma)
    if profile.multi_relational:
        raise NotUnary("colored-graph closure requires a uni-relational input")
    if not profile.all_inds_unary:
        raise NotUnary("inclusion dependencies must be unary")
    fds = _normalize_unary_fds(sigma.fds())
    rel = sigma.schema.relations[0][0]
    nodes = tuple(sigma.schema.attributes(rel))

    red: set[tuple[str, str]] = set()
    black: set[tuple[str, str]] = set()
    z: set[str] = set()
    for fd in fds:
        if fd.lhs:
            (a,) = fd.lhs
            (b,) = fd.rhs
            red.add((a, b))
        else:
            z.update(fd.rhs)
    for ind in sigma.inds():
        for a, b in ind.pairs:  # a <= b: black edge (b, a)
            black.add((b, a))
    sides = [[set(ia.left), set(ia.right)] for ia in sigma.ias()]

    graph = ColoredGraph(nodes, red, black)
    while True:
        before = (len(red), len(black), len(z), [tuple(map(len, p)) for p in sides])
        if mode == "finite":
            for comp in strongly_connected_components(nodes, graph.mixed_adj()):
                members = set(comp)
                for a, b in list(red):
                    if a in members and b in members:
                        red.add((b, a))
                for a, b in list(black):
                    if a in members and b in members:
                        black.add((b, a))
        red_adj = graph.red_adj()
        for pair in sides:
            pair[0] = _reachable(pair[0], red_adj)
            pair[1] = _reachable(pair[1], red_adj)
            z |= pair[0] & pair[1]
        z |= _reachable(z, graph.mixed_adj())
        for a, b in list(red):
            if a in z and b in z:
                red.add((b, a))
        for a, b in list(black):
            if a in z and b in z:
                black.add((b, a))
        after = (len(red), len(black), len(z), [tuple(map(len, p)) for p in sides])
        if after == before:
            break

    scc_number: dict[str, int] = {}
    for i, comp in enumerate(strongly_connected_components(nodes, graph.mixed_adj())):
        for a in comp:
            scc_number[a] = i
    graph.scc_number = scc_number

    ia_star = tuple(IA(rel, p[0], p[1]) for p in sides)
    return StarClosure(
        graph=graph,
        constants=frozenset(z),
        ia_star=ia_star,
        mode=mode,
        relation=rel,
        schema_attrs=nodes,
        red_adj=graph.red_adj(),
        black_adj=graph.black_adj(),
    )


def _dia_implied_by_atoms(
    atoms: Iterable[IA], left: frozenset[str], right: frozenset[str], attrs: Iterable[str]
) -> bool:
    """Decide a disjoint IA from disjoint IA assumptions via the IA chase."""
    from .chase import dia_implies  # deferred: chase builds on this module

    return dia_implies(tuple(atoms), left, right, tuple(attrs))


def star_ia_implied(closure: StarClosure, query: IA) -> bool:
    dia, cas = decompose_ia_query(query)
    for ca in cas:
        (attr,) = ca.left
        if attr not in closure.constants:
            return False
    left = dia.left - closure.constants
    right = dia.right - closure.constants
    if not left or not right:
        return True
    attrs = [a for a in closure.schema_attrs if a not in closure.constants]
    return _dia_implied_by_atoms(closure.restricted_atoms(), left, right, attrs)


def imply_star(
    sigma: DependencySet,
    query: Dependency,
    mode: str = "finite",
    closure: Optional[StarClosure] = None,
    want_witness: bool = True,
) -> Verdict:
    """Decide implication for unary FDs, unary INDs, and IAs in either mode."""
    if closure is None:
        closure = build_star_closure(sigma, mode)
    implied, note = _star_query(closure, query)
    if implied:
        return Implied(witness=note)
    if not want_witness:
        return NotImplied()
    witness, wnote = _star_counterexample(sigma, query, mode)
    return NotImplied(witness=witness, note=wnote)


def _star_query(closure: StarClosure, query: Dependency) -> tuple[bool, str]:
    if isinstance(query, FD):
        if len(query.lhs) > 1:
            raise UnsupportedQuery(f"{query} is not unary")
        if not query.rhs:
            return True, "empty right-hand side"
        ok = all(closure.fd_implied(query.lhs, b) for b in query.rhs)
        return ok, "red path or constant right-hand side" if ok else ""
    if isinstance(query, IND):
        if query.arity != 1:
            raise UnsupportedQuery(f"{query} is not unary")
        ok = closure.uind_implied(query.lhs_seq[0], query.rhs_seq[0])
        return ok, "black path" if ok else ""
    if isinstance(query, IA):
        ok = star_ia_implied(closure, query)
        return ok, "independence-atom chase over the widened atoms" if ok else ""
    raise UnsupportedQuery(f"unsupported query {query}")


def _star_counterexample(sigma: DependencySet, query: Dependency, mode: str):
    """A finite database refuting the query, when one can exist."""
    from .errors import BudgetExceeded, TooManyAttributes
    from .semantics import OracleBounds, find_counterexample, satisfies, satisfies_all

    if mode == "unrestricted":
        finite_closure = build_star_closure(sigma, "finite")
        if _star_query(finite_closure, query)[0]:
            return None, "finitely implied: every counterexample is infinite"
    try:
        found = find_counterexample(
            sigma, query, OracleBounds(max_tuples=3, domain_size=3, max_nodes=200_000)
        )
    except BudgetExceeded:
        found = None
    if isinstance(found, NotImplied) and found.witness is not None:
        return found.witness, "bounded-search counterexample"
    try:
        from .armstrong import armstrong_star_finite

        report = armstrong_star_finite(sigma, verify=False)
        db = report.database
        if satisfies_all(db, sigma.deps) and not satisfies(db, query):
            return db, "finite-mode perfect sample database"
    except (TooManyAttributes, BudgetExceeded):
        pass
    return None, "no witness constructed"
