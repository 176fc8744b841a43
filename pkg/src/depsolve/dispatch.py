"""Routing implication problems to the engine that decides their class.

The decidability landscape drives the dispatcher: IND+IA goes to the chase
(both modes coincide); unary FD + unary IND + IA goes to the colored-graph
closure; FD+IA is decided by the graphical chase in unrestricted mode and
is supported in finite mode only when the non-intersection criterion lets
the classes be decided separately; FD+IND mixtures beyond those classes are
walled off as unsupported.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .chase import graph_chase_fd_ia, h_graph_reachable, imply_ind_ia, reduce_ca
from .core import (
    FD,
    IA,
    IND,
    Dependency,
    DependencySet,
    Implied,
    NotImplied,
    Unknown,
    Unsupported,
    Verdict,
    classify,
    decompose_ia_query,
)
from .errors import UnsupportedQuery
from .noninteract import noninteract_fd_ia
from .polyengine import build_star_closure, fd_closure, imply_star
from .semantics import satisfies

FD_IND_WALL = (
    "finite and unrestricted implication for FDs with INDs are undecidable; "
    "no engine covers this mixture"
)
FD_IA_FINITE_WALL = (
    "finite implication for FDs with IAs has no finite axiomatization and its "
    "decidability is open; only non-intersecting inputs are decided"
)


@dataclass(frozen=True)
class Decision:
    verdict: Verdict
    engine: str
    mode: str


def _split_rhs_if_needed(dep: Dependency):
    if isinstance(dep, FD) and len(dep.rhs) > 1 and len(dep.lhs) <= 1:
        return [FD(dep.relation, dep.lhs, {b}) for b in sorted(dep.rhs)]
    return [dep]


def _fits_star(sigma: DependencySet, query: Dependency) -> bool:
    deps = list(sigma.deps) + [query]
    rels = set()
    for d in deps:
        if isinstance(d, FD):
            if len(d.lhs) > 1 or (len(d.rhs) > 1):
                return False
            rels.add(d.relation)
        elif isinstance(d, IND):
            if d.arity != 1:
                return False
            rels.update({d.lhs_rel, d.rhs_rel})
        else:
            rels.add(d.relation)
    return len(rels) <= 1


def _project_to_relation(sigma: DependencySet, rel: str) -> DependencySet:
    deps = [d for d in sigma.deps if isinstance(d, (FD, IA)) and d.relation == rel]
    return DependencySet(sigma.schema, deps)


def decide_implication(
    sigma: DependencySet,
    query: Dependency,
    mode: str = "finite",
    engine: str = "auto",
    budget: int = 10_000,
) -> Decision:
    """Answer one implication question, routing by class profile.

    Engines: auto, chase (IND+IA), hgraph, star, graphchase, derive-free
    fallbacks are not exposed here. The verdict always names the engine and
    echoes the mode.
    """
    if mode not in ("finite", "unrestricted"):
        raise ValueError(f"unknown mode {mode}")
    if engine == "chase":
        return Decision(imply_ind_ia(sigma, query), "chase", mode)
    if engine == "hgraph":
        return Decision(_hgraph_decide(sigma, query, budget), "hgraph", mode)
    if engine == "star":
        return Decision(imply_star(sigma, query, mode), "star", mode)
    if engine == "graphchase":
        return Decision(
            graph_chase_fd_ia(sigma, query, max_vertices=budget), "graphchase", mode
        )
    if engine != "auto":
        raise ValueError(f"unknown engine {engine}")

    queries = _split_rhs_if_needed(query)
    parts = [_decide_auto(sigma, q, mode, budget) for q in queries]
    for part in parts:
        if not isinstance(part.verdict, Implied):
            return part
    return parts[0]


def _hgraph_decide(sigma: DependencySet, query: Dependency, budget: int) -> Verdict:
    """Node-set reachability after the constancy reduction."""
    from .chase import uind_ca_closure

    if isinstance(query, IA):
        dia, cas = decompose_ia_query(query)
        closure = uind_ca_closure(sigma)
        if any(attr not in closure.constants for ca in cas for attr in ca.left):
            return NotImplied(note="a constancy part of the query is not implied")
        sigma0, query0 = reduce_ca(sigma, dia)
        if not query0.left or not query0.right:
            return Implied(witness="only implied constancy parts remain")
        ok = h_graph_reachable(sigma0, query0, max_nodes=budget * 100)
        return Implied(witness="reachable") if ok else NotImplied()
    if isinstance(query, IND):
        sigma1 = reduce_ca(sigma, query)
        ok = h_graph_reachable(sigma1, query, max_nodes=budget * 100)
        return Implied(witness="reachable") if ok else NotImplied()
    raise UnsupportedQuery(f"node-set search handles IND and IA queries, not {query}")


def _decide_auto(sigma: DependencySet, query: Dependency, mode: str, budget: int) -> Decision:
    profile = classify(sigma, query)
    sigma_has_fd = any(isinstance(d, FD) for d in sigma.deps)
    query_is_ca_fd = isinstance(query, FD) and not query.lhs

    if not sigma_has_fd and (not isinstance(query, FD) or query_is_ca_fd):
        return Decision(imply_ind_ia(sigma, query), "chase", mode)

    if _fits_star(sigma, query):
        return Decision(imply_star(sigma, query, mode), "star", mode)

    if profile.has_ind:
        # monotonicity rescue: a fragment that implies the query settles it
        if not isinstance(query, FD) or not query.lhs:
            fragment = DependencySet(
                sigma.schema, [d for d in sigma.deps if not isinstance(d, FD)]
            )
            attempt = imply_ind_ia(fragment, query, want_witness=False)
            if isinstance(attempt, Implied):
                return Decision(
                    Implied(witness="already implied by the IND+IA fragment"),
                    "chase",
                    mode,
                )
        return Decision(Unsupported(FD_IND_WALL), "none", mode)

    # FD+IA territory; deps on other relations cannot interact without INDs
    rel = query.relation
    local = _project_to_relation(sigma, rel)
    if mode == "unrestricted":
        report = noninteract_fd_ia(local.fds(), local.ias(), "unrestricted")
        if report.guaranteed:
            return Decision(
                _separate_fd_ia_star(local, report.transformed, query), "separate", mode
            )
        return Decision(
            graph_chase_fd_ia(local, query, max_vertices=budget), "graphchase", mode
        )
    report = noninteract_fd_ia(local.fds(), local.ias(), "finite")
    if report.guaranteed:
        return Decision(_separate_fd_ia(local, query), "separate", mode)
    return Decision(Unsupported(FD_IA_FINITE_WALL), "none", mode)


def _separate_fd_ia_star(sigma: DependencySet, transformed, query: Dependency) -> Verdict:
    """Decide a split-free unrestricted FD+IA instance over the widened sets."""
    if isinstance(query, FD):
        closure = fd_closure(transformed.fd_star, query.lhs)
        if query.rhs <= closure:
            return Implied(witness="attribute closure of the widened FDs")
        return _fd_ia_counterexample(sigma, query)
    if isinstance(query, IA):
        atoms = DependencySet(sigma.schema, transformed.ia_star)
        verdict = imply_ind_ia(atoms, query)
        if isinstance(verdict, Implied):
            return verdict
        return _fd_ia_counterexample(sigma, query)
    raise UnsupportedQuery(f"unsupported query {query}")


def _separate_fd_ia(sigma: DependencySet, query: Dependency) -> Verdict:
    """Decide a non-intersecting FD+IA instance class by class."""
    if isinstance(query, FD):
        closure = fd_closure(sigma.fds(), query.lhs)
        if query.rhs <= closure:
            return Implied(witness="attribute closure of the FDs alone")
        return _fd_ia_counterexample(sigma, query)
    if isinstance(query, IA):
        atoms = DependencySet(
            sigma.schema, [d for d in sigma.deps if isinstance(d, IA)]
        )
        verdict = imply_ind_ia(atoms, query)
        if isinstance(verdict, Implied):
            return verdict
        return _fd_ia_counterexample(sigma, query)
    raise UnsupportedQuery(f"unsupported query {query}")


def _fd_ia_counterexample(sigma: DependencySet, query: Dependency) -> Verdict:
    from .errors import BudgetExceeded
    from .semantics import OracleBounds, find_counterexample

    try:
        found = find_counterexample(
            sigma, query, OracleBounds(max_tuples=4, domain_size=4, max_nodes=300_000)
        )
    except BudgetExceeded:
        return NotImplied(witness=None, note="no witness found within budget")
    if isinstance(found, NotImplied):
        return found
    return NotImplied(witness=None, note="no witness found within bounds")
