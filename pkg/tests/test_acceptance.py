"""Acceptance gate: every criterion runs at its stated tolerance.

Each test prints one "ACCEPTANCE <n> ...: PASS/FAIL" line. Random instances
use fixed seeds so runs are reproducible.
"""
from __future__ import annotations

import itertools
import random
import time
from pathlib import Path

import pytest

from depsolve.armstrong import (
    armstrong_ind_ia,
    armstrong_star_finite,
    armstrong_ufd_ia,
)
from depsolve.axioms import (
    Deduction,
    NotDerivable,
    RuleSystem,
    SYSTEM_FD_IA,
    SYSTEM_UNARY_FINITE,
    SYSTEM_UNARY_UNRESTRICTED,
    apply_rule,
    derive,
    verify_deduction,
)
from depsolve.chase import (
    graph_chase_fd_ia,
    h_graph_reachable,
    imply_ind_ia,
    reduce_ca,
)
from depsolve.core import (
    FD,
    IA,
    IND,
    DependencySet,
    Implied,
    NotImplied,
    Schema,
    Unknown,
    Unsupported,
)
from depsolve.dispatch import decide_implication
from depsolve.errors import BudgetExceeded
from depsolve.noninteract import noninteract_fd_ia
from depsolve.parser import load_csv
from depsolve.polyengine import build_star_closure, fd_closure, imply_star
from depsolve.profiler import MiningConfig, brute_force_maximal, mine_ias
from depsolve.semantics import (
    Database,
    NoCounterexampleFound,
    OracleBounds,
    division_equals_projection,
    find_counterexample,
    generate_models,
    satisfies,
    satisfies_all,
)
from conftest import (
    rand_ca_free_instance,
    rand_ind_ia_instance,
    rand_relation,
    rand_star_instance,
    rand_ufd_ia_instance,
    rand_uind_ia_instance,
)

FIXTURES = Path(__file__).parent / "fixtures"


def _report(criterion: str, passed: bool, detail: str = ""):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if passed else 'FAIL'} {detail}")
    assert passed, f"acceptance {criterion} failed: {detail}"


# ---------------------------------------------------------------------------
# 1. Fixture suite


def _showcase_fragment():
    schema = Schema((("Heart", ("h_p", "h_n", "h_t")), ("Disorder", ("d_p", "d_t"))))
    sigma = DependencySet(
        schema,
        [
            IA("Heart", {"h_p"}, {"h_t"}),
            IND("Disorder", ["d_p"], "Heart", ["h_p"]),
            IND("Disorder", ["d_t"], "Heart", ["h_t"]),
        ],
    )
    return sigma, IND("Disorder", ["d_p", "d_t"], "Heart", ["h_p", "h_t"])


INTERACTION = DependencySet(
    Schema.single(("A", "B", "C", "D", "E", "X")),
    [
        IA("R", {"B"}, {"C", "D"}),
        IA("R", {"D"}, {"A", "E"}),
        IA("R", {"B", "C"}, {"A", "D", "E"}),
        FD("R", {"A", "B"}, {"X"}),
        FD("R", {"C", "D", "E"}, {"X"}),
    ],
)

DIVERGENCE = DependencySet(
    Schema.single(("A", "B", "C", "D")),
    [
        IA("R", {"A"}, {"B"}),
        IA("R", {"C"}, {"D"}),
        FD("R", {"B", "C"}, {"A", "D"}),
        FD("R", {"A", "D"}, {"B", "C"}),
    ],
)

# the gap family at n = 2: finitely implied consequences that fail in
# unrestricted mode; no finite axiomatization exists for finite FD+IA
GAP_FAMILY_N2 = DependencySet(
    Schema.single(("A1", "B1", "A2", "B2")),
    [
        IA("R", {"A1"}, {"B1"}),
        IA("R", {"A2"}, {"B2"}),
        FD("R", {"A2", "B1"}, {"A1", "B1", "A2", "B2"}),
        FD("R", {"A1", "B2"}, {"A1", "B1", "A2", "B2"}),
    ],
)


def test_acceptance_1_fixture_suite():
    t0 = time.time()
    # (a) the referential-integrity showcase
    sigma, q = _showcase_fragment()
    a1 = isinstance(imply_ind_ia(sigma, q), Implied)
    a2 = h_graph_reachable(reduce_ca(sigma, q), q)

    # (b) the interaction example: implied, yet outside the FD+IA rules
    got = graph_chase_fd_ia(INTERACTION, FD("R", {"A"}, {"X"}), max_vertices=50)
    b1 = isinstance(got, Implied) and got.witness.vertices <= 50
    b2 = isinstance(
        derive(INTERACTION, FD("R", {"A"}, {"X"}), SYSTEM_FD_IA, max_facts=500_000),
        NotDerivable,
    )

    # (c) the divergence family
    q_c = FD("R", {"A", "B"}, {"C", "D"})
    c1 = isinstance(decide_implication(DIVERGENCE, q_c, mode="unrestricted").verdict, NotImplied)
    c2 = isinstance(decide_implication(DIVERGENCE, q_c, mode="finite").verdict, Unsupported)
    c3 = isinstance(
        find_counterexample(DIVERGENCE, q_c, OracleBounds(6, 4, max_nodes=5_000_000)),
        NoCounterexampleFound,
    )

    # (d) a single cycle pair
    cyc = DependencySet(
        Schema.single(("A", "B")),
        [FD("R", {"A"}, {"B"}), IND("R", ["A"], "R", ["B"])],
    )
    d_ok = True
    for q_d in (IND("R", ["B"], "R", ["A"]), FD("R", {"B"}, {"A"})):
        d_ok &= isinstance(imply_star(cyc, q_d, "finite", want_witness=False), Implied)
        d_ok &= isinstance(imply_star(cyc, q_d, "unrestricted", want_witness=False), NotImplied)

    # (e) the documented gap-family fixture behaves like the divergence pair
    q_e = FD("R", {"A1", "B1"}, {"A1", "B1", "A2", "B2"})
    e1 = isinstance(decide_implication(GAP_FAMILY_N2, q_e, mode="finite").verdict, Unsupported)
    e2 = isinstance(
        decide_implication(GAP_FAMILY_N2, q_e, mode="unrestricted").verdict, NotImplied
    )
    e3 = isinstance(
        find_counterexample(GAP_FAMILY_N2, q_e, OracleBounds(3, 3, max_nodes=2_000_000)),
        NoCounterexampleFound,
    )

    elapsed = time.time() - t0
    ok = all([a1, a2, b1, b2, c1, c2, c3, d_ok, e1, e2, e3]) and elapsed < 10.0
    _report(
        "1 fixture suite",
        ok,
        f"a={a1 and a2} b={b1 and b2} c={c1 and c2 and c3} d={d_ok} "
        f"e={e1 and e2 and e3} in {elapsed:.2f}s",
    )


# ---------------------------------------------------------------------------
# 2. Oracle soundness


def _never_refuted(sigma, query, bounds):
    try:
        found = find_counterexample(sigma, query, bounds)
    except BudgetExceeded:
        return True
    return not isinstance(found, NotImplied)


def test_acceptance_2_oracle_soundness():
    t0 = time.time()
    rng = random.Random(101)
    bounds = OracleBounds(5, 4, max_nodes=60_000)
    bad = []

    for _ in range(500):
        sigma, q = rand_ind_ia_instance(rng)
        verdict = imply_ind_ia(sigma, q)
        if isinstance(verdict, Implied):
            if not _never_refuted(sigma, q, bounds):
                bad.append(("ind_ia refuted", sigma, q))
        else:
            w = verdict.witness
            if w is None or not satisfies_all(w, sigma.deps) or satisfies(w, q):
                bad.append(("ind_ia witness", sigma, q))

    for _ in range(500):
        sigma, q = rand_star_instance(rng)
        closure_f = build_star_closure(sigma, "finite")
        v_fin = imply_star(sigma, q, "finite", closure=closure_f)
        if isinstance(v_fin, Implied):
            if not _never_refuted(sigma, q, bounds):
                bad.append(("star finite refuted", sigma, q))
        else:
            w = v_fin.witness
            if w is None or not satisfies_all(w, sigma.deps) or satisfies(w, q):
                bad.append(("star finite witness", sigma, q))
        v_unr = imply_star(sigma, q, "unrestricted")
        if isinstance(v_unr, Implied):
            if not _never_refuted(sigma, q, bounds):
                bad.append(("star unrestricted refuted", sigma, q))
        elif v_unr.witness is not None:
            if not satisfies_all(v_unr.witness, sigma.deps) or satisfies(v_unr.witness, q):
                bad.append(("star unrestricted witness", sigma, q))
        else:
            # no finite witness is legitimate only when finitely implied
            if not isinstance(v_fin, Implied):
                bad.append(("star unrestricted missing witness", sigma, q))

    for _ in range(500):
        sigma, q = rand_ufd_ia_instance(rng)
        verdict = imply_star(sigma, q, "unrestricted")
        if isinstance(verdict, Implied):
            if not _never_refuted(sigma, q, bounds):
                bad.append(("ufd_ia refuted", sigma, q))
        else:
            w = verdict.witness
            if w is None or not satisfies_all(w, sigma.deps) or satisfies(w, q):
                bad.append(("ufd_ia witness", sigma, q))

    elapsed = time.time() - t0
    detail = f"1500 instances, {len(bad)} failures in {elapsed:.1f}s"
    for kind, sigma, q in bad[:3]:
        detail += f" | {kind}: {[str(d) for d in sigma.deps]} |= {q}"
    _report("2 oracle soundness", not bad and elapsed < 300, detail)


# ---------------------------------------------------------------------------
# 3. Cross-engine equivalence


def test_acceptance_3_cross_engine_equivalence():
    t0 = time.time()
    rng = random.Random(103)
    mismatches = 0

    for _ in range(200):
        sigma, q = rand_ca_free_instance(rng)
        a = isinstance(imply_ind_ia(sigma, q, want_witness=False), Implied)
        if a != h_graph_reachable(sigma, q):
            mismatches += 1

    for _ in range(200):
        sigma, q = rand_uind_ia_instance(rng)
        a = isinstance(imply_ind_ia(sigma, q, want_witness=False), Implied)
        for mode in ("finite", "unrestricted"):
            if a != isinstance(imply_star(sigma, q, mode, want_witness=False), Implied):
                mismatches += 1

    for _ in range(100):
        sigma, q = rand_star_instance(rng)
        for mode, system in (
            ("finite", SYSTEM_UNARY_FINITE),
            ("unrestricted", SYSTEM_UNARY_UNRESTRICTED),
        ):
            a = isinstance(imply_star(sigma, q, mode, want_witness=False), Implied)
            b = isinstance(derive(sigma, q, system), Deduction)
            if a != b:
                mismatches += 1

    elapsed = time.time() - t0
    _report(
        "3 cross-engine equivalence",
        mismatches == 0,
        f"500 instances, {mismatches} mismatches in {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# 4. Axiom soundness


def _random_rule_instance(rule_id: str, rng: random.Random):
    """A random premise list plus conclusion for one rule, over small schemas."""
    attrs = ("A", "B", "C", "D")
    rel = "R"

    def ss(lo=0, hi=2):
        return frozenset(rng.sample(attrs, rng.randint(lo, hi)))

    if rule_id == "I1":
        schema = Schema.single(attrs)
        return schema, [], apply_rule("I1", [], relation=rel, attrs=ss())
    if rule_id == "I2":
        schema = Schema.single(attrs)
        p = IA(rel, ss(1), ss(1))
        return schema, [p], apply_rule("I2", [p])
    if rule_id == "I3":
        schema = Schema.single(attrs)
        right = ss(1)
        p = IA(rel, ss(1), right)
        keep = frozenset(rng.sample(sorted(right), rng.randint(0, len(right))))
        return schema, [p], apply_rule("I3", [p], keep=keep)
    if rule_id == "I4":
        schema = Schema.single(attrs)
        x, y, z = ss(1), ss(1), ss(0)
        p = IA(rel, x, y)
        q = IA(rel, x | y, z)
        return schema, [p, q], apply_rule("I4", [p, q])
    if rule_id == "I5":
        schema = Schema.single(attrs)
        p = IA(rel, ss(1), ss(1))
        z = ss(1, 1)
        q = IA(rel, z, z)
        return schema, [p, q], apply_rule("I5", [p, q])
    if rule_id == "F1":
        schema = Schema.single(attrs)
        lhs = ss(1)
        rhs = frozenset(rng.sample(sorted(lhs), rng.randint(0, len(lhs))))
        return schema, [], apply_rule("F1", [], relation=rel, lhs=lhs, rhs=rhs)
    if rule_id == "F2":
        schema = Schema.single(attrs)
        x, y, z = ss(0), ss(0), ss(0)
        p, q = FD(rel, x, y), FD(rel, y, z)
        return schema, [p, q], apply_rule("F2", [p, q])
    if rule_id == "F3":
        schema = Schema.single(attrs)
        p = FD(rel, ss(0), ss(0))
        return schema, [p], apply_rule("F3", [p], extra=ss(0))
    if rule_id == "FI1":
        schema = Schema.single(attrs)
        x, y = ss(1), ss(1)
        return schema, [IA(rel, x, y), FD(rel, x, y)], apply_rule(
            "FI1", [IA(rel, x, y), FD(rel, x, y)]
        )
    if rule_id == "FI2":
        schema = Schema.single(attrs)
        x, y = ss(1), ss(1)
        z = frozenset(rng.sample(sorted(y), rng.randint(0, len(y))))
        p = IA(rel, x, y)
        q = FD(rel, z, ss(0))
        return schema, [p, q], apply_rule("FI2", [p, q])
    # inclusion rules work over a two-relation schema
    schema = Schema((("R", ("A", "B")), ("S", ("C", "D"))))
    attrs_of = {"R": ["A", "B"], "S": ["C", "D"]}

    def seq(relname, n):
        return rng.sample(attrs_of[relname], n)

    if rule_id == "U1":
        r = rng.choice(["R", "S"])
        sq = seq(r, rng.randint(1, 2))
        return schema, [], apply_rule("U1", [], relation=r, seq=sq)
    if rule_id == "U2":
        r1, r2, r3 = (rng.choice(["R", "S"]) for _ in range(3))
        n = rng.randint(1, 2)
        s1, s2, s3 = seq(r1, n), seq(r2, n), seq(r3, n)
        p = IND(r1, s1, r2, s2)
        q = IND(r2, s2, r3, s3)
        return schema, [p, q], apply_rule("U2", [p, q])
    if rule_id == "U3":
        r1, r2 = rng.choice(["R", "S"]), rng.choice(["R", "S"])
        p = IND(r1, seq(r1, 2), r2, seq(r2, 2))
        pos = tuple(rng.sample(range(2), rng.randint(1, 2)))
        return schema, [p], apply_rule("U3", [p], positions=pos)
    if rule_id == "UI1":
        r2 = "S"
        a = IND("R", ["A"], r2, ["C"])
        b = IND("R", ["B"], r2, ["D"])
        ia = IA(r2, {"C"}, {"D"})
        return schema, [a, b, ia], apply_rule("UI1", [a, b, ia])
    if rule_id == "UI2":
        a = IND("R", ["A", "B"], "S", ["C", "D"])
        b = IND("S", ["C", "D"], "R", ["A", "B"])
        k = rng.randint(0, 2)
        ia = IA("S", frozenset(["C", "D"][:k]), frozenset(["C", "D"][k:]))
        return schema, [a, b, ia], apply_rule("UI2", [a, b, ia], split=k)
    if rule_id == "UI3":
        a = IND("R", ["A"], "S", ["C"])
        ia = IA("S", {"C"}, {"C"})
        return schema, [a, ia], apply_rule("UI3", [a, ia])
    if rule_id == "UI4":
        a = IND("R", seq("R", rng.randint(1, 2)), "S", ["C", "D"][: rng.randint(1, 2)])
        if a.arity != len(a.rhs_seq):
            a = IND("R", ["A"], "S", ["C"])
        ia = IA("S", frozenset(a.rhs_seq), frozenset(a.rhs_seq))
        return schema, [a, ia], apply_rule("UI4", [a, ia])
    if rule_id == "UI5":
        a = IND("R", ["A"], "S", ["C"])
        b = IND("R", ["B"], "S", ["C"])
        ca = IA("S", {"C"}, {"C"})
        target = IA("R", {"A"}, ss(1) & frozenset(["A", "B"]) or frozenset({"B"}))
        target = IA("R", {"A"}, {"B"})
        concl = apply_rule(
            "UI5", [a, b, ca, target], replace_left=bool(rng.random() < 0.7)
        )
        return schema, [a, b, ca, target], concl
    if rule_id == "C":
        schema1 = Schema.single(attrs)
        n = rng.randint(1, 2)
        names = rng.sample(attrs, 2 * n)
        prem = []
        for i in range(n):
            prem.append(FD(rel, {names[2 * i]}, {names[2 * i + 1]}))
            nxt = names[(2 * i + 2) % (2 * n)]
            prem.append(IND(rel, [nxt], rel, [names[2 * i + 1]]))
        concl = apply_rule("C", prem, index=rng.randrange(2 * n))
        return schema1, prem, concl
    raise AssertionError(rule_id)


def test_acceptance_4_axiom_soundness():
    t0 = time.time()
    rng = random.Random(107)
    rule_ids = [
        "I1", "I2", "I3", "I4", "I5",
        "F1", "F2", "F3", "FI1", "FI2",
        "U1", "U2", "U3",
        "UI1", "UI2", "UI3", "UI4", "UI5",
        "C",
    ]
    violations = []
    for rule_id in rule_ids:
        checked = 0
        tries = 0
        while checked < 100 and tries < 400:
            tries += 1
            schema, premises, conclusion = _random_rule_instance(rule_id, rng)
            sigma = DependencySet(schema, premises)
            try:
                models = generate_models(sigma, 3, OracleBounds(3, 3), seed=tries)
            except BudgetExceeded:
                continue
            checked += 1
            for db in models:
                if not satisfies(db, conclusion):
                    violations.append((rule_id, premises, conclusion, db))
        assert checked >= 100, f"could not instantiate {rule_id} often enough"

    # the inclusion-symmetry rule leans on relations being non-empty
    s = Schema((("R", ("A",)), ("S", ("B",))))
    prem = [IND("R", ["A"], "S", ["B"]), IA("S", {"B"}, {"B"})]
    concl = apply_rule("UI3", prem)
    ui3_ok = all(
        satisfies(db, concl)
        for db in generate_models(DependencySet(s, prem), 5, OracleBounds(3, 3), seed=1)
    )
    with pytest.raises(Exception):
        Database(s, {"R": set(), "S": {(0,)}})  # empty relations are rejected

    elapsed = time.time() - t0
    detail = f"{len(rule_ids)} rules x 100 instances, {len(violations)} violations in {elapsed:.1f}s"
    if violations:
        r, p, c, db = violations[0]
        detail += f" | {r}: {[str(x) for x in p]} => {c} fails on {db.describe()}"
    _report("4 axiom soundness", not violations and ui3_ok, detail)


# ---------------------------------------------------------------------------
# 5. Armstrong exactness


def test_acceptance_5_armstrong_exactness():
    t0 = time.time()
    rng = random.Random(109)
    failures = []

    for _ in range(100):
        sigma, _ = rand_ufd_ia_instance(rng, attrs=("A", "B", "C", "D", "E"))
        rep = armstrong_ufd_ia(sigma)
        if not rep.exact:
            failures.append(("ufd_ia", sigma, rep.violations[:3]))

    for _ in range(100):
        sigma, _ = rand_star_instance(rng, attrs=("A", "B", "C", "D"))
        rep = armstrong_star_finite(sigma)
        if not rep.exact:
            failures.append(("star_finite", sigma, rep.violations[:3]))

    for _ in range(100):
        sigma, _ = rand_ind_ia_instance(
            rng, relations=(("R", ("A", "B")), ("S", ("C",)))
        )
        rep = armstrong_ind_ia(sigma, arity_bound=2)
        if not rep.exact:
            failures.append(("ind_ia", sigma, rep.violations[:3]))

    elapsed = time.time() - t0
    detail = f"300 constructions, {len(failures)} inexact in {elapsed:.1f}s"
    for kind, sigma, viol in failures[:2]:
        detail += f" | {kind}: {[str(d) for d in sigma.deps]} -> {[(str(v[0]), v[1], v[2]) for v in viol]}"
    _report("5 armstrong exactness", not failures and elapsed < 120, detail)


# ---------------------------------------------------------------------------
# 6. Division theorem


def test_acceptance_6_division_theorem():
    t0 = time.time()
    rng = random.Random(113)
    attrs = ("A", "B", "C", "D")
    schema = Schema.single(attrs)
    checked = 0
    bad = 0
    for _ in range(200):
        rows = {
            tuple(rng.randrange(4) for _ in attrs)
            for _ in range(rng.randint(1, 20))
        }
        db = Database(schema, {"R": rows})
        for k in range(1, len(attrs)):
            for xs in itertools.combinations(attrs, k):
                rest = [a for a in attrs if a not in xs]
                for m in range(1, len(rest) + 1):
                    for ys in itertools.combinations(rest, m):
                        checked += 1
                        if division_equals_projection(
                            db, "R", set(xs), set(ys)
                        ) != satisfies(db, IA("R", set(xs), set(ys))):
                            bad += 1
    elapsed = time.time() - t0
    _report(
        "6 division theorem",
        bad == 0,
        f"{checked} pairs on 200 relations, {bad} disagreements in {elapsed:.1f}s",
    )


# ---------------------------------------------------------------------------
# 7. Lemma derivation


def test_acceptance_7_lemma_derivation():
    sigma = DependencySet(
        Schema.single(("X", "Y", "U", "V")),
        [
            IA("R", {"X", "U"}, {"Y", "V"}),
            IA("R", {"X"}, {"U"}),
            IA("R", {"Y"}, {"V"}),
        ],
    )
    system = RuleSystem("exchange fragment", frozenset({"I2", "I3", "I4"}))
    got = derive(sigma, IA("R", {"X", "Y"}, {"U", "V"}), system)
    ok = (
        isinstance(got, Deduction)
        and got.rule_steps <= 9
        and verify_deduction(sigma.deps, got)
    )
    steps = got.rule_steps if isinstance(got, Deduction) else None
    _report("7 lemma derivation", ok, f"{steps} rule steps (<= 9)")


# ---------------------------------------------------------------------------
# 8. Non-interaction payoff


def _rand_fd_ia_set(rng, attrs=("A", "B", "C", "D")):
    s = Schema.single(attrs)
    fds = [
        FD(
            "R",
            frozenset(rng.sample(attrs, rng.randint(1, 2))),
            frozenset(rng.sample(attrs, 1)),
        )
        for _ in range(rng.randint(0, 2))
    ]
    ias = [
        IA(
            "R",
            frozenset(rng.sample(attrs, rng.randint(1, 2))),
            frozenset(rng.sample(attrs, rng.randint(1, 2))),
        )
        for _ in range(rng.randint(0, 2))
    ]
    return DependencySet(s, fds + ias)


def test_acceptance_8_noninteraction_payoff():
    t0 = time.time()
    rng = random.Random(127)
    attrs = ("A", "B", "C", "D")
    mismatches = 0
    confirmed = 0

    # unrestricted: the chase agrees with the separated engines whenever it answers
    done = 0
    while done < 50:
        sigma = _rand_fd_ia_set(rng, attrs)
        rep = noninteract_fd_ia(sigma.fds(), sigma.ias(), "unrestricted")
        if not rep.guaranteed:
            continue
        done += 1
        q_fd = FD(
            "R",
            frozenset(rng.sample(attrs, rng.randint(1, 2))),
            frozenset(rng.sample(attrs, 1)),
        )
        single = q_fd.rhs <= fd_closure(rep.transformed.fd_star, q_fd.lhs)
        chased = graph_chase_fd_ia(sigma, q_fd, max_vertices=300)
        if isinstance(chased, (Implied, NotImplied)):
            confirmed += 1
            if isinstance(chased, Implied) != single:
                mismatches += 1
        elif single:
            mismatches += 1  # positives must be found within the budget

        q_ia = IA(
            "R",
            frozenset(rng.sample(attrs, rng.randint(1, 2))),
            frozenset(rng.sample(attrs, rng.randint(1, 2))),
        )
        atoms = DependencySet(sigma.schema, rep.transformed.ia_star)
        single_ia = isinstance(imply_ind_ia(atoms, q_ia, want_witness=False), Implied)
        chased_ia = graph_chase_fd_ia(sigma, q_ia, max_vertices=300)
        if isinstance(chased_ia, (Implied, NotImplied)):
            confirmed += 1
            if isinstance(chased_ia, Implied) != single_ia:
                mismatches += 1
        elif single_ia:
            mismatches += 1

    # finite: under non-intersection the two modes coincide; the bounded
    # oracle must agree with the unrestricted separated verdict
    done = 0
    while done < 50:
        sigma = _rand_fd_ia_set(rng, attrs)
        rep = noninteract_fd_ia(sigma.fds(), sigma.ias(), "finite")
        if not rep.guaranteed:
            continue
        done += 1
        fin = decide_implication(sigma, _rand_query(rng, attrs), mode="finite")
        # the finite path must answer (no Unsupported on guaranteed inputs)
        if isinstance(fin.verdict, (Unsupported, Unknown)):
            mismatches += 1
            continue
        q = _rand_query(rng, attrs)
        fin_v = decide_implication(sigma, q, mode="finite").verdict
        try:
            found = find_counterexample(sigma, q, OracleBounds(4, 3, max_nodes=60_000))
        except BudgetExceeded:
            found = None
        if isinstance(fin_v, Implied):
            if isinstance(found, NotImplied):
                mismatches += 1
        else:
            if isinstance(found, NotImplied):
                confirmed += 1

    elapsed = time.time() - t0
    _report(
        "8 non-interaction payoff",
        mismatches == 0,
        f"100 guaranteed instances, {confirmed} definite agreements, "
        f"{mismatches} mismatches in {elapsed:.1f}s",
    )


def _rand_query(rng, attrs):
    if rng.random() < 0.5:
        return FD(
            "R",
            frozenset(rng.sample(attrs, rng.randint(1, 2))),
            frozenset(rng.sample(attrs, 1)),
        )
    return IA(
        "R",
        frozenset(rng.sample(attrs, rng.randint(1, 2))),
        frozenset(rng.sample(attrs, rng.randint(1, 2))),
    )


# ---------------------------------------------------------------------------
# 9. Performance smoke


def test_acceptance_9_performance_smoke():
    rng = random.Random(131)
    attrs = tuple(f"A{i:03d}" for i in range(200))
    deps = []
    for _ in range(500):
        deps.append(FD("R", {rng.choice(attrs)}, {rng.choice(attrs)}))
    for _ in range(500):
        deps.append(IND("R", [rng.choice(attrs)], "R", [rng.choice(attrs)]))
    for _ in range(50):
        deps.append(
            IA(
                "R",
                frozenset(rng.sample(attrs, rng.randint(1, 3))),
                frozenset(rng.sample(attrs, rng.randint(1, 3))),
            )
        )
    sigma = DependencySet(Schema.single(attrs), deps)
    t0 = time.time()
    closure = build_star_closure(sigma, "finite")
    for _ in range(25):
        q_fd = FD("R", {rng.choice(attrs)}, {rng.choice(attrs)})
        imply_star(sigma, q_fd, "finite", closure=closure, want_witness=False)
        q_ind = IND("R", [rng.choice(attrs)], "R", [rng.choice(attrs)])
        imply_star(sigma, q_ind, "finite", closure=closure, want_witness=False)
    star_elapsed = time.time() - t0

    relations = (("R", ("A", "B", "C", "D", "E")), ("S", ("F", "G", "H", "I", "J")))
    rng2 = random.Random(137)
    sigma2, _ = rand_ind_ia_instance(rng2, relations=relations, max_deps=6)
    from depsolve.armstrong import enumerate_candidates

    queries = enumerate_candidates(sigma2.schema, "ind_ia", 2)
    t0 = time.time()
    for q in queries:
        imply_ind_ia(sigma2, q, want_witness=False)
    chase_elapsed = time.time() - t0

    ok = star_elapsed < 1.0 and chase_elapsed < 10.0
    _report(
        "9 performance smoke",
        ok,
        f"star closure + 50 queries {star_elapsed:.2f}s (< 1s); "
        f"{len(queries)} chase queries {chase_elapsed:.2f}s (< 10s)",
    )


# ---------------------------------------------------------------------------
# 10. Profiler oracle equivalence


def test_acceptance_10_profiler_equivalence():
    t0 = time.time()
    bad = 0
    for name in ("shifts.csv", "survey.csv", "ledger.csv"):
        rel = load_csv(FIXTURES / name)
        bound = len(rel[1])
        fast = mine_ias(rel, MiningConfig(max_arity=bound)).maximal
        slow = brute_force_maximal(rel, bound)
        if fast != slow:
            bad += 1
    rng = random.Random(139)
    for _ in range(30):
        rel = rand_relation(rng, attrs=("A", "B", "C", "D", "E", "F"), max_rows=14)
        if mine_ias(rel, MiningConfig(max_arity=6)).maximal != brute_force_maximal(rel, 6):
            bad += 1
    elapsed = time.time() - t0
    _report(
        "10 profiler equivalence",
        bad == 0,
        f"3 fixtures + 30 random relations, {bad} disagreements in {elapsed:.1f}s",
    )
