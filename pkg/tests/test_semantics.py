import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depsolve.core import FD, IA, IND, DependencySet, NotImplied, Schema
from depsolve.errors import EmptyRelation
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

S2 = Schema.single(("A", "B"))


def db2(rows):
    return Database(S2, {"R": rows})


def test_satisfies_ia_product_relation():
    db = db2({(a, b) for a in "ab" for b in "12"})
    assert satisfies(db, IA("R", {"A"}, {"B"}))


def test_satisfies_ia_diagonal_fails():
    db = db2({(0, 0), (1, 1)})
    assert not satisfies(db, IA("R", {"A"}, {"B"}))
    assert satisfies(db, FD("R", {"A"}, {"B"}))


def test_satisfies_overlapping_ia_requires_constancy():
    db = db2({(0, 0), (1, 1)})
    assert not satisfies(db, IA("R", {"A"}, {"A", "B"}))
    db_const = db2({(0, 0), (0, 1)})
    assert satisfies(db_const, IA("R", {"A"}, {"A", "B"}))


def test_satisfies_ind():
    s = Schema((("R", ("A",)), ("S", ("B",))))
    db = Database(s, {"R": {(1,)}, "S": {(1,), (2,)}})
    assert satisfies(db, IND("R", ["A"], "S", ["B"]))
    assert not satisfies(db, IND("S", ["B"], "R", ["A"]))


def test_empty_relation_rejected():
    with pytest.raises(EmptyRelation):
        Database(S2, {"R": set()})


def test_division_examples():
    db = db2({(a, b) for a in "ab" for b in "12"})
    assert division_equals_projection(db, "R", {"A"}, {"B"})
    db = db2({(0, 0), (1, 1)})
    assert not division_equals_projection(db, "R", {"A"}, {"B"})
    assert division_equals_projection(db, "R", set(), {"B"})


def test_division_matches_satisfaction_randomly():
    rng = random.Random(3)
    schema = Schema.single(("A", "B", "C", "D"))
    attrs = ("A", "B", "C", "D")
    for _ in range(200):
        rows = {
            tuple(rng.randrange(3) for _ in attrs)
            for _ in range(rng.randint(1, 20))
        }
        db = Database(schema, {"R": rows})
        for k in range(1, 4):
            for xs in itertools.combinations(attrs, k):
                rest = [a for a in attrs if a not in xs]
                for m in range(1, len(rest) + 1):
                    for ys in itertools.combinations(rest, m):
                        assert division_equals_projection(
                            db, "R", set(xs), set(ys)
                        ) == satisfies(db, IA("R", set(xs), set(ys)))


def test_satisfaction_invariant_under_renaming():
    rng = random.Random(5)
    schema = Schema.single(("A", "B", "C"))
    for _ in range(100):
        rows = {
            tuple(rng.randrange(3) for _ in range(3))
            for _ in range(rng.randint(1, 6))
        }
        db = Database(schema, {"R": rows})
        perm = {0: 7, 1: 5, 2: 9}
        db2_ = Database(schema, {"R": {tuple(perm[v] for v in r) for r in rows}})
        deps = [
            FD("R", {"A"}, {"B"}),
            IA("R", {"A"}, {"B", "C"}),
            IA("R", {"A", "B"}, {"B", "C"}),
        ]
        for d in deps:
            assert satisfies(db, d) == satisfies(db2_, d)


def test_oracle_finds_minimal_fd_counterexample():
    sigma = DependencySet(S2, [])
    got = find_counterexample(sigma, FD("R", {"A"}, {"B"}), OracleBounds(2, 2))
    assert isinstance(got, NotImplied)
    assert got.witness.total_rows() == 2
    assert satisfies_all(got.witness, sigma.deps)
    assert not satisfies(got.witness, FD("R", {"A"}, {"B"}))


def test_oracle_respects_symmetry_soundness():
    sigma = DependencySet(S2, [IA("R", {"A"}, {"B"})])
    got = find_counterexample(sigma, IA("R", {"B"}, {"A"}), OracleBounds(4, 3))
    assert isinstance(got, NoCounterexampleFound)


def test_oracle_matches_naive_enumeration():
    """Canonical-form pruning must not lose any counterexample."""
    rng = random.Random(7)
    attrs = ("A", "B", "C")
    schema = Schema.single(attrs)

    def naive(sigma, query, max_tuples, domain):
        cells = list(itertools.product(range(domain), repeat=len(attrs)))
        for n in range(1, max_tuples + 1):
            for combo in itertools.combinations(cells, n):
                db = Database(schema, {"R": combo})
                if satisfies_all(db, sigma.deps) and not satisfies(db, query):
                    return True
        return False

    for _ in range(60):
        deps = []
        for _ in range(rng.randint(0, 3)):
            if rng.random() < 0.5:
                deps.append(
                    FD(
                        "R",
                        frozenset(rng.sample(attrs, rng.randint(0, 2))),
                        frozenset(rng.sample(attrs, rng.randint(1, 2))),
                    )
                )
            else:
                deps.append(
                    IA(
                        "R",
                        frozenset(rng.sample(attrs, rng.randint(1, 2))),
                        frozenset(rng.sample(attrs, rng.randint(1, 2))),
                    )
                )
        sigma = DependencySet(schema, deps)
        if rng.random() < 0.5:
            query = FD("R", frozenset(rng.sample(attrs, 1)), frozenset(rng.sample(attrs, 1)))
        else:
            query = IA("R", frozenset(rng.sample(attrs, 1)), frozenset(rng.sample(attrs, 1)))
        mine = find_counterexample(sigma, query, OracleBounds(3, 3))
        assert isinstance(mine, NotImplied) == naive(sigma, query, 3, 3)
        if isinstance(mine, NotImplied):
            assert satisfies_all(mine.witness, sigma.deps)
            assert not satisfies(mine.witness, query)


def test_generate_models_ia_closure():
    sigma = DependencySet(S2, [IA("R", {"A"}, {"B"})])
    for db in generate_models(sigma, 5, OracleBounds(4, 3), seed=1):
        rows = db.rows("R")
        xs = {r[0] for r in rows}
        ys = {r[1] for r in rows}
        assert rows == {(x, y) for x in xs for y in ys}


def test_generate_models_ind_closure():
    s = Schema((("R", ("A",)), ("S", ("B",))))
    sigma = DependencySet(s, [IND("R", ["A"], "S", ["B"])])
    for db in generate_models(sigma, 5, OracleBounds(4, 4), seed=2):
        assert db.project("R", ["A"]) <= db.project("S", ["B"])


def test_generate_models_constancy():
    sigma = DependencySet(S2, [IA("R", {"A"}, {"A"})])
    for db in generate_models(sigma, 5, OracleBounds(4, 3), seed=3):
        assert len(db.project("R", ["A"])) == 1


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_generate_models_always_satisfy_sigma(seed):
    rng = random.Random(seed)
    schema = Schema.single(("A", "B", "C"))
    deps = []
    for _ in range(rng.randint(0, 3)):
        if rng.random() < 0.5:
            deps.append(
                IA(
                    "R",
                    frozenset(rng.sample(("A", "B", "C"), rng.randint(1, 2))),
                    frozenset(rng.sample(("A", "B", "C"), rng.randint(1, 2))),
                )
            )
        else:
            deps.append(IND("R", [rng.choice(("A", "B", "C"))], "R", [rng.choice(("A", "B", "C"))]))
    sigma = DependencySet(schema, deps)
    for db in generate_models(sigma, 3, OracleBounds(3, 3), seed=seed):
        assert satisfies_all(db, sigma.deps)
