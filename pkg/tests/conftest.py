"""Shared random-instance generators for the test suite."""
from __future__ import annotations

import random

from depsolve.core import FD, IA, IND, DependencySet, Schema


def rand_uind_ia_instance(rng: random.Random, attrs=("A", "B", "C", "D")):
    """Uni-relational unary-IND + IA set plus a query of the same class."""
    s = Schema.single(attrs)
    deps = []
    for _ in range(rng.randint(0, 4)):
        if rng.random() < 0.5:
            deps.append(IND("R", [rng.choice(attrs)], "R", [rng.choice(attrs)]))
        else:
            xs = frozenset(rng.sample(attrs, rng.randint(1, 2)))
            ys = frozenset(rng.sample(attrs, rng.randint(1, 2)))
            deps.append(IA("R", xs, ys))
    if rng.random() < 0.5:
        q = IND("R", [rng.choice(attrs)], "R", [rng.choice(attrs)])
    else:
        xs = frozenset(rng.sample(attrs, rng.randint(1, 2)))
        ys = frozenset(rng.sample(attrs, rng.randint(1, 2)))
        q = IA("R", xs, ys)
    return DependencySet(s, deps), q


def rand_star_instance(rng: random.Random, attrs=("A", "B", "C", "D", "E"), n_deps=(0, 5)):
    """Uni-relational unary FD + unary IND + IA set plus a same-class query."""
    s = Schema.single(attrs)

    def one(kind_roll):
        if kind_roll < 0.3:
            a, b = rng.choice(attrs), rng.choice(attrs)
            lhs = frozenset() if rng.random() < 0.1 else frozenset({a})
            return FD("R", lhs, {b})
        if kind_roll < 0.6:
            return IND("R", [rng.choice(attrs)], "R", [rng.choice(attrs)])
        xs = frozenset(rng.sample(attrs, rng.randint(1, 2)))
        ys = frozenset(rng.sample(attrs, rng.randint(1, 2)))
        return IA("R", xs, ys)

    deps = [one(rng.random()) for _ in range(rng.randint(*n_deps))]
    q = one(rng.random())
    return DependencySet(s, deps), q


def rand_ufd_ia_instance(rng: random.Random, attrs=("A", "B", "C", "D", "E")):
    """Uni-relational unary FD + IA set plus a same-class query."""
    s = Schema.single(attrs)

    def one():
        if rng.random() < 0.5:
            a, b = rng.choice(attrs), rng.choice(attrs)
            lhs = frozenset() if rng.random() < 0.1 else frozenset({a})
            return FD("R", lhs, {b})
        xs = frozenset(rng.sample(attrs, rng.randint(1, 2)))
        ys = frozenset(rng.sample(attrs, rng.randint(1, 2)))
        return IA("R", xs, ys)

    deps = [one() for _ in range(rng.randint(0, 4))]
    return DependencySet(s, deps), one()


def rand_ind_ia_instance(
    rng: random.Random,
    relations=(("R", ("A", "B")), ("S", ("C", "D"))),
    max_deps=4,
    max_arity=2,
):
    """Multi-relational IND + IA set plus a same-class query."""
    s = Schema(relations)
    attrs_of = {name: list(attrs) for name, attrs in relations}
    names = [name for name, _ in relations]

    def one():
        if rng.random() < 0.5:
            r1, r2 = rng.choice(names), rng.choice(names)
            n = rng.randint(1, min(max_arity, len(attrs_of[r1]), len(attrs_of[r2])))
            return IND(r1, rng.sample(attrs_of[r1], n), r2, rng.sample(attrs_of[r2], n))
        r1 = rng.choice(names)
        pool = attrs_of[r1]
        xs = frozenset(rng.sample(pool, min(len(pool), rng.randint(1, max_arity))))
        ys = frozenset(rng.sample(pool, min(len(pool), rng.randint(1, max_arity))))
        return IA(r1, xs, ys)

    deps = [one() for _ in range(rng.randint(0, max_deps))]
    return DependencySet(s, deps), one()


def rand_ca_free_instance(rng: random.Random):
    """IND + disjoint-IA set with no derivable constancy atoms, plus a query."""
    from depsolve.chase import uind_ca_closure

    relations = (("R", ("A", "B", "C")), ("S", ("D", "E")))
    s = Schema(relations)
    attrs_of = {"R": ["A", "B", "C"], "S": ["D", "E"]}

    def disjoint_ia():
        r1 = rng.choice(["R", "S"])
        pool = attrs_of[r1]
        k1 = rng.randint(1, len(pool) - 1)
        xs = rng.sample(pool, k1)
        rest = [a for a in pool if a not in xs]
        ys = rng.sample(rest, rng.randint(1, len(rest)))
        return IA(r1, frozenset(xs), frozenset(ys))

    def ind():
        r1, r2 = rng.choice(["R", "S"]), rng.choice(["R", "S"])
        n = rng.randint(1, 2)
        return IND(r1, rng.sample(attrs_of[r1], n), r2, rng.sample(attrs_of[r2], n))

    for _ in range(100):
        deps = [
            ind() if rng.random() < 0.55 else disjoint_ia()
            for _ in range(rng.randint(0, 4))
        ]
        sig = DependencySet(s, deps)
        if not uind_ca_closure(sig).constants:
            query = ind() if rng.random() < 0.5 else disjoint_ia()
            return sig, query
    raise RuntimeError("could not generate a constancy-free instance")


def rand_relation(rng: random.Random, attrs=("A", "B", "C"), max_rows=8, domain=3):
    rows = {
        tuple(rng.randrange(domain) for _ in attrs)
        for _ in range(rng.randint(1, max_rows))
    }
    return ("r", tuple(attrs), frozenset(rows))
