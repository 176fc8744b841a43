"""Mining maximal independence atoms and independence ratios from relations.

Satisfaction of a disjoint atom is the product test
|r[XY]| = |r[X]| * |r[Y]|; the lattice search prunes with the fact that a
failed atom can never be repaired by widening either side.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import IA
from .errors import MalformedDependency


@dataclass(frozen=True)
class MiningConfig:
    max_arity: int = 4  # total attribute occurrences |X| + |Y|
    include_overlapping: bool = False  # also mine single-attribute constancy atoms
    compute_ratios: bool = False

    def __post_init__(self):
        if self.max_arity < 2:
            raise MalformedDependency("an atom has at least two attribute occurrences")


@dataclass(frozen=True)
class MiningResult:
    maximal: tuple[IA, ...]
    columns: int
    rows: int
    atom_count: int
    max_arity_found: int
    ratios: dict[tuple[frozenset, frozenset], float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "columns": self.columns,
            "rows": self.rows,
            "number_of_ias": self.atom_count,
            "maximum_arity": self.max_arity_found,
            "atoms": [str(ia) for ia in self.maximal],
        }


class _RelationView:
    def __init__(self, name: str, attrs, rows):
        self.name = name
        self.attrs = list(attrs)
        self.rows = [tuple(r) for r in rows]
        self.pos = {a: i for i, a in enumerate(self.attrs)}
        self._proj_cache: dict[frozenset, int] = {}

    def distinct(self, attrs: frozenset) -> int:
        if attrs not in self._proj_cache:
            idx = tuple(self.pos[a] for a in sorted(attrs))
            self._proj_cache[attrs] = len({tuple(r[i] for i in idx) for r in self.rows})
        return self._proj_cache[attrs]

    def holds(self, x: frozenset, y: frozenset) -> bool:
        return self.distinct(x | y) == self.distinct(x) * self.distinct(y)


def independence_ratio(relation, x: Iterable[str], y: Iterable[str]) -> float:
    """|r[XY]| / (|r[X]| * |r[Y]|); equals 1 exactly when X _|_ Y holds."""
    name, attrs, rows = relation
    x, y = frozenset(x), frozenset(y)
    if not x or not y or x & y:
        raise MalformedDependency("ratio needs disjoint non-empty sides")
    view = _RelationView(name, attrs, rows)
    return view.distinct(x | y) / (view.distinct(x) * view.distinct(y))


def _canonical_pair(x: frozenset, y: frozenset):
    a, b = sorted([tuple(sorted(x)), tuple(sorted(y))])
    return a, b


def mine_ias(relation, config: MiningConfig = MiningConfig()) -> MiningResult:
    """All maximal satisfied disjoint atoms of a relation, within the arity bound.

    Level-wise search: a satisfied atom is extended one attribute at a time;
    unsatisfied atoms are never extended because decomposition makes every
    sub-atom of a satisfied atom satisfied.
    """
    name, attrs, rows = relation
    view = _RelationView(name, attrs, rows)
    cols = sorted(attrs)

    satisfied: set[tuple] = set()
    frontier: list[tuple[frozenset, frozenset]] = []
    for a, b in itertools.combinations(cols, 2):
        x, y = frozenset({a}), frozenset({b})
        if view.holds(x, y):
            satisfied.add(_canonical_pair(x, y))
            frontier.append((x, y))

    while frontier:
        nxt: list[tuple[frozenset, frozenset]] = []
        for x, y in frontier:
            if len(x) + len(y) >= config.max_arity:
                continue
            for c in cols:
                if c in x or c in y:
                    continue
                for x2, y2 in ((x | {c}, y), (x, y | {c})):
                    key = _canonical_pair(x2, y2)
                    if key in satisfied:
                        continue
                    if view.holds(x2, y2):
                        satisfied.add(key)
                        nxt.append((x2, y2))
        frontier = nxt

    maximal = []
    for key in satisfied:
        x, y = frozenset(key[0]), frozenset(key[1])
        dominated = False
        for other in satisfied:
            if other == key:
                continue
            ox, oy = frozenset(other[0]), frozenset(other[1])
            if (x <= ox and y <= oy) or (x <= oy and y <= ox):
                dominated = True
                break
        if not dominated:
            maximal.append(IA(name, x, y))

    if config.include_overlapping:
        for a in cols:
            if view.distinct(frozenset({a})) == 1:
                maximal.append(IA(name, {a}, {a}))

    maximal.sort(key=str)
    ratios = {}
    if config.compute_ratios:
        for a, b in itertools.combinations(cols, 2):
            x, y = frozenset({a}), frozenset({b})
            ratios[(x, y)] = view.distinct(x | y) / (view.distinct(x) * view.distinct(y))
    max_arity_found = max(
        (len(ia.left) + len(ia.right) for ia in maximal if ia.left != ia.right),
        default=0,
    )
    return MiningResult(
        maximal=tuple(maximal),
        columns=len(cols),
        rows=len(view.rows),
        atom_count=len(maximal),
        max_arity_found=max_arity_found,
        ratios=ratios,
    )


def brute_force_maximal(relation, max_arity: int) -> tuple[IA, ...]:
    """Reference enumeration: test every disjoint pair, keep the maximal ones."""
    name, attrs, rows = relation
    view = _RelationView(name, attrs, rows)
    cols = sorted(attrs)
    sides = [
        frozenset(c)
        for k in range(1, max_arity)
        for c in itertools.combinations(cols, k)
    ]
    sat = set()
    for x in sides:
        for y in sides:
            if x & y or len(x) + len(y) > max_arity:
                continue
            if view.holds(x, y):
                sat.add(_canonical_pair(x, y))
    out = []
    for key in sat:
        x, y = frozenset(key[0]), frozenset(key[1])
        if not any(
            other != key
            and (
                (x <= frozenset(other[0]) and y <= frozenset(other[1]))
                or (x <= frozenset(other[1]) and y <= frozenset(other[0]))
            )
            for other in sat
        ):
            out.append(IA(name, x, y))
    return tuple(sorted(out, key=str))
