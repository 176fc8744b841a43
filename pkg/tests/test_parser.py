import pytest

from depsolve.core import FD, IA, IND
from depsolve.errors import EmptyRelation, RaggedRow
from depsolve.parser import (
    ParseFailure,
    load_csv,
    parse_dependency,
    parse_spec,
    pretty_spec,
)

SPEC = """\
# a small two-relation spec
schema R(A,B)
schema S(E,F)
fd R: A -> B
ia R: A _|_ B
ind R[A,B] <= S[E,F]
fd R: -> A
"""


def test_parse_spec_basics():
    sigma = parse_spec(SPEC)
    assert sigma.schema.relation_names == ("R", "S")
    assert FD("R", {"A"}, {"B"}) in sigma.deps
    assert IA("R", {"A"}, {"B"}) in sigma.deps
    assert IND("R", ["A", "B"], "S", ["E", "F"]) in sigma.deps
    assert FD("R", set(), {"A"}) in sigma.deps


def test_parse_arity_mismatch():
    text = "schema R(A,B)\nschema S(E)\nind R[A,B] <= S[E]\n"
    with pytest.raises(ParseFailure) as err:
        parse_spec(text)
    assert any(e.kind == "ArityMismatch" for e in err.value.errors)


def test_parse_unknown_attribute_has_span():
    text = "schema R(A)\nfd R: A -> Z\n"
    with pytest.raises(ParseFailure) as err:
        parse_spec(text)
    errors = err.value.errors
    assert errors and errors[0].kind == "UnknownAttribute"
    assert errors[0].span.line == 2
    assert errors[0].span.column >= 1


def test_parse_duplicate_relation():
    with pytest.raises(ParseFailure) as err:
        parse_spec("schema R(A)\nschema R(B)\n")
    assert any(e.kind == "DuplicateRelation" for e in err.value.errors)


def test_parse_dependency_forms():
    sigma = parse_spec("schema Heart(p_id,t_id)\n")
    dep = parse_dependency("ia Heart: p_id _|_ t_id", sigma.schema)
    assert dep == IA("Heart", {"p_id"}, {"t_id"})
    dep = parse_dependency("fd Heart: -> p_id", sigma.schema)
    assert dep == FD("Heart", set(), {"p_id"})
    dep = parse_dependency("ia Heart: p_id _|_ p_id", sigma.schema)
    assert dep == IA("Heart", {"p_id"}, {"p_id"})


def test_round_trip():
    sigma = parse_spec(SPEC)
    again = parse_spec(pretty_spec(sigma))
    assert again.schema == sigma.schema
    assert set(map(str, again.deps)) == set(map(str, sigma.deps))


def test_load_csv_collapses_duplicates(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("A,B\na,1\na,1\nb,2\n", encoding="utf-8")
    name, attrs, rows = load_csv(p)
    assert name == "r" and attrs == ("A", "B")
    assert rows == frozenset({("a", "1"), ("b", "2")})


def test_load_csv_empty(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("A,B\n", encoding="utf-8")
    with pytest.raises(EmptyRelation):
        load_csv(p)


def test_load_csv_ragged(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("A,B\n1,2\n3\n", encoding="utf-8")
    with pytest.raises(RaggedRow):
        load_csv(p)


def test_load_csv_headerless(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("1,2\n3,4\n", encoding="utf-8")
    name, attrs, rows = load_csv(p, header=False)
    assert attrs == ("c1", "c2")
    assert len(rows) == 2
