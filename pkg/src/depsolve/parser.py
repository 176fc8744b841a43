"""Parser for the dependency DSL and CSV relations.

The DSL is line oriented:

    schema R(A,B)
    fd R: A -> B
    ind R[A] <= S[E]
    ia R: A _|_ B
    # comment

Attribute lists in fd/ia lines are whitespace separated; ind sequences are
comma separated. Parse failures carry a file/line/column span.
"""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .core import FD, IA, IND, Dependency, DependencySet, Schema
from .errors import DepsolveError, EmptyRelation, MalformedDependency, RaggedRow

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseError:
    span: SourceSpan
    message: str
    kind: str  # Lex | Syntax | UnknownAttribute | DuplicateRelation | ArityMismatch

    def __str__(self):
        return f"{self.span}: {self.kind}: {self.message}"


class ParseFailure(DepsolveError):
    """Raised when parsing fails; carries every collected ParseError."""

    def __init__(self, errors: list[ParseError]):
        super().__init__("; ".join(str(e) for e in errors))
        self.errors = errors


class _Line:
    def __init__(self, text: str, file: str, lineno: int):
        self.text = text
        self.file = file
        self.lineno = lineno
        self.pos = 0

    def span(self, col: Optional[int] = None) -> SourceSpan:
        return SourceSpan(self.file, self.lineno, (self.pos if col is None else col) + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def eof(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text) or self.text[self.pos] == "#"

    def peek(self, token: str) -> bool:
        self.skip_ws()
        return self.text.startswith(token, self.pos)

    def expect(self, token: str, errors, kind: str = "Syntax") -> bool:
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        errors.append(ParseError(self.span(), f"expected '{token}'", kind))
        return False

    def ident(self, errors) -> Optional[str]:
        self.skip_ws()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            errors.append(ParseError(self.span(), "expected identifier", "Lex"))
            return None
        self.pos = m.end()
        return m.group()

    def ident_list(self, stop_tokens: tuple[str, ...], errors) -> Optional[list[str]]:
        """Whitespace separated identifiers, possibly empty, up to a stop token."""
        out: list[str] = []
        while True:
            self.skip_ws()
            if self.pos >= len(self.text) or any(
                self.text.startswith(t, self.pos) for t in stop_tokens
            ):
                return out
            name = self.ident(errors)
            if name is None:
                return None
            out.append(name)

    def comma_list(self, errors) -> Optional[list[str]]:
        out: list[str] = []
        first = self.ident(errors)
        if first is None:
            return None
        out.append(first)
        while self.peek(","):
            self.expect(",", errors)
            nxt = self.ident(errors)
            if nxt is None:
                return None
            out.append(nxt)
        return out


def _parse_lines(text: str, file: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield _Line(raw, file, lineno)


def _check_attrs(names, rel, schema_attrs, line, errors) -> bool:
    ok = True
    for name in names:
        if name not in schema_attrs.get(rel, ()):
            errors.append(
                ParseError(line.span(0), f"unknown attribute {name} on {rel}", "UnknownAttribute")
            )
            ok = False
    return ok


def parse_spec(text: str, file: str = "<spec>") -> DependencySet:
    """Parse a full DSL document into a DependencySet; raise ParseFailure on errors."""
    errors: list[ParseError] = []
    relations: list[tuple[str, tuple[str, ...]]] = []
    schema_attrs: dict[str, tuple[str, ...]] = {}
    pending: list[tuple[str, _Line]] = []

    for line in _parse_lines(text, file):
        line.skip_ws()
        m = _IDENT.match(line.text, line.pos)
        if not m:
            errors.append(ParseError(line.span(), "expected a declaration keyword", "Lex"))
            continue
        keyword = m.group()
        if keyword == "schema":
            line.pos = m.end()
            name = line.ident(errors)
            if name is None or not line.expect("(", errors):
                continue
            attrs = line.comma_list(errors)
            if attrs is None or not line.expect(")", errors):
                continue
            if name in schema_attrs:
                errors.append(
                    ParseError(line.span(0), f"relation {name} declared twice", "DuplicateRelation")
                )
                continue
            relations.append((name, tuple(attrs)))
            schema_attrs[name] = tuple(attrs)
        elif keyword in ("fd", "ind", "ia"):
            pending.append((keyword, line))
        else:
            errors.append(
                ParseError(line.span(), f"unknown keyword {keyword}", "Syntax")
            )

    try:
        schema = Schema(tuple(relations))
    except MalformedDependency as exc:
        errors.append(ParseError(SourceSpan(file, 1, 1), str(exc), "DuplicateRelation"))
        raise ParseFailure(errors)

    deps: list[Dependency] = []
    for keyword, line in pending:
        dep = _parse_dep_line(keyword, line, schema_attrs, errors)
        if dep is not None:
            deps.append(dep)

    if errors:
        raise ParseFailure(errors)
    return DependencySet(schema, deps)


def _parse_dep_line(keyword: str, line: _Line, schema_attrs, errors) -> Optional[Dependency]:
    line.pos += len(keyword)
    if keyword == "fd":
        rel = line.ident(errors)
        if rel is None or not line.expect(":", errors):
            return None
        if rel not in schema_attrs:
            errors.append(ParseError(line.span(0), f"unknown relation {rel}", "UnknownAttribute"))
            return None
        lhs = line.ident_list(("->",), errors)
        if lhs is None or not line.expect("->", errors):
            return None
        rhs = line.ident_list(("#",), errors)
        if rhs is None:
            return None
        if not _check_attrs(lhs + rhs, rel, schema_attrs, line, errors):
            return None
        return FD(rel, lhs, rhs)
    if keyword == "ia":
        rel = line.ident(errors)
        if rel is None or not line.expect(":", errors):
            return None
        if rel not in schema_attrs:
            errors.append(ParseError(line.span(0), f"unknown relation {rel}", "UnknownAttribute"))
            return None
        left = line.ident_list(("_|_",), errors)
        if left is None or not line.expect("_|_", errors):
            return None
        right = line.ident_list(("#",), errors)
        if right is None:
            return None
        if not _check_attrs(left + right, rel, schema_attrs, line, errors):
            return None
        return IA(rel, left, right)
    # ind R[A,B] <= S[E,F]
    lrel = line.ident(errors)
    if lrel is None or not line.expect("[", errors):
        return None
    lseq = line.comma_list(errors)
    if lseq is None or not line.expect("]", errors) or not line.expect("<=", errors):
        return None
    rrel = line.ident(errors)
    if rrel is None or not line.expect("[", errors):
        return None
    rseq = line.comma_list(errors)
    if rseq is None or not line.expect("]", errors):
        return None
    for rel in (lrel, rrel):
        if rel not in schema_attrs:
            errors.append(ParseError(line.span(0), f"unknown relation {rel}", "UnknownAttribute"))
            return None
    if len(lseq) != len(rseq):
        errors.append(
            ParseError(
                line.span(0),
                f"sequence lengths differ: {len(lseq)} vs {len(rseq)}",
                "ArityMismatch",
            )
        )
        return None
    if not (_check_attrs(lseq, lrel, schema_attrs, line, errors) and
            _check_attrs(rseq, rrel, schema_attrs, line, errors)):
        return None
    try:
        return IND(lrel, lseq, rrel, rseq)
    except MalformedDependency as exc:
        errors.append(ParseError(line.span(0), str(exc), "Syntax"))
        return None


def parse_dependency(text: str, schema: Schema) -> Dependency:
    """Parse a single fd/ind/ia declaration against an existing schema."""
    errors: list[ParseError] = []
    schema_attrs = {name: attrs for name, attrs in schema.relations}
    lines = list(_parse_lines(text, "<query>"))
    if len(lines) != 1:
        raise ParseFailure(
            [ParseError(SourceSpan("<query>", 1, 1), "expected exactly one dependency", "Syntax")]
        )
    line = lines[0]
    line.skip_ws()
    m = _IDENT.match(line.text, line.pos)
    keyword = m.group() if m else ""
    if keyword not in ("fd", "ind", "ia"):
        raise ParseFailure(
            [ParseError(line.span(), "expected fd, ind, or ia", "Syntax")]
        )
    dep = _parse_dep_line(keyword, line, schema_attrs, errors)
    if errors or dep is None:
        raise ParseFailure(errors)
    return dep


def pretty(deps: Iterable[Dependency]) -> str:
    return "\n".join(str(d) for d in deps)


def pretty_spec(sigma: DependencySet) -> str:
    """Render a DependencySet back into DSL text; re-parsing round-trips."""
    lines = [
        f"schema {name}({','.join(attrs)})" for name, attrs in sigma.schema.relations
    ]
    lines.extend(str(d) for d in sigma.deps)
    return "\n".join(lines) + "\n"


def load_csv(
    path,
    delimiter: str = ",",
    header: bool = True,
    null_token: Optional[str] = None,
) -> tuple[str, tuple[str, ...], frozenset[tuple]]:
    """Load a CSV file as a named relation: (name, attributes, rows).

    Values are opaque strings compared by equality; duplicate rows collapse
    because relations are sets. Raises EmptyRelation for an empty data
    section and RaggedRow when a row's width differs from the header's.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        rows = [tuple(r) for r in reader if r]
    if header:
        if not rows:
            raise EmptyRelation(f"{path} has no header row")
        attrs = tuple(rows[0])
        data = rows[1:]
    else:
        attrs = ()
        data = rows
        if data:
            attrs = tuple(f"c{i + 1}" for i in range(len(data[0])))
    if not data:
        raise EmptyRelation(f"{path} has no data rows")
    width = len(attrs)
    for i, row in enumerate(data):
        if len(row) != width:
            raise RaggedRow(f"{path}: row {i + 1} has {len(row)} fields, expected {width}")
    if null_token is not None:
        data = [tuple(None if v == null_token else v for v in row) for row in data]
    return path.stem, attrs, frozenset(data)
