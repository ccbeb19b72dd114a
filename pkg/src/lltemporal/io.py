"""Line-oriented instance format.

::

    # comment
    var a b c                         # optional explicit declarations
    rel R 4 = 0,0,1,1 | 0,1,2,3       # rank vectors, canonicalized on load
    con R(x1, x2, y1, y2)
    lh a=b & c=d -> x > y | x > z | eq
    lh a=b -> false
    pa x <= y                         # point algebra: < <= = != > >=

Clauses may use ``<`` instead of ``>`` throughout (the dual clause shape).
Variables are declared on first use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import (
    Constraint,
    Instance,
    LlHornClause,
    Relation,
    RelationConstraint,
    normalize_relation,
)
from .frontends import POINT_OPS, PointAtom, from_point

_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<op><=|>=|!=|=|<|>)|(?P<punct>[|&,()])"
    r"|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_'.]*)|(?P<bad>\S))"
)

KEYWORDS = ("var", "rel", "con", "lh", "pa")


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    message: str
    token: str = ""

    def __str__(self) -> str:
        where = f"{self.line}:{self.column}"
        tok = f" (at {self.token!r})" if self.token else ""
        return f"{where}: {self.message}{tok}"


class InstanceSyntaxError(ValueError):
    def __init__(self, errors: list[ParseError]):
        self.errors = errors
        super().__init__("\n".join(str(e) for e in errors))


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


class _LineError(Exception):
    def __init__(self, tok: _Tok | None, message: str, col: int):
        self.tok = tok
        self.message = message
        self.col = col


class _Line:
    def __init__(self, text: str):
        self.toks: list[_Tok] = []
        self.end_col = len(text) + 1
        pos = 0
        text = text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.lastgroup is None:
                break
            kind = m.lastgroup
            start = m.start(kind)
            self.toks.append(_Tok(kind, m.group(kind), start + 1))
            pos = m.end()
        self.i = 0

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def fail(self, message: str):
        tok = self.peek()
        raise _LineError(tok, message, tok.col if tok else self.end_col)

    def next(self, kind: str | None = None, text: str | None = None, what: str = "") -> _Tok:
        tok = self.peek()
        if tok is None or (kind and tok.kind != kind) or (text and tok.text != text):
            self.fail(f"expected {what or text or kind}")
        if tok.kind == "bad":
            self.fail("unexpected character")
        self.i += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.text == text:
            self.i += 1
            return True
        return False

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def expect_end(self):
        if not self.done():
            self.fail("unexpected trailing input")


def parse_instance(text: str) -> Instance:
    """Parse instance text; raises :class:`InstanceSyntaxError` listing every bad line."""
    variables: dict[str, int] = {}
    language: dict[str, Relation] = {}
    constraints: list[Constraint] = []
    errors: list[ParseError] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        line = _Line(body)
        pending: dict[str, int] = {}

        def var(tok: _Tok) -> int:
            if tok.text in variables:
                return variables[tok.text]
            if tok.text not in pending:
                pending[tok.text] = len(variables) + len(pending)
            return pending[tok.text]

        try:
            kw = line.next("name", what="a directive")
            if kw.text == "var":
                while not line.done():
                    var(line.next("name", what="a variable name"))
            elif kw.text == "rel":
                name_tok = line.next("name", what="a relation name")
                arity_tok = line.next("int", what="an arity")
                arity = int(arity_tok.text)
                if arity < 1:
                    raise _LineError(arity_tok, "arity must be positive", arity_tok.col)
                line.next(text="=")
                vectors = []
                while not line.done():
                    start = line.peek()
                    vec = [int(line.next("int", what="a rank").text)]
                    while line.accept(","):
                        vec.append(int(line.next("int", what="a rank").text))
                    if len(vec) != arity:
                        raise _LineError(
                            start, f"rank vector of length {len(vec)} for arity {arity}",
                            start.col,
                        )
                    vectors.append(vec)
                    if not line.done():
                        line.next(text="|")
                if name_tok.text in language:
                    raise _LineError(name_tok, "relation already defined", name_tok.col)
                language[name_tok.text] = normalize_relation(vectors, arity, name_tok.text)
            elif kw.text == "con":
                name_tok = line.next("name", what="a relation name")
                if name_tok.text not in language:
                    raise _LineError(name_tok, "unknown relation", name_tok.col)
                rel = language[name_tok.text]
                line.next(text="(")
                scope = [var(line.next("name", what="a variable"))]
                while line.accept(","):
                    scope.append(var(line.next("name", what="a variable")))
                line.next(text=")")
                line.expect_end()
                if len(scope) != rel.arity:
                    raise _LineError(
                        name_tok,
                        f"relation {rel.name} has arity {rel.arity}, got {len(scope)} arguments",
                        name_tok.col,
                    )
                constraints.append(RelationConstraint(tuple(scope), rel))
            elif kw.text == "lh":
                constraints.append(_parse_clause(line, var))
            elif kw.text == "pa":
                lhs = var(line.next("name", what="a variable"))
                op = line.next("op", what="a comparison")
                if op.text not in POINT_OPS:
                    raise _LineError(op, "unknown comparison", op.col)
                rhs = var(line.next("name", what="a variable"))
                line.expect_end()
                constraints.extend(from_point(PointAtom(lhs, op.text, rhs)))
            else:
                raise _LineError(kw, "unknown directive", kw.col)
        except _LineError as exc:
            errors.append(
                ParseError(lineno, exc.col, exc.message, exc.tok.text if exc.tok else "")
            )
            continue
        variables.update(pending)

    if errors:
        raise InstanceSyntaxError(errors)
    return Instance(tuple(variables), tuple(constraints), language)


def _parse_clause(line: _Line, var) -> LlHornClause:
    premise = []
    if not line.accept("->"):
        while True:
            a = var(line.next("name", what="a variable"))
            line.next(text="=")
            b = var(line.next("name", what="a variable"))
            premise.append((a, b))
            if line.accept("->"):
                break
            line.next(text="&", what="'&' or '->'")
    tok = line.peek()
    if tok is not None and tok.text == "false":
        line.next()
        line.expect_end()
        return LlHornClause(tuple(premise))
    head_tok = None
    head = None
    direction = None
    tail = []
    all_eq = False
    while True:
        tok = line.next("name", what="a disjunct")
        nxt = line.peek()
        if tok.text == "eq" and (nxt is None or nxt.text == "|"):
            all_eq = True
        else:
            op = line.next("op", what="'>' or '<'")
            if op.text not in (">", "<"):
                raise _LineError(op, "disjuncts compare with '>' or '<'", op.col)
            if direction is None:
                direction = op.text
            elif op.text != direction:
                raise _LineError(op, "all disjuncts must use the same comparison", op.col)
            if head_tok is None:
                head_tok, head = tok, var(tok)
            elif tok.text != head_tok.text:
                raise _LineError(
                    tok, "all disjuncts must share the left variable", tok.col
                )
            tail.append(var(line.next("name", what="a variable")))
        if line.done():
            break
        line.next(text="|")
    if head_tok is None:
        raise _LineError(None, "'eq' needs at least one comparison disjunct", line.end_col)
    return LlHornClause(tuple(premise), head, tuple(tail), all_eq, direction == "<")


# ---------------------------------------------------------------------------
# Emission


def format_relation(rel: Relation, name: str | None = None) -> str:
    body = " | ".join(",".join(map(str, o)) for o in rel.orders)
    return f"rel {name or rel.name} {rel.arity} =" + (f" {body}" if body else "")


def format_clause(clause: LlHornClause, names) -> str:
    parts = ["lh"]
    if clause.premise:
        parts.append(" & ".join(f"{names[a]}={names[b]}" for a, b in clause.premise))
    parts.append("->")
    if not clause.tail:
        if clause.head is not None or clause.all_eq:
            raise ValueError("clause with a head but no tail cannot be written")
        parts.append("false")
        return " ".join(parts)
    op = "<" if clause.dual else ">"
    head = names[clause.head]
    disj = [f"{head} {op} {names[z]}" for z in clause.tail]
    if clause.all_eq:
        disj.append("eq")
    parts.append(" | ".join(disj))
    return " ".join(parts)


def emit_instance(instance: Instance) -> str:
    names = instance.variables
    lines = []
    if names:
        lines.append("var " + " ".join(names))
    emitted: dict[str, Relation] = {}
    alias: dict[int, str] = {}

    def declare(rel: Relation) -> str:
        key = id(rel)
        if key in alias:
            return alias[key]
        name = rel.name
        suffix = 1
        while name in emitted and emitted[name] != rel:
            suffix += 1
            name = f"{rel.name}_{suffix}"
        if name not in emitted:
            emitted[name] = rel
            lines.append(format_relation(rel, name))
        alias[key] = name
        return name

    for rel in instance.language.values():
        declare(rel)
    for c in instance.constraints:
        if isinstance(c, LlHornClause):
            lines.append(format_clause(c, names))
        else:
            rname = declare(c.relation)
            lines.append(f"con {rname}({', '.join(names[v] for v in c.scope)})")
    return "\n".join(lines) + "\n"
