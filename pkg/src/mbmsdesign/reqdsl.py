"""The requirements language.

Grammar (terminals quoted):

    session    = { statement } ;
    statement  = goal | reqModel | reqMethod | reqSolver | integrate
               | param | done ;
    goal       = "goal" IDENT ;
    reqModel   = "require" "model" category IDENT ;
    category   = "strategic" | "tactical" | "operational" | "analytical" ;
    reqMethod  = "require" "method" IDENT ;
    reqSolver  = "require" "solver" IDENT ;
    integrate  = "integrate" "external" ("cae" | "solver") STRING ;
    param      = "param" IDENT "." IDENT "=" (IDENT | NUMBER | STRING) ;
    done       = "done" ;

Comments run from '#' to end of line. The first error aborts parsing; there
is no recovery.
"""

from dataclasses import dataclass
from typing import Callable

from .canonical import format_decimal
from .errors import MalformedRequirement, ParseError
from .facts import Fact, Sym, Value

CATEGORIES = ("analytical", "operational", "strategic", "tactical")
EXTERNAL_KINDS = ("cae", "solver")

STATEMENT_KINDS = (
    "goal",
    "require_model",
    "require_method",
    "require_solver",
    "integrate_external",
    "param",
    "done",
)


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_line: int
    end_column: int


@dataclass(frozen=True)
class RawRequirement:
    kind: str
    operands: tuple
    span: Span | None = None

    def __post_init__(self):
        if self.kind not in STATEMENT_KINDS:
            raise MalformedRequirement(f"unknown statement kind: {self.kind!r}")
        arity = {"goal": 1, "require_model": 2, "require_method": 1,
                 "require_solver": 1, "integrate_external": 2, "param": 3,
                 "done": 0}[self.kind]
        if len(self.operands) != arity:
            raise MalformedRequirement(
                f"{self.kind} takes {arity} operands, got {len(self.operands)}"
            )

    def __eq__(self, other):
        # Spans are positional metadata, not statement identity.
        return (
            isinstance(other, RawRequirement)
            and self.kind == other.kind
            and len(self.operands) == len(other.operands)
            and all(
                type(a) is type(b) and a == b
                for a, b in zip(self.operands, other.operands)
            )
        )

    def __hash__(self):
        return hash((self.kind, self.operands))


@dataclass(frozen=True)
class FormalRequirement:
    req_id: Sym
    facts: frozenset

    def kind(self) -> Sym:
        for f in self.facts:
            if f.attribute == "kind":
                return f.value
        raise MalformedRequirement(f"requirement {self.req_id} has no kind fact")

    def to_doc(self) -> dict:
        return {
            "id": str(self.req_id),
            "facts": sorted((f.to_doc() for f in self.facts)),
        }

    @classmethod
    def from_doc(cls, doc) -> "FormalRequirement":
        try:
            req_id = Sym(doc["id"])
            facts = frozenset(Fact.from_doc(f) for f in doc["facts"])
        except (KeyError, TypeError) as exc:
            raise MalformedRequirement(f"bad requirement document: {doc!r}") from exc
        req = cls(req_id=req_id, facts=facts)
        _validate_formal(req)
        return req


def _validate_formal(req: FormalRequirement) -> None:
    if not req.facts:
        raise MalformedRequirement(f"requirement {req.req_id} has no facts")
    kinds = [f for f in req.facts if f.attribute == "kind"]
    if len(kinds) != 1:
        raise MalformedRequirement(
            f"requirement {req.req_id} must carry exactly one kind fact"
        )
    for f in req.facts:
        if f.entity != req.req_id:
            raise MalformedRequirement(
                f"fact entity {f.entity} does not match requirement id {req.req_id}"
            )


# -- Tokenizer ----------------------------------------------------------------

_IDENT_START = set("abcdefghijklmnopqrstuvwxyz")
_IDENT_CONT = _IDENT_START | set("0123456789_")
_DIGITS = set("0123456789")


@dataclass(frozen=True)
class _Token:
    kind: str        # ident | string | number | punct | eof
    value: object
    line: int
    column: int
    end_column: int


def _tokenize(text: str) -> list:
    tokens = []
    line, col, i = 1, 1, 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_col = col
        if ch in _IDENT_START:
            j = i
            while j < n and text[j] in _IDENT_CONT:
                j += 1
            word = text[i:j]
            col += j - i
            tokens.append(_Token("ident", word, line, start_col, col))
            i = j
            continue
        if ch in _DIGITS or (ch in "+-" and i + 1 < n and text[i + 1] in _DIGITS):
            j = i + 1 if ch in "+-" else i
            while j < n and text[j] in _DIGITS:
                j += 1
            is_decimal = False
            if j < n and text[j] == "." and j + 1 < n and text[j + 1] in _DIGITS:
                is_decimal = True
                j += 1
                while j < n and text[j] in _DIGITS:
                    j += 1
            lexeme = text[i:j]
            col += j - i
            value: Value = float(lexeme) if is_decimal else int(lexeme)
            tokens.append(_Token("number", value, line, start_col, col))
            i = j
            continue
        if ch == '"':
            j = i + 1
            out = []
            while True:
                if j >= n or text[j] == "\n":
                    raise ParseError(
                        "unterminated string", line, start_col, ("closing quote",)
                    )
                c = text[j]
                if c == "\\":
                    if j + 1 >= n or text[j + 1] not in '"\\':
                        raise ParseError(
                            "bad string escape", line, start_col + (j - i),
                            ('\\"', "\\\\"),
                        )
                    out.append(text[j + 1])
                    j += 2
                    continue
                if c == '"':
                    j += 1
                    break
                out.append(c)
                j += 1
            col += j - i
            tokens.append(_Token("string", "".join(out), line, start_col, col))
            i = j
            continue
        if ch in ".=":
            tokens.append(_Token("punct", ch, line, start_col, start_col + 1))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, start_col,
                         ("statement",))
    tokens.append(_Token("eof", None, line, col, col))
    return tokens


# -- Parser -------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: tuple):
        tok = self.peek()
        got = "end of input" if tok.kind == "eof" else repr(tok.value)
        raise ParseError(
            f"expected {' or '.join(sorted(expected))}, got {got}",
            tok.line, tok.column, expected,
        )

    def expect_ident(self, what: str = "identifier") -> tuple:
        tok = self.peek()
        if tok.kind != "ident":
            self.fail((what,))
        self.advance()
        return Sym(tok.value), tok

    def expect_keyword(self, *words: str) -> str:
        tok = self.peek()
        if tok.kind != "ident" or tok.value not in words:
            self.fail(words)
        self.advance()
        return tok.value

    def expect_string(self) -> str:
        tok = self.peek()
        if tok.kind != "string":
            self.fail(("string",))
        self.advance()
        return tok.value

    def expect_punct(self, ch: str) -> None:
        tok = self.peek()
        if tok.kind != "punct" or tok.value != ch:
            self.fail((ch,))
        self.advance()

    def parse_session(self) -> list:
        statements = []
        while self.peek().kind != "eof":
            statements.append(self.parse_statement())
        return statements

    def parse_statement(self) -> RawRequirement:
        start = self.peek()
        if start.kind != "ident":
            self.fail(("goal", "require", "integrate", "param", "done"))
        keyword = start.value
        if keyword == "goal":
            self.advance()
            name, tok = self.expect_ident("goal name")
            return self._finish("goal", (name,), start, tok)
        if keyword == "require":
            self.advance()
            what = self.expect_keyword("model", "method", "solver")
            if what == "model":
                category = Sym(self.expect_keyword(*CATEGORIES))
                name, tok = self.expect_ident("model name")
                return self._finish("require_model", (category, name), start, tok)
            if what == "method":
                name, tok = self.expect_ident("method name")
                return self._finish("require_method", (name,), start, tok)
            name, tok = self.expect_ident("capability name")
            return self._finish("require_solver", (name,), start, tok)
        if keyword == "integrate":
            self.advance()
            self.expect_keyword("external")
            external_kind = Sym(self.expect_keyword(*EXTERNAL_KINDS))
            tok = self.peek()
            product = self.expect_string()
            return self._finish("integrate_external", (external_kind, product), start, tok)
        if keyword == "param":
            self.advance()
            target, _ = self.expect_ident("target unit kind")
            self.expect_punct(".")
            slot, _ = self.expect_ident("slot name")
            self.expect_punct("=")
            tok = self.peek()
            if tok.kind == "ident":
                self.advance()
                value: Value = Sym(tok.value)
            elif tok.kind == "number":
                self.advance()
                value = tok.value
            elif tok.kind == "string":
                self.advance()
                value = tok.value
            else:
                self.fail(("identifier", "number", "string"))
            return self._finish("param", (target, slot, value), start, tok)
        if keyword == "done":
            self.advance()
            return self._finish("done", (), start, start)
        self.fail(("goal", "require", "integrate", "param", "done"))

    def _finish(self, kind: str, operands: tuple, start: _Token, end: _Token) -> RawRequirement:
        span = Span(start.line, start.column, end.line, end.end_column)
        return RawRequirement(kind, operands, span)


def parse_requirements(text: str) -> list:
    """Parse a requirements script into statements in source order."""
    return _Parser(text).parse_session()


# -- Pretty printer -----------------------------------------------------------

def _render_operand(v: Value) -> str:
    if isinstance(v, Sym):
        return str(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, float):
        return format_decimal(v)
    return str(v)


def pretty_print(raws) -> str:
    """Canonical script text: one statement per line, single spaces."""
    lines = []
    for raw in raws:
        ops = raw.operands
        if raw.kind == "goal":
            lines.append(f"goal {ops[0]}")
        elif raw.kind == "require_model":
            lines.append(f"require model {ops[0]} {ops[1]}")
        elif raw.kind == "require_method":
            lines.append(f"require method {ops[0]}")
        elif raw.kind == "require_solver":
            lines.append(f"require solver {ops[0]}")
        elif raw.kind == "integrate_external":
            lines.append(f"integrate external {ops[0]} {_render_operand(ops[1])}")
        elif raw.kind == "param":
            lines.append(f"param {ops[0]}.{ops[1]} = {_render_operand(ops[2])}")
        else:
            lines.append("done")
    return "".join(line + "\n" for line in lines)


# -- Formalization ------------------------------------------------------------

def make_id_generator(prefix: str = "r", start: int = 1) -> Callable[[], Sym]:
    counter = iter(range(start, 10**9))

    def next_id() -> Sym:
        return Sym(f"{prefix}{next(counter)}")

    return next_id


def formalize(raw: RawRequirement, next_id: Callable[[], Sym]) -> FormalRequirement:
    """Encode a statement as a fact set under a fresh requirement id."""
    rid = next_id()
    ops = raw.operands
    f = lambda attr, value: Fact(rid, Sym(attr), value)
    if raw.kind == "goal":
        facts = {f("kind", Sym("goal")), f("name", ops[0])}
    elif raw.kind == "require_model":
        facts = {
            f("kind", Sym("model_requirement")),
            f("category", ops[0]),
            f("name", ops[1]),
        }
    elif raw.kind == "require_method":
        facts = {f("kind", Sym("method_requirement")), f("method", ops[0])}
    elif raw.kind == "require_solver":
        facts = {f("kind", Sym("solver_requirement")), f("capability", ops[0])}
    elif raw.kind == "integrate_external":
        facts = {
            f("kind", Sym("external_requirement")),
            f("external_kind", ops[0]),
            f("product", ops[1]),
        }
    elif raw.kind == "param":
        facts = {
            f("kind", Sym("param_requirement")),
            f("target", ops[0]),
            f("slot", ops[1]),
            f("value", ops[2]),
        }
    else:
        facts = {f("kind", Sym("done"))}
    req = FormalRequirement(req_id=rid, facts=frozenset(facts))
    _validate_formal(req)
    return req
