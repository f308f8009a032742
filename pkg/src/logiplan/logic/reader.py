"""Tokenizer and operator-precedence parser for program text."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import PrologSyntaxError
from .ops import OperatorTable
from .terms import NIL, Atom, Compound, Float, Int, Str, Term, Var

SYMBOL_CHARS = set("+-*/\\^<>=~:.?@#&$")
ALNUM = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")
PUNCT = set("()[]{},|")
_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"', "`": "`", "0": "\0", "a": "\a", "b": "\b", "f": "\f", "v": "\v"}


@dataclass
class Token:
    kind: str  # name, qname, var, int, float, str, punct, end, eof
    value: object
    start: int
    end: int
    layout_before: bool


class Lexer:
    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0
        self.n = len(text)

    def error(self, message: str, offset: int | None = None) -> PrologSyntaxError:
        return make_error(self.text, message, self.pos if offset is None else offset)

    def _skip_layout(self) -> bool:
        text, n = self.text, self.n
        start = self.pos
        while self.pos < n:
            c = text[self.pos]
            if c.isspace():
                self.pos += 1
            elif c == "%":
                nl = text.find("\n", self.pos)
                self.pos = n if nl < 0 else nl + 1
            elif c == "/" and text.startswith("/*", self.pos):
                close = text.find("*/", self.pos + 2)
                if close < 0:
                    raise self.error("unterminated block comment")
                self.pos = close + 2
            else:
                break
        return self.pos > start

    def next(self) -> Token:
        layout = self._skip_layout()
        text, n = self.text, self.n
        start = self.pos
        if start >= n:
            return Token("eof", None, start, start, layout)
        c = text[start]
        if c.isdigit():
            return self._number(start, layout)
        if c == "_" or c.isupper():
            end = start + 1
            while end < n and text[end] in ALNUM:
                end += 1
            self.pos = end
            return Token("var", text[start:end], start, end, layout)
        if c.isalpha():
            end = start + 1
            while end < n and text[end] in ALNUM:
                end += 1
            self.pos = end
            return Token("name", text[start:end], start, end, layout)
        if c == "'":
            value = self._quoted("'")
            return Token("qname", value, start, self.pos, layout)
        if c == '"':
            value = self._quoted('"')
            return Token("str", value, start, self.pos, layout)
        if c in PUNCT:
            self.pos = start + 1
            return Token("punct", c, start, start + 1, layout)
        if c == "!" or c == ";":
            self.pos = start + 1
            return Token("name", c, start, start + 1, layout)
        if c in SYMBOL_CHARS:
            end = start + 1
            while end < n and text[end] in SYMBOL_CHARS:
                end += 1
            sym = text[start:end]
            if sym == "." and (end >= n or text[end].isspace() or text[end] == "%"):
                self.pos = end
                return Token("end", ".", start, end, layout)
            self.pos = end
            return Token("name", sym, start, end, layout)
        raise self.error(f"unexpected character {c!r}")

    def _number(self, start: int, layout: bool) -> Token:
        text, n = self.text, self.n
        end = start
        while end < n and (text[end].isdigit() or text[end] == "_" and end + 1 < n and text[end + 1].isdigit()):
            end += 1
        is_float = False
        if end + 1 < n and text[end] == "." and text[end + 1].isdigit():
            is_float = True
            end += 1
            while end < n and text[end].isdigit():
                end += 1
        if end < n and text[end] in "eE":
            k = end + 1
            if k < n and text[k] in "+-":
                k += 1
            if k < n and text[k].isdigit():
                is_float = True
                end = k
                while end < n and text[end].isdigit():
                    end += 1
        raw = text[start:end].replace("_", "")
        self.pos = end
        if is_float:
            return Token("float", float(raw), start, end, layout)
        return Token("int", int(raw), start, end, layout)

    def _quoted(self, q: str) -> str:
        text, n = self.text, self.n
        i = self.pos + 1
        out = []
        while True:
            if i >= n:
                raise self.error("unterminated quoted text", self.pos)
            c = text[i]
            if c == q:
                if i + 1 < n and text[i + 1] == q:
                    out.append(q)
                    i += 2
                    continue
                self.pos = i + 1
                return "".join(out)
            if c == "\\":
                if i + 1 >= n:
                    raise self.error("unterminated escape", i)
                e = text[i + 1]
                if e == "\n":
                    i += 2
                    continue
                if e == "x":
                    close = text.find("\\", i + 2)
                    if close < 0:
                        raise self.error("bad hex escape", i)
                    out.append(chr(int(text[i + 2:close], 16)))
                    i = close + 1
                    continue
                if e not in _ESCAPES:
                    raise self.error(f"unknown escape \\{e}", i)
                out.append(_ESCAPES[e])
                i += 2
                continue
            out.append(c)
            i += 1


def make_error(text: str, message: str, offset: int) -> PrologSyntaxError:
    line = text.count("\n", 0, offset) + 1
    last_nl = text.rfind("\n", 0, offset)
    column = offset - last_nl  # 1-based
    return PrologSyntaxError(message, line, column, offset)


@dataclass
class ReadTerm:
    term: Term
    varnames: dict[str, Var] = field(default_factory=dict)
    start: int = 0
    line: int = 1


class Parser:
    def __init__(self, text: str, ops: OperatorTable | None = None) -> None:
        self.text = text
        self.ops = ops or OperatorTable()
        self.lexer = Lexer(text)
        self.tok = self.lexer.next()
        self.varmap: dict[str, Var] = {}

    # -- token helpers -------------------------------------------------------------
    def advance(self) -> Token:
        tok = self.tok
        self.tok = self.lexer.next()
        return tok

    def error(self, message: str, tok: Token | None = None) -> PrologSyntaxError:
        tok = tok or self.tok
        return make_error(self.text, message, tok.start)

    def expect_punct(self, ch: str) -> None:
        if self.tok.kind != "punct" or self.tok.value != ch:
            raise self.error(self._unexpected(f"expected '{ch}'"))
        self.advance()

    def _unexpected(self, what: str) -> str:
        if self.tok.kind == "eof":
            return f"{what}, found end of input"
        return f"{what}, found {self._describe(self.tok)}"

    @staticmethod
    def _describe(tok: Token) -> str:
        if tok.kind in ("name", "qname", "punct", "var"):
            return repr(tok.value)
        if tok.kind == "end":
            return "end of clause"
        return str(tok.value)

    # -- clause level --------------------------------------------------------------
    def read_term(self) -> ReadTerm | None:
        """Read one clause-level term terminated by '.'; None at end of input."""
        if self.tok.kind == "eof":
            return None
        self.varmap = {}
        start = self.tok.start
        term, _ = self.parse(1200)
        if self.tok.kind != "end":
            if self.tok.kind == "eof":
                raise self.error("unterminated clause (missing '.')")
            raise self.error(self._operator_problem())
        self.advance()
        line = self.text.count("\n", 0, start) + 1
        return ReadTerm(term, dict(self.varmap), start, line)

    def _operator_problem(self) -> str:
        tok = self.tok
        if tok.kind == "name" and all(ch in SYMBOL_CHARS for ch in tok.value):
            return f"unknown operator {tok.value!r}"
        return self._unexpected("operator expected")

    # -- expressions -----------------------------------------------------------------
    def parse(self, max_prec: int) -> tuple[Term, int]:
        left, left_prec = self.primary(max_prec)
        return self.infix_loop(left, left_prec, max_prec)

    def infix_loop(self, left: Term, left_prec: int, max_prec: int) -> tuple[Term, int]:
        while True:
            tok = self.tok
            if tok.kind == "punct" and tok.value == ",":
                name = ","
            elif tok.kind == "punct" and tok.value == "|" and max_prec >= 1100:
                name = ";"
            elif tok.kind in ("name", "qname") and tok.value in self.ops.infix:
                name = tok.value
            else:
                break
            op = self.ops.infix[name]
            p = op.priority
            left_max = p if op.type == "yfx" else p - 1
            right_max = p if op.type == "xfy" else p - 1
            if p > max_prec or left_prec > left_max:
                break
            self.advance()
            right, _ = self.parse(right_max)
            left = Compound(name, (left, right))
            left_prec = p
        return left, left_prec

    def _starts_term(self, tok: Token) -> bool:
        if tok.kind in ("var", "int", "float", "str", "qname"):
            return True
        if tok.kind == "punct":
            return tok.value in "([{"
        if tok.kind == "name":
            name = tok.value
            if name in self.ops.infix and name not in self.ops.prefix:
                # "- = x": the following infix operator makes the prefix op an atom,
                # unless it is written in functional notation
                return self._peek_is_open_paren()
            return True
        return False

    def _peek_is_open_paren(self) -> bool:
        lx = self.lexer
        return lx.pos < lx.n and lx.text[lx.pos] == "("

    def primary(self, max_prec: int) -> tuple[Term, int]:
        tok = self.advance()
        kind = tok.kind
        if kind == "int":
            return Int(tok.value), 0
        if kind == "float":
            return Float(tok.value), 0
        if kind == "str":
            return Str(tok.value), 0
        if kind == "var":
            name = tok.value
            if name == "_":
                return Var("_"), 0
            var = self.varmap.get(name)
            if var is None:
                var = self.varmap[name] = Var(name)
            return var, 0
        if kind == "punct":
            ch = tok.value
            if ch == "(":
                term, _ = self.parse(1200)
                self.expect_punct(")")
                return term, 0
            if ch == "[":
                if self.tok.kind == "punct" and self.tok.value == "]":
                    self.advance()
                    return self._after_name("[]", tok, max_prec, quoted=True)
                return self._list(), 0
            if ch == "{":
                if self.tok.kind == "punct" and self.tok.value == "}":
                    self.advance()
                    return self._after_name("{}", tok, max_prec, quoted=True)
                term, _ = self.parse(1200)
                self.expect_punct("}")
                return Compound("{}", (term,)), 0
            raise self.error(f"unexpected {ch!r}", tok)
        if kind in ("name", "qname"):
            return self._after_name(tok.value, tok, max_prec, quoted=(kind == "qname"))
        if kind == "end":
            raise self.error("unexpected end of clause", tok)
        raise self.error("unexpected end of input", tok)

    def _after_name(self, name: str, tok: Token, max_prec: int, quoted: bool) -> tuple[Term, int]:
        nxt = self.tok
        if nxt.kind == "punct" and nxt.value == "(" and not nxt.layout_before:
            self.advance()
            args = [self.parse(999)[0]]
            while self.tok.kind == "punct" and self.tok.value == ",":
                self.advance()
                args.append(self.parse(999)[0])
            self.expect_punct(")")
            return Compound(name, args), 0
        if (
            name == "-"
            and not quoted
            and nxt.kind in ("int", "float")
            and not nxt.layout_before
        ):
            self.advance()
            value = -nxt.value
            return (Int(value) if nxt.kind == "int" else Float(value)), 0
        if not quoted and name in self.ops.prefix and self._starts_term(nxt):
            op = self.ops.prefix[name]
            p = op.priority
            if p > max_prec:
                p = 999
            arg_max = p if op.type == "fy" else p - 1
            arg, _ = self.parse(arg_max)
            return Compound(name, (arg,)), p
        prec = 0
        if not quoted and self.ops.is_op(name):
            prec = max(
                self.ops.prefix[name].priority if name in self.ops.prefix else 0,
                self.ops.infix[name].priority if name in self.ops.infix else 0,
            )
            if prec > max_prec:
                prec = 0
        return Atom(name), prec

    def _list(self) -> Term:
        items = [self.parse(999)[0]]
        while self.tok.kind == "punct" and self.tok.value == ",":
            self.advance()
            items.append(self.parse(999)[0])
        tail: Term = NIL
        if self.tok.kind == "punct" and self.tok.value == "|":
            self.advance()
            tail = self.parse(999)[0]
        self.expect_punct("]")
        out = tail
        for item in reversed(items):
            out = Compound(".", (item, out))
        return out


def read_terms(text: str, ops: OperatorTable | None = None) -> list[ReadTerm]:
    parser = Parser(text, ops)
    out = []
    while True:
        rt = parser.read_term()
        if rt is None:
            return out
        out.append(rt)


def read_term(text: str, ops: OperatorTable | None = None, varmap: dict[str, Var] | None = None) -> ReadTerm:
    """Parse a single term; the trailing '.' is optional."""
    src = text.strip()
    if not src.endswith(".") or src.endswith(".."):
        src = src + " ."
    elif len(src) > 1 and src[-2] in SYMBOL_CHARS:
        src = src + " ."
    parser = Parser(src, ops)
    if varmap:
        parser.varmap = dict(varmap)
    if parser.tok.kind == "eof":
        raise make_error(src, "empty input", 0)
    term, _ = parser.parse(1200)
    if parser.tok.kind != "end":
        raise parser.error(parser._operator_problem())
    parser.advance()
    if parser.tok.kind != "eof":
        raise parser.error("unexpected text after term")
    return ReadTerm(term, dict(parser.varmap), 0, 1)
