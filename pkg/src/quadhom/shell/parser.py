"""Lexer, parser and printer for the session language.

A script is a sequence of ``;``-terminated statements::

    ring Q[x,y];                       # optionally: order=lex
    let p = x^2 - y;
    let I = ideal(p, y^2);
    let v = qpoint n=2 flavor=Q [x, 0, 1-x, 0, x];
    let w = word [ trans(e1, f2, 1), hyp(1,2, x) ];
    cmd theta J=(x,y) a=[x,y];

``#`` starts a comment.  Expressions use ``+ - * / ^`` with the usual
precedence; ``^`` takes a nonnegative integer literal and binds tighter
than unary minus, so ``-x^2`` is ``-(x^2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exp: int


@dataclass(frozen=True)
class IdealExpr:
    gens: tuple


@dataclass(frozen=True)
class TupleExpr:
    items: tuple


@dataclass(frozen=True)
class ListExpr:
    items: tuple


@dataclass(frozen=True)
class QPointExpr:
    n: int
    flavor: str
    coords: tuple


@dataclass(frozen=True)
class TransExpr:
    u: str
    v: str
    param: "Expr"


@dataclass(frozen=True)
class HypExpr:
    i: int
    j: int
    param: "Expr"


@dataclass(frozen=True)
class WordExpr:
    factors: tuple


Expr = Union[Num, Name, BinOp, Neg, Pow, IdealExpr, TupleExpr, ListExpr, QPointExpr, WordExpr]


@dataclass(frozen=True)
class RingDecl:
    field: str
    vars: tuple
    order: str | None = None


@dataclass(frozen=True)
class Let:
    name: str
    value: Expr


@dataclass(frozen=True)
class Arg:
    key: str
    value: Expr


@dataclass(frozen=True)
class Command:
    name: str
    args: tuple


@dataclass(frozen=True)
class Script:
    statements: tuple

    def __len__(self):
        return len(self.statements)


KEYWORDS = {"ring", "let", "cmd", "ideal", "qpoint", "word", "trans", "hyp"}


# ---------------------------------------------------------------------------
# lexer


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, IDENT, OP, EOF
    text: str
    line: int
    col: int
    start: int
    end: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*'?)
  | (?P<op>[-+*/^()\[\],;=])
""", re.VERBOSE)


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            out.append(Token(kind.upper(), tok, line, pos - line_start + 1, pos, m.end()))
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()
    out.append(Token("EOF", "", line, pos - line_start + 1, pos, pos))
    return out


# ---------------------------------------------------------------------------
# parser


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("OP", "IDENT") and t.text == text

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        t = self.tok
        if t.kind != "IDENT":
            self.error(f"expected {what}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    def integer(self) -> int:
        t = self.tok
        if t.kind != "NUM":
            self.error(f"expected integer, found {t.text or 'end of input'!r}")
        self.i += 1
        return int(t.text)

    # statements ----------------------------------------------------------

    def script(self) -> Script:
        stmts = []
        while self.tok.kind != "EOF":
            stmts.append(self.statement())
        return Script(tuple(stmts))

    def statement(self):
        t = self.tok
        if self.at("ring"):
            self.advance()
            s = self.ring_decl()
        elif self.at("let"):
            self.advance()
            name = self.ident("name")
            if name in KEYWORDS:
                self.error(f"{name!r} is reserved", t)
            self.expect("=")
            s = Let(name, self.expr())
        elif self.at("cmd"):
            self.advance()
            s = self.command()
        else:
            self.error(f"expected 'ring', 'let' or 'cmd', found {t.text or 'end of input'!r}")
        self.expect(";")
        return s

    def ring_decl(self) -> RingDecl:
        name = self.ident("coefficient field")
        if self.at("("):
            self.advance()
            name += f"({self.integer()})"
            self.expect(")")
        self.expect("[")
        vars_ = [self.ident("variable")]
        while self.at(","):
            self.advance()
            vars_.append(self.ident("variable"))
        self.expect("]")
        order = None
        if self.at("order"):
            self.advance()
            self.expect("=")
            order = self.ident("monomial order")
            if self.at("("):
                self.advance()
                sizes = [str(self.integer())]
                while self.at(","):
                    self.advance()
                    sizes.append(str(self.integer()))
                self.expect(")")
                order += "(" + ",".join(sizes) + ")"
        return RingDecl(name, tuple(vars_), order)

    def command(self) -> Command:
        end = self.tok.end
        name = self.ident("command name")
        # hyphenated names: the pieces must touch
        while self.at("-") and self.tok.start == end:
            nxt = self.toks[self.i + 1]
            if nxt.kind != "IDENT" or nxt.start != self.tok.end:
                break
            self.i += 2
            name += "-" + nxt.text
            end = nxt.end
        args = []
        seen = set()
        while not self.at(";") and self.tok.kind != "EOF":
            kt = self.tok
            key = self.ident("argument name")
            if key in seen:
                self.error(f"duplicate argument {key!r}", kt)
            seen.add(key)
            self.expect("=")
            args.append(Arg(key, self.expr()))
        return Command(name, tuple(args))

    # expressions ---------------------------------------------------------

    def expr(self):
        left = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.factor()
        while self.at("*") or self.at("/"):
            op = self.advance().text
            left = BinOp(op, left, self.factor())
        return left

    def factor(self):
        if self.at("-"):
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.advance()
            base = Pow(base, self.integer())
            if self.at("^"):
                self.error("chained '^' is ambiguous; add parentheses")
        return base

    def items(self, close: str) -> tuple:
        out = []
        if not self.at(close):
            out.append(self.expr())
            while self.at(","):
                self.advance()
                out.append(self.expr())
        self.expect(close)
        return tuple(out)

    def atom(self):
        t = self.tok
        if t.kind == "NUM":
            self.advance()
            return Num(int(t.text))
        if self.at("("):
            self.advance()
            inner = self.items(")")
            if not inner:
                self.error("empty parentheses", t)
            return inner[0] if len(inner) == 1 else TupleExpr(inner)
        if self.at("["):
            self.advance()
            return ListExpr(self.items("]"))
        if t.kind == "IDENT":
            if t.text == "ideal":
                self.advance()
                self.expect("(")
                return IdealExpr(self.items(")"))
            if t.text == "qpoint":
                return self.qpoint()
            if t.text == "word":
                return self.word()
            if t.text in KEYWORDS:
                self.error(f"unexpected keyword {t.text!r}")
            self.advance()
            return Name(t.text)
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def qpoint(self):
        self.expect("qpoint")
        n, flavor = None, None
        while self.at("n") or self.at("flavor"):
            key = self.advance().text
            self.expect("=")
            if key == "n":
                n = self.integer()
            else:
                flavor = self.ident("flavor")
        if n is None or flavor is None:
            self.error("qpoint needs n= and flavor=")
        self.expect("[")
        return QPointExpr(n, flavor, self.items("]"))

    def word(self):
        self.expect("word")
        self.expect("[")
        facs = []
        if not self.at("]"):
            facs.append(self.generator())
            while self.at(","):
                self.advance()
                facs.append(self.generator())
        self.expect("]")
        return WordExpr(tuple(facs))

    def generator(self):
        if self.at("trans"):
            self.advance()
            self.expect("(")
            u = self.ident("basis vector")
            self.expect(",")
            v = self.ident("basis vector")
            self.expect(",")
            p = self.expr()
            self.expect(")")
            return TransExpr(u, v, p)
        if self.at("hyp"):
            self.advance()
            self.expect("(")
            i = self.integer()
            self.expect(",")
            j = self.integer()
            self.expect(",")
            p = self.expr()
            self.expect(")")
            return HypExpr(i, j, p)
        self.error(f"expected 'trans' or 'hyp', found {self.tok.text or 'end of input'!r}")


def parse(text: str) -> Script:
    return _Parser(text).script()


def parse_expr(text: str):
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "EOF":
        p.error(f"unexpected {p.tok.text!r} after expression")
    return e


# ---------------------------------------------------------------------------
# printer

_SUM, _PROD, _UNARY, _POW, _ATOM = 1, 2, 3, 4, 5


def _level(e) -> int:
    if isinstance(e, BinOp):
        return _SUM if e.op in "+-" else _PROD
    if isinstance(e, Neg):
        return _UNARY
    if isinstance(e, Pow):
        return _POW
    return _ATOM


def _wrap(e, need: int) -> str:
    s = print_expr(e)
    return s if _level(e) >= need else f"({s})"


def print_expr(e) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.id
    if isinstance(e, BinOp):
        lv = _level(e)
        sep = f" {e.op} " if lv == _SUM else e.op
        return _wrap(e.left, lv) + sep + _wrap(e.right, lv + 1)
    if isinstance(e, Neg):
        return "-" + _wrap(e.operand, _UNARY)
    if isinstance(e, Pow):
        return _wrap(e.base, _ATOM) + f"^{e.exp}"
    if isinstance(e, IdealExpr):
        return "ideal(" + ", ".join(map(print_expr, e.gens)) + ")"
    if isinstance(e, TupleExpr):
        return "(" + ", ".join(map(print_expr, e.items)) + ")"
    if isinstance(e, ListExpr):
        return "[" + ", ".join(map(print_expr, e.items)) + "]"
    if isinstance(e, QPointExpr):
        return f"qpoint n={e.n} flavor={e.flavor} [" + ", ".join(map(print_expr, e.coords)) + "]"
    if isinstance(e, WordExpr):
        return "word [" + ", ".join(map(print_expr, e.factors)) + "]"
    if isinstance(e, TransExpr):
        return f"trans({e.u}, {e.v}, {print_expr(e.param)})"
    if isinstance(e, HypExpr):
        return f"hyp({e.i}, {e.j}, {print_expr(e.param)})"
    raise TypeError(f"not an expression: {e!r}")


def print_statement(s) -> str:
    if isinstance(s, RingDecl):
        out = f"ring {s.field}[{','.join(s.vars)}]"
        if s.order:
            out += f" order={s.order}"
        return out + ";"
    if isinstance(s, Let):
        return f"let {s.name} = {print_expr(s.value)};"
    if isinstance(s, Command):
        args = "".join(f" {a.key}={print_expr(a.value)}" for a in s.args)
        return f"cmd {s.name}{args};"
    raise TypeError(f"not a statement: {s!r}")


def print_script(script: Script) -> str:
    return "".join(print_statement(s) + "\n" for s in script.statements)


# ---------------------------------------------------------------------------
# polynomial text


def eval_poly(e, ring, names=None):
    """Evaluate a polynomial expression; ``/`` only by nonzero constants."""
    from ..algcore import Poly

    if isinstance(e, Num):
        return ring.const(e.value)
    if isinstance(e, Name):
        if names and e.id in names:
            return names[e.id]
        if e.id not in ring:
            raise KeyError(f"unknown variable {e.id!r} in {ring}")
        return ring.var(e.id)
    if isinstance(e, Neg):
        return -eval_poly(e.operand, ring, names)
    if isinstance(e, Pow):
        return eval_poly(e.base, ring, names) ** e.exp
    if isinstance(e, BinOp):
        a = eval_poly(e.left, ring, names)
        b = eval_poly(e.right, ring, names)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if not (isinstance(b, Poly) and b.is_constant()) or b.is_zero():
            raise ValueError(f"can only divide by a nonzero constant, not {b}")
        return a / b.constant_value()
    raise ValueError(f"not a polynomial expression: {print_expr(e)}")


def parse_poly(text: str, ring):
    """Polynomial in ``ring`` from text such as ``3*x^2*y - 1/2*x + 5``."""
    return eval_poly(parse_expr(text), ring)
