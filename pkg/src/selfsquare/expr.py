"""Space expressions: products of Fin(k), O(n), Z(n), P, Cantor and X{M}.

Grammar::

    expr := term ('*' term)*
    term := atom ('^' nat)?
    atom := 'Fin(' nat ')' | 'O(' nat ')' | 'Z(' nat ')' | 'P' | 'Cantor'
          | 'X{' set '}' | '(' expr ')'
    set  := ((nat (',' nat)*)? ';')? prog (',' prog)*
    prog := nat '+' nat 'k'
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .epset import EPSet

__all__ = [
    "ExprError",
    "ParseError",
    "RangeError",
    "Atom",
    "SpaceExpr",
    "parse_expr",
]


class ExprError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")

    def caret(self) -> str:
        return f"{self.text}\n{' ' * self.pos}^"


class ParseError(ExprError):
    pass


class RangeError(ExprError):
    pass


@dataclass(frozen=True)
class Atom:
    """kind is one of 'Fin', 'O', 'Z', 'Cantor', 'X'."""

    kind: str
    arg: int | EPSet | None = None
    span: tuple[int, int] = field(default=(0, 0), compare=False)

    def __str__(self):
        if self.kind == "Cantor":
            return "Cantor"
        if self.kind == "X":
            return f"X{self.arg}"
        return f"{self.kind}({self.arg})"


@dataclass(frozen=True)
class SpaceExpr:
    factors: tuple[Atom, ...]
    text: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.factors:
            raise ValueError("empty product")

    @classmethod
    def of(cls, *factors) -> SpaceExpr:
        return cls(tuple(factors))

    def __mul__(self, other: SpaceExpr) -> SpaceExpr:
        return SpaceExpr(self.factors + other.factors)

    def __str__(self):
        return "*".join(str(a) for a in self.factors)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def error(self, msg, pos=None, cls=ParseError):
        raise cls(msg, self.i if pos is None else pos, self.text)

    def skip(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.i)

    def eat(self, s: str):
        if not self.peek(s):
            self.error(f"expected {s!r}")
        self.i += len(s)

    def nat(self) -> tuple[int, int]:
        self.skip()
        start = self.i
        while self.i < len(self.text) and self.text[self.i].isdigit():
            self.i += 1
        if start == self.i:
            self.error("expected a natural number")
        return int(self.text[start:self.i]), start

    def positive(self, what: str) -> int:
        n, pos = self.nat()
        if n < 1:
            self.error(f"{what} must be >= 1", pos, RangeError)
        return n

    def expr(self) -> list[Atom]:
        out = self.term()
        while self.peek("*"):
            self.eat("*")
            out += self.term()
        return out

    def term(self) -> list[Atom]:
        base = self.atom()
        if self.peek("^"):
            self.eat("^")
            return base * self.positive("exponent")
        return base

    def atom(self) -> list[Atom]:
        self.skip()
        start = self.i
        for kind in ("Fin", "O", "Z"):
            if self.peek(kind + "("):
                self.eat(kind + "(")
                n = self.positive(f"{kind} parameter")
                self.eat(")")
                return [Atom(kind, n, (start, self.i))]
        if self.peek("Cantor"):
            self.eat("Cantor")
            return [Atom("Cantor", None, (start, self.i))]
        if self.peek("X{"):
            self.eat("X{")
            m = self.epset(start)
            self.eat("}")
            return [Atom("X", m, (start, self.i))]
        if self.peek("P"):
            self.eat("P")
            return [Atom("Z", 1, (start, self.i))]
        if self.peek("("):
            self.eat("(")
            inner = self.expr()
            self.eat(")")
            return inner
        self.error("expected an atom")

    def prog(self) -> tuple[int, int]:
        a, pos = self.nat()
        if a == 0:
            self.error("0 is not allowed in M", pos, RangeError)
        self.eat("+")
        b, pos = self.nat()
        if b == 0:
            self.error("progression step must be >= 1 (M must be infinite)", pos, RangeError)
        self.eat("k")
        return a, b

    def epset(self, start: int) -> EPSet:
        finite = []
        if self.peek(";"):
            self.eat(";")
        else:
            save = self.i
            n, pos = self.nat()
            if self.peek("+"):
                self.i = save
            else:
                finite.append((n, pos))
                while self.peek(","):
                    self.eat(",")
                    finite.append(self.nat())
                self.eat(";")
        for n, pos in finite:
            if n == 0:
                self.error("0 is not allowed in M", pos, RangeError)
        if self.peek("}"):
            self.error("M must be infinite: a progression is required", cls=RangeError)
        progs = [self.prog()]
        while self.peek(","):
            self.eat(",")
            progs.append(self.prog())
        return EPSet.from_parts([n for n, _ in finite], progs)


def parse_expr(text: str) -> SpaceExpr:
    p = _Parser(text)
    atoms = p.expr()
    p.skip()
    if p.i != len(text):
        p.error("unexpected trailing input")
    return SpaceExpr(tuple(atoms), text)
