"""Expression trees over concept-qualified variable slots.

The textual grammar used in the equation catalog files:

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | 'ln' '(' expr ')' | IDENT ('@' IDENT)? | '(' expr ')'

A slot token ``T_2@State`` names variable ``T_2`` qualified by the concept
``State``. A bare identifier is a slot with no qualifier, which is how
already-bound equations (instance names instead of slots) are re-parsed.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import DomainError, MissingValue, ParseError, UnknownFunction


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Slot:
    name: str
    qualifier: str | None = None

    @property
    def key(self) -> str:
        return f"{self.name}@{self.qualifier}" if self.qualifier else self.name


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: "Expr"


@dataclass(frozen=True)
class Ln:
    argument: "Expr"


@dataclass(frozen=True)
class Neg:
    argument: "Expr"


Expr = Constant | Slot | Add | Sub | Mul | Div | Pow | Ln | Neg

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()@]))"
)

_KNOWN_FUNCTIONS = {"ln"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message):
        raise ParseError(message, source=self.text, column=self.pos)

    def peek(self):
        m = _TOKEN.match(self.text, self.pos)
        if m is None:
            rest = self.text[self.pos:].strip()
            if rest:
                self.error(f"unexpected character {rest[0]!r}")
            return None, None
        for kind in ("num", "ident", "op"):
            if m.group(kind) is not None:
                return kind, m.group(kind)
        return None, None  # pragma: no cover

    def take(self):
        m = _TOKEN.match(self.text, self.pos)
        kind, value = self.peek()
        if kind is not None:
            self.pos = m.end()
        return kind, value

    def expect(self, op):
        kind, value = self.take()
        if kind != "op" or value != op:
            self.error(f"expected {op!r}, found {value!r}")

    def parse(self) -> Expr:
        node = self.expr()
        kind, value = self.peek()
        if kind is not None:
            self.error(f"trailing input starting at {value!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, value = self.peek()
            if kind == "op" and value in "+-":
                self.take()
                rhs = self.term()
                node = Add(node, rhs) if value == "+" else Sub(node, rhs)
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            kind, value = self.peek()
            if kind == "op" and value in "*/":
                self.take()
                rhs = self.unary()
                node = Mul(node, rhs) if value == "*" else Div(node, rhs)
            else:
                return node

    def unary(self) -> Expr:
        kind, value = self.peek()
        if kind == "op" and value == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        kind, value = self.peek()
        if kind == "op" and value == "^":
            self.take()
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, value = self.take()
        if kind == "num":
            return Constant(float(value))
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident":
            nxt_kind, nxt = self.peek()
            if nxt_kind == "op" and nxt == "(":
                if value not in _KNOWN_FUNCTIONS:
                    raise UnknownFunction(f"unknown function {value!r}",
                                          source=self.text, column=self.pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return Ln(arg)
            if nxt_kind == "op" and nxt == "@":
                self.take()
                qkind, qual = self.take()
                if qkind != "ident":
                    self.error("expected concept name after '@'")
                return Slot(value, qual)
            return Slot(value, None)
        self.error("expected a number, identifier, or '('" if value is None
                   else f"unexpected token {value!r}")


def parse_expression(text: str) -> Expr:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()


def slots_of(expr: Expr) -> list[Slot]:
    """All slots in the tree, deduplicated, in first-appearance order."""
    seen: dict[str, Slot] = {}

    def walk(node):
        match node:
            case Slot():
                seen.setdefault(node.key, node)
            case Constant():
                pass
            case Ln(argument=a) | Neg(argument=a):
                walk(a)
            case Pow(base=a, exponent=b) | Add(left=a, right=b) | Sub(left=a, right=b) \
                    | Mul(left=a, right=b) | Div(left=a, right=b):
                walk(a)
                walk(b)

    walk(expr)
    return list(seen.values())


def count_occurrences(expr: Expr, slot_key: str) -> int:
    match expr:
        case Slot():
            return 1 if expr.key == slot_key else 0
        case Constant():
            return 0
        case Ln(argument=a) | Neg(argument=a):
            return count_occurrences(a, slot_key)
        case Pow(base=a, exponent=b) | Add(left=a, right=b) | Sub(left=a, right=b) \
                | Mul(left=a, right=b) | Div(left=a, right=b):
            return count_occurrences(a, slot_key) + count_occurrences(b, slot_key)


def evaluate(expr: Expr, binding: dict[str, str] | None, valuation: dict[str, float]) -> float:
    """Evaluate the tree in IEEE double precision.

    ``binding`` maps slot keys to variable-instance names; pass None to look
    slot keys up in ``valuation`` directly.
    """
    def value_of(slot: Slot) -> float:
        if binding is not None and slot.key not in binding:
            raise MissingValue(f"slot {slot.key} is not bound")
        name = binding[slot.key] if binding is not None else slot.key
        if name not in valuation:
            raise MissingValue(f"no value for {name}")
        return valuation[name]

    def walk(node) -> float:
        match node:
            case Constant(value=v):
                return v
            case Slot():
                return value_of(node)
            case Add(left=a, right=b):
                return walk(a) + walk(b)
            case Sub(left=a, right=b):
                return walk(a) - walk(b)
            case Mul(left=a, right=b):
                return walk(a) * walk(b)
            case Div(left=a, right=b):
                denom = walk(b)
                if denom == 0.0:
                    raise DomainError("division by zero", subexpression=render(node))
                return walk(a) / denom
            case Pow(base=a, exponent=b):
                base, exp = walk(a), walk(b)
                if base == 0.0 and exp < 0.0:
                    raise DomainError("zero raised to a negative power",
                                      subexpression=render(node))
                if base < 0.0 and exp != int(exp):
                    raise DomainError("negative base with non-integer exponent",
                                      subexpression=render(node))
                try:
                    return math.pow(base, exp)
                except OverflowError:
                    if base > 0.0 or int(exp) % 2 == 0:
                        return math.inf
                    return -math.inf
            case Ln(argument=a):
                arg = walk(a)
                if arg <= 0.0:
                    raise DomainError("ln of a non-positive argument",
                                      subexpression=render(node))
                return math.log(arg)
            case Neg(argument=a):
                return -walk(a)

    return walk(expr)


def render(expr: Expr, binding: dict[str, str] | None = None) -> str:
    """Infix rendering that re-parses to the identical tree.

    With a ``binding``, slots render as their bound instance names.
    """
    return _render(expr, binding)


_LEVEL = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4, Constant: 9, Slot: 9, Ln: 9}


def _render(expr, binding, level=0, right=False) -> str:
    def wrap(text, my_level):
        if my_level < level or (my_level == level and right):
            return f"({text})"
        return text

    match expr:
        case Constant(value=v):
            if math.isfinite(v) and v == int(v) and abs(v) < 1e16:
                text = str(int(v))
            else:
                text = repr(v)
            return f"({text})" if v < 0 else text
        case Slot():
            if binding is not None:
                return binding.get(expr.key, expr.key)
            return expr.key
        case Add(left=a, right=b):
            return wrap(f"{_render(a, binding, 1)} + {_render(b, binding, 1, True)}", 1)
        case Sub(left=a, right=b):
            return wrap(f"{_render(a, binding, 1)} - {_render(b, binding, 1, True)}", 1)
        case Mul(left=a, right=b):
            return wrap(f"{_render(a, binding, 2)} * {_render(b, binding, 2, True)}", 2)
        case Div(left=a, right=b):
            return wrap(f"{_render(a, binding, 2)} / {_render(b, binding, 2, True)}", 2)
        case Neg(argument=a):
            # -x^2 must stay Neg(Pow(..)), so never re-parse as (-x)^2
            return wrap(f"-{_render(a, binding, 3)}", 3)
        case Pow(base=a, exponent=b):
            # '^' parses right-associatively with atom bases
            return wrap(f"{_render(a, binding, 9, True)} ^ {_render(b, binding, 4)}", 4)
        case Ln(argument=a):
            return f"ln({_render(a, binding)})"
