"""Tokenizer and recursive-descent parser for polynomial expressions.

Grammar (``(x)`` is the tensor operator and binds tighter than ``+``)::

    expr   := ['-'] tensor (('+' | '-') tensor)*
    tensor := prod ('(x)' prod)*
    prod   := unary ('*' unary)*
    unary  := '-' unary | power
    power  := atom ('^' INT)?
    atom   := INT | NAME | '(' expr ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_TOKEN = re.compile(
    r"\s*(?:(?P<tensor>\(x\))|(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*^()]))"
)


@dataclass(frozen=True)
class Tok:
    kind: str
    text: str
    col: int


@dataclass(frozen=True)
class Node:
    kind: str  # int, name, add, mul, pow, neg, tensor
    value: object
    args: tuple
    col: int


def tokenize(text: str, line: int = 1, col0: int = 1) -> list[Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            skip = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character '{text[skip]}'", line, col0 + skip)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(Tok(kind, m.group(kind), col0 + start))
        pos = m.end()
    toks.append(Tok("end", "", col0 + len(text)))
    return toks


class _Parser:
    def __init__(self, toks, line):
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col)

    def expect_op(self, s):
        t = self.peek()
        if t.kind != "op" or t.text != s:
            self.fail(f"expected '{s}'" + (f", found '{t.text}'" if t.text else ", found end of input"))
        return self.take()

    def expr(self):
        col = self.peek().col
        terms = []
        sign = 1
        if self.peek().kind == "op" and self.peek().text == "-":
            self.take()
            sign = -1
        terms.append((sign, self.tensor()))
        while self.peek().kind == "op" and self.peek().text in "+-":
            sign = 1 if self.take().text == "+" else -1
            terms.append((sign, self.tensor()))
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return Node("add", None, tuple(terms), col)

    def tensor(self):
        first = self.prod()
        parts = [first]
        while self.peek().kind == "tensor":
            self.take()
            parts.append(self.prod())
        if len(parts) == 1:
            return first
        return Node("tensor", None, tuple(parts), first.col)

    def prod(self):
        first = self.unary()
        parts = [first]
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            parts.append(self.unary())
        if len(parts) == 1:
            return first
        return Node("mul", None, tuple(parts), first.col)

    def unary(self):
        t = self.peek()
        if t.kind == "op" and t.text == "-":
            self.take()
            return Node("neg", None, (self.unary(),), t.col)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            t = self.peek()
            if t.kind != "int":
                self.fail("exponent must be a nonnegative integer")
            self.take()
            return Node("pow", int(t.text), (base,), base.col)
        return base

    def atom(self):
        t = self.peek()
        if t.kind == "int":
            self.take()
            return Node("int", int(t.text), (), t.col)
        if t.kind == "name":
            self.take()
            return Node("name", t.text, (), t.col)
        if t.kind == "op" and t.text == "(":
            self.take()
            inner = self.expr()
            self.expect_op(")")
            return inner
        if t.kind == "end":
            self.fail("unexpected end of expression")
        self.fail(f"unexpected '{t.text}'")


def parse_expr(text: str, line: int = 1, col0: int = 1) -> Node:
    p = _Parser(tokenize(text, line, col0), line)
    node = p.expr()
    if p.peek().kind != "end":
        p.fail(f"unexpected '{p.peek().text}'")
    return node


def evaluate(node: Node, ops, line: int = 1):
    """Evaluate an AST with a small algebra of callbacks.

    ``ops`` provides ``const(int)``, ``name(str)``, ``add(a, b)``, ``neg(a)``,
    ``mul(a, b)``, ``pow(a, e)`` and ``tensor(list)``; each may raise
    ``ValueError`` which is reported at the node position.
    """
    try:
        k = node.kind
        if k == "int":
            return ops.const(node.value)
        if k == "name":
            return ops.name(node.value)
        if k == "neg":
            return ops.neg(evaluate(node.args[0], ops, line))
        if k == "pow":
            return ops.pow(evaluate(node.args[0], ops, line), node.value)
        if k == "mul":
            acc = evaluate(node.args[0], ops, line)
            for a in node.args[1:]:
                acc = ops.mul(acc, evaluate(a, ops, line))
            return acc
        if k == "add":
            acc = None
            for sign, a in node.args:
                v = evaluate(a, ops, line)
                if sign < 0:
                    v = ops.neg(v)
                acc = v if acc is None else ops.add(acc, v)
            return acc
        if k == "tensor":
            return ops.tensor([evaluate(a, ops, line) for a in node.args])
    except ParseError:
        raise
    except (ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        raise ParseError(str(msg), line, node.col) from None
    raise ParseError(f"unknown node {node.kind}", line, node.col)
