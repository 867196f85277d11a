"""Parser and canonical printer for IMP modules.

    module M;
    local g := 1;
    def f(x, y) { var r; r := x + y; print(r); return r; }
"""
from __future__ import annotations

import re

from .ast import (MEMOPS, PREC, AddrOf, Assign, BinOp, CallFn, CallPtr, Cmp, Free, FunDef,
                  If, Load, Malloc, Module, Num, Skip, Store, Syscall, Var)


class ParseError(ValueError):
    def __init__(self, msg, line=None, col=None):
        where = "" if line is None else f"line {line}" + ("" if col is None else f", column {col}") + ": "
        super().__init__(where + msg)
        self.line = line
        self.col = col


_TOK = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<nl>\n) | (?P<comment>//[^\n]*)
  | (?P<num>\d+)
  | (?P<qname>[A-Za-z_]\w*\.[A-Za-z_]\w*)
  | (?P<name>[A-Za-z_]\w*)
  | (?P<op>:=|==|[-+*/%<(){};,&])
""", re.X)

KEYWORDS = {"module", "local", "def", "var", "return", "if", "then", "else", "skip"}


def tokenize(src):
    out, line, pos, bol = [], 1, 0, 0
    while pos < len(src):
        m = _TOK.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - bol + 1)
        kind = m.lastgroup
        text = m.group()
        start, pos = pos, m.end()
        if kind == "nl":
            line += 1
            bol = pos
        elif kind in ("ws", "comment"):
            continue
        else:
            out.append((kind, text, line, start - bol + 1))
    out.append(("eof", "", line, pos - bol + 1))
    return out


class _Parser:
    def __init__(self, src):
        self.toks = tokenize(src)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.next()
        if t[1] != text:
            raise ParseError(f"expected {text!r}, found {t[1] or 'end of input'!r}", *t[2:])
        return t

    def accept(self, text):
        if self.peek()[1] == text:
            self.i += 1
            return True
        return False

    def ident(self):
        t = self.next()
        if t[0] != "name" or t[1] in KEYWORDS:
            raise ParseError(f"expected an identifier, found {t[1]!r}", *t[2:])
        return t[1]

    # -- modules
    def module(self):
        self.expect("module")
        t = self.next()
        if t[0] != "name":
            raise ParseError("expected a module name", *t[2:])
        name = t[1]
        self.expect(";")
        locs, funs = [], []
        while self.peek()[1] == "local":
            self.next()
            g = self.ident()
            self.expect(":=")
            n = self.number()
            self.expect(";")
            locs.append((g, n))
        while self.peek()[1] == "def":
            funs.append(self.fundef())
        t = self.peek()
        if t[0] != "eof":
            raise ParseError(f"unexpected {t[1]!r}", *t[2:])
        names = [f.name for f in funs]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise ParseError(f"duplicate function definition {dup!r}")
        return Module(name, tuple(locs), tuple(funs))

    def number(self):
        neg = self.accept("-")
        t = self.next()
        if t[0] != "num":
            raise ParseError(f"expected a number, found {t[1]!r}", *t[2:])
        return -int(t[1]) if neg else int(t[1])

    def fundef(self):
        self.expect("def")
        name = self.ident()
        self.expect("(")
        pt = self.peek()
        params = self.names_until(")")
        if len(set(params)) != len(params):
            raise ParseError(f"parameter names of {name!r} must be distinct", *pt[2:])
        self.expect("{")
        vs = []
        while self.peek()[1] == "var":
            self.next()
            vs.extend(self.names_until(";"))
        body = []
        ret = Num(0)
        while True:
            if self.peek()[1] == "return":
                self.next()
                ret = self.expr()
                self.expect(";")
                self.expect("}")
                break
            if self.accept("}"):
                break
            body.append(self.stmt())
        return FunDef(name, tuple(params), tuple(vs), tuple(body), ret)

    def names_until(self, close):
        out = []
        if self.accept(close):
            return out
        while True:
            out.append(self.ident())
            if self.accept(close):
                return out
            self.expect(",")

    def block(self):
        self.expect("{")
        out = []
        while not self.accept("}"):
            out.append(self.stmt())
        return tuple(out)

    def args(self):
        self.expect("(")
        out = []
        if self.accept(")"):
            return tuple(out)
        while True:
            out.append(self.expr())
            if self.accept(")"):
                return tuple(out)
            self.expect(",")

    def stmt(self):
        t = self.peek()
        if t[1] == "skip":
            self.next()
            self.expect(";")
            return Skip()
        if t[1] == "if":
            self.next()
            self.expect("(")
            c = self.expr()
            self.expect(")")
            self.expect("then")
            th = self.block()
            el = self.block() if self.accept("else") else ()
            return If(c, th, el)
        if t[0] == "name" and t[1] not in KEYWORDS and self.peek(1)[1] == ":=":
            x = self.ident()
            self.next()
            s = self.rhs(x)
            self.expect(";")
            return s
        s = self.rhs(None)
        self.expect(";")
        return s

    def rhs(self, x):
        t = self.peek()
        if t[1] == "&":
            self.next()
            q = self.next()
            if q[0] != "qname" or x is None:
                raise ParseError("'&' needs a qualified function name and a target", *q[2:])
            return AddrOf(x, q[1])
        if t[1] == "(" and self.peek(1)[1] == "*":
            self.next()
            self.next()
            f = self.expr()
            self.expect(")")
            return CallPtr(x, f, self.args())
        if t[0] == "qname" and self.peek(1)[1] == "(":
            self.next()
            return CallFn(x, t[1], self.args())
        if t[0] == "name" and t[1] in MEMOPS and self.peek(1)[1] == "(":
            self.next()
            a = self.args()
            want = {"malloc": 1, "free": 1, "load": 1, "store": 2, "cmp": 2}[t[1]]
            if len(a) != want:
                raise ParseError(f"{t[1]} takes {want} argument(s)", *t[2:])
            if t[1] == "malloc":
                return Malloc(x, a[0])
            if t[1] == "free":
                if x is not None:
                    raise ParseError("free has no result", *t[2:])
                return Free(a[0])
            if t[1] == "load":
                return Load(x, a[0])
            if t[1] == "store":
                if x is not None:
                    raise ParseError("store has no result", *t[2:])
                return Store(a[0], a[1])
            return Cmp(x, a[0], a[1])
        if t[0] == "name" and t[1] not in KEYWORDS and self.peek(1)[1] == "(":
            self.next()
            return Syscall(x, t[1], self.args())
        if x is None:
            raise ParseError(f"unexpected {t[1]!r}", *t[2:])
        return Assign(x, self.expr())

    # -- expressions, by precedence
    def expr(self, level=1):
        if level > 3:
            return self.atom()
        e = self.expr(level + 1)
        while self.peek()[0] == "op" and PREC.get(self.peek()[1]) == level:
            op = self.next()[1]
            e = BinOp(op, e, self.expr(level + 1))
        return e

    def atom(self):
        t = self.next()
        if t[0] == "num":
            return Num(int(t[1]))
        if t[1] == "-" and self.peek()[0] == "num":
            return Num(-int(self.next()[1]))
        if t[0] == "name" and t[1] not in KEYWORDS:
            return Var(t[1])
        if t[1] == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {t[1] or 'end of input'!r} in expression", *t[2:])


def parse(src: str) -> Module:
    return _Parser(src).module()


def parse_expr(src: str):
    p = _Parser(src)
    e = p.expr()
    if p.peek()[0] != "eof":
        raise ParseError(f"trailing input {p.peek()[1]!r}", *p.peek()[2:])
    return e


# -- printing ----------------------------------------------------------------

def render_expr(e, ctx=0, right=False):
    if isinstance(e, Num):
        s = str(e.n)
        return f"({s})" if e.n < 0 and ctx else s
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinOp):
        p = PREC[e.op]
        s = f"{render_expr(e.l, p)} {e.op} {render_expr(e.r, p, True)}"
        if p < ctx or (right and p == ctx):
            return f"({s})"
        return s
    raise TypeError(f"not an expression: {e!r}")


def _args(es):
    return ", ".join(render_expr(e) for e in es)


def _tgt(x):
    return "" if x is None else f"{x} := "


def render_stmt(s, ind):
    pad = "  " * ind
    if isinstance(s, Skip):
        return [pad + "skip;"]
    if isinstance(s, Assign):
        return [f"{pad}{s.x} := {render_expr(s.e)};"]
    if isinstance(s, If):
        out = [f"{pad}if ({render_expr(s.c)}) then {{"]
        for t in s.then:
            out += render_stmt(t, ind + 1)
        out.append(f"{pad}}} else {{")
        for t in s.els:
            out += render_stmt(t, ind + 1)
        out.append(pad + "}")
        return out
    if isinstance(s, CallFn):
        return [f"{pad}{_tgt(s.x)}{s.fn}({_args(s.args)});"]
    if isinstance(s, CallPtr):
        return [f"{pad}{_tgt(s.x)}(*{render_expr(s.f)})({_args(s.args)});"]
    if isinstance(s, Syscall):
        return [f"{pad}{_tgt(s.x)}{s.name}({_args(s.args)});"]
    if isinstance(s, AddrOf):
        return [f"{pad}{s.x} := &{s.fn};"]
    if isinstance(s, Malloc):
        return [f"{pad}{_tgt(s.x)}malloc({render_expr(s.n)});"]
    if isinstance(s, Free):
        return [f"{pad}free({render_expr(s.p)});"]
    if isinstance(s, Load):
        return [f"{pad}{_tgt(s.x)}load({render_expr(s.p)});"]
    if isinstance(s, Store):
        return [f"{pad}store({render_expr(s.p)}, {render_expr(s.v)});"]
    if isinstance(s, Cmp):
        return [f"{pad}{_tgt(s.x)}cmp({render_expr(s.a)}, {render_expr(s.b)});"]
    raise TypeError(f"not a statement: {s!r}")


def render(m: Module) -> str:
    out = [f"module {m.name};"]
    for g, n in m.locals:
        out.append(f"local {g} := {n};")
    for f in m.funs:
        out.append("")
        out.append(f"def {f.name}({', '.join(f.params)}) {{")
        if f.vars:
            out.append(f"  var {', '.join(f.vars)};")
        for s in f.body:
            out += render_stmt(s, 1)
        out.append(f"  return {render_expr(f.ret)};")
        out.append("}")
    return "\n".join(out) + "\n"
