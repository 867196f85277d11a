"""IMP abstract syntax."""
from __future__ import annotations

from dataclasses import dataclass


# expressions

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Num:
    n: int


@dataclass(frozen=True)
class BinOp:
    op: str
    l: object
    r: object


BINOPS = ("==", "<", "+", "-", "*", "/", "%")
PREC = {"==": 1, "<": 1, "+": 2, "-": 2, "*": 3, "/": 3, "%": 3}


# statements

@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    x: str
    e: object


@dataclass(frozen=True)
class If:
    c: object
    then: tuple
    els: tuple


@dataclass(frozen=True)
class CallFn:
    """``x := M.f(es)``: a call to another (or the same) module."""
    x: object  # target variable or None
    fn: str
    args: tuple


@dataclass(frozen=True)
class CallPtr:
    """``x := (*e)(es)``"""
    x: object
    f: object
    args: tuple


@dataclass(frozen=True)
class Syscall:
    """Unqualified names are observable system calls."""
    x: object
    name: str
    args: tuple


@dataclass(frozen=True)
class AddrOf:
    x: str
    fn: str


@dataclass(frozen=True)
class Malloc:
    x: object
    n: object


@dataclass(frozen=True)
class Free:
    p: object


@dataclass(frozen=True)
class Load:
    x: object
    p: object


@dataclass(frozen=True)
class Store:
    p: object
    v: object


@dataclass(frozen=True)
class Cmp:
    x: object
    a: object
    b: object


MEMOPS = ("malloc", "free", "load", "store", "cmp")


@dataclass(frozen=True)
class FunDef:
    name: str
    params: tuple
    vars: tuple
    body: tuple
    ret: object  # expression


@dataclass(frozen=True)
class Module:
    name: str
    locals: tuple = ()   # ((name, int), ...)
    funs: tuple = ()

    def fun(self, name):
        for f in self.funs:
            if f.name == name:
                return f
        raise KeyError(name)

    @property
    def qualified(self):
        return [f"{self.name}.{f.name}" for f in self.funs]
