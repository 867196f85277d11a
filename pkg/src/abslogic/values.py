"""The value universe shared by every module boundary.

AnyValue is a closed set of immutable, hashable, totally ordered values.
IMP values (VInt / VPtr / VUndef) embed into it through ``upcast`` and come
back through ``downcast``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

MASK64 = (1 << 64) - 1


def wrap64(i: int) -> int:
    i &= MASK64
    return i - (1 << 64) if i >> 63 else i


class AnyValue:
    __slots__ = ()
    _rank = 0

    def _key(self):
        raise NotImplementedError

    def __lt__(self, other):
        if not isinstance(other, AnyValue):
            return NotImplemented
        if self._rank != other._rank:
            return self._rank < other._rank
        return self._key() < other._key()

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return other < self

    def __ge__(self, other):
        return self == other or other < self


@dataclass(frozen=True, slots=True, order=False)
class Int(AnyValue):
    i: int
    _rank = 1

    def __post_init__(self):
        if not (-(1 << 63) <= self.i < (1 << 63)):
            object.__setattr__(self, "i", wrap64(self.i))

    def _key(self):
        return self.i

    def __repr__(self):
        return f"Int({self.i})"


@dataclass(frozen=True, slots=True, order=False)
class Str(AnyValue):
    s: str
    _rank = 2

    def _key(self):
        return self.s


@dataclass(frozen=True, slots=True, order=False)
class Bool(AnyValue):
    b: bool
    _rank = 3

    def _key(self):
        return self.b


@dataclass(frozen=True, slots=True, order=False)
class UnitV(AnyValue):
    _rank = 4

    def _key(self):
        return 0

    def __repr__(self):
        return "Unit"


Unit = UnitV()


@dataclass(frozen=True, slots=True, order=False)
class Pair(AnyValue):
    a: AnyValue
    b: AnyValue
    _rank = 5

    def _key(self):
        return (self.a, self.b)


@dataclass(frozen=True, slots=True, order=False)
class List(AnyValue):
    items: tuple
    _rank = 6

    def __post_init__(self):
        if not isinstance(self.items, tuple):
            object.__setattr__(self, "items", tuple(self.items))

    def _key(self):
        return self.items

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __repr__(self):
        return f"List{list(self.items)}"


@dataclass(frozen=True, slots=True, order=False)
class Option(AnyValue):
    """``Option(None)`` is none, anything else is some."""
    value: Optional[AnyValue] = None
    _rank = 7

    @property
    def is_some(self):
        return self.value is not None

    def _key(self):
        return (0,) if self.value is None else (1, self.value)


NONE = Option(None)


def Some(v: AnyValue) -> Option:
    return Option(v)


@dataclass(frozen=True, slots=True)
class Address:
    kind: str  # "heap" or "fn"
    block: object  # int for heap, function name for fn
    off: int = 0

    def __post_init__(self):
        if self.kind not in ("heap", "fn"):
            raise ValueError(f"bad address kind {self.kind!r}")
        if self.kind == "fn" and self.off != 0:
            raise ValueError("function addresses have offset 0")
        if self.kind == "heap":
            object.__setattr__(self, "off", wrap64(self.off))

    def __lt__(self, other):
        return (self.kind, str(self.block) if self.kind == "fn" else self.block, self.off) < (
            other.kind, str(other.block) if other.kind == "fn" else other.block, other.off)

    def shift(self, delta: int) -> "Address":
        return Address(self.kind, self.block, self.off + delta)

    def __repr__(self):
        if self.kind == "fn":
            return f"&{self.block}"
        return f"<{self.block},{self.off}>"


def heap(block: int, off: int = 0) -> Address:
    return Address("heap", block, off)


def fnaddr(name: str) -> Address:
    return Address("fn", name, 0)


@dataclass(frozen=True, slots=True, order=False)
class Addr(AnyValue):
    a: Address
    _rank = 8

    def _key(self):
        a = self.a
        return (a.kind, a.block, a.off)


@dataclass(frozen=True, slots=True, order=True)
class Ordinal:
    """omega*k + n, compared lexicographically."""
    k: int = 0
    n: int = 0

    def __post_init__(self):
        if self.k < 0 or self.n < 0:
            raise ValueError("ordinal coefficients are non-negative")

    def __repr__(self):
        if self.k == 0:
            return f"{self.n}"
        w = "w" if self.k == 1 else f"w*{self.k}"
        return w if self.n == 0 else f"{w}+{self.n}"


OMEGA = Ordinal(1, 0)


@dataclass(frozen=True, slots=True, order=False)
class Ord(AnyValue):
    o: Ordinal
    _rank = 9

    def _key(self):
        return (self.o.k, self.o.n)


@dataclass(frozen=True, slots=True, order=False)
class Tagged(AnyValue):
    tag: str
    payload: AnyValue = Unit
    _rank = 10

    def _key(self):
        return (self.tag, self.payload)


# -- IMP values --------------------------------------------------------------

class ImpValue:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class VInt(ImpValue):
    i: int

    def __post_init__(self):
        if not (-(1 << 63) <= self.i < (1 << 63)):
            object.__setattr__(self, "i", wrap64(self.i))

    def __repr__(self):
        return f"VInt({self.i})"


@dataclass(frozen=True, slots=True)
class VPtr(ImpValue):
    a: Address

    def __repr__(self):
        return f"VPtr({self.a!r})"


@dataclass(frozen=True, slots=True)
class VUndefT(ImpValue):
    def __repr__(self):
        return "VUndef"


VUndef = VUndefT()
UNDEF_ANY = Tagged("undef", Unit)


# -- carriers ----------------------------------------------------------------

INT64 = "int64"
VAL = "val"
PTR = "ptr"
LIST_VAL = "list-of-val"
LIST_INT64 = "list-of-int64"
ORDINAL = "ordinal"
BOOL = "bool"
TEXT = "text"
CARRIERS = (INT64, VAL, PTR, LIST_VAL, LIST_INT64, ORDINAL, BOOL, TEXT)


def upcast(x) -> AnyValue:
    if isinstance(x, AnyValue):
        return x
    if isinstance(x, bool):
        return Bool(x)
    if isinstance(x, int):
        return Int(x)
    if isinstance(x, str):
        return Str(x)
    if x is None or x == ():
        return Unit
    if isinstance(x, VInt):
        return Int(x.i)
    if isinstance(x, VPtr):
        return Addr(x.a)
    if isinstance(x, VUndefT):
        return UNDEF_ANY
    if isinstance(x, Address):
        return Addr(x)
    if isinstance(x, Ordinal):
        return Ord(x)
    if isinstance(x, list):
        return List(tuple(upcast(v) for v in x))
    if isinstance(x, tuple) and len(x) == 2:
        return Pair(upcast(x[0]), upcast(x[1]))
    raise TypeError(f"no AnyValue embedding for {x!r}")


def _down_val(a: AnyValue):
    if isinstance(a, Int):
        return VInt(a.i)
    if isinstance(a, Addr):
        return VPtr(a.a)
    if a == UNDEF_ANY:
        return VUndef
    return None


def downcast(a: AnyValue, target: str):
    """Return the typed value ``x`` with ``upcast(x) == a`` or None."""
    if target == INT64:
        return a.i if isinstance(a, Int) else None
    if target == VAL:
        return _down_val(a)
    if target == PTR:
        return VPtr(a.a) if isinstance(a, Addr) else None
    if target == BOOL:
        return a.b if isinstance(a, Bool) else None
    if target == TEXT:
        return a.s if isinstance(a, Str) else None
    if target == ORDINAL:
        return a.o if isinstance(a, Ord) else None
    if target in (LIST_VAL, LIST_INT64):
        if not isinstance(a, List):
            return None
        inner = VAL if target == LIST_VAL else INT64
        out = []
        for item in a.items:
            v = downcast(item, inner)
            if v is None:
                return None
            out.append(v)
        return out
    raise ValueError(f"unknown carrier {target!r}")


def unpack_args(a: AnyValue, n: int, kinds: Sequence[str]):
    """The ``[x1: k1, ..., xn: kn]?`` pattern; None on any mismatch.

    int64 arguments come back as VInt so callers always see IMP values.
    """
    if len(kinds) != n:
        raise ValueError("kinds must have length n")
    if not isinstance(a, List) or len(a.items) != n:
        return None
    out = []
    for item, kind in zip(a.items, kinds):
        if kind == INT64:
            v = VInt(item.i) if isinstance(item, Int) else None
        elif kind in (VAL, PTR):
            v = downcast(item, kind)
        else:
            raise ValueError(f"unsupported argument kind {kind!r}")
        if v is None:
            return None
        out.append(v)
    return out


def pack(*vs) -> List:
    return List(tuple(upcast(v) for v in vs))


# -- ordinals and measures ---------------------------------------------------

def ord_lt(a: Ordinal, b: Ordinal) -> bool:
    return (a.k, a.n) < (b.k, b.n)


def measure_lt(d1: Optional[Ordinal], d2: Optional[Ordinal]) -> bool:
    """Strict order on measures: everything is below None."""
    if d2 is None:
        return True
    if d1 is None:
        return False
    return ord_lt(d1, d2)


def ord_pred(o: Ordinal, width: int = 2):
    """Finitely many ordinals strictly below ``o``.

    Limit ordinals have infinitely many predecessors; ``width`` bounds how
    many finite offsets are offered below each lower omega-multiple.
    """
    out = [Ordinal(o.k, n) for n in range(o.n)]
    for k in range(o.k):
        out.extend(Ordinal(k, n) for n in range(width + 1))
    return sorted(set(out))


# -- JSON rendering ----------------------------------------------------------

def to_json(v: AnyValue):
    if isinstance(v, Int):
        return {"int": v.i}
    if isinstance(v, Str):
        return {"str": v.s}
    if isinstance(v, Bool):
        return {"bool": v.b}
    if isinstance(v, UnitV):
        return {"unit": None}
    if isinstance(v, Pair):
        return {"pair": [to_json(v.a), to_json(v.b)]}
    if isinstance(v, List):
        return {"list": [to_json(x) for x in v.items]}
    if isinstance(v, Option):
        return {"none": None} if v.value is None else {"some": to_json(v.value)}
    if isinstance(v, Addr):
        a = v.a
        if a.kind == "fn":
            return {"addr": {"fn": a.block, "off": 0}}
        return {"addr": {"block": a.block, "off": a.off}}
    if isinstance(v, Ord):
        return {"ord": [v.o.k, v.o.n]}
    if isinstance(v, Tagged):
        return {"tagged": {"tag": v.tag, "payload": to_json(v.payload)}}
    raise TypeError(f"not an AnyValue: {v!r}")


def from_json(j) -> AnyValue:
    """Inverse of to_json; bare ints/bools/strings/lists are accepted too."""
    if isinstance(j, bool):
        return Bool(j)
    if isinstance(j, int):
        return Int(j)
    if isinstance(j, str):
        return Str(j)
    if j is None:
        return Unit
    if isinstance(j, list):
        return List(tuple(from_json(x) for x in j))
    if not isinstance(j, dict) or len(j) != 1:
        raise ValueError(f"cannot decode value {j!r}")
    (tag, body), = j.items()
    if tag == "int":
        return Int(int(body))
    if tag == "str":
        return Str(body)
    if tag == "bool":
        return Bool(bool(body))
    if tag == "unit":
        return Unit
    if tag == "pair":
        return Pair(from_json(body[0]), from_json(body[1]))
    if tag == "list":
        return List(tuple(from_json(x) for x in body))
    if tag == "none":
        return NONE
    if tag == "some":
        return Some(from_json(body))
    if tag == "addr":
        if "fn" in body:
            return Addr(fnaddr(body["fn"]))
        return Addr(heap(int(body["block"]), int(body.get("off", 0))))
    if tag == "ord":
        return Ord(Ordinal(int(body[0]), int(body[1])))
    if tag == "tagged":
        return Tagged(body["tag"], from_json(body["payload"]))
    raise ValueError(f"unknown value tag {tag!r}")


def show(v) -> str:
    """Compact human-readable rendering used in listings and prompts."""
    if isinstance(v, Int):
        return str(v.i)
    if isinstance(v, Str):
        return repr(v.s)
    if isinstance(v, Bool):
        return "true" if v.b else "false"
    if isinstance(v, UnitV):
        return "()"
    if isinstance(v, Pair):
        return f"({show(v.a)}, {show(v.b)})"
    if isinstance(v, List):
        return "[" + ", ".join(show(x) for x in v.items) + "]"
    if isinstance(v, Option):
        return "None" if v.value is None else f"Some {show(v.value)}"
    if isinstance(v, Addr):
        return repr(v.a)
    if isinstance(v, Ord):
        return repr(v.o)
    if isinstance(v, Tagged):
        return v.tag if v.payload == Unit else f"{v.tag}({show(v.payload)})"
    return repr(v)
