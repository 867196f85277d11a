"""Partial commutative monoids over a shared resource syntax.

Every PCM shares one unit ``EPS`` and one absorbing invalid element ``BAD``.
Sums that are invalid are collapsed to BAD (validity is monotone, so an
invalid element behaves like BAD under every frame), which keeps equality
syntactic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

from .values import AnyValue, Address, upcast, show


class PcmError(TypeError):
    """Resources from different carriers were combined."""


class Resource:
    __slots__ = ()
    _rank = 0

    def _key(self):
        return ()

    def __lt__(self, other):
        if self._rank != other._rank:
            return self._rank < other._rank
        return self._key() < other._key()

    def __add__(self, other):
        return add(self, other)


@dataclass(frozen=True, slots=True)
class _Eps(Resource):
    _rank = 0

    def __repr__(self):
        return "ε"


@dataclass(frozen=True, slots=True)
class _Bad(Resource):
    _rank = 99

    def __repr__(self):
        return "BAD"


EPS = _Eps()
BAD = _Bad()


@dataclass(frozen=True, slots=True)
class Excl(Resource):
    v: object
    _rank = 1

    def _key(self):
        return (self.v,)

    def __repr__(self):
        return f"Ex({show(self.v) if isinstance(self.v, AnyValue) else self.v!r})"


@dataclass(frozen=True, slots=True)
class Ag(Resource):
    vs: frozenset
    _rank = 2

    def _key(self):
        return tuple(sorted(self.vs))

    def __repr__(self):
        return "Ag{" + ", ".join(map(repr, sorted(self.vs))) + "}"


@dataclass(frozen=True, slots=True)
class Auth(Resource):
    full: Optional[Resource]
    frag: Resource
    _rank = 3

    def _key(self):
        return ((0,) if self.full is None else (1, self.full), self.frag)

    def __repr__(self):
        if self.full is None:
            return f"◯{self.frag!r}"
        if self.frag is EPS:
            return f"●{self.full!r}"
        return f"(●{self.full!r}, ◯{self.frag!r})"


@dataclass(frozen=True, slots=True)
class FinMap(Resource):
    """Sorted ``(key, resource)`` entries; unit entries are never stored."""
    entries: tuple
    _rank = 4

    def _key(self):
        return self.entries

    def get(self, k):
        for kk, v in self.entries:
            if kk == k:
                return v
        return EPS

    def __repr__(self):
        return "{" + ", ".join(f"{k!r}: {v!r}" for k, v in self.entries) + "}"


@dataclass(frozen=True, slots=True)
class Prod(Resource):
    a: Resource
    b: Resource
    _rank = 5

    def _key(self):
        return (self.a, self.b)


@dataclass(frozen=True, slots=True)
class Sym(Resource):
    tag: str
    name: str
    _rank = 6

    def _key(self):
        return (self.tag, self.name)

    def __repr__(self):
        return self.name


# named tables: tag -> {frozenset({a, b}) or (a, a): result name}
_TABLES: dict = {}


def register_table(tag: str, symbols, sums: dict):
    t = {}
    for (a, b), c in sums.items():
        t[(a, b)] = c
        t[(b, a)] = c
    _TABLES[tag] = (tuple(symbols), t)


# -- smart constructors ------------------------------------------------------

def finmap(d) -> Resource:
    items = d.items() if isinstance(d, dict) else d
    es = tuple(sorted(((k, v) for k, v in items if v is not EPS and v != EPS), key=lambda kv: kv[0]))
    if any(v == BAD for _, v in es):
        return BAD
    return FinMap(es) if es else EPS


def prod(a: Resource, b: Resource) -> Resource:
    if a == BAD or b == BAD:
        return BAD
    if a == EPS and b == EPS:
        return EPS
    return Prod(a, b)


def frag(r: Resource) -> Resource:
    return EPS if r == EPS else Auth(None, r)


def full(r: Resource, fr: Resource = EPS) -> Resource:
    return canon(Auth(r, fr))


def ag(*vs) -> Resource:
    return canon(Ag(frozenset(vs))) if vs else EPS


# -- generic operations ------------------------------------------------------

def _mismatch(a, b):
    raise PcmError(f"cannot combine {a!r} and {b!r}")


@lru_cache(maxsize=None)
def _add_raw(a: Resource, b: Resource) -> Resource:
    if a is EPS or a == EPS:
        return b
    if b is EPS or b == EPS:
        return a
    if a == BAD or b == BAD:
        return BAD
    ta = type(a)
    if ta is not type(b):
        _mismatch(a, b)
    if ta is Excl:
        return BAD
    if ta is Ag:
        return Ag(a.vs | b.vs)
    if ta is Auth:
        if a.full is not None and b.full is not None:
            return BAD
        f = a.full if a.full is not None else b.full
        x = add(a.frag, b.frag)
        if x == BAD:
            return BAD
        if f is None and x == EPS:
            return EPS
        return Auth(f, x)
    if ta is FinMap:
        d = dict(a.entries)
        for k, v in b.entries:
            if k in d:
                s = add(d[k], v)
                if s == BAD:
                    return BAD
                d[k] = s
            else:
                d[k] = v
        return finmap(d)
    if ta is Prod:
        return prod(add(a.a, b.a), add(a.b, b.b))
    if ta is Sym:
        if a.tag != b.tag:
            _mismatch(a, b)
        c = _TABLES[a.tag][1].get((a.name, b.name))
        return BAD if c is None else Sym(a.tag, c)
    _mismatch(a, b)


def add(a: Resource, b: Resource) -> Resource:
    r = _add_raw(a, b)
    return r if r == BAD or valid(r) else BAD


def add_all(*rs) -> Resource:
    out = EPS
    for r in rs:
        out = add(out, r)
        if out == BAD:
            return BAD
    return out


@lru_cache(maxsize=None)
def valid(r: Resource) -> bool:
    if r == EPS:
        return True
    if r == BAD:
        return False
    t = type(r)
    if t is Excl or t is Sym:
        return True
    if t is Ag:
        return len(r.vs) <= 1
    if t is Auth:
        if r.full is None:
            return valid(r.frag)
        return valid(r.full) and included(r.frag, r.full)
    if t is FinMap:
        return all(valid(v) for _, v in r.entries)
    if t is Prod:
        return valid(r.a) and valid(r.b)
    raise PcmError(f"not a resource: {r!r}")


def canon(r: Resource) -> Resource:
    return r if valid(r) else BAD


@lru_cache(maxsize=None)
def included(a: Resource, b: Resource) -> bool:
    """``a ≼ b``: some c has a + c = b (decided structurally)."""
    if a == EPS or a == b:
        return True
    if b == BAD:
        return True
    if a == BAD or b == EPS:
        return False
    ta = type(a)
    if ta is not type(b):
        return False
    if ta is Excl:
        return False
    if ta is Ag:
        return a.vs <= b.vs
    if ta is Auth:
        if a.full is not None and a.full != b.full:
            return False
        return included(a.frag, b.frag)
    if ta is FinMap:
        return all(included(v, b.get(k)) for k, v in a.entries)
    if ta is Prod:
        return included(a.a, b.a) and included(a.b, b.b)
    if ta is Sym:
        syms, t = _TABLES[a.tag]
        return any(t.get((a.name, c)) == b.name for c in syms)
    return False


# -- PCM descriptors with finite universes -----------------------------------

@dataclass
class Pcm:
    name: str
    universe: tuple = None

    def add(self, a, b):
        return add(a, b)

    def valid(self, a):
        return valid(a)

    @property
    def unit(self):
        return EPS

    def _univ(self):
        if self.universe is None:
            raise ValueError(f"PCM {self.name} has no finite universe")
        return self.universe

    def fpu(self, a, b) -> bool:
        return fpu(self, a, b)

    def frames_for(self, r):
        return [f for f in self._univ() if valid(add(r, f))]


def _dedupe(xs):
    seen, out = set(), []
    for x in xs:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(sorted(out))


def excl_pcm(values, name="Excl") -> Pcm:
    return Pcm(name, _dedupe([EPS, BAD] + [Excl(v) for v in values]))


def ag_pcm(values, name="Ag") -> Pcm:
    vs = list(values)
    els = [EPS, BAD] + [Ag(frozenset([v])) for v in vs]
    return Pcm(name, _dedupe(els))


def opt_pcm(inner: Pcm, name=None) -> Pcm:
    """Option adjoins a unit; with a shared global unit it is the identity."""
    return Pcm(name or f"Opt({inner.name})", inner.universe)


def prod_pcm(a: Pcm, b: Pcm, name=None) -> Pcm:
    els = [prod(x, y) for x in a._univ() for y in b._univ()]
    return Pcm(name or f"({a.name} x {b.name})", _dedupe(els))


def finmap_pcm(keys, inner: Pcm, name=None) -> Pcm:
    good = [x for x in inner._univ() if valid(x)]
    els = [BAD]
    for combo in itertools.product(good, repeat=len(keys)):
        els.append(finmap(dict(zip(keys, combo))))
    return Pcm(name or f"Map({inner.name})", _dedupe(els))


def auth_pcm(inner: Pcm, name=None) -> Pcm:
    good = [x for x in inner._univ() if valid(x)]
    els = [BAD] + [frag(x) for x in good]
    for f in good:
        for x in good:
            if included(x, f):
                els.append(Auth(f, x))
    return Pcm(name or f"Auth({inner.name})", _dedupe(els))


def named_pcm(tag: str, symbols, sums: dict) -> Pcm:
    register_table(tag, symbols, sums)
    return Pcm(tag, _dedupe([EPS, BAD] + [Sym(tag, s) for s in symbols]))


# -- decision procedures -----------------------------------------------------

def fpu(p: Pcm, a: Resource, b: Resource) -> bool:
    """Frame-preserving update a ~> b over p's universe."""
    for f in p._univ():
        if valid(add(a, f)) and not valid(add(b, f)):
            return False
    return True


def check_laws(p: Pcm) -> dict:
    """Exhaustive PCM laws over p's universe; maps each law to its counterexamples.

    Sums are interned to indices first, so the triple loops only index lists.
    """
    univ = list(p._univ())
    idx = {r: i for i, r in enumerate(univ)}
    n = len(univ)

    def intern(r):
        if r not in idx:
            idx[r] = len(univ)
            univ.append(r)
        return idx[r]

    table = [[intern(add(a, b)) for b in univ[:n]] for a in univ[:n]]
    ext = {}

    def plus(i, j):
        if i < n:
            return table[i][j]
        if (i, j) not in ext:
            ext[i, j] = intern(add(univ[i], univ[j]))
        return ext[i, j]

    ok = [valid(r) for r in univ[:n]]
    bad = {"commutativity": [], "associativity": [], "identity": [], "unit-valid": [], "monotonicity": []}
    if not valid(EPS):
        bad["unit-valid"].append(EPS)
    e = idx.get(EPS)
    for i in range(n):
        if e is not None and table[i][e] != i and univ[table[i][e]] != univ[i]:
            bad["identity"].append(univ[i])
        for j in range(n):
            ij = table[i][j]
            if ij != table[j][i]:
                bad["commutativity"].append((univ[i], univ[j]))
            if valid(univ[ij]) and not ok[i]:
                bad["monotonicity"].append((univ[i], univ[j]))
            for k in range(n):
                if plus(ij, k) != plus(i, table[j][k]) and univ[plus(ij, k)] != univ[plus(i, table[j][k])]:
                    bad["associativity"].append((univ[i], univ[j], univ[k]))
    return bad


def upd_modality(p: Pcm, r: Resource, pred: Callable[[Resource], bool]) -> bool:
    return any(pred(r2) and fpu(p, r, r2) for r2 in p._univ())


def frames_for(p: Pcm, r: Resource):
    return p.frames_for(r)


# -- Cannon ------------------------------------------------------------------

CANNON_TAG = "Cannon"
CANNON = named_pcm(CANNON_TAG, ("Ball", "Ready", "Fired", "Loaded"), {("Ball", "Ready"): "Loaded"})
BALL = Sym(CANNON_TAG, "Ball")
READY = Sym(CANNON_TAG, "Ready")
FIRED = Sym(CANNON_TAG, "Fired")
LOADED = Sym(CANNON_TAG, "Loaded")


# -- memory ------------------------------------------------------------------

def cell(a: Address):
    return (a.block, a.off)


def points_to(p: Address, vs) -> Resource:
    """Fragment for p |-> vs: consecutive 8-byte cells."""
    if not vs:
        return EPS
    d = {}
    for i, v in enumerate(vs):
        d[cell(p.shift(8 * i))] = Excl(upcast(v))
    return frag(finmap(d))


def mem_full(cells: dict) -> Resource:
    """Authoritative memory: {(block, off): value}."""
    return full(finmap({k: Excl(upcast(v)) for k, v in cells.items()}))


def mem_pcm(cells, values, name="Mem") -> Pcm:
    return auth_pcm(finmap_pcm(list(cells), excl_pcm([upcast(v) for v in values])), name)


# -- the global product of named components ----------------------------------

def inj(component: str, r: Resource) -> Resource:
    return finmap({component: r})


def proj(component: str, r: Resource) -> Resource:
    if r == EPS:
        return EPS
    if not isinstance(r, FinMap):
        raise PcmError(f"not a global resource: {r!r}")
    return r.get(component)


def global_pcm(components: dict, name="Sigma") -> Pcm:
    names = sorted(components)
    els = [BAD]
    for combo in itertools.product(*[[x for x in components[n]._univ() if valid(x)] for n in names]):
        els.append(finmap(dict(zip(names, combo))))
    return Pcm(name, _dedupe(els))


def lift(component: str, p: Pcm) -> Pcm:
    return Pcm(f"{component}@{p.name}", _dedupe([BAD] + [inj(component, x) for x in p._univ() if x != BAD]))


# -- rendering ---------------------------------------------------------------

def res_json(r: Resource):
    if r == EPS:
        return "unit"
    if r == BAD:
        return "bad"
    if isinstance(r, Excl):
        from .values import to_json
        return {"excl": to_json(r.v) if isinstance(r.v, AnyValue) else repr(r.v)}
    if isinstance(r, Ag):
        return {"ag": [repr(v) for v in sorted(r.vs)]}
    if isinstance(r, Auth):
        return {"auth": {"full": None if r.full is None else res_json(r.full), "frag": res_json(r.frag)}}
    if isinstance(r, FinMap):
        return {"map": [[repr(k), res_json(v)] for k, v in r.entries]}
    if isinstance(r, Prod):
        return {"prod": [res_json(r.a), res_json(r.b)]}
    if isinstance(r, Sym):
        return {"sym": r.name}
    return repr(r)


def minus(a: Resource, b: Resource) -> Optional[Resource]:
    """Some c with b + c = a, found structurally; None when there is none."""
    if b == EPS:
        return a
    if a == b:
        return a if isinstance(a, Ag) else EPS
    ta = type(a)
    if ta is not type(b):
        return None
    c = None
    if ta is FinMap:
        d = {}
        for k, v in b.entries:
            w = a.get(k)
            r = minus(w, v)
            if r is None:
                return None
            d[k] = r
        for k, v in a.entries:
            d.setdefault(k, v)
        c = finmap(d)
    elif ta is Auth:
        if b.full is not None:
            if a.full != b.full:
                return None
            f = None
        else:
            f = a.full
        fr = minus(a.frag, b.frag)
        if fr is None:
            return None
        c = EPS if f is None and fr == EPS else Auth(f, fr)
    elif ta is Ag:
        c = a if b.vs <= a.vs else None
    elif ta is Sym and a.tag == b.tag:
        for s in _TABLES[a.tag][0]:
            if _TABLES[a.tag][1].get((b.name, s)) == a.name:
                c = Sym(a.tag, s)
                break
    if c is None:
        return None
    try:
        return c if add(b, c) == a else None
    except PcmError:
        return None
