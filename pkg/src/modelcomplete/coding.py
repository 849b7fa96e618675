"""Goedel coding of atomic sentences and of arbitrary sentences.

Atomic sentences over domain constants are numbered in blocks: block n holds
every atom whose largest constant is n, namely the equalities #i = #n for
i < n (increasing i) followed, relation by relation in declaration order, by
all argument tuples with maximum n in lexicographic order.  ``#i = #i`` gets
no code.  ``block_length(n)`` is the number of codes for atoms about
{0, ..., n}.

Sentences (inputs to decision functionals) get a separate bijective
structural code built from Cantor pairing; see :class:`SentenceCoding`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

from .logic import (
    And, App, Const, DomConst, Eq, Exists, Forall, Formula, Implies, Not, Or,
    Rel, Var, free_vars,
)


class CodingError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    """A finite relational signature (equality is implicit).

    ``functions`` and ``constants`` record surface symbols whose graphs are
    among the relations: a k-ary function f is the (k+1)-ary relation f, a
    named constant c is the unary relation c.
    """
    relations: tuple
    functions: tuple = ()
    constants: tuple = ()

    def __post_init__(self):
        names = [r for r, _ in self.relations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate relation names")
        if any(k < 1 for _, k in self.relations):
            raise ValueError("relation arities must be >= 1")
        rel = dict(self.relations)
        for f, k in self.functions:
            if rel.get(f) != k + 1:
                raise ValueError(f"function {f} needs a graph relation of arity {k + 1}")
        for c in self.constants:
            if rel.get(c) != 1:
                raise ValueError(f"constant {c} needs a unary graph relation")
        object.__setattr__(self, "_hash", hash((self.relations, self.functions, self.constants)))

    def __hash__(self):
        return self._hash

    @classmethod
    def of(cls, relations=(), functions=(), constants=()):
        """Build from surface symbols; graph relations are added as needed."""
        rels = list(relations)
        have = {r for r, _ in rels}
        for f, k in functions:
            if f not in have:
                rels.append((f, k + 1))
                have.add(f)
        for c in constants:
            if c not in have:
                rels.append((c, 1))
                have.add(c)
        return cls(tuple(rels), tuple(functions), tuple(constants))

    def arity(self, name: str) -> int:
        for r, k in self.relations:
            if r == name:
                return k
        raise CodingError(f"unknown relation {name!r}")

    @property
    def relation_names(self) -> tuple:
        return tuple(r for r, _ in self.relations)

    @property
    def function_arity(self) -> dict:
        return dict(self.functions)

    def block_size(self, n: int) -> int:
        size = n
        for _, k in self.relations:
            size += (n + 1) ** k - n ** k
        return size

    def block_length(self, n: int) -> int:
        return block_length(n, self)


def block_length(n: int, sig: Signature) -> int:
    """Number of atomic codes about constants {0, ..., n}; -1 gives 0."""
    if n < 0:
        return 0
    total = n * (n + 1) // 2
    for _, k in sig.relations:
        total += (n + 1) ** k
    return total


def block_of_code(code: int, sig: Signature) -> int:
    """Least n with code < block_length(n)."""
    lo, hi = 0, 1
    while block_length(hi, sig) <= code:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if block_length(mid, sig) > code:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _tuple_rank(t, n: int) -> int:
    """Rank of t among tuples over {0..n} with max n, lexicographically."""
    k = len(t)
    rank = 0
    has_max = False
    for j, x in enumerate(t):
        rem = k - j - 1
        full = (n + 1) ** rem
        if has_max:
            rank += x * full
        else:
            # below n the suffix must still reach n; at n it is free
            rank += x * (full - n ** rem)
            if x == n:
                has_max = True
    return rank


def _tuple_unrank(rank: int, k: int, n: int) -> tuple:
    out = []
    has_max = False
    for j in range(k):
        rem = k - j - 1
        full = (n + 1) ** rem
        if has_max:
            v, rank = divmod(rank, full)
        else:
            cnt = full - n ** rem
            v = rank // cnt if cnt else n
            if v >= n:
                v, rank = n, rank - n * cnt
                has_max = True
            else:
                rank -= v * cnt
        if v > n or rank < 0:
            raise CodingError("tuple rank out of range")
        out.append(v)
    if rank != 0 or not has_max:
        raise CodingError("tuple rank out of range")
    return tuple(out)


def _const_index(t) -> int:
    if not isinstance(t, DomConst):
        raise CodingError(f"atomic coding needs domain constants, got {t}")
    return t.index


def encode_atomic(atom: Formula, sig: Signature) -> int:
    if isinstance(atom, Eq):
        i, j = sorted((_const_index(atom.left), _const_index(atom.right)))
        if i == j:
            raise CodingError("trivial equality #i = #i has no code")
        return block_length(j - 1, sig) + i
    if isinstance(atom, Rel):
        args = tuple(_const_index(a) for a in atom.args)
        if len(args) != sig.arity(atom.name):
            raise CodingError(f"arity mismatch for {atom.name}")
        n = max(args)
        code = block_length(n - 1, sig) + n
        for name, k in sig.relations:
            if name == atom.name:
                return code + _tuple_rank(args, n)
            code += (n + 1) ** k - n ** k
    raise CodingError(f"not an atomic sentence: {atom}")


@lru_cache(maxsize=1 << 18)
def decode_atomic(code: int, sig: Signature) -> Formula:
    if code < 0:
        raise CodingError("codes are natural numbers")
    n = block_of_code(code, sig)
    off = code - block_length(n - 1, sig)
    if off < n:
        return Eq(DomConst(off), DomConst(n))
    off -= n
    for name, k in sig.relations:
        size = (n + 1) ** k - n ** k
        if off < size:
            return Rel(name, tuple(DomConst(i) for i in _tuple_unrank(off, k, n)))
        off -= size
    raise AssertionError("unreachable")


@lru_cache(maxsize=1 << 18)
def atom_code(sig: Signature, rel: str, args: tuple) -> int:
    """Code of rel(#args) without building the AST."""
    n = max(args)
    code = block_length(n - 1, sig) + n
    for name, k in sig.relations:
        if name == rel:
            return code + _tuple_rank(args, n)
        code += (n + 1) ** k - n ** k
    raise CodingError(f"unknown relation {rel!r}")


def eq_code(sig: Signature, i: int, j: int) -> int:
    i, j = sorted((i, j))
    return block_length(j - 1, sig) + i


# --- sentences ------------------------------------------------------------

def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def cantor_unpair(z: int) -> tuple:
    w = (isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


@dataclass(frozen=True)
class SentenceCoding:
    """Bijection between omega and relational formulas over ``sig``.

    code = tag + K * payload with tags: 0 equality, 1..r the relations,
    then not, and, or, implies, exists, forall.  Terms are coded as 2i for
    #i and 2l+1 for the variable bound at quantifier level l (outermost 0),
    decoded with the name ``v<l>``.  Every natural number decodes to a
    formula; the sentences are those without unbound levels.
    """
    sig: Signature
    _names: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_names", self.sig.relation_names)

    @property
    def modulus(self) -> int:
        return len(self._names) + 7

    def _tags(self):
        r = len(self._names)
        return {"not": r + 1, "and": r + 2, "or": r + 3, "implies": r + 4,
                "exists": r + 5, "forall": r + 6}

    def encode(self, f: Formula) -> int:
        if free_vars(f):
            raise CodingError(f"not a sentence: free {sorted(free_vars(f))}")
        return self._enc(f, {}, 0)

    def _enc_term(self, t, levels) -> int:
        if isinstance(t, DomConst):
            return 2 * t.index
        if isinstance(t, Var):
            return 2 * levels[t.name] + 1
        raise CodingError(f"sentence coding is relational; got term {t}")

    def _enc_tuple(self, codes) -> int:
        out = codes[-1]
        for c in reversed(codes[:-1]):
            out = cantor_pair(c, out)
        return out

    def _enc(self, f, levels, depth) -> int:
        K = self.modulus
        tags = self._tags()
        if isinstance(f, Eq):
            payload = cantor_pair(self._enc_term(f.left, levels), self._enc_term(f.right, levels))
            return K * payload
        if isinstance(f, Rel):
            if f.name not in self._names:
                raise CodingError(f"unknown relation {f.name!r}")
            if len(f.args) != self.sig.arity(f.name):
                raise CodingError(f"arity mismatch for {f.name}")
            payload = self._enc_tuple([self._enc_term(a, levels) for a in f.args])
            return 1 + self._names.index(f.name) + K * payload
        if isinstance(f, Not):
            return tags["not"] + K * self._enc(f.body, levels, depth)
        for cls, tag in ((And, "and"), (Or, "or"), (Implies, "implies")):
            if isinstance(f, cls):
                return tags[tag] + K * cantor_pair(self._enc(f.left, levels, depth), self._enc(f.right, levels, depth))
        if isinstance(f, (Exists, Forall)):
            tag = "exists" if isinstance(f, Exists) else "forall"
            inner = {**levels, f.var: depth}
            return tags[tag] + K * self._enc(f.body, inner, depth + 1)
        raise CodingError(f"cannot code {f!r}")

    def decode(self, code: int) -> Formula:
        return _decode(self, code, 0)


def _decode_term(c: int, depth: int):
    if c % 2 == 0:
        return DomConst(c // 2)
    return Var(f"v{(c - 1) // 2}")


def _decode_tuple(c: int, k: int) -> list:
    out = []
    for _ in range(k - 1):
        a, c = cantor_unpair(c)
        out.append(a)
    out.append(c)
    return out


def _decode(sc: SentenceCoding, code: int, depth: int) -> Formula:
    K = sc.modulus
    tag, payload = code % K, code // K
    r = len(sc._names)
    if tag == 0:
        a, b = cantor_unpair(payload)
        return Eq(_decode_term(a, depth), _decode_term(b, depth))
    if tag <= r:
        name = sc._names[tag - 1]
        k = sc.sig.arity(name)
        return Rel(name, tuple(_decode_term(c, depth) for c in _decode_tuple(payload, k)))
    tag -= r + 1
    if tag == 0:
        return Not(_decode(sc, payload, depth))
    if tag in (1, 2, 3):
        a, b = cantor_unpair(payload)
        cls = (And, Or, Implies)[tag - 1]
        return cls(_decode(sc, a, depth), _decode(sc, b, depth))
    cls = Exists if tag == 4 else Forall
    return cls(f"v{depth}", _decode(sc, payload, depth + 1))


@lru_cache(maxsize=None)
def sentence_coding(sig: Signature) -> SentenceCoding:
    return SentenceCoding(sig)


def is_sentence_code(sc: SentenceCoding, code: int) -> bool:
    return not free_vars(sc.decode(code))


# --- relationalization -----------------------------------------------------

def relationalize(f: Formula, sig: Signature) -> Formula:
    """Rewrite function applications and named constants via their graph
    relations, so that every atom has only variables and domain constants."""
    from .logic import all_var_names, fresh_name

    names = set(all_var_names(f))

    def fresh():
        n = fresh_name("z", names)
        names.add(n)
        return n

    def simple(t):
        return isinstance(t, (Var, DomConst))

    def graph_atom(t, value):
        if isinstance(t, App):
            return Rel(t.fn, tuple(t.args) + (value,))
        return Rel(t.name, (value,))

    def atom(a):
        if isinstance(a, Eq):
            l, r = a.left, a.right
            if isinstance(l, (App, Const)) and simple(r) and all(simple(x) for x in getattr(l, "args", ())):
                return graph_atom(l, r)
            if isinstance(r, (App, Const)) and simple(l) and all(simple(x) for x in getattr(r, "args", ())):
                return graph_atom(r, l)
        # pull out one innermost complex subterm
        target = _innermost_complex(a)
        if target is None:
            return a
        z = fresh()
        replaced = _replace_term(a, target, Var(z))
        return Exists(z, And(graph_atom(target, Var(z)), atom(replaced)))

    def go(g):
        if isinstance(g, (Rel, Eq)):
            return atom(g)
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.var, go(g.body))
        return g
    return go(f)


def _innermost_complex(a):
    from .logic import atom_terms

    def find(t):
        if isinstance(t, App):
            for x in t.args:
                r = find(x)
                if r is not None:
                    return r
            return t
        if isinstance(t, Const):
            return t
        return None
    for t in atom_terms(a):
        r = find(t)
        if r is not None:
            return r
    return None


def _replace_term(a, target, new):
    from .logic import map_terms

    def go(t):
        if t == target:
            return new
        if isinstance(t, App):
            return App(t.fn, tuple(go(x) for x in t.args))
        return t
    return map_terms(a, go)


def derelationalize(f: Formula, sig: Signature) -> Formula:
    """Inverse view: graph atoms become equations with function terms."""
    fun = sig.function_arity
    consts = set(sig.constants)

    def go(g):
        if isinstance(g, Rel):
            if g.name in fun and len(g.args) == fun[g.name] + 1:
                return Eq(App(g.name, tuple(g.args[:-1])), g.args[-1])
            if g.name in consts and len(g.args) == 1:
                return Eq(Const(g.name), g.args[0])
            return g
        if isinstance(g, Not):
            return Not(go(g.body))
        if isinstance(g, (And, Or, Implies)):
            return type(g)(go(g.left), go(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.var, go(g.body))
        return g
    return go(f)
