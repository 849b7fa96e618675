"""Structures with domain omega, seen through their atomic diagrams.

A presentation answers ``query(code)`` for atomic codes (see
:mod:`modelcomplete.coding`).  Each built-in family also exposes
``element(i)``, the abstract element that domain index i stands for, which
the classical truth oracles in :mod:`modelcomplete.theories` use.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .coding import Signature, atom_code, block_length, decode_atomic, encode_atomic
from .logic import DomConst, Eq, Formula, Not, Rel, conj
from .rationals import RATIONALS, UNIT_INTERIOR


class PresentationError(ValueError):
    pass


class InsufficientStages(LookupError):
    """A staged permutation was applied beyond its constructed prefix."""


# --- conditions and permutations -------------------------------------------

@dataclass(frozen=True)
class Condition:
    """Finite injective map defined on {0, ..., k-1}."""
    values: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(set(self.values)) != len(self.values):
            raise PresentationError(f"condition is not injective: {self.values}")
        if any(v < 0 for v in self.values):
            raise PresentationError("condition values must be natural numbers")

    def __len__(self):
        return len(self.values)

    def __call__(self, i: int) -> int:
        if not 0 <= i < len(self.values):
            raise InsufficientStages(f"condition of length {len(self)} undefined at {i}")
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    @property
    def domain(self) -> tuple:
        return tuple(range(len(self.values)))

    @property
    def range(self) -> frozenset:
        return frozenset(self.values)

    def extends(self, other: "Condition") -> bool:
        """q.extends(p) is q <= p in forcing order, i.e. q contains p."""
        return self.values[: len(other)] == other.values

    def extend(self, *vals) -> "Condition":
        return Condition(self.values + tuple(vals))

    def inverse(self) -> dict:
        return {v: i for i, v in enumerate(self.values)}

    def __str__(self):
        return "(" + ",".join(map(str, self.values)) + ")"


class FinitePermutation:
    """A bijection of omega moving finitely many points."""

    def __init__(self, mapping=None):
        mapping = {int(a): int(b) for a, b in dict(mapping or {}).items() if a != b}
        if set(mapping) != set(mapping.values()):
            raise PresentationError(f"not a permutation: {mapping}")
        self.mapping = mapping

    @classmethod
    def swap(cls, a: int, b: int) -> "FinitePermutation":
        return cls({a: b, b: a})

    @classmethod
    def completing(cls, values: Sequence[int]) -> "FinitePermutation":
        """The permutation sending i to values[i] for i < len(values) and
        pairing the leftover points of {0..M} in increasing order."""
        values = list(values)
        if len(set(values)) != len(values):
            raise PresentationError("values must be distinct")
        top = max([len(values) - 1] + values) if values else -1
        rest_dom = [i for i in range(len(values), top + 1)]
        rest_rng = sorted(set(range(top + 1)) - set(values))
        mapping = dict(enumerate(values))
        mapping.update(zip(rest_dom, rest_rng))
        return cls(mapping)

    def __call__(self, i: int) -> int:
        return self.mapping.get(i, i)

    def inverse(self) -> "FinitePermutation":
        return FinitePermutation({b: a for a, b in self.mapping.items()})

    @property
    def support(self) -> frozenset:
        return frozenset(self.mapping)

    def __eq__(self, other):
        return isinstance(other, FinitePermutation) and self.mapping == other.mapping

    def __hash__(self):
        return hash(frozenset(self.mapping.items()))

    def __repr__(self):
        return f"FinitePermutation({dict(sorted(self.mapping.items()))})"


class StagedPermutation:
    """The limit of a chain of conditions, known only up to its last stage."""

    def __init__(self, condition: Condition):
        self.condition = condition

    def __call__(self, i: int) -> int:
        return self.condition(i)

    def __repr__(self):
        return f"StagedPermutation{self.condition}"


# --- presentations ---------------------------------------------------------

class Presentation:
    """Base class: a structure with domain omega and an atomic-diagram oracle."""

    signature: Signature
    family: str = "abstract"

    def holds(self, rel: str, args: tuple) -> bool:
        raise NotImplementedError

    def element(self, i: int):
        raise NotImplementedError

    def model(self):
        """The abstract structure (for classical truth)."""
        raise NotImplementedError

    @property
    def spec(self) -> str:
        return self.family

    def query(self, code: int) -> int:
        atom = decode_atomic(code, self.signature)
        if isinstance(atom, Eq):
            return 0        # distinct constants name distinct elements
        return int(bool(self.holds(atom.name, tuple(a.index for a in atom.args))))

    def satisfies_atom(self, atom: Formula) -> bool:
        if isinstance(atom, Eq):
            return atom.left == atom.right
        return bool(self.holds(atom.name, tuple(a.index for a in atom.args)))

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec}>"


class SuccessorLine(Presentation):
    """(omega - {0..shift-1}, S): domain index i stands for i + shift.

    With ``zero=True`` the unary relation c0 names the least element, giving
    a copy of (omega, S, 0).
    """

    def __init__(self, shift: int = 0, zero: bool = False):
        if shift < 0:
            raise PresentationError("shift must be >= 0")
        self.shift = shift
        self.zero = zero
        if zero:
            self.signature = Signature.of(functions=[("S", 1)], constants=["c0"])
        else:
            self.signature = Signature.of(functions=[("S", 1)])
        self.family = "succ0" if zero else "succ"

    @property
    def spec(self):
        if self.zero:
            return "succ0" if self.shift == 0 else f"succ0:shift={self.shift}"
        return f"succ:shift={self.shift}"

    def element(self, i):
        return i + self.shift

    def holds(self, rel, args):
        if rel == "S":
            return args[1] == args[0] + 1
        if rel == "c0" and self.zero:
            return args[0] == 0
        raise PresentationError(f"unknown relation {rel!r}")

    def model(self):
        from .theories import SuccModel
        return SuccModel(lower=self.shift, zero=self.zero)


class DenseInterval(Presentation):
    """[0,1] of the rationals with constants lo, hi.

    Index 0 is 0, index 1 is 1, index k >= 2 is the (k-2)-th rational of
    (0,1) in Calkin-Wilf order.
    """
    family = "dlo01"

    def __init__(self):
        self.signature = Signature.of(relations=[("<", 2)], constants=["lo", "hi"])

    def element(self, i):
        if i == 0:
            return Fraction(0)
        if i == 1:
            return Fraction(1)
        return UNIT_INTERIOR[i - 2]

    def holds(self, rel, args):
        if rel == "<":
            return self.element(args[0]) < self.element(args[1])
        if rel == "lo":
            return args[0] == 0
        if rel == "hi":
            return args[0] == 1
        raise PresentationError(f"unknown relation {rel!r}")

    def model(self):
        from .theories import DenseModel
        return DenseModel(endpoints=(Fraction(0), Fraction(1)), consts={"lo": Fraction(0), "hi": Fraction(1)})


class IntervalUnion(Presentation):
    """The order on [0,1] u [2,3] u ... u [2n,2n+1] of the rationals.

    Named constants e0..e{2n+1} pick out the endpoints, which sit at indices
    0..2n+1 (index j is the rational j).  Index 2n+2 + k(n+1) + i is
    2i + q_k for q_k the k-th rational of (0,1) in Calkin-Wilf order.
    """
    family = "a_n"

    def __init__(self, n: int):
        if n < 0:
            raise PresentationError("n must be >= 0")
        self.n = n
        self.endpoints = [f"e{j}" for j in range(2 * n + 2)]
        self.signature = Signature.of(relations=[("<", 2)], constants=self.endpoints)

    @property
    def spec(self):
        return f"a_n:n={self.n}"

    def element(self, i):
        m = 2 * self.n + 2
        if i < m:
            return Fraction(i)
        k, j = divmod(i - m, self.n + 1)
        return 2 * j + UNIT_INTERIOR[k]

    def holds(self, rel, args):
        if rel == "<":
            return self.element(args[0]) < self.element(args[1])
        if rel in self.endpoints:
            return args[0] == int(rel[1:])
        raise PresentationError(f"unknown relation {rel!r}")

    def model(self):
        from .theories import DenseModel
        pts = [Fraction(j) for j in range(2 * self.n + 2)]
        return DenseModel(endpoints=tuple(pts), consts={f"e{j}": p for j, p in enumerate(pts)})


class Shuffle(Presentation):
    """Q x {0,1} ordered lexicographically, optionally with Adj.

    Index 2k is (q_k, 0) and 2k+1 is (q_k, 1) where q_k enumerates Q as 0,
    then q, -q over the Calkin-Wilf sequence.
    """

    def __init__(self, adj: bool = False):
        self.adj = adj
        rels = [("<", 2), ("Adj", 2)] if adj else [("<", 2)]
        self.signature = Signature(tuple(rels))
        self.family = "shuffle+adj" if adj else "shuffle"

    def element(self, i):
        k, side = divmod(i, 2)
        return (RATIONALS[k], side)

    def holds(self, rel, args):
        a, b = self.element(args[0]), self.element(args[1])
        if rel == "<":
            return a < b
        if rel == "Adj" and self.adj:
            return a[0] == b[0] and a[1] == 0 and b[1] == 1
        raise PresentationError(f"unknown relation {rel!r}")

    def model(self):
        from .theories import ShuffleModel
        return ShuffleModel(adj=self.adj)


class Pullback(Presentation):
    """B with B |= R(b...) iff base |= R(f(b)...); f: B -> base is an isomorphism."""

    def __init__(self, base: Presentation, perm):
        self.base = base
        self.perm = perm
        self.signature = base.signature
        self.family = base.family

    @property
    def spec(self):
        m = getattr(self.perm, "mapping", None)
        if m is not None:
            pairs = ",".join(f"{a}-{b}" for a, b in sorted(m.items()))
            return f"pullback:{self.base.spec}:{pairs}"
        return f"pullback:{self.base.spec}:{self.perm!r}"

    def element(self, i):
        return self.base.element(self.perm(i))

    def holds(self, rel, args):
        return self.base.holds(rel, tuple(self.perm(a) for a in args))

    def model(self):
        return self.base.model()


def pullback(P: Presentation, f) -> Presentation:
    if isinstance(f, Condition):
        f = StagedPermutation(f)
    return Pullback(P, f)


def make_builtin(family: str, **params) -> Presentation:
    family = family.strip()
    if family in ("succ", "succ0"):
        shift = int(params.pop("shift", 0))
        if params:
            raise PresentationError(f"unexpected parameters {sorted(params)}")
        return SuccessorLine(shift, zero=(family == "succ0"))
    if params and family not in ("a_n",):
        raise PresentationError(f"{family} takes no parameters")
    if family == "dlo01":
        return DenseInterval()
    if family == "a_n":
        if "n" not in params:
            raise PresentationError("a_n needs n")
        return IntervalUnion(int(params["n"]))
    if family == "shuffle":
        return Shuffle(adj=False)
    if family == "shuffle+adj":
        return Shuffle(adj=True)
    raise PresentationError(f"unknown presentation family {family!r}")


FAMILIES = {
    "succ": "(omega - {0..shift-1}, S); params shift>=0",
    "succ0": "(omega, S, 0) with c0 naming the least element",
    "dlo01": "rationals of [0,1] with endpoint constants lo, hi",
    "a_n": "union of n+1 rational intervals [2i,2i+1] with 2n+2 endpoint constants; params n>=0",
    "shuffle": "Q x {0,1}, lexicographic order (every point doubled)",
    "shuffle+adj": "Q x {0,1} with the adjacency relation Adj",
    "pullback": "pullback:<base>:<a-b,...> pulls <base> back along a finite permutation",
}


def parse_presentation(spec: str) -> Presentation:
    """Parse CLI presentation specs such as ``succ:shift=1`` or
    ``pullback:dlo01:0-5,5-0`` (``a~b`` is shorthand for a swap)."""
    spec = spec.strip()
    if spec.startswith("pullback:"):
        rest = spec[len("pullback:"):]
        base_spec, _, pairs = rest.rpartition(":")
        if not base_spec:
            raise PresentationError("pullback needs pullback:<base>:<pairs>")
        mapping = {}
        for item in filter(None, pairs.split(",")):
            if "~" in item:
                a, b = map(int, item.split("~"))
                mapping[a], mapping[b] = b, a
            else:
                a, b = map(int, item.split("-"))
                mapping[a] = b
        return Pullback(parse_presentation(base_spec), FinitePermutation(mapping))
    family, *rest = spec.split(":")
    params = {}
    for item in rest:
        for kv in filter(None, item.split(",")):
            k, _, v = kv.partition("=")
            if not _:
                raise PresentationError(f"bad parameter {kv!r}")
            params[k] = v
    return make_builtin(family, **params)


# --- finite diagrams -------------------------------------------------------

def block_index(length: int, sig: Signature) -> int:
    """n with block_length(n) == length, else PresentationError."""
    n = 0
    while block_length(n, sig) < length:
        n += 1
    if block_length(n, sig) != length:
        raise PresentationError(f"length {length} is not a block boundary")
    return n


def initial_segment(P: Presentation, n: int) -> str:
    """Delta(P) restricted to {0..n}, as a bit string of length l_n."""
    return "".join(str(P.query(c)) for c in range(block_length(n, P.signature)))


def gamma_sigma(sigma: str, sig: Signature) -> Formula:
    """The quantifier-free description of a finite diagram string.

    Literals follow the code order; distinctness of all constants follows,
    skipping pairs whose inequality is already a literal.
    """
    m = block_index(len(sigma), sig)
    lits = []
    negated_eq = set()
    for code, bit in enumerate(sigma):
        atom = decode_atomic(code, sig)
        if bit == "1":
            lits.append(atom)
        else:
            lits.append(Not(atom))
            if isinstance(atom, Eq):
                negated_eq.add((atom.left.index, atom.right.index))
    for i, j in itertools.combinations(range(m + 1), 2):
        if (i, j) not in negated_eq:
            lits.append(Not(Eq(DomConst(i), DomConst(j))))
    return conj(*lits)


def respects_equality(sigma: str, sig: Signature) -> bool:
    for code, bit in enumerate(sigma):
        if bit == "1" and isinstance(decode_atomic(code, sig), Eq):
            return False
    return True


def delta_restrict(P: Presentation, elems: Sequence[int]) -> frozenset:
    """All atomic and negated atomic facts of P about exactly these elements."""
    elems = list(elems)
    if len(set(elems)) != len(elems):
        raise PresentationError(f"repeated entries in {elems}")
    out = set()
    for a, b in itertools.combinations(sorted(elems), 2):
        out.add(Not(Eq(DomConst(a), DomConst(b))))
    for rel, k in P.signature.relations:
        for tup in itertools.product(elems, repeat=k):
            atom = Rel(rel, tuple(DomConst(i) for i in tup))
            out.add(atom if P.holds(rel, tup) else Not(atom))
    return frozenset(out)


def condition_diagram(A: Presentation, q: Condition) -> str:
    """Delta of the finite structure q^{-1}(A) on dom(q), as a bit string."""
    if len(q) == 0:
        return ""
    return initial_segment(pullback(A, q), len(q) - 1)


def canonicalize(E: Presentation, e: Sequence[int], p: Condition) -> tuple:
    """Permute an initial segment of E so that index i plays E's e[i].

    Returns (C, perm) with C = pullback(E, perm) and perm(i) = e[i] for
    i < len(p); uniform in (E, e) and p.
    """
    e = list(e)
    if len(e) != len(p):
        raise PresentationError(f"tuple length {len(e)} != condition length {len(p)}")
    if not e:
        return E, FinitePermutation()
    perm = FinitePermutation.completing(e)
    return Pullback(E, perm), perm


__all__ = [
    "Condition", "FinitePermutation", "StagedPermutation", "InsufficientStages",
    "Presentation", "SuccessorLine", "DenseInterval", "IntervalUnion", "Shuffle",
    "Pullback", "pullback", "make_builtin", "parse_presentation", "FAMILIES",
    "initial_segment", "gamma_sigma", "delta_restrict", "canonicalize",
    "condition_diagram", "respects_equality", "block_index", "PresentationError",
    "atom_code", "encode_atomic",
]
