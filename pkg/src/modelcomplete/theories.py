"""Theory descriptors, classical truth in canonical models, QE registry.

Truth in the canonical models is computed by the test-point method: each
quantifier ranges over a finite set of candidates that is guaranteed to
contain a representative of every type over the values already fixed.
This is independent of the symbolic eliminators in :mod:`modelcomplete.qe`,
which the tests cross-check against it.
"""
from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import qe
from .coding import Signature, derelationalize
from .logic import (
    FALSE, TRUE, And, App, Const, DomConst, Eq, Exists, Forall, Formula, Implies,
    Not, Or, Rel, Var, abstract_domain_constants, domain_constants, free_vars,
    fresh_name, all_var_names, instantiate, substitute, neg, quantifier_rank, show, subterms,
    term_depth, _natural_key,
)
from .presentations import (
    DenseInterval, Presentation, Shuffle, SuccessorLine,
)


class UnsupportedTheory(ValueError):
    pass


# --- canonical models ------------------------------------------------------

class Model:
    """An abstract structure with a finite candidate set per quantifier."""
    consts: dict = {}

    def const(self, name):
        try:
            return self.consts[name]
        except KeyError:
            raise UnsupportedTheory(f"unknown constant {name!r}") from None

    def apply(self, fn, args):
        raise UnsupportedTheory(f"unknown function {fn!r}")

    def rel(self, name, args) -> bool:
        raise NotImplementedError

    def candidates(self, node, anchors):
        raise NotImplementedError


@dataclass
class SuccModel(Model):
    """{n : n >= lower} under n -> n+1, optionally naming lower as c0."""
    lower: int = 0
    zero: bool = False

    @property
    def consts(self):
        return {"c0": self.lower} if self.zero else {}

    def apply(self, fn, args):
        if fn == "S":
            return args[0] + 1
        return super().apply(fn, args)

    def rel(self, name, args):
        if name == "S":
            return args[1] == args[0] + 1
        if name == "c0" and self.zero:
            return args[0] == self.lower
        raise UnsupportedTheory(f"unknown relation {name!r}")

    def candidates(self, node, anchors):
        # Two points realise the same type over the anchors once they agree
        # on all offsets within the radius; everything farther is alike.
        depth = max((term_depth(t) for t in subterms(node)), default=0)
        radius = (depth + 1) * 2 ** quantifier_rank(node) + 1
        base = set(anchors) | {self.lower}
        out = {a + d for a in base for d in range(-radius, radius + 1)}
        out = {v for v in out if v >= self.lower}
        out.add(max(base) + 2 * radius + 1)
        return sorted(out)


@dataclass
class DenseModel(Model):
    """A finite union of closed rational intervals [e0,e1] u [e2,e3] u ...."""
    endpoints: tuple = (Fraction(0), Fraction(1))
    consts: dict = field(default_factory=dict)

    def contains(self, v):
        e = self.endpoints
        return any(e[2 * i] <= v <= e[2 * i + 1] for i in range(len(e) // 2))

    def rel(self, name, args):
        if name == "<":
            return args[0] < args[1]
        if name in self.consts:
            return args[0] == self.consts[name]
        raise UnsupportedTheory(f"unknown relation {name!r}")

    def candidates(self, node, anchors):
        pts = sorted(set(anchors) | set(self.endpoints))
        mids = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
        return pts + [m for m in mids if self.contains(m)]


@dataclass
class ShuffleModel(Model):
    """Q x {0,1} in lexicographic order; Adj links (q,0) to (q,1)."""
    adj: bool = False

    def rel(self, name, args):
        a, b = args
        if name == "<":
            return a < b
        if name == "Adj" and self.adj:
            return a[0] == b[0] and a[1] == 0 and b[1] == 1
        raise UnsupportedTheory(f"unknown relation {name!r}")

    def candidates(self, node, anchors):
        qs = sorted({a[0] for a in anchors})
        if not qs:
            qs = [Fraction(0)]
        extra = [(a + b) / 2 for a, b in zip(qs, qs[1:])] + [qs[0] - 1, qs[-1] + 1]
        return [(q, s) for q in qs + extra for s in (0, 1)]


def model_truth(model: Model, f: Formula, element: Callable = None, env=None) -> bool:
    """Truth of f in ``model``; domain constants #i denote element(i)."""
    anchors = set()
    if element is not None:
        anchors = {element(i) for i in domain_constants(f)}
    anchors |= set(model.consts.values())

    def value(t, env):
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, DomConst):
            return element(t.index)
        if isinstance(t, Const):
            return model.const(t.name)
        if isinstance(t, App):
            return model.apply(t.fn, tuple(value(a, env) for a in t.args))
        raise TypeError(t)

    def go(f, env):
        if isinstance(f, Rel):
            return model.rel(f.name, tuple(value(a, env) for a in f.args))
        if isinstance(f, Eq):
            return value(f.left, env) == value(f.right, env)
        if isinstance(f, Not):
            return not go(f.body, env)
        if isinstance(f, And):
            return go(f.left, env) and go(f.right, env)
        if isinstance(f, Or):
            return go(f.left, env) or go(f.right, env)
        if isinstance(f, Implies):
            return (not go(f.left, env)) or go(f.right, env)
        if isinstance(f, (Exists, Forall)):
            pts = model.candidates(f, anchors | set(env.values()))
            test = any if isinstance(f, Exists) else all
            return test(go(f.body, {**env, f.var: v}) for v in pts)
        if f == TRUE:
            return True
        if f == FALSE:
            return False
        raise TypeError(f)

    return go(f, dict(env or {}))


# --- descriptors -----------------------------------------------------------

@dataclass(frozen=True)
class UniversalPair:
    """phi <-> forall ys alpha and ~phi <-> forall ys beta, over free variables xs."""
    alpha: Formula
    beta: Formula
    ys: tuple
    xs: tuple = ()

    @property
    def m(self) -> int:
        return len(self.ys)

    def __iter__(self):
        return iter((self.alpha, self.beta, self.m))


@dataclass(frozen=True)
class TheoryDescriptor:
    id: str
    name: str
    signature: Signature
    canonical_factory: Callable[[], Presentation]
    eliminator: Callable | None
    is_model_complete: bool
    docs: str = ""
    test_validated: bool = False

    @property
    def canonical(self) -> Presentation:
        return self.canonical_factory()

    @property
    def constants(self) -> tuple:
        return self.signature.constants

    def qe_universal(self, phi: Formula) -> UniversalPair:
        return qe_universal_pair(self, phi)

    def classical_truth(self, s: Formula, P: Presentation | None = None) -> bool:
        return classical_truth(self, s, P)


def _plain_qe(fn):
    def run(phi, xs):
        psi = fn(phi)
        return psi, neg(psi), ()
    return run


def _adj_qe(phi, xs):
    taken = all_var_names(phi) | set(xs)
    ys = []
    for _ in xs:
        y = fresh_name("y", taken)
        taken.add(y)
        ys.append(y)
    alpha, beta = qe.adj_universal(phi, list(xs), ys)
    return alpha, beta, tuple(ys)


TH_SUCC0 = TheoryDescriptor(
    id="succ0", name="Th(omega, S, 0)",
    signature=Signature.of(functions=[("S", 1)], constants=["c0"]),
    canonical_factory=lambda: SuccessorLine(0, zero=True),
    eliminator=_plain_qe(qe.qe_succ),
    is_model_complete=True,
    docs="Successor with a zero constant; eliminates to equations between S^k-terms.",
)

TH_SUCC = TheoryDescriptor(
    id="succ", name="Th(omega, S)",
    signature=Signature.of(functions=[("S", 1)]),
    canonical_factory=lambda: SuccessorLine(0),
    eliminator=None,
    is_model_complete=False,
    docs="Successor without zero. Not model complete: the inclusion of "
         "(omega - {0}, S) into (omega, S) embeds one model in another but is "
         "not elementary.",
)

DLOPP = TheoryDescriptor(
    id="dlo++", name="DLO with endpoints",
    signature=Signature.of(relations=[("<", 2)], constants=["lo", "hi"]),
    canonical_factory=DenseInterval,
    eliminator=_plain_qe(lambda f: qe.qe_dense(f, (Const("lo"), Const("hi")))),
    is_model_complete=True,
    docs="Dense linear order with least element lo and greatest element hi.",
)

ADJ = TheoryDescriptor(
    id="adj", name="Th(B*)",
    signature=Signature((("<", 2), ("Adj", 2))),
    canonical_factory=lambda: Shuffle(adj=True),
    eliminator=_adj_qe,
    is_model_complete=True,
    docs="Q x {0,1} with Adj. Equivalents are universal in one auxiliary "
         "variable per parameter; validated by tests, not by proof.",
    test_validated=True,
)

_REGISTRY = (TH_SUCC0, DLOPP, ADJ, TH_SUCC)


def registry() -> list:
    return list(_REGISTRY)


def get_theory(theory_id: str) -> TheoryDescriptor:
    for t in _REGISTRY:
        if t.id == theory_id:
            return t
    raise KeyError(f"unknown theory {theory_id!r}; known: {[t.id for t in _REGISTRY]}")


# --- operations ------------------------------------------------------------

def qe_universal_pair(T: TheoryDescriptor, phi: Formula) -> UniversalPair:
    """Universal equivalents of phi and ~phi with quantifier-free matrices.

    Domain constants in phi are abstracted to variables for elimination and
    put back afterwards.
    """
    return _qe_cached(T, phi)


@lru_cache(maxsize=4096)
def _qe_cached(T: TheoryDescriptor, phi: Formula) -> UniversalPair:
    if T.eliminator is None:
        raise UnsupportedTheory(f"{T.id} is not model complete")
    body, names, idx = abstract_domain_constants(phi, prefix="p")
    body = derelationalize(body, T.signature)
    xs = tuple(sorted(free_vars(body), key=_natural_key))
    try:
        alpha, beta, ys = T.eliminator(body, xs)
    except qe.UnsupportedFormula as exc:
        raise UnsupportedTheory(str(exc)) from None
    back = {n: DomConst(i) for n, i in zip(names, idx)}
    alpha, beta = substitute(alpha, back), substitute(beta, back)
    return UniversalPair(alpha, beta, tuple(ys), tuple(x for x in xs if x not in back))


def classical_truth(T: TheoryDescriptor, s: Formula, P: Presentation | None = None) -> bool:
    """Truth of sentence s in the canonical model (or in presentation P)."""
    if free_vars(s):
        raise UnsupportedTheory(f"not a sentence: free {sorted(free_vars(s))}")
    P = P or T.canonical
    return model_truth(P.model(), s, P.element)


def close_universal(ys, alpha: Formula) -> Formula:
    for y in reversed(ys):
        alpha = Forall(y, alpha)
    return alpha


@dataclass
class QEReport:
    theory: str
    formula: str
    samples: int
    mismatches: list = field(default_factory=list)
    dichotomy_failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.dichotomy_failures

    def to_dict(self):
        return {"theory": self.theory, "formula": self.formula, "samples": self.samples,
                "mismatches": self.mismatches, "dichotomy_failures": self.dichotomy_failures,
                "ok": self.ok}


def verify_qe(T: TheoryDescriptor, phi: Formula, samples: int = 100, seed: int = 0,
              pair: UniversalPair | None = None, max_index: int = 40) -> QEReport:
    """Compare phi with its universal forms on random parameters of the
    canonical model.  ``pair`` overrides the computed equivalents."""
    rng = random.Random(seed)
    pair = pair or qe_universal_pair(T, phi)
    xs = sorted(free_vars(phi), key=_natural_key)
    report = QEReport(T.id, show(phi), samples)
    for _ in range(samples):
        values = {x: rng.randrange(max_index) for x in xs}
        truth = classical_truth(T, instantiate(phi, values))
        a = classical_truth(T, close_universal(pair.ys, instantiate(pair.alpha, values)))
        b = classical_truth(T, close_universal(pair.ys, instantiate(pair.beta, values)))
        if a != truth or b != (not truth):
            report.mismatches.append({"params": values, "phi": truth, "alpha": a, "beta": b})
        if a == b:
            report.dichotomy_failures.append({"params": values, "alpha": a, "beta": b})
    return report


# --- random formulas -------------------------------------------------------

def random_atom(T: TheoryDescriptor, rng: random.Random, terms: list) -> Formula:
    pick = lambda: rng.choice(terms)
    if T.id in ("succ0", "succ"):
        def sterm():
            t = pick()
            for _ in range(rng.randrange(3)):
                t = App("S", (t,))
            return t
        return Eq(sterm(), sterm())
    if T.id == "adj" and rng.random() < 0.4:
        return Rel("Adj", (pick(), pick()))
    if rng.random() < 0.3:
        return Eq(pick(), pick())
    return Rel("<", (pick(), pick()))


def random_formula(T: TheoryDescriptor, rng: random.Random, free: list,
                   rank: int = 2, size: int = 4) -> Formula:
    """A random formula of quantifier rank <= rank over the given free
    variables (plus the theory's constants)."""
    counter = [0]

    def go(scope, rank, size):
        if size <= 1 or (rank == 0 and rng.random() < 0.4):
            terms = [Var(v) for v in scope] + [Const(c) for c in T.constants]
            if not terms:
                return TRUE
            return random_atom(T, rng, terms)
        roll = rng.random()
        if rank > 0 and roll < 0.4:
            counter[0] += 1
            v = f"z{counter[0]}"
            body = go(scope + [v], rank - 1, size - 1)
            return Exists(v, body) if rng.random() < 0.5 else Forall(v, body)
        if roll < 0.55:
            return Not(go(scope, rank, size - 1))
        k = rng.choice([And, Or, Implies])
        return k(go(scope, rank, size // 2), go(scope, rank, size - size // 2))

    return go(list(free), rank, size)


def random_sentence(T: TheoryDescriptor, rng: random.Random, rank: int = 2,
                    size: int = 5, params: int = 2, max_index: int = 12) -> Formula:
    xs = [f"x{i}" for i in range(params)]
    f = random_formula(T, rng, xs, rank, size)
    return instantiate(f, {x: rng.randrange(max_index) for x in xs if x in free_vars(f)})
