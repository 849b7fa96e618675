"""Deciding elementary diagrams from atomic diagrams.

For a model complete theory every formula is equivalent to a universal
one, and so is its negation.  Given a sentence phi(a) we therefore search
tuples b for a failure of alpha(a, b) or of beta(a, b): whichever matrix
fails first identifies the false universal, hence the truth value.
"""
from __future__ import annotations

import itertools
from functools import lru_cache
from dataclasses import dataclass, field

from .coding import (
    atom_code, block_length, decode_atomic, is_sentence_code, relationalize,
    sentence_coding,
)
from .logic import (
    FALSE, TRUE, And, App, Const, DomConst, Eq, Formula, Implies, Not, Or, Rel,
    Var, free_vars, instantiate, rename_domain_constants, show, _natural_key,
)
from .oracle import (
    Diverged, ExpandedOracle, Functional, LoggingOracle, Oracle,
    PrefixOracle, PresentationOracle, Steps, Timeout,
)
from .presentations import Condition, Presentation
from .theories import TH_SUCC0, TheoryDescriptor, UnsupportedTheory, qe_universal_pair


class NotModelComplete(UnsupportedTheory):
    pass


def as_oracle(P) -> Oracle:
    return PresentationOracle(P) if isinstance(P, Presentation) else P


class DiagramView:
    """Quantifier-free evaluation against an atomic-diagram oracle.

    Function values and constants are found by searching their graph
    relations; every element has exactly one image, so the searches halt.
    """

    def __init__(self, oracle: Oracle, steps: Steps):
        self.oracle = oracle
        self.steps = steps
        self.sig = oracle.signature
        self._terms = {}

    def holds(self, rel, args) -> bool:
        return bool(self.oracle.ask(atom_code(self.sig, rel, tuple(args))))

    def _search(self, key, rel, prefix):
        if key in self._terms:
            return self._terms[key]
        z = 0
        while not self.holds(rel, prefix + (z,)):
            self.steps.tick()
            z += 1
        self._terms[key] = z
        return z

    def value(self, t, env) -> int:
        if isinstance(t, DomConst):
            return t.index
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Const):
            return self._search(t.name, t.name, ())
        if isinstance(t, App):
            args = tuple(self.value(a, env) for a in t.args)
            return self._search((t.fn, args), t.fn, args)
        raise TypeError(t)

    def truth(self, f: Formula, env=None) -> bool:
        env = env or {}
        if isinstance(f, Eq):
            return self.value(f.left, env) == self.value(f.right, env)
        if isinstance(f, Rel):
            return self.holds(f.name, tuple(self.value(a, env) for a in f.args))
        if isinstance(f, Not):
            return not self.truth(f.body, env)
        if isinstance(f, And):
            return self.truth(f.left, env) and self.truth(f.right, env)
        if isinstance(f, Or):
            return self.truth(f.left, env) or self.truth(f.right, env)
        if isinstance(f, Implies):
            return (not self.truth(f.left, env)) or self.truth(f.right, env)
        if f == TRUE:
            return True
        if f == FALSE:
            return False
        raise UnsupportedTheory(f"quantified matrix: {show(f)}")


def tuples_by_max(m: int):
    """omega^m by increasing maximum, lexicographic within each maximum."""
    if m == 0:
        yield ()
        return
    top = 0
    while True:
        for t in itertools.product(range(top + 1), repeat=m):
            if max(t) == top:
                yield t
        top += 1


@dataclass
class DecisionTrace:
    verdict: str
    alpha: str = ""
    beta: str = ""
    m: int = 0
    witness: list = field(default_factory=list)
    failed: str = ""
    queries: list = field(default_factory=list)
    steps: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def use(self) -> int:
        return max(self.queries) + 1 if self.queries else 0

    def to_dict(self):
        out = {"verdict": self.verdict,
               "qe": {"alpha": self.alpha, "beta": self.beta, "m": self.m},
               "witness": list(self.witness), "failed": self.failed,
               "queries": list(self.queries), "steps": self.steps}
        out.update(self.extra)
        return out


def _logged(oracle, steps):
    if isinstance(oracle, (LoggingOracle, ExpandedOracle)):
        return oracle
    return LoggingOracle(oracle, steps)


def _base_log(oracle):
    while not isinstance(oracle, LoggingOracle):
        oracle = getattr(oracle, "base", None)
        if oracle is None:
            return []
    return list(oracle.log)


def decide_mc(T: TheoryDescriptor, P, s: Formula, budget: int = 10**6,
              steps: Steps | None = None):
    """Decide P |= s for a model of the model complete theory T.

    Returns (bit, trace); bit is None when the budget runs out.
    """
    if not T.is_model_complete:
        raise NotModelComplete(f"{T.id} is not model complete")
    if free_vars(s):
        raise UnsupportedTheory(f"not a sentence: {show(s)}")
    steps = steps or Steps(budget)
    oracle = _logged(as_oracle(P), steps)
    pair = qe_universal_pair(T, s)
    trace = DecisionTrace("timeout", show(pair.alpha), show(pair.beta), pair.m)
    view = DiagramView(oracle, steps)
    try:
        for b in tuples_by_max(pair.m):
            steps.tick()
            env = dict(zip(pair.ys, b))
            if not view.truth(pair.alpha, env):
                trace.verdict, trace.failed, trace.witness = "false", "alpha", list(b)
                break
            if not view.truth(pair.beta, env):
                trace.verdict, trace.failed, trace.witness = "true", "beta", list(b)
                break
    except Timeout:
        pass
    trace.queries = _base_log(oracle)
    trace.steps = steps.used
    bit = {"true": 1, "false": 0}.get(trace.verdict)
    return bit, trace


def translate(s: Formula, perm) -> Formula:
    """The sentence about pullback(P, perm) saying what s says about P."""
    inv = perm.inverse()
    return rename_domain_constants(s, inv)


# --- (omega, S) without a named zero --------------------------------------

def locate_nonsuccessor(oracle: Oracle, steps: Steps, w0: int = 4, k: int = 3):
    """Find the element with no S-predecessor by growing windows.

    In the window {0..w} the candidates are the elements with no
    predecessor inside the window.  We commit once the candidate set is
    the same singleton for k consecutive doublings.
    """
    view = DiagramView(oracle, steps)
    history = []
    w = w0
    while True:
        view.holds("S", (w, w))     # the window's last atom: fail fast on short prefixes
        cands = [x for x in range(w + 1)
                 if not any(view.holds("S", (y, x)) for y in range(w + 1))]
        history.append({"window": w, "candidates": cands})
        recent = history[-(k + 1):]
        if len(recent) == k + 1 and all(h["candidates"] == cands for h in recent) \
                and len(cands) == 1:
            return cands[0], history
        w *= 2


def decide_succ_nonuniform(P, s: Formula, budget: int = 10**6, k: int = 3, w0: int = 4,
                           steps: Steps | None = None):
    """Decide a copy of (omega, S) by first naming its least element."""
    steps = steps or Steps(budget)
    oracle = _logged(as_oracle(P), steps)
    try:
        z, history = locate_nonsuccessor(oracle, steps, w0, k)
    except Timeout:
        trace = DecisionTrace("timeout", queries=_base_log(oracle), steps=steps.used)
        return None, trace
    expanded = ExpandedOracle(oracle, "c0", z)
    bit, trace = decide_mc(TH_SUCC0, expanded, s, steps=steps)
    trace.extra = {"zero": z, "windows": history}
    return bit, trace


# --- functionals ------------------------------------------------------------

def _decode_input(oracle, n):
    return _decode_sentence(oracle.signature, n)


@lru_cache(maxsize=65536)
def _decode_sentence(sig, n):
    sc = sentence_coding(sig)
    if not is_sentence_code(sc, n):
        return None
    return sc.decode(n)


def _verdict(bit, trace):
    if bit is None:
        raise Timeout(trace.steps)
    return bit, trace


def as_functional(T: TheoryDescriptor) -> Functional:
    """The single oracle program deciding E(A) from Delta(A) for every
    presentation A of a model of T."""
    if not T.is_model_complete:
        raise NotModelComplete(f"{T.id} is not model complete")

    def program(oracle, n, steps):
        s = _decode_input(oracle, n)
        if s is None:
            return 0
        return _verdict(*decide_mc(T, oracle, s, steps=steps))

    return Functional(f"gamma:{T.id}", program,
                      f"uniform elementary-diagram decider for {T.name}")


def zero_anchored_program(oracle, n, steps):
    # treats element 0 as the non-successor, right only on some copies
    s = _decode_input(oracle, n)
    if s is None:
        return 0
    return _verdict(*decide_mc(TH_SUCC0, ExpandedOracle(oracle, "c0", 0), s, steps=steps))


def nonuniform_program(oracle, n, steps):
    s = _decode_input(oracle, n)
    if s is None:
        return 0
    return _verdict(*decide_succ_nonuniform(oracle, s, steps=steps))


def always_diverge_program(oracle, n, steps):
    raise Diverged()


def atomic_reader_program(oracle, n, steps):
    """Answers quantifier-free sentences by reading the oracle directly and
    diverges on anything else; used to exercise lowness bookkeeping."""
    s = _decode_input(oracle, n)
    if s is None or not isinstance(s, (Rel, Eq, Not)):
        raise Diverged()
    view = DiagramView(oracle, steps)
    try:
        return int(view.truth(s))
    except UnsupportedTheory:
        raise Diverged() from None


# --- local search ------------------------------------------------------------

@dataclass
class LocalEvidence:
    n: int
    sigma: str
    b: tuple
    bit: int


def local_search_decide(phi_e: Functional, C: Presentation, p: Condition, phi: Formula,
                        c: tuple = (), budget: int = 10**5, run_budget: int | None = None):
    """Search (n, sigma, b) with phi_e^sigma converging on phi(c, d_p).

    The free variables of phi (in natural order) are bound to c followed by
    d_p = (0, ..., |p|-1).  For each n, b ranges over permutations of
    {0..n} fixing c and d_p; sigma is then forced to be the diagram of C
    pulled back along i -> b_i.  Returns (bit, evidence) or (None, None).
    """
    d = tuple(range(len(p)))
    params = tuple(c) + d
    xs = sorted(free_vars(phi), key=_natural_key)
    if len(xs) > len(params):
        raise ValueError(f"{len(xs)} free variables but {len(params)} parameters")
    sentence = instantiate(phi, dict(zip(xs, params)))
    sig = C.signature
    code = sentence_coding(sig).encode(relationalize(sentence, sig))
    fixed = set(params)
    n0 = max(params, default=0)
    spent = 0
    run_budget = run_budget or budget
    n = n0
    while spent < budget:
        free = [i for i in range(n + 1) if i not in fixed]
        for perm in itertools.permutations(free):
            b = list(range(n + 1))
            for i, v in zip(free, perm):
                b[i] = v
            sigma = _pullback_diagram(C, b)
            res = phi_e.run(PrefixOracle(sigma, sig), code, min(run_budget, budget - spent))
            spent += max(res.steps, 1)
            if res.converged:
                return res.bit, LocalEvidence(n, sigma, tuple(b), res.bit)
            if spent >= budget:
                break
        n += 1
    return None, None


def _pullback_diagram(C: Presentation, b) -> str:
    sig = C.signature
    out = []
    for code in range(block_length(len(b) - 1, sig)):
        atom = decode_atomic(code, sig)
        if isinstance(atom, Eq):
            out.append("0")
        else:
            out.append("1" if C.holds(atom.name, tuple(b[a.index] for a in atom.args)) else "0")
    return "".join(out)


__all__ = [
    "DiagramView", "DecisionTrace", "decide_mc", "decide_succ_nonuniform",
    "locate_nonsuccessor", "as_functional", "local_search_decide", "LocalEvidence",
    "translate", "tuples_by_max", "NotModelComplete",
]
