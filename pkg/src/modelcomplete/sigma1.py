"""Computable infinitary Sigma_1 equivalents from a uniform decider.

Given a functional Gamma deciding elementary diagrams from atomic ones,
H_alpha collects the finite diagram strings sigma on which Gamma accepts
alpha(c_0, ..., c_n).  The disjunction over H_alpha of the existential
closures of gamma_sigma is then equivalent to alpha.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .coding import Signature, block_length, decode_atomic, relationalize, sentence_coding
from .decider import DiagramView
from .logic import (
    DomConst, Eq, Exists, Formula, Var, conj, conjuncts, expand_equality_cases, free_vars,
    instantiate,
    map_terms, show, _natural_key,
)
from .oracle import Functional, PrefixOracle, PresentationOracle, Steps
from .presentations import block_index, gamma_sigma, initial_segment


def sigma_strings(sig: Signature, pruned: bool = True):
    """Diagram strings of block lengths l_0, l_1, ..., each block in
    binary counting order (first position most significant).

    With ``pruned`` the bits of equality atoms c_i = c_j are held at 0.
    """
    n = 0
    while True:
        length = block_length(n, sig)
        free = [c for c in range(length)
                if not (pruned and isinstance(decode_atomic(c, sig), Eq))]
        for k in range(2 ** len(free)):
            bits = ["0"] * length
            for pos, ch in zip(free, format(k, f"0{len(free)}b") if free else ""):
                bits[pos] = ch
            yield n, "".join(bits)
        n += 1


@dataclass
class HAlphaEnumerator:
    """Stagewise enumeration of H_alpha.

    At stage s the first s strings of :func:`sigma_strings` have been run
    through Gamma with step budget s.  Runs that exhausted their budget are
    retried at later stages, so stage results are monotone.
    """
    gamma: Functional
    alpha: Formula
    signature: Signature
    pruned: bool = True
    stage: int = 0
    found: list = field(default_factory=list)

    def __post_init__(self):
        self.variables = sorted(free_vars(self.alpha), key=_natural_key)
        self.n = len(self.variables) - 1
        sentence = instantiate(self.alpha, {x: i for i, x in enumerate(self.variables)})
        self.code = sentence_coding(self.signature).encode(relationalize(sentence, self.signature))
        self._strings = sigma_strings(self.signature, self.pruned)
        self._pending = []          # (sigma, m) whose runs ran out of budget

    def _run(self, sigma, m, budget):
        res = self.gamma.run(PrefixOracle(sigma, self.signature), self.code, budget)
        if res.converged:
            if res.bit == 1:
                self.found.append((sigma, m))
            return True
        return res.reason != "budget"

    def advance(self, stage: int) -> "HAlphaEnumerator":
        while self.stage < stage:
            self.stage += 1
            s = self.stage
            self._pending = [(sig, m) for sig, m in self._pending if not self._run(sig, m, s)]
            m, sigma = next(self._strings)
            if m < self.n:
                continue    # too short to mention c_0 .. c_n
            if not self._run(sigma, m, s):
                self._pending.append((sigma, m))
        return self

    def found_at(self) -> set:
        return {sigma for sigma, _ in self.found}


def enumerate_H_alpha(gamma: Functional, alpha: Formula, stage: int,
                      signature: Signature, pruned: bool = True) -> HAlphaEnumerator:
    return HAlphaEnumerator(gamma, alpha, signature, pruned).advance(stage)


@dataclass(frozen=True)
class Disjunct:
    sigma: str
    m: int
    formula: Formula            # exists y_{n+1} ... y_m gamma_sigma(x, y)
    matrix: Formula
    ys: tuple


@dataclass
class Sigma1Approx:
    variables: list
    disjuncts: list
    stage: int

    @property
    def n(self) -> int:
        return len(self.variables) - 1

    def to_dict(self):
        return [{"sigma_bits": d.sigma, "m_sigma": d.m} for d in self.disjuncts]


def beta_alpha(enum: HAlphaEnumerator) -> Sigma1Approx:
    """One existential disjunct per found sigma: c_i becomes x_i for i <= n
    and a new existentially quantified y_i for i > n."""
    xs = enum.variables
    taken = set(xs)
    disjuncts = []
    for sigma, m in enum.found:
        ys = []
        names = {}
        for i in range(m + 1):
            if i < len(xs):
                names[i] = Var(xs[i])
            else:
                y = f"y{i}"
                while y in taken:
                    y += "'"
                names[i] = Var(y)
                ys.append(y)

        def rename(t, names=names):
            return names[t.index] if isinstance(t, DomConst) else t
        matrix = map_terms(gamma_sigma(sigma, enum.signature), rename)
        body = matrix
        for y in reversed(ys):
            body = Exists(y, body)
        disjuncts.append(Disjunct(sigma, m, body, matrix, tuple(ys)))
    return Sigma1Approx(list(xs), disjuncts, enum.stage)


def sigma1_witness(P, approx: Sigma1Approx, a: tuple, witness_bound: int):
    """(disjunct index, witness tuple) for the first disjunct satisfied by
    a tuple below ``witness_bound``, or None."""
    if len(a) != len(approx.variables):
        raise ValueError(f"expected {len(approx.variables)} parameters, got {len(a)}")
    view = DiagramView(PresentationOracle(P), Steps(float("inf")))
    base = dict(zip(approx.variables, a))
    for k, d in enumerate(approx.disjuncts):
        # literals grouped by the last witness variable they mention
        layers = [[] for _ in range(len(d.ys) + 1)]
        pos = {y: i + 1 for i, y in enumerate(d.ys)}
        for lit in conjuncts(d.matrix):
            layers[max((pos.get(v, 0) for v in free_vars(lit)), default=0)].append(lit)
        b = _extend(view, layers, d.ys, base, [], witness_bound, set(a))
        if b is not None:
            return k, b
    return None


def _extend(view, layers, ys, env, chosen, bound, used):
    if not all(view.truth(lit, env) for lit in layers[len(chosen)]):
        return None
    if len(chosen) == len(ys):
        return tuple(chosen)
    y = ys[len(chosen)]
    for v in range(bound):
        if v in used:
            continue
        b = _extend(view, layers, ys, {**env, y: v}, chosen + [v], bound, used | {v})
        if b is not None:
            return b
    return None


def eval_sigma1_bounded(P, approx: Sigma1Approx, a: tuple, witness_bound: int):
    """True if some disjunct has a witness below the bound, else "unknown"."""
    return True if sigma1_witness(P, approx, a, witness_bound) is not None else "unknown"


@dataclass
class PatternApprox:
    case: object
    approx: Sigma1Approx
    enum: HAlphaEnumerator = None

    @property
    def pattern(self):
        return self.case.pattern


def sigma1_form(gamma: Functional, alpha: Formula, stage: int, signature: Signature,
                pruned: bool = True) -> list:
    """The H_alpha pipeline applied to each equality case of alpha.

    The case formulas are the compact ones: representatives are renamed to
    the leading variables and pairwise distinctness is included.
    """
    out = []
    for case in expand_equality_cases(alpha):
        k = len(set(case.pattern))
        compact = case.compact
        if free_vars(compact) != set(case.variables[:k]):
            # variables that vanish from alpha still count as parameters
            compact = _pin_variables(compact, case.variables[:k])
        enum = enumerate_H_alpha(gamma, compact, stage, signature, pruned)
        out.append(PatternApprox(case, beta_alpha(enum), enum))
    return out


def _pin_variables(f: Formula, variables) -> Formula:
    missing = [v for v in variables if v not in free_vars(f)]
    return conj(f, *(Eq(Var(v), Var(v)) for v in missing))


def equality_pattern(a: tuple) -> tuple:
    seen = {}
    return tuple(seen.setdefault(v, len(seen)) for v in a)


def eval_sigma1_form(P, form: list, a: tuple, witness_bound: int):
    """Evaluate the pattern disjunction at a: only the case matching the
    equality pattern of a can hold."""
    pat = equality_pattern(a)
    for entry in form:
        if entry.pattern == pat:
            reps = tuple(dict.fromkeys(a))
            return eval_sigma1_bounded(P, entry.approx, reps, witness_bound)
    return "unknown"


def extension_soundness(T, enum: HAlphaEnumerator, presentations) -> list:
    """Violations: found sigma, presentation extending it, alpha false there."""
    from .theories import classical_truth
    sentence = instantiate(enum.alpha, {x: i for i, x in enumerate(enum.variables)})
    bad = []
    for sigma, m in enum.found:
        for P in presentations:
            if initial_segment(P, m) == sigma and not classical_truth(T, sentence, P):
                bad.append((sigma, P.spec))
    return bad


def approx_json(alpha: Formula, form: list) -> dict:
    return {"alpha": show(alpha),
            "patterns": [{"pattern": list(e.pattern), "formula": show(e.case.compact),
                          "disjuncts": e.approx.to_dict()} for e in form]}


__all__ = [
    "sigma_strings", "HAlphaEnumerator", "enumerate_H_alpha", "Sigma1Approx", "Disjunct",
    "beta_alpha", "eval_sigma1_bounded", "sigma1_witness", "sigma1_form",
    "eval_sigma1_form", "equality_pattern", "extension_soundness", "approx_json",
    "block_index",
]
