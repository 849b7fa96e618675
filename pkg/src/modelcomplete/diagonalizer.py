"""A finite-injury construction of a copy of A that defeats given deciders.

The copy is B = f^{-1}(A) for a bijection f built as the limit of
conditions p_0, p_1, ... (finite injective maps on initial segments).
Requirements, in priority order, are

* L_e: if Phi_e on input e converges on the diagram of some extension,
  keep such an extension (the finitary shadow of lowness);
* R_e: Phi_e must get some sentence about B wrong;
* S_y: y lies in the range of f.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .coding import is_sentence_code, sentence_coding
from .logic import domain_constants, rename_domain_constants, show
from .oracle import Functional, PrefixOracle
from .presentations import (
    Condition, FinitePermutation, Presentation, condition_diagram, initial_segment, pullback,
)
from .theories import TheoryDescriptor, classical_truth, registry


# --- the ordering of injective strings --------------------------------------

def string_key(q) -> tuple:
    """Sort key of the ordering: max(len, max+1), then length, then values.

    Only finitely many injective strings share the first component, so the
    order has type omega.
    """
    q = tuple(q)
    return (max(len(q), max(q, default=-1) + 1), len(q), q)


def extensions(p: Condition):
    """All injective strings extending p, in increasing order."""
    p = tuple(p)
    used = set(p)
    K = string_key(p)[0]
    while True:
        pool = [v for v in range(K) if v not in used]
        for L in range(len(p), K + 1):
            for tail in itertools.permutations(pool, L - len(p)):
                q = p + tail
                if string_key(q)[0] == K:
                    yield Condition(q)
        K += 1


def first_extensions(p: Condition, s: int) -> list:
    return list(itertools.islice(extensions(p), s))


# --- evidence -----------------------------------------------------------------

@dataclass(frozen=True)
class Disagreement:
    e: int
    q: tuple
    code: int
    sentence: str
    output: int
    truth: int
    kind = "disagreement"

    def to_dict(self):
        return {"kind": self.kind, "e": self.e, "q": list(self.q), "code": self.code,
                "sentence": self.sentence, "output": self.output, "truth": self.truth}


@dataclass(frozen=True)
class Case3Candidate:
    e: int
    q: tuple
    input: int
    budget: int
    probes: int
    kind = "case3"

    def to_dict(self):
        return {"kind": self.kind, "e": self.e, "q": list(self.q), "input": self.input,
                "budget": self.budget, "probes": self.probes}


@dataclass(frozen=True)
class Unresolved:
    e: int
    budget: int
    note: str = ""
    kind = "unresolved"

    def to_dict(self):
        return {"kind": self.kind, "e": self.e, "budget": self.budget, "note": self.note}


# --- the search context ----------------------------------------------------------

@dataclass
class SearchConfig:
    run_cap: int = 2000          # steps per Phi_e run inside R_e
    probe_budget: int = 20000    # steps per run when classifying Case 3
    probe_copies: int = 6
    probe_inputs: int = 5
    order: str = "LRS"           # or "LSR"


class Context:
    """Caches shared by all requirements of one construction."""

    def __init__(self, A: Presentation, theory: TheoryDescriptor, functionals, cfg: SearchConfig):
        self.A = A
        self.theory = theory
        self.functionals = list(functionals)
        self.cfg = cfg
        self.sig = A.signature
        self.coding = sentence_coding(self.sig)
        self._diagrams = {}
        self._sentences = {}
        self._runs = {}
        self._truth = {}

    def diagram(self, q: Condition) -> str:
        if q not in self._diagrams:
            self._diagrams[q] = condition_diagram(self.A, q)
        return self._diagrams[q]

    def sentence(self, code: int):
        """(formula, largest constant + 1) for sentence codes, else None."""
        if code not in self._sentences:
            if is_sentence_code(self.coding, code):
                f = self.coding.decode(code)
                self._sentences[code] = (f, max(domain_constants(f), default=-1) + 1)
            else:
                self._sentences[code] = None
        return self._sentences[code]

    def run(self, e: int, q: Condition, code: int, budget: int):
        # Runs are deterministic: a convergence within b steps, or a
        # divergence not caused by the budget, holds at every budget >= b.
        key = (e, q, code)
        hit = self._runs.get(key)
        if hit is not None:
            res, b = hit
            if res.converged and res.steps <= budget:
                return res
            if not res.converged and (res.reason != "budget" or b >= budget):
                return res
        phi = self.functionals[e]
        res = phi.run(PrefixOracle(self.diagram(q), self.sig), code, budget)
        self._runs[key] = (res, budget)
        return res

    def truth(self, q: Condition, code: int) -> int:
        """Truth in A of the sentence with each #i read as #q(i)."""
        key = (q, code)
        if key not in self._truth:
            f, _ = self.sentence(code)
            g = rename_domain_constants(f, q)
            self._truth[key] = int(classical_truth(self.theory, g, self.A))
        return self._truth[key]


# --- requirements ------------------------------------------------------------------

@dataclass
class Requirement:
    kind: str
    index: int
    string: tuple = ()
    status: str = "pending"
    stabilized_at: int = 0
    history: list = field(default_factory=list)

    @property
    def name(self):
        return f"{self.kind}_{self.index}"


class RState:
    """Incremental search state for R_e above a fixed condition p.

    Pairs (q, code) are inspected in dovetail order: the pair with q the
    r-th extension of p is first looked at in stage max(r + 1, code).
    """

    def __init__(self, p: Condition):
        self.p = p
        self.exts = []
        self._gen = extensions(p)
        self.done_stage = 0
        self.converging = []         # extensions on which Phi_e converged
        self.found = None            # least Disagreement

    def ext(self, r):
        while len(self.exts) <= r:
            self.exts.append(next(self._gen))
        return self.exts[r]

    def pairs_at(self, s):
        for r in range(s - 1):
            yield r, s                # old extensions, new code
        for code in range(s + 1):
            yield s - 1, code         # new extension, all codes so far


def _advance_R(ctx: Context, e: int, st: RState, s: int):
    while st.done_stage < s and st.found is None:
        st.done_stage += 1
        t = st.done_stage
        for r, code in st.pairs_at(t):
            q = st.ext(r)
            sent = ctx.sentence(code)
            if sent is None or sent[1] > len(q):
                continue
            res = ctx.run(e, q, code, ctx.cfg.run_cap)
            if not res.converged:
                continue
            if q not in st.converging:
                st.converging.append(q)
            truth = ctx.truth(q, code)
            if res.bit != truth:
                st.found = Disagreement(e, tuple(q), code, show(sent[0]), res.bit, truth)
                break


def _escape(p: Condition, converging) -> Condition:
    """The least extension of p not extended by any converging string."""
    for cand in extensions(p):
        if not any(q.extends(cand) for q in converging):
            return cand


def _L_step(ctx: Context, e: int, p: Condition, s: int):
    for q in first_extensions(p, s):
        res = ctx.run(e, q, e, s)
        if res.converged:
            return q, True
    return p, False


def _S_step(p: Condition, y: int) -> Condition:
    return p if y in p.range else p.extend(y)


# --- the construction -----------------------------------------------------------------

@dataclass
class ConstructionResult:
    stages: int
    p: Condition
    requirements: list
    evidence: list
    injuries: list
    lowness: dict
    config: SearchConfig
    base: str
    p_history: list = field(default_factory=list)      # p_s for s = 1 .. stages

    def b_prefix(self, elements: int = 40) -> str:
        """Delta(B) on the first ``elements`` elements (at most |p|)."""
        n = min(len(self.p), elements)
        if n == 0:
            return ""
        return initial_segment(pullback_of(self), n - 1)

    def to_dict(self):
        return {
            "base": self.base,
            "stages": self.stages,
            "order": self.config.order,
            "p_final": [[i, v] for i, v in enumerate(self.p)],
            "requirements": [{"kind": r.kind, "e": r.index, "status": r.status,
                              "string": list(r.string), "stabilized_at": r.stabilized_at}
                             for r in self.requirements if r.kind != "S"],
            "evidence": [ev.to_dict() for ev in self.evidence],
            "injuries": self.injuries,
            "budgets": {"run_cap": self.config.run_cap, "probe_budget": self.config.probe_budget},
        }


def pullback_of(res: ConstructionResult):
    from .presentations import parse_presentation
    return pullback(parse_presentation(res.base), res.p)


def requirement_order(k: int, s: int, order: str = "LRS") -> list:
    """Priority list for k functionals and S_y with y < s."""
    out = []
    for e in range(max(k, s)):
        for kind in order:
            if kind in "LR" and e < k:
                out.append((kind, e))
            elif kind == "S" and e < s:
                out.append((kind, e))
    return out


def theory_for(A: Presentation) -> TheoryDescriptor:
    family = A.family
    table = {"succ": "succ", "succ0": "succ0", "dlo01": "dlo++", "shuffle+adj": "adj"}
    for T in registry():
        if T.id == table.get(family):
            return T
    raise ValueError(f"no classical truth oracle for family {family!r}")


def run_construction(A: Presentation, functionals, stages: int,
                     config: SearchConfig | None = None, theory: TheoryDescriptor | None = None):
    cfg = config or SearchConfig()
    ctx = Context(A, theory or theory_for(A), functionals, cfg)
    k = len(ctx.functionals)
    reqs = {}
    rstates = {}
    injuries = []
    lowness = {e: [] for e in range(k)}
    p_history = []
    p = Condition(())
    for s in range(1, stages + 1):
        p = Condition(())
        changed_above = False
        for kind, i in requirement_order(k, s, cfg.order):
            key = (kind, i)
            if key not in reqs:
                reqs[key] = Requirement(kind, i)
            req = reqs[key]
            if kind == "L":
                p, ok = _L_step(ctx, i, p, s)
                req.status = "converged" if ok else "waiting"
                lowness[i].append(ok)
            elif kind == "R":
                st = rstates.get(i)
                if st is None or st.p != p:
                    st = rstates[i] = RState(p)
                _advance_R(ctx, i, st, s)
                if st.found is not None:
                    p = Condition(st.found.q)
                    req.status = "disagreement"
                else:
                    p = _escape(p, st.converging)
                    req.status = "searching"
            else:
                p = _S_step(p, i)
                req.status = "satisfied"
            new = tuple(p)
            if new != req.string:
                if req.history:
                    injuries.append({"stage": s, "requirement": req.name, "old": list(req.string),
                                     "new": list(new), "injured": changed_above})
                req.string = new
                req.stabilized_at = s
                changed_above = True
                req.history.append((s, new))
            elif not req.history:
                req.history.append((s, new))
        p_history.append(tuple(p))
    ordered = [reqs[key] for key in requirement_order(k, stages, cfg.order) if key in reqs]
    evidence = [classify(ctx, e, rstates.get(e)) for e in range(k)]
    return ConstructionResult(stages, p, ordered, evidence, injuries, lowness, cfg, A.spec,
                              p_history)


def classify(ctx: Context, e: int, st: RState | None):
    """Disagreement if one was found; otherwise probe full copies above
    the requirement's string for an input on which Phi_e never converges."""
    cfg = ctx.cfg
    if st is not None and st.found is not None:
        return st.found
    q = _escape(st.p, st.converging) if st is not None else Condition(())
    budget = cfg.probe_budget
    n = probe_case3(ctx.A, ctx.functionals[e], q, cfg.probe_inputs, cfg.probe_copies, budget)
    if n is not None:
        return Case3Candidate(e, tuple(q), n, budget, cfg.probe_copies)
    return Unresolved(e, budget, "converged on every probed copy and input")


def probe_copies(A: Presentation, q: Condition, count: int) -> list:
    """Full copies of A extending q: pullbacks along completions of the
    first few extensions of q."""
    out = []
    for ext in itertools.islice(extensions(q), count):
        out.append(pullback(A, FinitePermutation.completing(list(ext))))
    return out


def probe_case3(A, phi: Functional, q: Condition, inputs: int, copies: int, budget: int):
    """Least input n < inputs on which phi converges on no probed copy."""
    from .oracle import PresentationOracle
    probes = probe_copies(A, q, copies)
    for n in range(inputs):
        if not any(phi.run(PresentationOracle(B), n, budget).converged for B in probes):
            return n
    return None


def verify_defeat(b_prefix: str, phi: Functional, evidence, A: Presentation,
                  p: Condition, theory: TheoryDescriptor | None = None,
                  run_cap: int = 2000) -> bool:
    """Re-check evidence against the final condition p and B's prefix."""
    theory = theory or theory_for(A)
    if isinstance(evidence, Unresolved):
        return True
    q = Condition(evidence.q)
    if isinstance(evidence, Case3Candidate):
        return probe_case3(A, phi, q, evidence.input + 1, evidence.probes,
                           2 * evidence.budget) == evidence.input
    if not isinstance(evidence, Disagreement):
        raise TypeError(f"unknown evidence {evidence!r}")
    if not p.extends(q):
        return False
    diagram = condition_diagram(A, q)
    if not b_prefix.startswith(diagram):
        return False
    res = phi.run(PrefixOracle(diagram, A.signature), evidence.code, run_cap)
    if not res.converged or res.bit != evidence.output:
        return False
    # the same computation on B's prefix sees the same bits below its use
    res_b = phi.run(PrefixOracle(b_prefix, A.signature), evidence.code, run_cap)
    if not res_b.converged or res_b.bit != evidence.output:
        return False
    f = sentence_coding(A.signature).decode(evidence.code)
    truth = int(classical_truth(theory, rename_domain_constants(f, q), A))
    return truth == evidence.truth and truth != evidence.output


def case_search(A: Presentation, p: Condition, phi: Functional, budget: int,
                config: SearchConfig | None = None, theory: TheoryDescriptor | None = None):
    """One-shot search above p: a disagreement within the first ``budget``
    stages of pairs, else a Case-3 candidate, else Unresolved."""
    cfg = config or SearchConfig()
    ctx = Context(A, theory or theory_for(A), [phi], cfg)
    st = RState(p)
    _advance_R(ctx, 0, st, budget)
    return classify(ctx, 0, st)


__all__ = [
    "string_key", "extensions", "first_extensions", "Disagreement", "Case3Candidate",
    "Unresolved", "SearchConfig", "run_construction", "ConstructionResult",
    "verify_defeat", "case_search", "requirement_order", "probe_case3", "theory_for",
]
