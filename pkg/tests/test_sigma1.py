import pytest

from modelcomplete.coding import block_length, decode_atomic
from modelcomplete.decider import as_functional
from modelcomplete.functionals import ALWAYS_DIVERGE
from modelcomplete.logic import Exists, conjuncts, free_vars, instantiate, parse, show
from modelcomplete.presentations import (
    FinitePermutation, make_builtin, pullback,
)
from modelcomplete.sigma1 import (
    HAlphaEnumerator, Sigma1Approx, beta_alpha, enumerate_H_alpha, equality_pattern,
    eval_sigma1_bounded, eval_sigma1_form, extension_soundness, sigma1_form, sigma1_witness,
    sigma_strings,
)
from modelcomplete.theories import ADJ, DLOPP, TH_SUCC0, classical_truth
from oracles import soundness_violations

GAMMA = as_functional(TH_SUCC0)
NONSUCC = parse("~exists y. S(y) = x0", ["c0"])
SIG = TH_SUCC0.signature


def test_sigma_strings_order_and_pruning():
    it = sigma_strings(SIG)
    head = [next(it) for _ in range(6)]
    assert [m for m, _ in head[:4]] == [0, 0, 0, 0]
    assert [s for _, s in head[:4]] == ["00", "01", "10", "11"]
    assert all(len(s) == block_length(m, SIG) for m, s in head)
    eq_pos = 2      # code 2 is #0 = #1 in this signature
    assert all(s[eq_pos] == "0" for m, s in head if m == 1)


def test_always_diverge_finds_nothing():
    for stage in (1, 10, 100):
        assert enumerate_H_alpha(ALWAYS_DIVERGE, NONSUCC, stage, SIG).found == []
    approx = beta_alpha(enumerate_H_alpha(ALWAYS_DIVERGE, NONSUCC, 50, SIG))
    assert approx.disjuncts == []
    assert eval_sigma1_bounded(make_builtin("succ0"), approx, (0,), 20) == "unknown"


def test_enumeration_is_monotone():
    enum = HAlphaEnumerator(GAMMA, parse("exists y. S(y) = x0", ["c0"]), SIG)
    prev = set()
    for stage in range(10, 210, 20):
        cur = enum.advance(stage).found_at()
        assert prev <= cur
        prev = cur
    fresh = enumerate_H_alpha(GAMMA, enum.alpha, 190, SIG).found_at()
    assert fresh <= prev


def test_nonsuccessor_sigma_name_the_zero():
    """Gamma locates c0 through its graph, so each accepted sigma must put
    c0 on #0 (code 1); realisable ones are checked for soundness below."""
    enum = enumerate_H_alpha(GAMMA, NONSUCC, 60, SIG)
    assert enum.found
    assert show(decode_atomic(1, SIG)) == "c0(#0)"
    assert all(sigma[1] == "1" for sigma, _ in enum.found)


def test_found_sigma_are_sound_in_realising_copies():
    for text in ["~exists y. S(y) = x0", "exists y. S(y) = x0", "S(S(x0)) = x1 & ~x0 = x1"]:
        enum = enumerate_H_alpha(GAMMA, parse(text, ["c0"]), 150, SIG)
        bad, realised = soundness_violations(TH_SUCC0, enum)
        assert bad == [] and realised > 0


def test_extension_soundness_on_presentations():
    enum = enumerate_H_alpha(GAMMA, NONSUCC, 100, SIG)
    pres = [make_builtin("succ0")] + [pullback(make_builtin("succ0"), FinitePermutation.swap(0, k))
                                      for k in range(1, 6)]
    assert extension_soundness(TH_SUCC0, enum, pres) == []


def test_beta_alpha_renaming():
    enum = enumerate_H_alpha(GAMMA, parse("exists y. S(y) = x0", ["c0"]), 300, SIG)
    approx = beta_alpha(enum)
    for d in approx.disjuncts:
        assert free_vars(d.formula) == {"x0"}
        assert len(d.ys) == d.m - 0
        assert "#" not in show(d.formula)
    # a sigma of length l_2 with n = 0 gets two quantifiers
    deep = [d for d in approx.disjuncts if d.m == 2]
    assert deep and isinstance(deep[0].formula, Exists) and isinstance(deep[0].formula.body, Exists)
    shallow = beta_alpha(enumerate_H_alpha(GAMMA, NONSUCC, 100, SIG)).disjuncts
    shallow = [d for d in shallow if d.m == 0]
    assert shallow and shallow[0].formula == shallow[0].matrix


def test_empty_approximation_is_unknown():
    empty = Sigma1Approx(["x0"], [], 0)
    assert eval_sigma1_bounded(make_builtin("succ0"), empty, (0,), 50) == "unknown"


def test_nonsuccessor_evaluation():
    approx = beta_alpha(enumerate_H_alpha(GAMMA, NONSUCC, 100, SIG))
    P = make_builtin("succ0")
    assert eval_sigma1_bounded(P, approx, (0,), 20) is True
    Q = pullback(P, FinitePermutation.swap(0, 3))
    assert eval_sigma1_bounded(Q, approx, (3,), 20) is True


@pytest.mark.parametrize("stage", [50, 200, 500])
def test_successor_is_never_a_nonsuccessor(stage):
    approx = beta_alpha(enumerate_H_alpha(GAMMA, NONSUCC, stage, SIG))
    P = make_builtin("succ0")
    for a in (1, 3, 7):
        assert eval_sigma1_bounded(P, approx, (a,), 25) == "unknown"


def test_witnesses_are_literal():
    approx = beta_alpha(enumerate_H_alpha(GAMMA, parse("exists y. S(y) = x0", ["c0"]), 100, SIG))
    P = make_builtin("succ0")
    k, b = sigma1_witness(P, approx, (4,), 20)
    d = approx.disjuncts[k]
    env = {"x0": 4, **dict(zip(d.ys, b))}
    from modelcomplete.decider import DiagramView
    from modelcomplete.oracle import PresentationOracle, Steps
    view = DiagramView(PresentationOracle(P), Steps(10**6))
    assert all(view.truth(lit, env) for lit in conjuncts(d.matrix))


def test_single_variable_form_is_the_direct_pipeline():
    form = sigma1_form(GAMMA, NONSUCC, 80, SIG)
    assert len(form) == 1
    direct = enumerate_H_alpha(GAMMA, NONSUCC, 80, SIG)
    assert form[0].enum.found == direct.found


def test_three_variable_patterns():
    alpha = parse("S(x0) = x1 | S(x1) = x2", ["c0"])
    form = sigma1_form(GAMMA, alpha, 10, SIG)
    assert sorted(e.pattern for e in form) == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (0, 1, 2)]
    shown = {e.pattern: show(e.case.compact) for e in form}
    assert shown[(0, 0, 0)] == "S(x0) = x0 | S(x0) = x0"
    assert shown[(0, 1, 1)] == "(S(x0) = x1 | S(x1) = x1) & ~x0 = x1"


def test_equality_pattern():
    assert equality_pattern((5, 5, 2)) == (0, 0, 1)
    assert equality_pattern((3, 4, 3)) == (0, 1, 0)


@pytest.mark.parametrize("T,text,P,tuples", [
    (TH_SUCC0, "S(x0) = x1", make_builtin("succ0"), [(0, 1), (1, 0), (2, 2), (5, 6), (6, 4)]),
    (DLOPP, "x0 < x1", make_builtin("dlo01"), [(0, 1), (1, 0), (3, 3), (0, 4)]),
    (ADJ, "Adj(x0, x1)", make_builtin("shuffle+adj"), [(0, 1), (1, 0), (2, 3), (2, 2), (1, 2)]),
])
def test_pattern_disjunction_agrees_with_truth(T, text, P, tuples):
    alpha = parse(text, T.constants)
    form = sigma1_form(as_functional(T), alpha, 300, T.signature)
    for a in tuples:
        truth = classical_truth(T, instantiate(alpha, {"x0": a[0], "x1": a[1]}), P)
        got = eval_sigma1_form(P, form, a, 50)
        assert got is True if truth else got == "unknown"
