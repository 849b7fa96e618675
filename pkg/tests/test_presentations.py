import itertools
from fractions import Fraction

import pytest

from modelcomplete.coding import Signature, atom_code, block_length, eq_code
from modelcomplete.logic import Eq, Not, Rel, Structure, conjuncts, evaluate, parse, show
from modelcomplete.presentations import (
    Condition, FinitePermutation, InsufficientStages, PresentationError, Pullback,
    canonicalize, delta_restrict, gamma_sigma, initial_segment, make_builtin,
    parse_presentation, pullback,
)

BUILTINS = ["succ:shift=0", "succ:shift=2", "succ0", "dlo01", "a_n:n=1", "shuffle", "shuffle+adj"]


@pytest.fixture(params=BUILTINS)
def P(request):
    return parse_presentation(request.param)


def test_successor_examples():
    P = make_builtin("succ", shift=0)
    assert P.query(atom_code(P.signature, "S", (0, 1))) == 1
    assert P.query(atom_code(P.signature, "S", (1, 0))) == 0
    P1 = make_builtin("succ", shift=1)
    # index 0 is the element 1, which nothing below index 200 maps to
    assert not any(P1.holds("S", (i, 0)) for i in range(200))


def test_dense_interval_example():
    P = make_builtin("dlo01")
    assert P.query(atom_code(P.signature, "<", (0, 1))) == 1
    for i, j in itertools.permutations(range(30), 2):
        assert P.holds("<", (i, j)) == (P.element(i) < P.element(j))


def test_bad_parameters():
    for spec in ["succ:shift=-1", "a_n", "dlo01:n=2", "nope", "pullback:succ"]:
        with pytest.raises(PresentationError):
            parse_presentation(spec)


def test_equality_discipline(P):
    for i, j in itertools.combinations(range(21), 2):
        assert P.query(eq_code(P.signature, i, j)) == 0


def test_oracle_is_deterministic_and_segments_chain(P):
    segs = [initial_segment(P, n) for n in range(6)]
    for n, s in enumerate(segs):
        assert len(s) == block_length(n, P.signature)
        assert s == initial_segment(P, n)
    for a, b in zip(segs, segs[1:]):
        assert b.startswith(a)


def test_initial_segment_of_successor_line():
    P = make_builtin("succ")
    # block 0: S(#0,#0); block 1: #0=#1, S(#0,#1), S(#1,#0), S(#1,#1)
    assert initial_segment(P, 0) == "0"
    assert initial_segment(P, 1) == "00100"


def test_pullback_swap_example():
    B = pullback(make_builtin("succ"), FinitePermutation.swap(0, 5))
    assert B.holds("S", (5, 1))
    assert not B.holds("S", (0, 1))


@pytest.mark.parametrize("spec", BUILTINS)
def test_pullback_isomorphism_law(spec):
    P = parse_presentation(spec)
    f = FinitePermutation({0: 3, 3: 7, 7: 0, 2: 9, 9: 2})
    B = pullback(P, f)
    for name, k in P.signature.relations:
        for args in itertools.product(range(11), repeat=k):
            if k > 2 and max(args) > 5:
                continue
            assert B.holds(name, args) == P.holds(name, tuple(map(f, args)))


@pytest.mark.parametrize("spec", BUILTINS)
def test_identity_and_inverse_pullbacks(spec):
    P = parse_presentation(spec)
    f = FinitePermutation({1: 4, 4: 6, 6: 1})
    back = pullback(pullback(P, f), f.inverse())
    ident = pullback(P, FinitePermutation())
    assert initial_segment(back, 10) == initial_segment(P, 10) == initial_segment(ident, 10)


def test_staged_permutation_runs_out():
    B = pullback(make_builtin("succ"), Condition((2, 0, 1)))
    assert B.holds("S", (1, 2))
    with pytest.raises(InsufficientStages):
        B.holds("S", (3, 4))


def test_condition_invariants():
    p = Condition((3, 1))
    assert p.extend(0).extends(p) and not p.extends(p.extend(0))
    with pytest.raises(PresentationError):
        Condition((1, 1))


def test_gamma_sigma_examples():
    sig = Signature.of([("R", 2)])
    assert gamma_sigma("0", sig) == Not(parse("R(#0, #0)"))
    with pytest.raises(PresentationError):
        gamma_sigma("01", sig)
    P = make_builtin("succ")
    g = gamma_sigma(initial_segment(P, 2), P.signature)
    positives = {show(c) for c in conjuncts(g) if isinstance(c, Rel)}
    assert positives == {"S(#0, #1)", "S(#1, #2)"}
    distinct = {show(c) for c in conjuncts(g) if isinstance(c, Not) and isinstance(c.body, Eq)}
    assert distinct == {"~#0 = #1", "~#0 = #2", "~#1 = #2"}


@pytest.mark.parametrize("spec", ["succ", "dlo01", "shuffle+adj"])
def test_extensions_satisfy_gamma_sigma(spec):
    P = parse_presentation(spec)
    g = gamma_sigma(initial_segment(P, 3), P.signature)
    dom = list(range(4))
    m = Structure(dom, {name: {t for t in itertools.product(dom, repeat=k) if P.holds(name, t)}
                        for name, k in P.signature.relations})
    assert evaluate(g, m)


def test_delta_restrict_examples():
    P = make_builtin("succ")
    assert delta_restrict(P, []) == frozenset()
    got = {show(l) for l in delta_restrict(P, [0, 1])}
    assert got == {"S(#0, #1)", "~S(#1, #0)", "~S(#0, #0)", "~S(#1, #1)", "~#0 = #1"}
    assert delta_restrict(P, [1, 0]) == delta_restrict(P, [0, 1])
    with pytest.raises(PresentationError):
        delta_restrict(P, [1, 1])


def test_canonicalize_examples():
    E = make_builtin("succ")
    C, perm = canonicalize(E, [], Condition())
    assert C is E
    C, perm = canonicalize(E, [3], Condition((3,)))
    assert perm(0) == 3
    assert C.holds("S", (0, perm.inverse()(4)))
    assert initial_segment(C, 10) == initial_segment(Pullback(E, perm), 10)
    with pytest.raises(PresentationError):
        canonicalize(E, [1, 2], Condition((3,)))


def test_successor_line_is_a_single_chain():
    for shift in (0, 1, 3):
        P = make_builtin("succ", shift=shift)
        for i in range(40):
            succ = [j for j in range(42) if P.holds("S", (i, j))]
            assert succ == [i + 1]
            assert P.element(i) == i + shift


def test_adjacency_holds_exactly_on_doubled_points():
    P = make_builtin("shuffle+adj")
    pts = [P.element(i) for i in range(40)]
    for i, j in itertools.permutations(range(40), 2):
        between = any(pts[i] < pts[k] < pts[j] for k in range(40))
        if P.holds("Adj", (i, j)):
            assert pts[i] < pts[j] and not between
            assert pts[i][0] == pts[j][0]
        else:
            assert not (pts[i][0] == pts[j][0] and pts[i][1] < pts[j][1])


def test_interval_union_layout():
    P = make_builtin("a_n", n=1)
    assert [P.element(i) for i in range(4)] == [0, 1, 2, 3]
    assert P.element(4) == Fraction(1, 2) and P.element(5) == Fraction(5, 2)
    assert P.holds("e3", (3,)) and not P.holds("e3", (2,))
