"""Quantifier elimination for the registered theories.

* dense linear orders, with or without a pair of endpoint constants;
* (omega, S, 0): Boolean combinations of equations S^i(u) = S^j(w);
* the doubled rationals with Adj, by reduction to the dense order of
  adjacent pairs, giving universal (not quantifier-free) equivalents.
"""
from __future__ import annotations

import itertools

from .logic import (
    FALSE, TRUE, And, App, Const, Eq, Exists, Forall, Formula, Implies, Not, Or,
    Rel, Var, conj, disj, dnf, free_vars, neg, substitute, term_vars,
)


class UnsupportedFormula(ValueError):
    pass


def _eliminate(f: Formula, elim) -> Formula:
    """Innermost-first elimination driver; ``elim(var, literals)`` handles
    one existential over a conjunction of literals."""
    if isinstance(f, (Rel, Eq)) or f in (TRUE, FALSE):
        return f
    if isinstance(f, Not):
        return neg(_eliminate(f.body, elim))
    if isinstance(f, And):
        return conj(_eliminate(f.left, elim), _eliminate(f.right, elim))
    if isinstance(f, Or):
        return disj(_eliminate(f.left, elim), _eliminate(f.right, elim))
    if isinstance(f, Implies):
        return disj(neg(_eliminate(f.left, elim)), _eliminate(f.right, elim))
    if isinstance(f, Exists):
        return _exists(f.var, _eliminate(f.body, elim), elim)
    if isinstance(f, Forall):
        return neg(_exists(f.var, neg(_eliminate(f.body, elim)), elim))
    raise UnsupportedFormula(repr(f))


def _exists(x, body, elim):
    out = disj(*(elim(x, lits) for lits in dnf(body)))
    return from_clauses(dnf(out))


def from_clauses(clauses) -> Formula:
    return disj(*(conj(*c) for c in clauses))


def _mentions(lit, x) -> bool:
    return x in free_vars(lit)


# --- dense orders ----------------------------------------------------------

def _dense_atom(a: Formula, endpoints=None) -> Formula:
    if isinstance(a, Rel) and a.name == "<":
        s, t = a.args
        if s == t:
            return FALSE
        if endpoints is not None:
            lo, hi = endpoints
            if t == lo or s == hi:
                return FALSE
            if s == lo and t == hi:
                return TRUE
        return a
    if isinstance(a, Eq):
        if a.left == a.right:
            return TRUE
        if endpoints is not None and {a.left, a.right} == set(endpoints):
            return FALSE
        return a
    raise UnsupportedFormula(f"not a dense-order atom: {a}")


def _dense_positive(lits):
    """Expand negated literals into positive alternatives."""
    options = []
    for lit in lits:
        if isinstance(lit, Not):
            a = lit.body
            if isinstance(a, Rel):
                s, t = a.args
                options.append([Rel("<", (t, s)), Eq(s, t)])
            else:
                options.append([Rel("<", (a.left, a.right)), Rel("<", (a.right, a.left))])
        else:
            options.append([lit])
    for choice in itertools.product(*options):
        yield list(choice)


def dense_eliminator(endpoints=None):
    """Eliminator for dense orders; ``endpoints`` is a (lo, hi) pair of terms
    naming least and greatest elements, or None for no endpoints."""

    def simplify(lits):
        out = [_dense_atom(l, endpoints) if not isinstance(l, Not)
               else neg(_dense_atom(l.body, endpoints)) for l in lits]
        return conj(*out)

    def elim_positive(x, lits):
        for lit in lits:
            if isinstance(lit, Eq) and x in term_vars(lit.left) | term_vars(lit.right):
                other = lit.right if lit.left == Var(x) else lit.left
                if other == Var(x):
                    continue
                return simplify([substitute(l, {x: other}) for l in lits])
        lower, upper, rest = [], [], []
        for lit in lits:
            if isinstance(lit, Eq) and lit.left == lit.right:
                continue
            if not _mentions(lit, x):
                rest.append(lit)
                continue
            s, t = lit.args
            if s == t:
                return FALSE
            if t == Var(x):
                lower.append(s)
            else:
                upper.append(t)
        if endpoints is None:
            return simplify(rest + [Rel("<", (s, t)) for s in lower for t in upper])
        lo, hi = endpoints
        at_lo = simplify([substitute(l, {x: lo}) for l in lits])
        at_hi = simplify([substitute(l, {x: hi}) for l in lits])
        inner = simplify(rest + [Rel("<", (s, t)) for s in lower + [lo] for t in upper + [hi]])
        return disj(at_lo, at_hi, inner)

    def elim(x, lits):
        return disj(*(elim_positive(x, alt) for alt in _dense_positive(lits)))
    return elim


def qe_dense(f: Formula, endpoints=None) -> Formula:
    return _eliminate(f, dense_eliminator(endpoints))


# --- successor with zero ---------------------------------------------------

ZERO = Const("c0")


def _sterm(t):
    """Split a successor term into (base, k) with base a Var or c0."""
    k = 0
    while isinstance(t, App):
        if t.fn != "S" or len(t.args) != 1:
            raise UnsupportedFormula(f"unexpected term {t}")
        k += 1
        t = t.args[0]
    if isinstance(t, Var) or t == ZERO:
        return t, k
    raise UnsupportedFormula(f"unexpected term {t}")


def _build(base, k):
    for _ in range(k):
        base = App("S", (base,))
    return base


def _seq(lhs, rhs) -> Formula:
    """Normalized S^i(u) = S^j(w)."""
    (u, i), (w, j) = lhs, rhs
    m = min(i, j)
    i, j = i - m, j - m
    if u == w:
        return TRUE if i == j else FALSE
    if (repr(u), i) > (repr(w), j):
        (u, i), (w, j) = (w, j), (u, i)
    return Eq(_build(u, i), _build(w, j))


def _succ_elim(x, lits):
    X = Var(x)
    parsed = []
    for lit in lits:
        positive = not isinstance(lit, Not)
        a = lit if positive else lit.body
        if not isinstance(a, Eq):
            raise UnsupportedFormula(f"not a successor literal: {lit}")
        parsed.append((positive, _sterm(a.left), _sterm(a.right)))

    def lit_of(positive, l, r):
        e = _seq(l, r)
        return e if positive else neg(e)

    pivot = None
    for positive, l, r in parsed:
        if positive and (l[0] == X) != (r[0] == X):
            pivot = (l, r) if l[0] == X else (r, l)
            break
    if pivot is None:
        # only disequalities mention x: infinitely many values avoid them
        return conj(*(lit_of(p, l, r) for p, l, r in parsed
                      if l[0] != X and r[0] != X or l[0] == r[0] == X))
    (_, i), (t, j) = pivot
    out = []
    for positive, l, r in parsed:
        if l[0] == X and r[0] == X:
            out.append(lit_of(positive, l, r))
            continue
        # add i to both sides, then x + i becomes t + j
        l2 = (t, j + l[1]) if l[0] == X else (l[0], l[1] + i)
        r2 = (t, j + r[1]) if r[0] == X else (r[0], r[1] + i)
        out.append(lit_of(positive, l2, r2))
    if i > j:
        # x = t - (i - j) exists only if t >= i - j
        out.extend(neg(_seq((t, 0), (ZERO, k))) for k in range(i - j))
    return conj(*out)


def qe_succ(f: Formula) -> Formula:
    return _eliminate(f, _succ_elim)


# --- doubled rationals with Adj --------------------------------------------

LEFT, RIGHT = 0, 1


def _to_pairs(f: Formula, sides: dict) -> Formula:
    """Rewrite an element formula as a formula about pair indices, given
    the side (left/right half) of every free variable."""
    if isinstance(f, Rel):
        u, w = f.args
        if not (isinstance(u, Var) and isinstance(w, Var)):
            raise UnsupportedFormula(f"Adj theory atoms take variables: {f}")
        su, sw = sides[u.name], sides[w.name]
        if f.name == "<":
            if su == LEFT and sw == RIGHT:
                return disj(Rel("<", (u, w)), Eq(u, w))
            return Rel("<", (u, w)) if u != w else FALSE
        if f.name == "Adj":
            return Eq(u, w) if su == LEFT and sw == RIGHT else FALSE
        raise UnsupportedFormula(f.name)
    if isinstance(f, Eq):
        u, w = f.left, f.right
        if not (isinstance(u, Var) and isinstance(w, Var)):
            raise UnsupportedFormula(f"Adj theory atoms take variables: {f}")
        return Eq(u, w) if sides[u.name] == sides[w.name] else FALSE
    if isinstance(f, Not):
        return neg(_to_pairs(f.body, sides))
    if isinstance(f, (And, Or, Implies)):
        l, r = _to_pairs(f.left, sides), _to_pairs(f.right, sides)
        if isinstance(f, And):
            return conj(l, r)
        if isinstance(f, Or):
            return disj(l, r)
        return disj(neg(l), r)
    if isinstance(f, Exists):
        return Exists(f.var, disj(_to_pairs(f.body, {**sides, f.var: LEFT}),
                                  _to_pairs(f.body, {**sides, f.var: RIGHT})))
    if isinstance(f, Forall):
        return Forall(f.var, conj(_to_pairs(f.body, {**sides, f.var: LEFT}),
                                  _to_pairs(f.body, {**sides, f.var: RIGHT})))
    if f in (TRUE, FALSE):
        return f
    raise UnsupportedFormula(repr(f))


def _from_pairs(f: Formula) -> Formula:
    """Read pair-index atoms back as element formulas (valid for any sides)."""
    if isinstance(f, Rel):
        u, w = f.args
        return conj(Rel("<", (u, w)), Not(Rel("Adj", (u, w))))
    if isinstance(f, Eq):
        u, w = f.left, f.right
        return disj(Eq(u, w), Rel("Adj", (u, w)), Rel("Adj", (w, u)))
    if isinstance(f, Not):
        return neg(_from_pairs(f.body))
    if isinstance(f, And):
        return conj(_from_pairs(f.left), _from_pairs(f.right))
    if isinstance(f, Or):
        return disj(_from_pairs(f.left), _from_pairs(f.right))
    return f


def qe_adj_by_sides(f: Formula, variables) -> dict:
    """For every side assignment of ``variables``, a quantifier-free
    equivalent of f valid whenever the variables have those sides."""
    out = {}
    for sides in itertools.product((LEFT, RIGHT), repeat=len(variables)):
        pairs = _to_pairs(f, dict(zip(variables, sides)))
        out[sides] = _from_pairs(qe_dense(pairs))
    return out


def side_fails(x: str, side: int, y: str) -> Formula:
    """Universal witness (in y) that x does not have the given side.

    x is a left half iff nothing is adjacent below it, a right half iff
    nothing is adjacent above it.
    """
    if side == LEFT:
        return Not(Rel("Adj", (Var(x), Var(y))))
    return Not(Rel("Adj", (Var(y), Var(x))))


def adj_universal(f: Formula, variables, ys) -> tuple:
    """(alpha, beta) quantifier-free with f <-> forall ys alpha and
    ~f <-> forall ys beta in every model of the theory."""
    cases = qe_adj_by_sides(f, variables)
    alpha, beta = [], []
    for sides, psi in cases.items():
        guard = [side_fails(x, s, y) for x, s, y in zip(variables, sides, ys)]
        alpha.append(disj(*guard, psi))
        beta.append(disj(*guard, neg(psi)))
    return conj(*alpha), conj(*beta)
