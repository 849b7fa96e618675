"""First-order formulas: AST, text grammar, printer and syntactic transforms.

Terms are variables, domain constants ``#n`` (naming element n of a
structure with domain omega), named constants and function applications.
The order relation ``<`` is an ordinary binary relation printed infix.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence


# --- terms -----------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class DomConst:
    index: int

    def __str__(self):
        return f"#{self.index}"


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fn: str
    args: tuple

    def __str__(self):
        return f"{self.fn}({', '.join(map(str, self.args))})"


Term = Var | DomConst | Const | App


# --- formulas --------------------------------------------------------------

class Formula:
    __slots__ = ()

    def __str__(self):
        return show(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "TRUE"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self):
        return "FALSE"


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


ATOMS = (Rel, Eq, Top, Bottom)
QUANTIFIERS = (Forall, Exists)
BINARY = (And, Or, Implies)


def Less(a, b) -> Rel:
    return Rel("<", (a, b))


def is_atomic(f: Formula) -> bool:
    return isinstance(f, (Rel, Eq))


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, QUANTIFIERS):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, BINARY):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return True


def conj(*parts: Formula) -> Formula:
    """Right-folded conjunction with unit/zero simplification."""
    items = []
    for p in parts:
        if p == FALSE:
            return FALSE
        if p != TRUE:
            items.append(p)
    if not items:
        return TRUE
    out = items[-1]
    for p in reversed(items[:-1]):
        out = And(p, out)
    return out


def disj(*parts: Formula) -> Formula:
    items = []
    for p in parts:
        if p == TRUE:
            return TRUE
        if p != FALSE:
            items.append(p)
    if not items:
        return FALSE
    out = items[-1]
    for p in reversed(items[:-1]):
        out = Or(p, out)
    return out


def neg(f: Formula) -> Formula:
    if f == TRUE:
        return FALSE
    if f == FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.body
    return Not(f)


def conjuncts(f: Formula) -> list:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    if f == TRUE:
        return []
    return [f]


def disjuncts(f: Formula) -> list:
    if isinstance(f, Or):
        return disjuncts(f.left) + disjuncts(f.right)
    if f == FALSE:
        return []
    return [f]


# --- traversal -------------------------------------------------------------

def term_vars(t) -> set:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, App):
        return set().union(*(term_vars(a) for a in t.args)) if t.args else set()
    return set()


def atom_terms(f: Formula) -> tuple:
    if isinstance(f, Rel):
        return f.args
    if isinstance(f, Eq):
        return (f.left, f.right)
    return ()


def free_vars(f: Formula) -> set:
    if isinstance(f, (Rel, Eq)):
        out = set()
        for t in atom_terms(f):
            out |= term_vars(t)
        return out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    return set()


def all_var_names(f: Formula) -> set:
    """Free and bound variable names."""
    if isinstance(f, QUANTIFIERS):
        return all_var_names(f.body) | {f.var}
    if isinstance(f, Not):
        return all_var_names(f.body)
    if isinstance(f, BINARY):
        return all_var_names(f.left) | all_var_names(f.right)
    return free_vars(f)


def _term_iter(t) -> Iterator:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from _term_iter(a)


def subterms(f: Formula) -> Iterator:
    if isinstance(f, (Rel, Eq)):
        for t in atom_terms(f):
            yield from _term_iter(t)
    elif isinstance(f, (Not,) + QUANTIFIERS):
        yield from subterms(f.body)
    elif isinstance(f, BINARY):
        yield from subterms(f.left)
        yield from subterms(f.right)


def domain_constants(f: Formula) -> list:
    """Sorted list of domain-constant indices occurring in f."""
    return sorted({t.index for t in subterms(f) if isinstance(t, DomConst)})


def named_constants(f: Formula) -> set:
    return {t.name for t in subterms(f) if isinstance(t, Const)}


def atoms(f: Formula) -> Iterator:
    if isinstance(f, (Rel, Eq)):
        yield f
    elif isinstance(f, (Not,) + QUANTIFIERS):
        yield from atoms(f.body)
    elif isinstance(f, BINARY):
        yield from atoms(f.left)
        yield from atoms(f.right)


def quantifier_rank(f: Formula) -> int:
    if isinstance(f, QUANTIFIERS):
        return 1 + quantifier_rank(f.body)
    if isinstance(f, Not):
        return quantifier_rank(f.body)
    if isinstance(f, BINARY):
        return max(quantifier_rank(f.left), quantifier_rank(f.right))
    return 0


def term_depth(t) -> int:
    if isinstance(t, App):
        return 1 + max((term_depth(a) for a in t.args), default=0)
    return 0


def map_terms(f: Formula, fn) -> Formula:
    """Apply fn to every top-level atom argument (fn handles recursion)."""
    if isinstance(f, Rel):
        return Rel(f.name, tuple(fn(a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(fn(f.left), fn(f.right))
    if isinstance(f, Not):
        return Not(map_terms(f.body, fn))
    if isinstance(f, BINARY):
        return type(f)(map_terms(f.left, fn), map_terms(f.right, fn))
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, map_terms(f.body, fn))
    return f


# --- substitution ----------------------------------------------------------

def fresh_name(base: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def subst_term(t, mapping: Mapping):
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if isinstance(t, App):
        return App(t.fn, tuple(subst_term(a, mapping) for a in t.args))
    return t


def substitute(f: Formula, mapping: Mapping[str, object]) -> Formula:
    """Capture-avoiding substitution of terms for free variables."""
    if not mapping:
        return f
    if isinstance(f, Rel):
        return Rel(f.name, tuple(subst_term(a, mapping) for a in f.args))
    if isinstance(f, Eq):
        return Eq(subst_term(f.left, mapping), subst_term(f.right, mapping))
    if isinstance(f, Not):
        return Not(substitute(f.body, mapping))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, QUANTIFIERS):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        fv = free_vars(f.body) - {f.var}
        inner = {k: v for k, v in inner.items() if k in fv}
        if not inner:
            return f
        incoming = set().union(*(term_vars(v) for v in inner.values()))
        if f.var in incoming:
            new = fresh_name(f.var, incoming | all_var_names(f.body) | set(inner))
            body = substitute(f.body, {f.var: Var(new)})
            return type(f)(new, substitute(body, inner))
        return type(f)(f.var, substitute(f.body, inner))
    return f


def instantiate(f: Formula, values: Mapping[str, int]) -> Formula:
    """Replace free variables by domain constants."""
    return substitute(f, {k: DomConst(v) for k, v in values.items()})


def rename_domain_constants(f: Formula, fn) -> Formula:
    """Map every #i to #fn(i)."""
    def go(t):
        if isinstance(t, DomConst):
            return DomConst(fn(t.index))
        if isinstance(t, App):
            return App(t.fn, tuple(go(a) for a in t.args))
        return t
    return map_terms(f, go)


def abstract_domain_constants(f: Formula, prefix: str = "x") -> tuple:
    """Replace domain constants by fresh free variables.

    Returns (formula, variable names, indices) with the i-th variable standing
    for the i-th smallest constant.
    """
    idx = domain_constants(f)
    taken = all_var_names(f)
    names = []
    for i in range(len(idx)):
        n = f"{prefix}{i}"
        while n in taken:
            n = n + "_"
        names.append(n)
    table = {c: Var(n) for c, n in zip(idx, names)}

    def go(t):
        if isinstance(t, DomConst):
            return table[t.index]
        if isinstance(t, App):
            return App(t.fn, tuple(go(a) for a in t.args))
        return t
    return map_terms(f, go), names, idx


# --- normal forms ----------------------------------------------------------

def eliminate_implies(f: Formula) -> Formula:
    if isinstance(f, Implies):
        return Or(Not(eliminate_implies(f.left)), eliminate_implies(f.right))
    if isinstance(f, Not):
        return Not(eliminate_implies(f.body))
    if isinstance(f, (And, Or)):
        return type(f)(eliminate_implies(f.left), eliminate_implies(f.right))
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, eliminate_implies(f.body))
    return f


def nnf(f: Formula) -> Formula:
    """Negation normal form; implications are eliminated."""
    f = eliminate_implies(f)
    return _nnf(f, False)


def _nnf(f, negate):
    if isinstance(f, Not):
        return _nnf(f.body, not negate)
    if isinstance(f, And):
        cls = Or if negate else And
        return cls(_nnf(f.left, negate), _nnf(f.right, negate))
    if isinstance(f, Or):
        cls = And if negate else Or
        return cls(_nnf(f.left, negate), _nnf(f.right, negate))
    if isinstance(f, Forall):
        return (Exists if negate else Forall)(f.var, _nnf(f.body, negate))
    if isinstance(f, Exists):
        return (Forall if negate else Exists)(f.var, _nnf(f.body, negate))
    if f == TRUE:
        return FALSE if negate else TRUE
    if f == FALSE:
        return TRUE if negate else FALSE
    return Not(f) if negate else f


def rename_apart(f: Formula) -> Formula:
    """Give every quantifier a distinct variable, distinct from free ones.

    The first binder of a name keeps it; later ones get primed names.
    """
    used = set(free_vars(f))
    names = all_var_names(f)

    def go(g, env):
        if isinstance(g, QUANTIFIERS):
            v = g.var
            if v in used:
                v = fresh_name(g.var, used | names)
            used.add(v)
            return type(g)(v, go(g.body, {**env, g.var: Var(v)}))
        if isinstance(g, Not):
            return Not(go(g.body, env))
        if isinstance(g, BINARY):
            return type(g)(go(g.left, env), go(g.right, env))
        if isinstance(g, (Rel, Eq)):
            return substitute(g, env)
        return g
    return go(f, {})


def to_prenex(f: Formula) -> Formula:
    """Equivalent prenex formula with a quantifier-free matrix."""
    g = rename_apart(nnf(f))
    prefix = []

    def pull(h):
        if isinstance(h, QUANTIFIERS):
            prefix.append((type(h), h.var))
            return pull(h.body)
        if isinstance(h, (And, Or)):
            return type(h)(pull(h.left), pull(h.right))
        return h
    matrix = pull(g)
    for cls, v in reversed(prefix):
        matrix = cls(v, matrix)
    return matrix


def is_prenex(f: Formula) -> bool:
    while isinstance(f, QUANTIFIERS):
        f = f.body
    return is_quantifier_free(f)


def _merge_clause(a, b):
    out = list(a)
    for lit in b:
        if lit not in out:
            out.append(lit)
    seen = set(out)
    if any(isinstance(l, Not) and l.body in seen for l in out):
        return None
    return out


def _prune(clauses):
    """Drop duplicate and subsumed clauses."""
    sets = []
    for c in sorted(clauses, key=len):
        s = frozenset(c)
        if not any(t <= s for _, t in sets):
            sets.append((c, s))
    return [c for c, _ in sets]


def dnf(f: Formula) -> list:
    """Disjunctive normal form of a quantifier-free formula as a list of
    literal lists. Literals are atoms or negated atoms; contradictory and
    subsumed clauses are dropped."""
    g = nnf(f)

    def go(h):
        if isinstance(h, Or):
            return _prune(go(h.left) + go(h.right))
        if isinstance(h, And):
            left, right = go(h.left), go(h.right)
            out = []
            for a in left:
                for b in right:
                    c = _merge_clause(a, b)
                    if c is not None:
                        out.append(c)
            return _prune(out)
        if h == TRUE:
            return [[]]
        if h == FALSE:
            return []
        return [[h]]
    return go(g)


# --- equality patterns -----------------------------------------------------

def set_partitions(n: int) -> Iterator[tuple]:
    """Restricted growth strings of length n, lexicographically."""
    if n == 0:
        yield ()
        return

    def rec(prefix, top):
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            yield from rec(prefix + [b], max(top, b))
    yield from rec([0], 0)


@dataclass(frozen=True)
class EqualityCase:
    pattern: tuple          # restricted growth string over the variables
    variables: tuple        # the variable names, in order
    display: Formula        # alpha with identified variables, plus distinctness
    guarded: Formula        # display plus x_j = x_rep equalities

    @property
    def representatives(self) -> tuple:
        seen = {}
        for v, b in zip(self.variables, self.pattern):
            seen.setdefault(b, v)
        return tuple(seen[b] for b in sorted(seen))

    @property
    def compact(self) -> Formula:
        """``display`` with the representatives renamed to the first
        variables, e.g. alpha(x0,x0,x2) becomes alpha(x0,x0,x1)."""
        reps = self.representatives
        return substitute(self.display, {r: Var(v) for r, v in zip(reps, self.variables) if r != v})


def expand_equality_cases(alpha: Formula, variables: Sequence[str] | None = None) -> list:
    """Split alpha by which of its free variables coincide.

    One case per partition of the variables; the disjunction of the
    ``guarded`` formulas is equivalent to alpha.
    """
    if variables is None:
        variables = sorted(free_vars(alpha), key=_natural_key)
    variables = tuple(variables)
    cases = []
    for pattern in set_partitions(len(variables)):
        reps = {}
        for v, b in zip(variables, pattern):
            reps.setdefault(b, v)
        mapping = {v: Var(reps[b]) for v, b in zip(variables, pattern) if reps[b] != v}
        body = substitute(alpha, mapping)
        rep_list = [reps[b] for b in sorted(reps)]
        distinct = [Not(Eq(Var(a), Var(b))) for a, b in itertools.combinations(rep_list, 2)]
        display = conj(body, *distinct) if distinct else body
        ident = [Eq(Var(v), Var(reps[b])) for v, b in zip(variables, pattern) if reps[b] != v]
        guarded = conj(display, *ident) if ident else display
        cases.append(EqualityCase(pattern, variables, display, guarded))
    return cases


def _natural_key(name: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name)]


# --- finite structures -----------------------------------------------------

@dataclass
class Structure:
    """A finite structure for brute-force model checking."""
    domain: Sequence
    relations: dict
    functions: dict = None
    constants: dict = None

    def value(self, t, env):
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, DomConst):
            return self.domain[t.index]
        if isinstance(t, Const):
            return self.constants[t.name]
        if isinstance(t, App):
            return self.functions[t.fn][tuple(self.value(a, env) for a in t.args)]
        raise TypeError(t)


def evaluate(f: Formula, m: Structure, env: Mapping | None = None) -> bool:
    env = dict(env or {})
    if isinstance(f, Rel):
        return tuple(m.value(a, env) for a in f.args) in m.relations[f.name]
    if isinstance(f, Eq):
        return m.value(f.left, env) == m.value(f.right, env)
    if isinstance(f, Not):
        return not evaluate(f.body, m, env)
    if isinstance(f, And):
        return evaluate(f.left, m, env) and evaluate(f.right, m, env)
    if isinstance(f, Or):
        return evaluate(f.left, m, env) or evaluate(f.right, m, env)
    if isinstance(f, Implies):
        return (not evaluate(f.left, m, env)) or evaluate(f.right, m, env)
    if isinstance(f, Forall):
        return all(evaluate(f.body, m, {**env, f.var: d}) for d in m.domain)
    if isinstance(f, Exists):
        return any(evaluate(f.body, m, {**env, f.var: d}) for d in m.domain)
    if f == TRUE:
        return True
    if f == FALSE:
        return False
    raise TypeError(f)


# --- text grammar ----------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message, pos):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(->)|(#\d+)|([A-Za-z_][A-Za-z0-9_']*)|(.))")
KEYWORDS = {"forall", "exists", "true", "false"}


def _tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        start = m.start(m.lastindex)
        out.append((m.group(m.lastindex), start))
        pos = m.end()
    out.append(("<eof>", len(text)))
    return out


class _Parser:
    def __init__(self, text, constants):
        self.toks = _tokenize(text)
        self.i = 0
        self.constants = constants

    def peek(self):
        return self.toks[self.i][0]

    def pos(self):
        return self.toks[self.i][1]

    def take(self, expected=None):
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def formula(self):
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self):
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok in ("forall", "exists"):
            self.take()
            var = self.take()
            if not _is_ident(var):
                raise ParseError(f"expected variable, found {var!r}", self.toks[self.i - 1][1])
            self.take(".")
            if self.peek() == "<eof>":
                raise ParseError("missing quantifier body", self.pos())
            body = self.formula()
            return (Forall if tok == "forall" else Exists)(var, body)
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        start = self.pos()
        left = self.term()
        if self.peek() == "=":
            self.take()
            return Eq(left, self.term())
        if self.peek() == "<":
            self.take()
            return Less(left, self.term())
        if isinstance(left, App):
            return Rel(left.fn, left.args)
        raise ParseError(f"expected atom, found term {left}", start)

    def term(self):
        tok, pos = self.toks[self.i]
        if tok.startswith("#"):
            self.take()
            return DomConst(int(tok[1:]))
        if not _is_ident(tok):
            if tok == "<eof>":
                raise ParseError("unexpected end of input", pos)
            raise ParseError(f"unexpected symbol {tok!r}", pos)
        self.take()
        if self.peek() == "(":
            self.take()
            args = [self.term()]
            while self.peek() == ",":
                self.take()
                args.append(self.term())
            self.take(")")
            return App(tok, tuple(args))
        if tok in self.constants:
            return Const(tok)
        return Var(tok)


def _is_ident(tok: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok)) and tok not in KEYWORDS


def parse(text: str, constants: Iterable[str] = ()) -> Formula:
    """Parse a formula. Identifiers listed in ``constants`` become named
    constants; other bare identifiers are variables."""
    p = _Parser(text, frozenset(constants))
    if p.peek() == "<eof>":
        raise ParseError("empty formula", 0)
    f = p.formula()
    if p.peek() != "<eof>":
        raise ParseError(f"unexpected {p.peek()!r}", p.pos())
    return f


# --- printing --------------------------------------------------------------

def show_term(t) -> str:
    return str(t)


def show(f: Formula, ctx: int = 0) -> str:
    if isinstance(f, QUANTIFIERS):
        kw = "forall" if isinstance(f, Forall) else "exists"
        s = f"{kw} {f.var}. {show(f.body, 0)}"
        return f"({s})" if ctx > 0 else s
    if isinstance(f, Implies):
        s = f"{show(f.left, 2)} -> {show(f.right, 1)}"
        return f"({s})" if ctx > 1 else s
    if isinstance(f, Or):
        s = f"{show(f.left, 2)} | {show(f.right, 3)}"
        return f"({s})" if ctx > 2 else s
    if isinstance(f, And):
        s = f"{show(f.left, 3)} & {show(f.right, 4)}"
        return f"({s})" if ctx > 3 else s
    if isinstance(f, Not):
        return "~" + show(f.body, 4)
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Rel):
        if f.name == "<" and len(f.args) == 2:
            return f"{f.args[0]} < {f.args[1]}"
        return f"{f.name}({', '.join(map(str, f.args))})"
    if f == TRUE:
        return "true"
    if f == FALSE:
        return "false"
    raise TypeError(f)
