"""Atomic-diagram oracles and budgeted oracle functionals.

A functional only sees its oracle through ``ask(code)``.  Every run has a
step budget and records the codes it queried, so the use of a converging
run (largest queried code + 1) is always available.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .coding import Signature, atom_code, decode_atomic
from .logic import Eq


class Timeout(Exception):
    """The step budget ran out."""


class NeedMore(Exception):
    """A finite oracle was asked beyond its length."""

    def __init__(self, code):
        super().__init__(f"oracle undefined at {code}")
        self.code = code


class Steps:
    def __init__(self, budget: int):
        self.budget = budget
        self.used = 0

    def tick(self, n: int = 1):
        self.used += n
        if self.used > self.budget:
            raise Timeout(self.used)

    @property
    def left(self) -> int:
        return self.budget - self.used


class Oracle:
    signature: Signature

    def ask(self, code: int) -> int:
        raise NotImplementedError


class PresentationOracle(Oracle):
    """Delta(P) as an oracle."""

    def __init__(self, P):
        self.P = P
        self.signature = P.signature

    def ask(self, code):
        return self.P.query(code)


class PrefixOracle(Oracle):
    """A finite string sigma; queries at or beyond len(sigma) diverge."""

    def __init__(self, bits: str, signature: Signature):
        self.bits = bits
        self.signature = signature

    def ask(self, code):
        if code >= len(self.bits):
            raise NeedMore(code)
        return int(self.bits[code])


class ExpandedOracle(Oracle):
    """An oracle for the expansion of ``base`` naming element z by a new
    unary relation (the graph of a constant)."""

    def __init__(self, base: Oracle, name: str, z: int):
        self.base = base
        self.name = name
        self.z = z
        sig = base.signature
        self.signature = Signature(sig.relations + ((name, 1),), sig.functions,
                                   sig.constants + (name,))

    def ask(self, code):
        atom = decode_atomic(code, self.signature)
        if isinstance(atom, Eq):
            return 0
        args = tuple(a.index for a in atom.args)
        if atom.name == self.name:
            return int(args[0] == self.z)
        return self.base.ask(atom_code(self.base.signature, atom.name, args))


class LoggingOracle(Oracle):
    """Records queries and charges one step per new query."""

    def __init__(self, inner: Oracle, steps: Steps):
        self.inner = inner
        self.steps = steps
        self.signature = inner.signature
        self.log = []
        self._cache = {}

    def ask(self, code):
        if code in self._cache:
            return self._cache[code]
        self.steps.tick()
        self.log.append(code)
        bit = self.inner.ask(code)
        self._cache[code] = bit
        return bit


@dataclass
class Converge:
    bit: int
    use: int
    log: list = field(default_factory=list)
    steps: int = 0
    detail: object = None
    converged = True


@dataclass
class Diverge:
    reason: str
    log: list = field(default_factory=list)
    steps: int = 0
    converged = False

    bit = None


@dataclass(frozen=True)
class Functional:
    """A named, deterministic oracle program.

    ``program(oracle, input, steps)`` returns a bit (or a pair of bit and
    detail object); it may raise Timeout, NeedMore or Diverged.
    """
    name: str
    program: Callable
    description: str = ""

    def run(self, oracle: Oracle, n: int, budget: int):
        steps = Steps(budget)
        logged = LoggingOracle(oracle, steps)
        try:
            out = self.program(logged, n, steps)
        except Timeout:
            return Diverge("budget", logged.log, steps.used)
        except NeedMore:
            return Diverge("use", logged.log, steps.used)
        except Diverged:
            return Diverge("program", logged.log, steps.used)
        detail = None
        if isinstance(out, tuple):
            out, detail = out
        use = max(logged.log) + 1 if logged.log else 0
        return Converge(int(out), use, logged.log, steps.used, detail)

    def run_on_prefix(self, bits: str, signature: Signature, n: int, budget: int):
        return self.run(PrefixOracle(bits, signature), n, budget)


class Diverged(Exception):
    """Raised by programs that never halt (decided without looping)."""
