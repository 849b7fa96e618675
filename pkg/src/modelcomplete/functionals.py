"""Named oracle functionals: the uniform deciders and adversarial examples."""
from __future__ import annotations

from .decider import (
    always_diverge_program, as_functional, atomic_reader_program,
    nonuniform_program, zero_anchored_program,
)
from .oracle import Functional
from .theories import registry

ZERO_ANCHORED = Functional(
    "zero-anchored", zero_anchored_program,
    "decides copies of (omega,S) assuming element 0 is the non-successor")
ALWAYS_DIVERGE = Functional(
    "always-diverge", always_diverge_program, "never converges")
NONUNIFORM = Functional(
    "nonuniform", nonuniform_program,
    "locates the non-successor by window search, then decides (omega,S,0)")
ATOMIC_READER = Functional(
    "atomic-reader", atomic_reader_program,
    "reads quantifier-free sentences off the oracle, diverges otherwise")


def functional_registry() -> dict:
    out = {f.name: f for f in (ZERO_ANCHORED, ALWAYS_DIVERGE, NONUNIFORM, ATOMIC_READER)}
    for T in registry():
        if T.is_model_complete:
            g = as_functional(T)
            out[g.name] = g
    return out


def get_functional(name: str) -> Functional:
    reg = functional_registry()
    try:
        return reg[name]
    except KeyError:
        raise KeyError(f"unknown functional {name!r}; known: {sorted(reg)}") from None
