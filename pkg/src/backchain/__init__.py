"""Backward-chaining deductive reasoning over fact/rule theories.

The package bundles the proof engine, a deterministic symbolic backend and
a remote-LM backend for its four reasoning modules, a forward-chaining
oracle and baseline, a synthetic theory generator with perturbation, and
an evaluation harness with independent proof-trace validation.
"""

from .engine import EngineConfig, ProofCache, ProveRequest, cycle_check, prove, prove_goal, rerank
from .theory import VAR, Atom, Example, Label, Rule, Theory

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "EngineConfig",
    "Example",
    "Label",
    "ProofCache",
    "ProveRequest",
    "Rule",
    "Theory",
    "VAR",
    "cycle_check",
    "prove",
    "prove_goal",
    "rerank",
    "__version__",
]
