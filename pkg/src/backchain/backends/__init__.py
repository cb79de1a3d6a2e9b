"""Reasoning-module backends: the deterministic symbolic reference and the LM client."""

from .base import ModuleResult, ReasoningBackend
from .symbolic import SymbolicBackend, SymbolicConfig

__all__ = ["ModuleResult", "ReasoningBackend", "SymbolicBackend", "SymbolicConfig"]
