"""The four-capability backend contract shared by the symbolic and LM backends."""

from __future__ import annotations

import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence

from ..theory import Atom, Label, Rule


@dataclass(frozen=True)
class ModuleResult:
    """Outcome of a fact check: a label plus the entailing/contradicting fact index."""

    label: Label
    evidence: Optional[int] = None

    def __post_init__(self):
        if (self.label is Label.UNKNOWN) != (self.evidence is None):
            raise ValueError("evidence present iff label is not Unknown")


class ReasoningBackend(ABC):
    """Deterministic provider of the four reasoning capabilities.

    ``shareable`` declares the concurrency contract: a shareable backend may
    serve concurrent proofs; a non-shareable one is cheaply duplicable and
    the harness instantiates one per worker.

    Sub-call accounting is thread-local: each capability charges the number
    of LM-equivalent sub-module calls it performed, and the engine drains
    the tally after every fresh invocation.
    """

    shareable = False

    def __init__(self):
        self._tally = threading.local()

    def _charge(self, n: int = 1):
        self._tally.count = getattr(self._tally, "count", 0) + n

    def drain_subcalls(self) -> int:
        count = getattr(self._tally, "count", 0)
        self._tally.count = 0
        return count

    @abstractmethod
    def fact_check(self, goal: Atom, facts: Sequence[Atom]) -> ModuleResult:
        """Decide the goal directly from the facts, or Unknown."""

    @abstractmethod
    def rule_selection(self, goal: Atom, rules: Sequence[Rule]) -> list[str]:
        """Ids of rules whose consequent unifies with the goal, in input order."""

    @abstractmethod
    def goal_decomposition(self, rule: Rule, goal: Atom) -> list[Atom]:
        """Sub-goals obtained by instantiating the rule's antecedents for the goal."""

    @abstractmethod
    def sign_agreement(self, rule: Rule, goal: Atom) -> bool:
        """Whether the rule's consequent polarity agrees with the goal's."""
