"""Deterministic, LM-free implementation of the four reasoning modules.

This is the reference backend for oracle-checked testing and desk-scale
runs. Fact checking follows the two-stage select-then-verify loop: a
relevance ranking picks the top candidate fact, an exact verifier labels
it, and on Unknown the candidate is removed and the loop retries.

The relevance score is (subject match, predicate match) compared
lexicographically with ties broken by fact order. The score deliberately
excludes the object: two relational facts sharing the goal's subject and
predicate tie, so the verify-remove-retry loop is what disambiguates them,
and two trials suffice whenever at most one such decoy exists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..errors import UnificationError
from ..theory import Atom, Label, Rule
from .base import ModuleResult, ReasoningBackend


@dataclass(frozen=True)
class SymbolicConfig:
    fact_check_trials: int = 2

    def __post_init__(self):
        if self.fact_check_trials < 1:
            raise ValueError("fact_check_trials must be >= 1")


def consequent_unifies(rule: Rule, goal: Atom) -> bool:
    """Consequent predicate and object must match; subject is the variable or equal.

    Sign is deliberately ignored here; it is resolved by sign agreement.
    """
    cons = rule.consequent
    return (
        cons.predicate == goal.predicate
        and cons.object == goal.object
        and (cons.is_variable or cons.subject == goal.subject)
    )


class SymbolicBackend(ReasoningBackend):
    """Exact structural matching over atoms; stateless except a consequent memo."""

    shareable = False  # cheaply duplicable; harness builds one per worker

    def __init__(self, config: SymbolicConfig | None = None):
        super().__init__()
        self.config = config or SymbolicConfig()
        self._implications: dict[tuple[Rule, ...], dict[str, Atom]] = {}

    # -- fact check ---------------------------------------------------------

    def _relevance(self, goal: Atom, fact: Atom) -> tuple[int, int]:
        return (int(fact.subject == goal.subject), int(fact.predicate == goal.predicate))

    def _verify(self, fact: Atom, goal: Atom) -> Label:
        if fact.unsigned() != goal.unsigned():
            return Label.UNKNOWN
        return Label.PROVED if fact.sign == goal.sign else Label.DISPROVED

    def fact_check(self, goal: Atom, facts: Sequence[Atom]) -> ModuleResult:
        working = list(enumerate(facts))
        for _ in range(self.config.fact_check_trials):
            if not working:
                break
            self._charge(2)  # selection + verification
            best = max(working, key=lambda item: self._relevance(goal, item[1]))
            index, fact = best
            label = self._verify(fact, goal)
            if label is not Label.UNKNOWN:
                return ModuleResult(label, index)
            working.remove(best)
        return ModuleResult(Label.UNKNOWN, None)

    # -- rule selection -------------------------------------------------------

    def _consequents(self, rules: tuple[Rule, ...]) -> dict[str, Atom]:
        memo = self._implications.get(rules)
        if memo is None:
            self._charge(1)  # consequent extraction runs once per theory
            memo = {rule.id: rule.consequent for rule in rules}
            self._implications[rules] = memo
        return memo

    def rule_selection(self, goal: Atom, rules: Sequence[Rule]) -> list[str]:
        self._consequents(tuple(rules))
        self._charge(1)
        return [rule.id for rule in rules if consequent_unifies(rule, goal)]

    # -- goal decomposition ---------------------------------------------------

    def goal_decomposition(self, rule: Rule, goal: Atom) -> list[Atom]:
        if not consequent_unifies(rule, goal):
            raise UnificationError(
                f"rule {rule.id} does not unify with goal {goal}"
            )
        self._charge(1)
        ants, _ = rule.substitute(goal.subject)
        return list(ants)

    # -- sign agreement ---------------------------------------------------------

    def sign_agreement(self, rule: Rule, goal: Atom) -> bool:
        self._charge(1)
        return rule.consequent.sign == goal.sign
