"""Core data model: signed atoms, rules, theories, and labeled examples.

All types are immutable after construction and safe to share across
concurrent workers. Negation is a polarity flag on the atom, never a
separate predicate, so sign checks are plain field comparisons.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Mapping, Optional

#: The single shared rule variable ("someone" / "they" in rendered text).
VAR = "?x"

POS = "pos"
NEG = "neg"

_SUBJECT_RE = re.compile(r"^[A-Z][a-z]*$")
_TOKEN_RE = re.compile(r"^[a-z]+$")

# Tokens that would collide with template keywords and break round-tripping.
RESERVED_TOKENS = frozenset(
    {
        "is", "not", "the", "and", "then", "they", "are", "someone", "who",
        "does", "do", "if", "it", "a", "truth", "that", "will", "always",
        "as", "well", "whenever", "be",
    }
)
RESERVED_SUBJECTS = frozenset({"If", "It", "Fact", "Rule", "Question", "Inference", "Example"})


class Label(Enum):
    """Tri-state outcome of a proof attempt."""

    PROVED = "proved"
    DISPROVED = "disproved"
    UNKNOWN = "unknown"

    @classmethod
    def from_value(cls, value: str) -> "Label":
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"not a label: {value!r}")


@dataclass(frozen=True)
class Atom:
    """A signed, possibly relational proposition.

    ``subject`` is a constant entity name or :data:`VAR`; ``object`` is
    present for relational atoms and absent for attributive ones; ``sign``
    is ``"pos"`` or ``"neg"``.
    """

    subject: str
    predicate: str
    object: Optional[str] = None
    sign: str = POS

    def __post_init__(self):
        if self.subject != VAR:
            if not _SUBJECT_RE.match(self.subject):
                raise ValueError(f"subject must be a capitalized name or {VAR!r}: {self.subject!r}")
            if self.subject in RESERVED_SUBJECTS:
                raise ValueError(f"reserved subject: {self.subject!r}")
        if not _TOKEN_RE.match(self.predicate) or self.predicate in RESERVED_TOKENS:
            raise ValueError(f"predicate must be a nonempty lowercase token: {self.predicate!r}")
        if self.object is not None and (
            not _TOKEN_RE.match(self.object) or self.object in RESERVED_TOKENS
        ):
            raise ValueError(f"object must be a lowercase token when present: {self.object!r}")
        if self.sign not in (POS, NEG):
            raise ValueError(f"sign must be 'pos' or 'neg': {self.sign!r}")

    @property
    def is_variable(self) -> bool:
        return self.subject == VAR

    @property
    def is_ground(self) -> bool:
        return self.subject != VAR

    @property
    def is_relational(self) -> bool:
        return self.object is not None

    @property
    def positive(self) -> bool:
        return self.sign == POS

    def negate(self) -> "Atom":
        return replace(self, sign=NEG if self.sign == POS else POS)

    def with_subject(self, subject: str) -> "Atom":
        return replace(self, subject=subject)

    def unsigned(self) -> tuple:
        return (self.subject, self.predicate, self.object)


@dataclass(frozen=True)
class Rule:
    """An implication from a conjunction of antecedent atoms to one consequent."""

    id: str
    antecedents: tuple[Atom, ...]
    consequent: Atom

    def __post_init__(self):
        if not self.id:
            raise ValueError("rule id must be nonempty")
        ants = tuple(self.antecedents)
        object.__setattr__(self, "antecedents", ants)
        if not ants:
            raise ValueError(f"rule {self.id}: antecedent list must be nonempty")
        if len(set(ants)) != len(ants):
            raise ValueError(f"rule {self.id}: antecedents must be pairwise distinct")
        if any(a.is_variable for a in ants) and not self.consequent.is_variable:
            raise ValueError(
                f"rule {self.id}: a variable antecedent requires the variable consequent"
            )
        # A variable consequent with all-constant antecedents has no binding
        # under rule application; reject it so the closure stays total.
        if self.consequent.is_variable and not any(a.is_variable for a in ants):
            raise ValueError(
                f"rule {self.id}: variable consequent requires a variable antecedent"
            )

    @property
    def arity(self) -> int:
        return len(self.antecedents)

    def substitute(self, subject: str) -> tuple[tuple[Atom, ...], Atom]:
        """Instantiate the rule variable with ``subject``; constants pass through."""
        ants = tuple(a.with_subject(subject) if a.is_variable else a for a in self.antecedents)
        cons = self.consequent.with_subject(subject) if self.consequent.is_variable else self.consequent
        return ants, cons


@dataclass(frozen=True, eq=False)
class Theory:
    """A fact set and rule set, with free-form metadata (source, seed, depth label)."""

    facts: tuple[Atom, ...]
    rules: tuple[Rule, ...]
    metadata: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "facts", tuple(self.facts))
        object.__setattr__(self, "rules", tuple(self.rules))
        for fact in self.facts:
            if not fact.is_ground:
                raise ValueError(f"facts must be ground: {fact}")
        if len(set(self.facts)) != len(self.facts):
            raise ValueError("duplicate fact")
        signed = set(self.facts)
        for fact in self.facts:
            if fact.negate() in signed:
                raise ValueError(f"fact present in both polarities: {fact.unsigned()}")
        ids = [r.id for r in self.rules]
        if len(set(ids)) != len(ids):
            raise ValueError("rule ids must be unique within a theory")

    @cached_property
    def rules_by_id(self) -> dict:
        return {r.id: r for r in self.rules}

    @cached_property
    def subjects(self) -> tuple[str, ...]:
        seen = []
        for atom in self.facts:
            if atom.subject not in seen:
                seen.append(atom.subject)
        for rule in self.rules:
            for atom in (*rule.antecedents, rule.consequent):
                if atom.is_ground and atom.subject not in seen:
                    seen.append(atom.subject)
        return tuple(seen)


@dataclass(frozen=True)
class Example:
    """A (theory, goal) pair with its gold label and minimal proof depth."""

    theory: Theory
    goal: Atom
    gold_label: Label
    gold_depth: Optional[int] = None

    def __post_init__(self):
        if not self.goal.is_ground:
            raise ValueError("goal must be ground")
        if self.gold_label is Label.UNKNOWN:
            if self.gold_depth is not None:
                raise ValueError("unknown examples carry no depth")
        else:
            if self.gold_depth is None or self.gold_depth < 0:
                raise ValueError("proved/disproved examples need a non-negative depth")
