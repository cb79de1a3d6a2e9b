"""Forward chaining: exhaustive closure (the label oracle) and a step-budgeted
iterative forward prover with call counting and redundancy accounting.

The closure applies every rule to every subject instantiation until no new
atom appears, tracking each atom's minimal derivation depth (facts sit at
depth 0; a rule application lands at one plus the maximum antecedent
depth). Negation is open-world: negative atoms derive only from negative
facts or negative consequents, and absence implies nothing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Optional

from .errors import InconsistencyError
from .theory import Atom, Label, Rule, Theory


@dataclass
class Closure:
    """Map from derived atom to its minimal derivation depth."""

    depths: dict = field(default_factory=dict)

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.depths

    def depth(self, atom: Atom) -> Optional[int]:
        return self.depths.get(atom)

    def atoms(self):
        return self.depths.keys()


def _instantiations(rule: Rule, subjects):
    if rule.consequent.is_variable or any(a.is_variable for a in rule.antecedents):
        for subject in subjects:
            yield rule.substitute(subject)
    else:
        yield rule.antecedents, rule.consequent


def closure(theory: Theory) -> Closure:
    """Fixpoint of exhaustive rule application with minimal-depth tracking."""
    depths: dict[Atom, int] = {fact: 0 for fact in theory.facts}
    subjects = theory.subjects
    changed = True
    while changed:
        changed = False
        for rule in theory.rules:
            for ants, cons in _instantiations(rule, subjects):
                if all(a in depths for a in ants):
                    depth = 1 + max(depths[a] for a in ants)
                    held = depths.get(cons)
                    if held is None or held > depth:
                        depths[cons] = depth
                        changed = True
    for atom in depths:
        if atom.negate() in depths:
            raise InconsistencyError(
                f"theory derives both polarities of {atom.unsigned()}", atom=atom
            )
    return Closure(depths)


def oracle_label(theory: Theory, goal: Atom, computed: Closure | None = None) -> Label:
    """Proved if the goal is derivable, Disproved if its negation is, else Unknown."""
    cl = computed if computed is not None else closure(theory)
    if goal in cl:
        return Label.PROVED
    if goal.negate() in cl:
        return Label.DISPROVED
    return Label.UNKNOWN


def minimal_support(theory: Theory, cl: Closure, atom: Atom) -> set:
    """Atoms participating in some minimal-depth derivation of ``atom``."""
    if atom not in cl:
        return set()
    subjects = theory.subjects
    support = set()
    stack = [atom]
    while stack:
        current = stack.pop()
        if current in support:
            continue
        support.add(current)
        target_depth = cl.depths[current]
        if target_depth == 0:
            continue
        for rule in theory.rules:
            for ants, cons in _instantiations(rule, subjects):
                if cons != current:
                    continue
                if not all(a in cl for a in ants):
                    continue
                if 1 + max(cl.depths[a] for a in ants) == target_depth:
                    stack.extend(ants)
    return support


def goal_witness(theory: Theory, cl: Closure, goal: Atom) -> Optional[Atom]:
    """The derivable atom that settles the goal, if any."""
    if goal in cl:
        return goal
    if goal.negate() in cl:
        return goal.negate()
    return None


@dataclass
class ForwardRunStats:
    """Accounting for one forward-prover run."""

    steps: int = 0
    inferences: list = field(default_factory=list)
    module_calls: int = 0
    per_step_on_path: list = field(default_factory=list)

    @property
    def unique_inferences(self) -> int:
        return len(set(self.inferences))

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "module_calls": self.module_calls,
            "unique_inferences": self.unique_inferences,
            "on_path_flags": list(self.per_step_on_path),
        }


def _relevant_predicates(theory: Theory, goal: Atom) -> set:
    """Predicates of the goal plus antecedents of goal-reaching rules, to a fixpoint."""
    relevant = {goal.predicate}
    changed = True
    while changed:
        changed = False
        for rule in theory.rules:
            if rule.consequent.predicate in relevant:
                for atom in rule.antecedents:
                    if atom.predicate not in relevant:
                        relevant.add(atom.predicate)
                        changed = True
    return relevant


def _applicable(theory: Theory, derived: dict):
    """All (rule, antecedents, conclusion) applications over the current atoms."""
    out = []
    subjects = theory.subjects
    for rule in theory.rules:
        for ants, cons in _instantiations(rule, subjects):
            if all(a in derived for a in ants):
                out.append((rule, ants, cons))
    return out


def si_prove(
    theory: Theory,
    goal: Atom,
    max_steps: int,
    policy: str = "deterministic",
    seed: int = 0,
    epsilon: float = 1.0,
) -> tuple[Label, ForwardRunStats]:
    """Iterative select-then-infer forward proving with a fixed step budget.

    Each step enumerates the applicable rule applications, picks one, and
    appends its conclusion to the theory; selection plus inference cost two
    module calls per step. The deterministic policy picks the first novel
    conclusion in goal-relevance order and stops early at fixpoint; the
    noisy policy picks uniformly at random with probability ``epsilon``
    (and may re-derive known atoms). After the budget is spent the label is
    read off the derived-so-far atoms.
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    if policy not in ("deterministic", "noisy"):
        raise ValueError(f"unknown policy: {policy!r}")

    cl = closure(theory)
    witness = goal_witness(theory, cl, goal)
    on_path = minimal_support(theory, cl, witness) if witness is not None else set()

    rng = random.Random(seed)
    relevant = _relevant_predicates(theory, goal)
    derived = {fact: 0 for fact in theory.facts}
    stats = ForwardRunStats()

    for _ in range(max_steps):
        applications = _applicable(theory, derived)
        novel = [(i, app) for i, app in enumerate(applications) if app[2] not in derived]
        pick = None
        if policy == "noisy" and applications and rng.random() < epsilon:
            pick = applications[rng.randrange(len(applications))]
        elif novel:
            pick = min(
                novel,
                key=lambda item: (0 if item[1][2].predicate in relevant else 1, item[0]),
            )[1]
        if pick is None:
            break  # fixpoint: nothing new to infer
        _, ants, cons = pick
        stats.steps += 1
        stats.module_calls += 2  # selection + inference
        stats.inferences.append(cons)
        stats.per_step_on_path.append(cons in on_path)
        if cons not in derived:
            derived[cons] = 1 + max(derived[a] for a in ants)

    if goal in derived:
        label = Label.PROVED
    elif goal.negate() in derived:
        label = Label.DISPROVED
    else:
        label = Label.UNKNOWN
    return label, stats
