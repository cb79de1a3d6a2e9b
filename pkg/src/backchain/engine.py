"""Depth-limited backward-chaining proof search over a reasoning backend.

The search checks the goal against the facts first, then decomposes it
through rules whose consequents unify with it, trying shorter rules first
and requiring every sub-goal of a rule to be proved (conjunction). Sign
agreement between the winning rule's consequent and the goal decides
Proved versus Disproved; exhausting rules yields Unknown.

Two caches cooperate per proof session: a proof-level cache with
depth-monotone reuse rules, and per-module memoization keyed on the
semantic inputs of each module. Per-path cycle detection cuts branches
whose sub-goal exactly equals an open ancestor goal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .backends.base import ModuleResult, ReasoningBackend
from .errors import BackendError
from .theory import Atom, Label, Rule, Theory
from .trace import (
    LABEL_OUTCOMES,
    OUTCOME_CYCLE_CUT,
    OUTCOME_DEPTH_CUT,
    ModuleCall,
    ModuleCallStats,
    ProofTrace,
    RuleBranch,
    TraceNode,
)

GLOBAL_DEPTH_BOUND = 10


@dataclass(frozen=True)
class EngineConfig:
    caching: bool = True
    cycle_check: bool = True
    depth_bound: int = GLOBAL_DEPTH_BOUND


@dataclass(frozen=True)
class ProveRequest:
    theory: Theory
    goal: Atom
    max_depth: int = 5

    def __post_init__(self):
        if not self.goal.is_ground:
            raise ValueError("goal must be ground")
        if self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")


def rerank(rules: Sequence[Rule]) -> list[Rule]:
    """Shorter rules first; equal antecedent counts keep their input order."""
    return sorted(rules, key=lambda rule: rule.arity)


def cycle_check(goal: Atom, path: Sequence[Atom]) -> bool:
    """True iff the goal exactly equals an open goal on the current path.

    Matching is exact on (subject, predicate, object, sign); a goal equal to
    an ancestor's negation does not count.
    """
    return goal in path


@dataclass
class CacheEntry:
    goal: Atom
    label: Label
    depth: int


class ProofCache:
    """Depth-aware result cache scoped to one (theory, proof session).

    A Proved/Disproved entry computed at depth d answers any query with
    depth >= d; an Unknown entry computed at depth d answers any query
    with depth <= d.
    """

    def __init__(self):
        self._decided: dict[Atom, CacheEntry] = {}
        self._unknown: dict[Atom, CacheEntry] = {}

    def store(self, goal: Atom, label: Label, depth: int):
        if label is Label.UNKNOWN:
            held = self._unknown.get(goal)
            if held is None or held.depth < depth:
                self._unknown[goal] = CacheEntry(goal, label, depth)
        else:
            held = self._decided.get(goal)
            if held is None or held.depth > depth:
                self._decided[goal] = CacheEntry(goal, label, depth)

    def lookup(self, goal: Atom, depth: int) -> Optional[Label]:
        held = self._decided.get(goal)
        if held is not None and held.depth <= depth:
            return held.label
        held = self._unknown.get(goal)
        if held is not None and held.depth >= depth:
            return Label.UNKNOWN
        return None


class _Session:
    """State for a single prove() call: path stack, caches, stats, trace."""

    def __init__(self, theory: Theory, backend: ReasoningBackend, config: EngineConfig):
        self.theory = theory
        self.backend = backend
        self.config = config
        self.stats = ModuleCallStats()
        self.proof_cache = ProofCache()
        self.root_node: Optional[TraceNode] = None
        self.fact_check_memo: dict = {}
        self.rule_selection_memo: dict = {}
        self.decomposition_memo: dict = {}
        self.sign_memo: dict = {}

    # -- module invocation with memoization and accounting -------------------

    def _invoke(self, kind: str, memo: dict, key, compute):
        if self.config.caching and key in memo:
            self.stats.cached[kind] += 1
            return memo[key], True
        self.backend.drain_subcalls()
        try:
            value = compute()
        except BackendError:
            raise
        except Exception as exc:
            raise BackendError(f"{kind} failed: {exc}") from exc
        self.stats.fresh[kind] += 1
        self.stats.lm_equivalent[kind] += self.backend.drain_subcalls()
        if self.config.caching:
            memo[key] = value
        return value, False

    def fact_check(self, goal: Atom) -> tuple[ModuleResult, bool]:
        return self._invoke(
            "fact_check",
            self.fact_check_memo,
            goal,
            lambda: self.backend.fact_check(goal, self.theory.facts),
        )

    def rule_selection(self, goal: Atom) -> tuple[list[str], bool]:
        # Selection ignores sign, so the memo key is the unsigned goal.
        return self._invoke(
            "rule_selection",
            self.rule_selection_memo,
            goal.unsigned(),
            lambda: self._checked_selection(goal),
        )

    def _checked_selection(self, goal: Atom) -> list[str]:
        ids = self.backend.rule_selection(goal, self.theory.rules)
        known = [rule.id for rule in self.theory.rules]
        order = {rule_id: i for i, rule_id in enumerate(known)}
        if any(rule_id not in order for rule_id in ids):
            raise BackendError(f"rule_selection returned unknown ids: {ids}")
        if [order[i] for i in ids] != sorted(order[i] for i in ids):
            raise BackendError("rule_selection must preserve input order")
        return ids

    def goal_decomposition(self, rule: Rule, goal: Atom) -> tuple[list[Atom], bool]:
        # Decomposition depends only on the rule and the goal's subject.
        return self._invoke(
            "goal_decomposition",
            self.decomposition_memo,
            (rule.id, goal.subject),
            lambda: self.backend.goal_decomposition(rule, goal),
        )

    def sign_agreement(self, rule: Rule, goal: Atom) -> tuple[bool, bool]:
        return self._invoke(
            "sign_agreement",
            self.sign_memo,
            (rule.id, goal.sign),
            lambda: self.backend.sign_agreement(rule, goal),
        )


def _record_fact_check(node: TraceNode, result: ModuleResult, cache_hit: bool):
    node.module_calls.append(
        ModuleCall(
            module="fact_check",
            cache_hit=cache_hit,
            label=result.label.value,
            evidence=result.evidence,
        )
    )


def _prove(session: _Session, goal: Atom, depth: int, path: tuple[Atom, ...]):
    """Returns (label, trace node, taint set).

    The taint set holds ancestor goals whose presence on the path cut a
    branch somewhere below; results tainted by an ancestor are
    path-dependent and must not enter the proof cache.
    """
    node = TraceNode(goal=goal, depth=depth)
    if not path:
        session.root_node = node

    if session.config.cycle_check and cycle_check(goal, path):
        node.outcome = OUTCOME_CYCLE_CUT
        return Label.UNKNOWN, node, {goal}

    if session.config.caching:
        hit = session.proof_cache.lookup(goal, depth)
        if hit is not None:
            node.outcome = LABEL_OUTCOMES[hit]
            node.cached = True
            session.stats.proof_cache_hits += 1
            return hit, node, set()

    result, cache_hit = session.fact_check(goal)
    _record_fact_check(node, result, cache_hit)
    if result.label is not Label.UNKNOWN:
        node.outcome = LABEL_OUTCOMES[result.label]
        if session.config.caching:
            session.proof_cache.store(goal, result.label, depth)
        return result.label, node, set()

    if depth == 0:
        node.outcome = OUTCOME_DEPTH_CUT
        if session.config.caching:
            session.proof_cache.store(goal, Label.UNKNOWN, 0)
        return Label.UNKNOWN, node, set()

    selected_ids, cache_hit = session.rule_selection(goal)
    node.module_calls.append(
        ModuleCall(module="rule_selection", cache_hit=cache_hit, selected=list(selected_ids))
    )

    rules = [session.theory.rules_by_id[rule_id] for rule_id in selected_ids]
    child_path = path + (goal,)
    taint: set[Atom] = set()

    for rule in rerank(rules):
        subgoals, cache_hit = session.goal_decomposition(rule, goal)
        node.module_calls.append(
            ModuleCall(
                module="goal_decomposition",
                cache_hit=cache_hit,
                rule_id=rule.id,
                subgoals=len(subgoals),
            )
        )
        branch = RuleBranch(rule_id=rule.id)
        node.children.append(branch)
        all_proved = True
        for subgoal in subgoals:
            label, child, child_taint = _prove(session, subgoal, depth - 1, child_path)
            branch.children.append(child)
            taint |= child_taint
            if label is not Label.PROVED:
                all_proved = False
                break  # conjunction: later sub-goals are not attempted
        if not all_proved:
            continue
        agrees, cache_hit = session.sign_agreement(rule, goal)
        node.module_calls.append(
            ModuleCall(
                module="sign_agreement", cache_hit=cache_hit, rule_id=rule.id, agrees=agrees
            )
        )
        branch.sign_agrees = agrees
        branch.succeeded = True
        label = Label.PROVED if agrees else Label.DISPROVED
        node.outcome = LABEL_OUTCOMES[label]
        taint.discard(goal)
        if session.config.caching and not taint:
            session.proof_cache.store(goal, label, depth)
        return label, node, taint

    node.outcome = LABEL_OUTCOMES[Label.UNKNOWN]
    taint.discard(goal)
    if session.config.caching and not taint:
        session.proof_cache.store(goal, Label.UNKNOWN, depth)
    return Label.UNKNOWN, node, taint


def prove(
    request: ProveRequest,
    backend: ReasoningBackend,
    config: EngineConfig | None = None,
) -> tuple[Label, ProofTrace]:
    """Run the backward-chaining search for one goal.

    Raises :class:`BackendError` (with the partial trace attached) if the
    backend fails mid-proof; the depth cut is not an error and yields
    Unknown.
    """
    config = config or EngineConfig()
    if request.max_depth > config.depth_bound:
        raise ValueError(
            f"max_depth {request.max_depth} exceeds the configured bound {config.depth_bound}"
        )
    session = _Session(request.theory, backend, config)
    try:
        label, root, _ = _prove(session, request.goal, request.max_depth, ())
    except BackendError as exc:
        if exc.partial_trace is None:
            partial_root = session.root_node or TraceNode(
                goal=request.goal, depth=request.max_depth
            )
            exc.partial_trace = ProofTrace(root=partial_root, stats=session.stats)
        raise
    return label, ProofTrace(root=root, stats=session.stats)


def prove_goal(
    theory: Theory,
    goal: Atom,
    backend: ReasoningBackend,
    max_depth: int = 5,
    caching: bool = True,
    cycle_check: bool = True,
) -> tuple[Label, ProofTrace]:
    """Convenience wrapper building the request and config in one call."""
    return prove(
        ProveRequest(theory, goal, max_depth),
        backend,
        EngineConfig(caching=caching, cycle_check=cycle_check),
    )
