"""Proof traces: the tree of module invocations and sub-goal outcomes.

Every module invocation is recorded in order and tagged fresh or cache-hit;
rule branches carry the chosen rule id and one child node per attempted
sub-goal. Traces are replayable by the independent validator and export to
JSON (stable field names) and Graphviz DOT.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .serialize import atom_from_dict, atom_to_dict
from .templates import render_text
from .theory import Atom, Label

TRACE_SCHEMA_VERSION = "1"

OUTCOME_PROVED = "proved"
OUTCOME_DISPROVED = "disproved"
OUTCOME_UNKNOWN = "unknown"
OUTCOME_CYCLE_CUT = "cycle_cut"
OUTCOME_DEPTH_CUT = "depth_cut"

LABEL_OUTCOMES = {
    Label.PROVED: OUTCOME_PROVED,
    Label.DISPROVED: OUTCOME_DISPROVED,
    Label.UNKNOWN: OUTCOME_UNKNOWN,
}

MODULE_KINDS = ("fact_check", "rule_selection", "goal_decomposition", "sign_agreement")


@dataclass
class ModuleCall:
    module: str
    cache_hit: bool = False
    label: Optional[str] = None          # fact_check
    evidence: Optional[int] = None       # fact_check: index into theory.facts
    selected: Optional[list] = None      # rule_selection
    rule_id: Optional[str] = None        # decomposition / sign
    subgoals: Optional[int] = None       # decomposition
    agrees: Optional[bool] = None        # sign

    def to_dict(self) -> dict:
        out = {"module": self.module, "cache_hit": self.cache_hit}
        for key in ("label", "evidence", "selected", "rule_id", "subgoals", "agrees"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out

    @classmethod
    def from_dict(cls, node: dict) -> "ModuleCall":
        return cls(
            module=node["module"],
            cache_hit=node.get("cache_hit", False),
            label=node.get("label"),
            evidence=node.get("evidence"),
            selected=node.get("selected"),
            rule_id=node.get("rule_id"),
            subgoals=node.get("subgoals"),
            agrees=node.get("agrees"),
        )


@dataclass
class RuleBranch:
    rule_id: str
    children: list = field(default_factory=list)
    sign_agrees: Optional[bool] = None
    succeeded: bool = False

    def to_dict(self) -> dict:
        return {
            "rule_id": self.rule_id,
            "children": [child.to_dict() for child in self.children],
            "sign_agrees": self.sign_agrees,
            "succeeded": self.succeeded,
        }

    @classmethod
    def from_dict(cls, node: dict) -> "RuleBranch":
        return cls(
            rule_id=node["rule_id"],
            children=[TraceNode.from_dict(c) for c in node["children"]],
            sign_agrees=node.get("sign_agrees"),
            succeeded=node.get("succeeded", False),
        )


@dataclass
class TraceNode:
    goal: Atom
    depth: int
    module_calls: list = field(default_factory=list)
    children: list = field(default_factory=list)  # RuleBranch, in rerank order
    outcome: str = OUTCOME_UNKNOWN
    cached: bool = False  # whole-goal result served by the proof-level cache

    def label(self) -> Label:
        if self.outcome == OUTCOME_PROVED:
            return Label.PROVED
        if self.outcome == OUTCOME_DISPROVED:
            return Label.DISPROVED
        return Label.UNKNOWN

    def to_dict(self) -> dict:
        return {
            "goal": atom_to_dict(self.goal),
            "goal_text": render_text(self.goal),
            "depth": self.depth,
            "module_calls": [call.to_dict() for call in self.module_calls],
            "children": [branch.to_dict() for branch in self.children],
            "outcome": self.outcome,
            "cached": self.cached,
        }

    @classmethod
    def from_dict(cls, node: dict) -> "TraceNode":
        return cls(
            goal=atom_from_dict(node["goal"], "$.goal"),
            depth=node["depth"],
            module_calls=[ModuleCall.from_dict(c) for c in node.get("module_calls", [])],
            children=[RuleBranch.from_dict(b) for b in node.get("children", [])],
            outcome=node["outcome"],
            cached=node.get("cached", False),
        )

    def walk(self):
        """Yield nodes in exploration (pre-)order."""
        yield self
        for branch in self.children:
            for child in branch.children:
                yield from child.walk()


@dataclass
class ModuleCallStats:
    """Per-module fresh/cache-hit invocation counts plus LM-equivalent sub-calls.

    ``lm_equivalent`` counts the two-stage sub-module calls of fresh
    invocations individually (cache hits are free); totals are always the
    sum of the per-module parts.
    """

    fresh: dict = field(default_factory=lambda: {kind: 0 for kind in MODULE_KINDS})
    cached: dict = field(default_factory=lambda: {kind: 0 for kind in MODULE_KINDS})
    lm_equivalent: dict = field(default_factory=lambda: {kind: 0 for kind in MODULE_KINDS})
    proof_cache_hits: int = 0

    @property
    def fresh_total(self) -> int:
        return sum(self.fresh.values())

    @property
    def cached_total(self) -> int:
        return sum(self.cached.values())

    @property
    def lm_equivalent_calls(self) -> int:
        return sum(self.lm_equivalent.values())

    def to_dict(self) -> dict:
        return {
            "fresh": dict(self.fresh),
            "cached": dict(self.cached),
            "lm_equivalent": dict(self.lm_equivalent),
            "fresh_total": self.fresh_total,
            "cached_total": self.cached_total,
            "lm_equivalent_calls": self.lm_equivalent_calls,
            "proof_cache_hits": self.proof_cache_hits,
        }

    @classmethod
    def from_dict(cls, node: dict) -> "ModuleCallStats":
        return cls(
            fresh=dict(node["fresh"]),
            cached=dict(node["cached"]),
            lm_equivalent=dict(node["lm_equivalent"]),
            proof_cache_hits=node.get("proof_cache_hits", 0),
        )


@dataclass
class ProofTrace:
    root: TraceNode
    stats: ModuleCallStats

    def to_dict(self) -> dict:
        return {
            "schema_version": TRACE_SCHEMA_VERSION,
            "root": self.root.to_dict(),
            "stats": self.stats.to_dict(),
        }

    @classmethod
    def from_dict(cls, node: dict) -> "ProofTrace":
        return cls(
            root=TraceNode.from_dict(node["root"]),
            stats=ModuleCallStats.from_dict(node["stats"]),
        )

    def nodes(self):
        yield from self.root.walk()


_OUTCOME_FILL = {
    OUTCOME_PROVED: "palegreen",
    OUTCOME_DISPROVED: "lightpink",
    OUTCOME_UNKNOWN: "white",
    OUTCOME_CYCLE_CUT: "orange",
    OUTCOME_DEPTH_CUT: "lightgray",
}


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def trace_to_dot(trace: ProofTrace) -> str:
    """One DOT node per trace node; cache-served nodes are drawn in blue."""
    lines = ["digraph proof {", '  node [shape=box, fontname="Helvetica"];']
    counter = 0

    def emit(node: TraceNode) -> str:
        nonlocal counter
        name = f"n{counter}"
        counter += 1
        label = f"{render_text(node.goal)}\\n{node.outcome}"
        fill = "lightblue" if node.cached else _OUTCOME_FILL.get(node.outcome, "white")
        attrs = [f'label="{_dot_escape(label)}"', "style=filled", f'fillcolor="{fill}"']
        if any(call.cache_hit for call in node.module_calls):
            attrs.append('color="blue"')
            attrs.append("penwidth=2")
        lines.append(f"  {name} [{', '.join(attrs)}];")
        for branch in node.children:
            for child in branch.children:
                child_name = emit(child)
                lines.append(f'  {name} -> {child_name} [label="{_dot_escape(branch.rule_id)}"];')
        return name

    emit(trace.root)
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_trace(trace: ProofTrace, format: str = "json") -> bytes:
    if format == "json":
        return (json.dumps(trace.to_dict(), indent=2) + "\n").encode("utf-8")
    if format == "dot":
        return trace_to_dot(trace).encode("utf-8")
    raise ValueError(f"unknown trace format: {format!r}")
