"""Canonical JSON (de)serialization for examples and JSON-Lines datasets.

The canonical form is a fixed field order with compact separators; saving a
loaded document reproduces the normalized bytes exactly. Unknown fields are
rejected so schema drift fails loudly.
"""

from __future__ import annotations

import io
import json
from pathlib import Path
from typing import IO, Iterable, Union

from .errors import SchemaError
from .theory import Atom, Example, Label, Rule, Theory

DATASET_SCHEMA_VERSION = "1"

_ATOM_KEYS = {"subject", "predicate", "object", "sign"}
_RULE_KEYS = {"id", "antecedents", "consequent"}
_EXAMPLE_KEYS = {"facts", "rules", "goal", "label", "depth", "metadata"}

_SIGN_IN = {"pos": "pos", "neg": "neg"}


def atom_to_dict(atom: Atom) -> dict:
    return {
        "subject": atom.subject,
        "predicate": atom.predicate,
        "object": atom.object,
        "sign": atom.sign,
    }


def rule_to_dict(rule: Rule) -> dict:
    return {
        "id": rule.id,
        "antecedents": [atom_to_dict(a) for a in rule.antecedents],
        "consequent": atom_to_dict(rule.consequent),
    }


def example_to_dict(example: Example) -> dict:
    return {
        "facts": [atom_to_dict(a) for a in example.theory.facts],
        "rules": [rule_to_dict(r) for r in example.theory.rules],
        "goal": atom_to_dict(example.goal),
        "label": example.gold_label.value,
        "depth": example.gold_depth,
        "metadata": dict(example.theory.metadata),
    }


def _expect_mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise SchemaError(path, f"expected object, got {type(node).__name__}")
    return node


def _expect_keys(node: dict, allowed: set, path: str):
    for key in node:
        if key not in allowed:
            raise SchemaError(f"{path}.{key}", "unknown field")
    for key in allowed:
        if key not in node:
            raise SchemaError(f"{path}.{key}", "missing field")


def _expect_str(node, path: str) -> str:
    if not isinstance(node, str):
        raise SchemaError(path, f"expected string, got {type(node).__name__}")
    return node


def atom_from_dict(node, path: str) -> Atom:
    node = _expect_mapping(node, path)
    _expect_keys(node, _ATOM_KEYS, path)
    subject = _expect_str(node["subject"], f"{path}.subject")
    predicate = _expect_str(node["predicate"], f"{path}.predicate")
    obj = node["object"]
    if obj is not None and not isinstance(obj, str):
        raise SchemaError(f"{path}.object", "expected string or null")
    sign = _expect_str(node["sign"], f"{path}.sign")
    if sign not in _SIGN_IN:
        raise SchemaError(f"{path}.sign", f"expected 'pos' or 'neg', got {sign!r}")
    try:
        return Atom(subject, predicate, obj, sign)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def rule_from_dict(node, path: str) -> Rule:
    node = _expect_mapping(node, path)
    _expect_keys(node, _RULE_KEYS, path)
    rule_id = _expect_str(node["id"], f"{path}.id")
    ants_node = node["antecedents"]
    if not isinstance(ants_node, list):
        raise SchemaError(f"{path}.antecedents", "expected array")
    ants = tuple(
        atom_from_dict(a, f"{path}.antecedents[{i}]") for i, a in enumerate(ants_node)
    )
    consequent = atom_from_dict(node["consequent"], f"{path}.consequent")
    try:
        return Rule(rule_id, ants, consequent)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def example_from_dict(node, path: str = "$") -> Example:
    node = _expect_mapping(node, path)
    _expect_keys(node, _EXAMPLE_KEYS, path)
    facts_node = node["facts"]
    if not isinstance(facts_node, list):
        raise SchemaError(f"{path}.facts", "expected array")
    facts = tuple(atom_from_dict(a, f"{path}.facts[{i}]") for i, a in enumerate(facts_node))
    for i, fact in enumerate(facts):
        if not fact.is_ground:
            raise SchemaError(f"{path}.facts[{i}].subject", "facts must be ground")
    rules_node = node["rules"]
    if not isinstance(rules_node, list):
        raise SchemaError(f"{path}.rules", "expected array")
    rules = tuple(rule_from_dict(r, f"{path}.rules[{i}]") for i, r in enumerate(rules_node))
    goal = atom_from_dict(node["goal"], f"{path}.goal")
    if not goal.is_ground:
        raise SchemaError(f"{path}.goal.subject", "goal must be ground")
    label_value = _expect_str(node["label"], f"{path}.label")
    try:
        label = Label.from_value(label_value)
    except ValueError as exc:
        raise SchemaError(f"{path}.label", str(exc)) from exc
    depth = node["depth"]
    if depth is not None and not isinstance(depth, int):
        raise SchemaError(f"{path}.depth", "expected integer or null")
    metadata = node["metadata"]
    if not isinstance(metadata, dict):
        raise SchemaError(f"{path}.metadata", "expected object")
    try:
        theory = Theory(facts, rules, metadata)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc
    try:
        return Example(theory, goal, label, depth)
    except ValueError as exc:
        raise SchemaError(f"{path}.depth", str(exc)) from exc


def dumps_example(example: Example) -> str:
    """Canonical single-line JSON for one example."""
    return json.dumps(example_to_dict(example), separators=(",", ":"), ensure_ascii=False)


def loads_example(text: str, path: str = "$") -> Example:
    try:
        node = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(path, f"invalid JSON: {exc}") from exc
    return example_from_dict(node, path)


def save_example(example: Example, target: Union[str, Path, IO[str]]):
    if isinstance(target, (str, Path)):
        Path(target).write_text(dumps_example(example) + "\n", encoding="utf-8")
    else:
        target.write(dumps_example(example) + "\n")


def load_example(source: Union[str, Path, IO[str]]) -> Example:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    return loads_example(text.strip())


def save_dataset(examples: Iterable[Example], target: Union[str, Path, IO[str]]):
    """Write a JSON-Lines dataset, one canonical example per line."""
    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8") as handle:
            for example in examples:
                handle.write(dumps_example(example) + "\n")
    else:
        for example in examples:
            target.write(dumps_example(example) + "\n")


def load_dataset(source: Union[str, Path, IO[str]]) -> list[Example]:
    if isinstance(source, (str, Path)):
        handle: IO[str] = open(source, "r", encoding="utf-8")
        close = True
    else:
        handle = source
        close = False
    try:
        examples = []
        for lineno, line in enumerate(handle):
            line = line.strip()
            if not line:
                continue
            examples.append(loads_example(line, path=f"$[{lineno}]"))
        return examples
    finally:
        if close:
            handle.close()
