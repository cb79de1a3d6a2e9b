"""Templatic text layer: renders atoms and rules to sentences and parses them back.

The canonical interchange format is structured JSON; text is a presentation
layer. Two template packs are registered: ``v1`` (the default) and ``v2``
(an alternate phrasing pack used for template-perturbation experiments).
Rendering is deterministic and bit-exact per pack; ``parse_text`` is the
exact inverse of ``render_text`` on every renderable item.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .theory import NEG, POS, VAR, Atom, Rule

_ATTR_NEG = re.compile(r"^([A-Z][a-z]*) is not ([a-z]+)$")
_ATTR_POS = re.compile(r"^([A-Z][a-z]*) is ([a-z]+)$")
_REL_NEG = re.compile(r"^([A-Z][a-z]*) does not ([a-z]+) the ([a-z]+)$")
_REL_POS = re.compile(r"^([A-Z][a-z]*) ([a-z]+) the ([a-z]+)$")

_VP_ATTR_NEG = re.compile(r"^is not ([a-z]+)$")
_VP_ATTR_POS = re.compile(r"^is ([a-z]+)$")
_VP_REL_NEG = re.compile(r"^does not ([a-z]+) the ([a-z]+)$")
_VP_REL_POS = re.compile(r"^([a-z]+) the ([a-z]+)$")
_BARE_NEG = re.compile(r"^not ([a-z]+)$")
_BARE_POS = re.compile(r"^([a-z]+)$")


def _clause(atom: Atom) -> str:
    """Ground atom as a subject-led clause, no trailing period."""
    if atom.is_relational:
        if atom.positive:
            return f"{atom.subject} {atom.predicate} the {atom.object}"
        return f"{atom.subject} does not {atom.predicate} the {atom.object}"
    if atom.positive:
        return f"{atom.subject} is {atom.predicate}"
    return f"{atom.subject} is not {atom.predicate}"


def _parse_clause(segment: str, sentence: str, position: int) -> Atom:
    for pattern, build in (
        (_ATTR_NEG, lambda m: Atom(m.group(1), m.group(2), None, NEG)),
        (_REL_NEG, lambda m: Atom(m.group(1), m.group(2), m.group(3), NEG)),
        (_ATTR_POS, lambda m: Atom(m.group(1), m.group(2), None, POS)),
        (_REL_POS, lambda m: Atom(m.group(1), m.group(2), m.group(3), POS)),
    ):
        match = pattern.match(segment)
        if match:
            try:
                return build(match)
            except ValueError as exc:
                raise ParseError(str(exc), sentence, position) from exc
    raise ParseError(f"unrecognized clause: {segment!r}", sentence, position)


def _var_antecedent_phrase(atom: Atom) -> str:
    """Antecedent phrase for a variable-subject atom ('is big', 'chases the dog')."""
    if atom.is_relational:
        if atom.positive:
            return f"{atom.predicate} the {atom.object}"
        return f"does not {atom.predicate} the {atom.object}"
    if atom.positive:
        return f"is {atom.predicate}"
    return f"is not {atom.predicate}"


def _parse_antecedent_part(part: str, prior_subject, sentence: str, position: int) -> Atom:
    """One ' and '-separated antecedent part; ``prior_subject`` resolves merged parts."""
    for pattern, build in (
        (_VP_ATTR_NEG, lambda m: Atom(VAR, m.group(1), None, NEG)),
        (_VP_ATTR_POS, lambda m: Atom(VAR, m.group(1), None, POS)),
        (_VP_REL_NEG, lambda m: Atom(VAR, m.group(1), m.group(2), NEG)),
    ):
        match = pattern.match(part)
        if match:
            try:
                return build(match)
            except ValueError as exc:
                raise ParseError(str(exc), sentence, position) from exc
    if part[:1].isupper():
        return _parse_clause(part, sentence, position)
    match = _BARE_NEG.match(part)
    if match:
        return _make_merged(match.group(1), NEG, prior_subject, sentence, position)
    match = _BARE_POS.match(part)
    if match:
        # A lone token continues a merged 'is a and b' list; 'p the o' is relational.
        return _make_merged(match.group(1), POS, prior_subject, sentence, position)
    match = _VP_REL_POS.match(part)
    if match:
        try:
            return Atom(VAR, match.group(1), match.group(2), POS)
        except ValueError as exc:
            raise ParseError(str(exc), sentence, position) from exc
    raise ParseError(f"unrecognized antecedent: {part!r}", sentence, position)


def _make_merged(predicate, sign, prior_subject, sentence, position) -> Atom:
    if prior_subject is None:
        raise ParseError(f"dangling antecedent token: {predicate!r}", sentence, position)
    try:
        return Atom(prior_subject, predicate, None, sign)
    except ValueError as exc:
        raise ParseError(str(exc), sentence, position) from exc


def _split_antecedents(segment: str, sentence: str, offset: int) -> list[Atom]:
    atoms: list[Atom] = []
    prior = None
    position = offset
    for part in segment.split(" and "):
        atom = _parse_antecedent_part(part, prior, sentence, position)
        atoms.append(atom)
        prior = atom.subject
        position += len(part) + len(" and ")
    return atoms


def _render_antecedents(rule: Rule) -> str:
    ants = rule.antecedents
    if all(a.is_variable and not a.is_relational for a in ants):
        inner = " and ".join(a.predicate if a.positive else f"not {a.predicate}" for a in ants)
        return f"is {inner}"
    return " and ".join(
        _var_antecedent_phrase(a) if a.is_variable else _clause(a) for a in ants
    )


def _render_const_antecedents(rule: Rule) -> str:
    ants = rule.antecedents
    subject = ants[0].subject
    if all(not a.is_relational and a.subject == subject for a in ants):
        inner = " and ".join(a.predicate if a.positive else f"not {a.predicate}" for a in ants)
        return f"{subject} is {inner}"
    return " and ".join(_clause(a) for a in ants)


class TemplatePackV1:
    """Default template pack."""

    pack_id = "v1"

    # -- rendering ---------------------------------------------------------

    def render_atom(self, atom: Atom) -> str:
        return _clause(atom) + "."

    def _var_consequent(self, cons: Atom) -> str:
        if cons.is_relational:
            if cons.positive:
                return f"{cons.predicate} the {cons.object}"
            return f"do not {cons.predicate} the {cons.object}"
        return f"are {cons.predicate}" if cons.positive else f"are not {cons.predicate}"

    def render_rule(self, rule: Rule) -> str:
        if rule.consequent.is_variable:
            ants = _render_antecedents(rule)
            cons = self._var_consequent(rule.consequent)
            return f"If someone {ants} then they {cons}."
        ants = _render_const_antecedents(rule)
        cons = _clause(rule.consequent)
        return f"If {ants} then {cons}."

    # -- parsing -----------------------------------------------------------

    def _parse_var_consequent(self, segment: str, sentence: str, position: int) -> Atom:
        match = re.match(r"^are not ([a-z]+)$", segment)
        if match:
            return Atom(VAR, match.group(1), None, NEG)
        match = re.match(r"^are ([a-z]+)$", segment)
        if match:
            return Atom(VAR, match.group(1), None, POS)
        match = re.match(r"^do not ([a-z]+) the ([a-z]+)$", segment)
        if match:
            return Atom(VAR, match.group(1), match.group(2), NEG)
        match = _VP_REL_POS.match(segment)
        if match:
            return Atom(VAR, match.group(1), match.group(2), POS)
        raise ParseError(f"unrecognized consequent: {segment!r}", sentence, position)

    def _parse_rule_body(self, body: str, sentence: str, offset: int) -> Rule:
        if " then " not in body:
            raise ParseError("rule lacks a 'then' part", sentence, offset)
        ant_part, cons_part = body.split(" then ", 1)
        if ant_part.startswith("someone "):
            seg = ant_part[len("someone "):]
            ants = _split_antecedents(seg, sentence, offset + len("someone "))
            if not cons_part.startswith("they "):
                raise ParseError("variable rule lacks 'they' consequent", sentence, offset)
            cons = self._parse_var_consequent(
                cons_part[len("they "):], sentence, offset + len(ant_part) + len(" then they ")
            )
        else:
            ants = _split_antecedents(ant_part, sentence, offset)
            cons = _parse_clause(cons_part, sentence, offset + len(ant_part) + len(" then "))
        try:
            return Rule("r", tuple(ants), cons)
        except ValueError as exc:
            raise ParseError(str(exc), sentence, offset) from exc

    def parse(self, sentence: str):
        if not sentence.endswith("."):
            raise ParseError("sentence must end with a period", sentence, len(sentence))
        body = sentence[:-1]
        if body.startswith("If "):
            return self._parse_rule_body(body[len("If "):], sentence, len("If "))
        return _parse_clause(body, sentence, 0)


class TemplatePackV2(TemplatePackV1):
    """Alternate pack: facts unchanged, rules re-templated."""

    pack_id = "v2"

    _PREFIX = "It is a truth that "
    _VAR_LEAD = "someone who "
    _VAR_JOIN = " will always "
    _CONST_LEAD = "whenever "
    _SUFFIX = " as well."

    def _var_consequent(self, cons: Atom) -> str:
        if cons.is_relational:
            if cons.positive:
                return f"{cons.predicate} the {cons.object}"
            return f"not {cons.predicate} the {cons.object}"
        return f"be {cons.predicate}" if cons.positive else f"not be {cons.predicate}"

    def render_rule(self, rule: Rule) -> str:
        if rule.consequent.is_variable:
            ants = _render_antecedents(rule)
            cons = self._var_consequent(rule.consequent)
            return f"{self._PREFIX}{self._VAR_LEAD}{ants}{self._VAR_JOIN}{cons}{self._SUFFIX}"
        ants = _render_const_antecedents(rule)
        cons = _clause(rule.consequent)
        return f"{self._PREFIX}{self._CONST_LEAD}{ants} then {cons}{self._SUFFIX}"

    def _parse_var_consequent(self, segment: str, sentence: str, position: int) -> Atom:
        match = re.match(r"^not be ([a-z]+)$", segment)
        if match:
            return Atom(VAR, match.group(1), None, NEG)
        match = re.match(r"^be ([a-z]+)$", segment)
        if match:
            return Atom(VAR, match.group(1), None, POS)
        match = re.match(r"^not ([a-z]+) the ([a-z]+)$", segment)
        if match:
            return Atom(VAR, match.group(1), match.group(2), NEG)
        match = _VP_REL_POS.match(segment)
        if match:
            return Atom(VAR, match.group(1), match.group(2), POS)
        raise ParseError(f"unrecognized consequent: {segment!r}", sentence, position)

    def parse(self, sentence: str):
        if not sentence.startswith(self._PREFIX):
            return super(TemplatePackV2, self).parse(sentence)  # facts share v1 shape
        if not sentence.endswith(self._SUFFIX):
            raise ParseError("rule lacks the closing phrase", sentence, len(sentence))
        body = sentence[len(self._PREFIX):-len(self._SUFFIX)]
        offset = len(self._PREFIX)
        if body.startswith(self._VAR_LEAD):
            body = body[len(self._VAR_LEAD):]
            offset += len(self._VAR_LEAD)
            if self._VAR_JOIN not in body:
                raise ParseError("rule lacks the consequent join", sentence, offset)
            ant_part, cons_part = body.split(self._VAR_JOIN, 1)
            ants = _split_antecedents(ant_part, sentence, offset)
            cons = self._parse_var_consequent(
                cons_part, sentence, offset + len(ant_part) + len(self._VAR_JOIN)
            )
        elif body.startswith(self._CONST_LEAD):
            body = body[len(self._CONST_LEAD):]
            offset += len(self._CONST_LEAD)
            if " then " not in body:
                raise ParseError("rule lacks a 'then' part", sentence, offset)
            ant_part, cons_part = body.split(" then ", 1)
            ants = _split_antecedents(ant_part, sentence, offset)
            cons = _parse_clause(cons_part, sentence, offset + len(ant_part) + len(" then "))
        else:
            raise ParseError("unrecognized rule lead-in", sentence, offset)
        try:
            return Rule("r", tuple(ants), cons)
        except ValueError as exc:
            raise ParseError(str(exc), sentence, offset) from exc


PACKS = {"v1": TemplatePackV1(), "v2": TemplatePackV2()}
DEFAULT_PACK = "v1"


def get_pack(pack_id: str):
    try:
        return PACKS[pack_id]
    except KeyError:
        raise ParseError(f"unknown template pack: {pack_id!r}")


def render_text(item, pack_id: str = DEFAULT_PACK) -> str:
    """Render an Atom or Rule to its sentence under the given pack."""
    pack = get_pack(pack_id)
    if isinstance(item, Rule):
        return pack.render_rule(item)
    if isinstance(item, Atom):
        return pack.render_atom(item)
    raise TypeError(f"cannot render {type(item).__name__}")


def parse_text(sentence: str, pack_id: str = DEFAULT_PACK):
    """Inverse of :func:`render_text`. Parsed rules carry the placeholder id ``"r"``."""
    return get_pack(pack_id).parse(sentence)
