"""Synthetic example generation with controlled proof depth and balanced labels,
plus lexical-token and template perturbation for robustness experiments.

Each example is built around a derivation backbone of exactly the target
depth: a seed fact, a chain of rules each consuming the previous conclusion
plus depth-0 side facts, and distractor rules that either dead-end (decoy
paths sharing a backbone consequent) or derive off-path bulk conclusions.
The forward closure stamps the gold label and minimal depth, and every
candidate theory is re-verified before it is emitted.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import GenerationExhausted, InconsistencyError, PoolCollisionError
from .oracle import Closure, closure
from .templates import PACKS, parse_text, render_text
from .theory import NEG, POS, VAR, Atom, Example, Label, Rule, Theory

NAMES = (
    "Anne", "Bob", "Carol", "Dave", "Eric", "Fiona", "Gary", "Harry", "Ivy",
    "Jane", "Kurt", "Lena", "Mona", "Nate", "Omar", "Pam", "Rita", "Sam",
    "Tina", "Vera",
)

PREDICATES = (
    "big", "blue", "cold", "furry", "green", "kind", "nice", "quiet", "red",
    "rough", "round", "smart", "white", "young", "happy", "strong", "tidy",
    "brave", "calm", "dull", "eager", "fancy", "gentle", "proud", "shy",
    "tall", "warm", "witty", "bold", "sleek",
)

NOVEL_NAMES = (
    "Blim", "Crov", "Drax", "Elzor", "Frint", "Grulb", "Hesk", "Jorv",
    "Klemp", "Lurd", "Morx", "Nibbet", "Orlop", "Prazz", "Quolt", "Rulx",
    "Snerp", "Trubb", "Uzric", "Vleem",
)

NOVEL_PREDICATES = (
    "blurpy", "crandy", "drexic", "flumic", "grazzy", "hilver", "jorpic",
    "klindy", "morvic", "nuzzy", "plizzy", "quarvy", "snerly", "trovic",
    "umbric", "vexly", "wimmur", "yarvic", "zindly", "crullic", "dravic",
    "fennor", "glimpy", "hurvic", "jazzly", "krellic", "lomvic", "murly",
    "norvic", "prindy",
)

NOVEL_OBJECTS = (
    "gronk", "flarn", "zibbet", "quill", "mwomp", "drutt", "skarn", "plonk",
    "vrist", "yurtle",
)


@dataclass(frozen=True)
class GenConfig:
    """Shape parameters for one generated partition."""

    seed: int
    num_examples: int
    depth: int
    entities: tuple = (2, 4)
    predicate_pool_size: int = 16
    facts: tuple = (5, 9)
    rules: tuple = (4, 8)
    antecedents: tuple = (1, 3)
    negative_fact_prob: float = 0.15
    negative_consequent_prob: float = 0.15
    label_mix: dict = field(
        default_factory=lambda: {
            Label.PROVED: 1 / 3,
            Label.DISPROVED: 1 / 3,
            Label.UNKNOWN: 1 / 3,
        }
    )
    max_retries: int = 80

    def __post_init__(self):
        if not 0 <= self.depth <= 5:
            raise ValueError("depth must be in 0..5")
        if self.num_examples < 0:
            raise ValueError("num_examples must be non-negative")
        if self.antecedents[0] < 1 or self.antecedents[1] > 3:
            raise ValueError("antecedent counts must stay within 1..3")
        total = sum(self.label_mix.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"label mix must sum to 1, got {total}")
        if self.predicate_pool_size > len(PREDICATES):
            raise ValueError("predicate pool size exceeds the master pool")


def gen_config_from_dict(node: dict) -> GenConfig:
    node = dict(node)
    if "label_mix" in node:
        node["label_mix"] = {
            Label.from_value(key): float(value) for key, value in node["label_mix"].items()
        }
    for key in ("entities", "facts", "rules", "antecedents"):
        if key in node:
            node[key] = tuple(node[key])
    return GenConfig(**node)


def _label_targets(cfg: GenConfig, rng: random.Random) -> list[Label]:
    """Largest-remainder allocation of the label mix, then a seeded shuffle."""
    fractions = [(label, cfg.label_mix.get(label, 0.0)) for label in Label]
    counts = {label: int(frac * cfg.num_examples) for label, frac in fractions}
    remainder = cfg.num_examples - sum(counts.values())
    leftovers = sorted(
        fractions,
        key=lambda item: (item[1] * cfg.num_examples) - counts[item[0]],
        reverse=True,
    )
    for label, _ in leftovers[:remainder]:
        counts[label] += 1
    targets = [label for label in Label for _ in range(counts[label])]
    rng.shuffle(targets)
    return targets


class _TheoryDraft:
    def __init__(self):
        self.facts: list[Atom] = []
        self.fact_keys: set = set()
        self.rules: list[Rule] = []

    def add_fact(self, atom: Atom) -> bool:
        key = (atom.subject, atom.predicate, atom.object)
        if key in self.fact_keys:
            return False
        self.fact_keys.add(key)
        self.facts.append(atom)
        return True


def _build_theory(rng: random.Random, cfg: GenConfig):
    """One candidate theory plus its backbone chain atoms for the goal entity."""
    entities = rng.sample(NAMES, rng.randint(*cfg.entities))
    goal_entity = entities[0]
    preds = rng.sample(PREDICATES, cfg.predicate_pool_size)

    chain = preds[: cfg.depth + 1]
    rest = preds[cfg.depth + 1 :]
    n_side = max(2, min(len(rest) - 4, 4 + cfg.depth))
    side = rest[:n_side]
    orphan = rest[n_side : n_side + 2]          # never derivable: decoy antecedents
    bulk = rest[n_side + 2 :]                   # off-path derivable conclusions

    draft = _TheoryDraft()

    chain_signs = [POS]
    for _ in range(cfg.depth):
        chain_signs.append(NEG if rng.random() < cfg.negative_consequent_prob else POS)

    chain_atoms = [Atom(goal_entity, chain[i], None, chain_signs[i]) for i in range(cfg.depth + 1)]
    draft.add_fact(chain_atoms[0])

    side_signs = {}
    for pred in side:
        side_signs[pred] = NEG if rng.random() < cfg.negative_fact_prob else POS
        draft.add_fact(Atom(goal_entity, pred, None, side_signs[pred]))

    rules: list[Rule] = []
    for i in range(cfg.depth):
        arity = rng.randint(*cfg.antecedents)
        extras = rng.sample(side, min(arity - 1, len(side)))
        ants = [Atom(VAR, chain[i], None, chain_signs[i])]
        ants += [Atom(VAR, pred, None, side_signs[pred]) for pred in extras]
        rules.append(Rule("pending", tuple(ants), Atom(VAR, chain[i + 1], None, chain_signs[i + 1])))

    n_rules = max(rng.randint(*cfg.rules), cfg.depth)
    while len(rules) < n_rules:
        arity = rng.randint(*cfg.antecedents)
        if cfg.depth > 0 and orphan and rng.random() < 0.4:
            # Decoy path: shares a backbone consequent but needs an orphan premise.
            target = rng.randint(1, cfg.depth)
            ants = [Atom(VAR, rng.choice(orphan), None, POS)]
            ants += [
                Atom(VAR, pred, None, side_signs[pred])
                for pred in rng.sample(side, min(arity - 1, len(side)))
            ]
            cons = Atom(VAR, chain[target], None, chain_signs[target])
        elif bulk:
            pool = [p for p in bulk if p not in {r.consequent.predicate for r in rules}]
            if not pool:
                break
            sources = rng.sample(side, min(arity, len(side)))
            ants = [Atom(VAR, pred, None, side_signs[pred]) for pred in sources]
            cons = Atom(VAR, pool[0], None, POS)
        else:
            break
        if len({a.predicate for a in ants}) != len(ants):
            continue
        rules.append(Rule("pending", tuple(ants), cons))

    n_facts = rng.randint(*cfg.facts)
    noise_candidates = [
        (entity, pred)
        for entity in entities[1:]
        for pred in preds[: cfg.predicate_pool_size // 2]
    ]
    rng.shuffle(noise_candidates)
    for entity, pred in noise_candidates:
        if len(draft.facts) >= n_facts:
            break
        sign = NEG if rng.random() < cfg.negative_fact_prob else POS
        draft.add_fact(Atom(entity, pred, None, sign))

    rng.shuffle(rules)
    rules = [replace(rule, id=f"r{i + 1}") for i, rule in enumerate(rules)]
    rng.shuffle(draft.facts)

    theory = Theory(tuple(draft.facts), tuple(rules), {})
    return theory, chain_atoms[-1]


def _pick_unknown_goal(rng: random.Random, theory: Theory, cl: Closure) -> Optional[Atom]:
    """Recombine existing subjects and predicates into an underivable atom."""
    subjects = [s for s in theory.subjects]
    predicates = sorted({a.predicate for a in cl.atoms()} | {
        atom.predicate for rule in theory.rules for atom in (*rule.antecedents, rule.consequent)
    })
    candidates = []
    for subject in subjects:
        for predicate in predicates:
            atom = Atom(subject, predicate, None, POS)
            if atom not in cl and atom.negate() not in cl:
                candidates.append(atom)
    if not candidates:
        return None
    atom = candidates[rng.randrange(len(candidates))]
    return atom.negate() if rng.random() < 0.2 else atom


def _try_example(rng: random.Random, cfg: GenConfig, target: Label) -> Optional[Example]:
    try:
        theory, top_atom = _build_theory(rng, cfg)
        cl = closure(theory)
    except (ValueError, InconsistencyError):
        return None
    if target is Label.UNKNOWN:
        goal = _pick_unknown_goal(rng, theory, cl)
        if goal is None:
            return None
        return Example(theory, goal, Label.UNKNOWN, None)
    if top_atom not in cl or cl.depth(top_atom) != cfg.depth:
        return None  # a distractor shortcut broke depth exactness; resample
    goal = top_atom if target is Label.PROVED else top_atom.negate()
    return Example(theory, goal, target, cfg.depth)


def generate(cfg: GenConfig) -> list[Example]:
    """Deterministically produce ``cfg.num_examples`` examples for one depth."""
    rng = random.Random(cfg.seed)
    targets = _label_targets(cfg, rng)
    examples = []
    for index, target in enumerate(targets):
        example = None
        for _ in range(cfg.max_retries):
            example = _try_example(rng, cfg, target)
            if example is not None:
                break
        if example is None:
            raise GenerationExhausted(
                f"could not fill ({target.value}, depth {cfg.depth}) at index {index}"
            )
        metadata = {
            "source": "generator",
            "seed": cfg.seed,
            "depth": cfg.depth,
            "index": index,
        }
        examples.append(
            Example(
                Theory(example.theory.facts, example.theory.rules, metadata),
                example.goal,
                example.gold_label,
                example.gold_depth,
            )
        )
    return examples


# ---------------------------------------------------------------------------
# Perturbation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerturbSpec:
    mode: str  # "tokens" | "templates"
    seed: int = 0
    name_pool: tuple = NOVEL_NAMES
    predicate_pool: tuple = NOVEL_PREDICATES
    object_pool: tuple = NOVEL_OBJECTS
    template_pack: str = "v2"

    def __post_init__(self):
        if self.mode not in ("tokens", "templates"):
            raise ValueError(f"unknown perturbation mode: {self.mode!r}")


def perturb_spec_from_dict(node: dict) -> PerturbSpec:
    node = dict(node)
    for key in ("name_pool", "predicate_pool", "object_pool"):
        if key in node:
            node[key] = tuple(node[key])
    return PerturbSpec(**node)


def _example_vocab(example: Example):
    subjects, predicates, objects = set(), set(), set()
    atoms = list(example.theory.facts) + [example.goal]
    for rule in example.theory.rules:
        atoms.extend(rule.antecedents)
        atoms.append(rule.consequent)
    for atom in atoms:
        if atom.is_ground:
            subjects.add(atom.subject)
        predicates.add(atom.predicate)
        if atom.object is not None:
            objects.add(atom.object)
    return subjects, predicates, objects


def _rename_atom(atom: Atom, mapping: dict) -> Atom:
    return Atom(
        mapping.get(("s", atom.subject), atom.subject),
        mapping[("p", atom.predicate)],
        None if atom.object is None else mapping[("o", atom.object)],
        atom.sign,
    )


def _perturb_tokens(dataset: list[Example], spec: PerturbSpec) -> list[Example]:
    all_subjects, all_predicates, all_objects = set(), set(), set()
    for example in dataset:
        s, p, o = _example_vocab(example)
        all_subjects |= s
        all_predicates |= p
        all_objects |= o
    for pool, vocab, kind in (
        (spec.name_pool, all_subjects, "name"),
        (spec.predicate_pool, all_predicates, "predicate"),
        (spec.object_pool, all_objects, "object"),
    ):
        clashes = set(pool) & vocab
        if clashes:
            raise PoolCollisionError(f"{kind} pool collides with dataset vocabulary: {sorted(clashes)}")

    out = []
    for index, example in enumerate(dataset):
        rng = random.Random(f"{spec.seed}:{index}")
        subjects, predicates, objects = _example_vocab(example)
        if len(subjects) > len(spec.name_pool):
            raise PoolCollisionError("name pool too small for a bijective mapping")
        if len(predicates) > len(spec.predicate_pool):
            raise PoolCollisionError("predicate pool too small for a bijective mapping")
        if len(objects) > len(spec.object_pool):
            raise PoolCollisionError("object pool too small for a bijective mapping")
        mapping = {}
        for (kind, tokens, pool) in (
            ("s", sorted(subjects), spec.name_pool),
            ("p", sorted(predicates), spec.predicate_pool),
            ("o", sorted(objects), spec.object_pool),
        ):
            picks = rng.sample(list(pool), len(tokens))
            mapping.update({(kind, token): pick for token, pick in zip(tokens, picks)})
        facts = tuple(_rename_atom(a, mapping) for a in example.theory.facts)
        rules = tuple(
            Rule(
                rule.id,
                tuple(_rename_atom(a, mapping) for a in rule.antecedents),
                _rename_atom(rule.consequent, mapping),
            )
            for rule in example.theory.rules
        )
        metadata = dict(example.theory.metadata)
        metadata["perturbed"] = "tokens"
        out.append(
            Example(
                Theory(facts, rules, metadata),
                _rename_atom(example.goal, mapping),
                example.gold_label,
                example.gold_depth,
            )
        )
    return out


def _perturb_templates(dataset: list[Example], spec: PerturbSpec) -> list[Example]:
    if spec.template_pack not in PACKS:
        raise ValueError(f"template pack not registered: {spec.template_pack!r}")
    out = []
    for example in dataset:
        items = list(example.theory.facts) + list(example.theory.rules) + [example.goal]
        for item in items:
            sentence = render_text(item, spec.template_pack)
            parsed = parse_text(sentence, spec.template_pack)
            if isinstance(item, Rule):
                if (parsed.antecedents, parsed.consequent) != (item.antecedents, item.consequent):
                    raise ValueError(f"template pack does not round-trip: {sentence!r}")
            elif parsed != item:
                raise ValueError(f"template pack does not round-trip: {sentence!r}")
        metadata = dict(example.theory.metadata)
        metadata["template_pack"] = spec.template_pack
        out.append(
            Example(
                Theory(example.theory.facts, example.theory.rules, metadata),
                example.goal,
                example.gold_label,
                example.gold_depth,
            )
        )
    return out


def perturb(dataset: list[Example], spec: PerturbSpec) -> list[Example]:
    """Token mode renames vocabulary bijectively per example; template mode
    re-targets the rendering pack, leaving structure, labels, and depths
    unchanged either way."""
    if spec.mode == "tokens":
        return _perturb_tokens(dataset, spec)
    return _perturb_templates(dataset, spec)
