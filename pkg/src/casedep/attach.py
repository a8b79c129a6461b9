"""Attachment decisions for prepositional phrases from slot-presence models.

Two rules are implemented.  The dependency rule fires when the verb model
shows a positive, sufficiently strong joint presence between its direct
object slot and the preposition slot; the phrase then goes to the verb.
Otherwise the baseline compares the verb's and the noun's presence
probabilities for the preposition slot and the larger side wins, with an
exact tie left undecided.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .caseframes import ABSENT
from .model import DendroidModel

VERB = "verb"
NOUN = "noun"
BOTH_TO_VERB = "both-to-verb"
UNDECIDED = "undecided"

RULE_DEPENDENCY = "dependency"
RULE_BASELINE = "independent-baseline"

OBJECT_SLOT = "arg2"


@dataclass(frozen=True)
class AttachmentDecision:
    verdict: str
    rule: str
    scores: tuple[tuple[str, float], ...]

    def score(self, label: str) -> float:
        for key, value in self.scores:
            if key == label:
                return value
        raise KeyError(label)

    def resolved(self, tie_default: str = NOUN) -> str:
        """Concrete attachment site, applying the tie default."""
        if self.verdict == UNDECIDED:
            return tie_default
        return self.verdict


def _require_slot_view(model: DendroidModel, role: str):
    for name, domain in zip(model.names, model.domains):
        if domain != (ABSENT, "1"):
            raise ValueError(
                f"{role} model must be slot-based; {name!r} has domain {domain}"
            )


def presence_probability(model: DendroidModel, slot: str) -> float:
    """P(slot present) under the model; slots outside the model's inventory
    get the smoothed zero-count probability 0.5/(N+1)."""
    _require_slot_view(model, "presence")
    if slot in model.names:
        return float(model.marginals()[model.index_of(slot)][1])
    return 0.5 / (model.num_train_rows + 1.0)


def joint_presence(model: DendroidModel, slot_a: str, slot_b: str) -> float:
    """P(both slots present) under the model."""
    table = model.pairwise_marginal(model.index_of(slot_a), model.index_of(slot_b))
    return float(table[1, 1])


def _dependency_gate(
    model: DendroidModel, slot_a: str, slot_b: str, dep_threshold: float
) -> tuple[bool, float, float]:
    """Whether the two slots are positively dependent above the threshold."""
    if slot_a not in model.names or slot_b not in model.names:
        return False, 0.0, 0.0
    joint = joint_presence(model, slot_a, slot_b)
    independent = presence_probability(model, slot_a) * presence_probability(
        model, slot_b
    )
    fires = joint > independent and joint > dep_threshold
    return fires, joint, independent


def attach_single(
    verb_model: DendroidModel,
    noun_model: DendroidModel | None,
    prep: str,
    dep_threshold: float = 0.25,
) -> AttachmentDecision:
    """Decide whether ``prep`` attaches to the verb or the preceding noun.

    ``noun_model`` may be None when the site has no competing noun, in
    which case the phrase goes to the verb.  The preposition must be in
    the slot inventory of at least one of the two models.
    """
    _require_slot_view(verb_model, "verb")
    if noun_model is not None:
        _require_slot_view(noun_model, "noun")
    in_verb = prep in verb_model.names
    in_noun = noun_model is not None and prep in noun_model.names
    if not in_verb and not in_noun:
        raise ValueError(f"slot {prep!r} is unknown to both models")

    fires, joint, independent = _dependency_gate(
        verb_model, OBJECT_SLOT, prep, dep_threshold
    )
    if fires:
        return AttachmentDecision(
            verdict=VERB,
            rule=RULE_DEPENDENCY,
            scores=(("joint", joint), ("independent", independent)),
        )

    p_verb = presence_probability(verb_model, prep)
    if noun_model is None:
        return AttachmentDecision(
            verdict=VERB, rule=RULE_BASELINE, scores=(("verb", p_verb),)
        )
    p_noun = presence_probability(noun_model, prep)
    scores = (("verb", p_verb), ("noun", p_noun))
    if p_verb > p_noun:
        verdict = VERB
    elif p_noun > p_verb:
        verdict = NOUN
    else:
        verdict = UNDECIDED
    return AttachmentDecision(verdict=verdict, rule=RULE_BASELINE, scores=scores)


def attach_double(
    verb_model: DendroidModel,
    prep1: str,
    prep2: str,
    noun_models: Sequence[DendroidModel | None],
    dep_threshold: float = 0.25,
) -> tuple[AttachmentDecision, AttachmentDecision]:
    """Decide two preposition sites of one verb at once.

    When the verb model shows positive dependence between the two
    preposition slots with joint presence above the threshold, both
    phrases attach to the verb.  Otherwise each site is decided
    independently, so the result equals two ``attach_single`` calls.
    """
    if prep1 == prep2:
        raise ValueError("the two preposition slots must differ")
    if len(noun_models) != 2:
        raise ValueError("one noun model (or None) required per site")
    _require_slot_view(verb_model, "verb")
    fires, joint, independent = _dependency_gate(
        verb_model, prep1, prep2, dep_threshold
    )
    if fires:
        decision = AttachmentDecision(
            verdict=BOTH_TO_VERB,
            rule=RULE_DEPENDENCY,
            scores=(("joint", joint), ("independent", independent)),
        )
        return decision, decision
    return (
        attach_single(verb_model, noun_models[0], prep1, dep_threshold),
        attach_single(verb_model, noun_models[1], prep2, dep_threshold),
    )


@dataclass(frozen=True)
class LikelihoodComparison:
    choice: str  # "a", "b", or "tie"
    log2_a: float
    log2_b: float


def compare_likelihood(
    model_a: DendroidModel,
    row_a: Mapping[str, str] | Sequence[str],
    model_b_product: Sequence[tuple[DendroidModel, Mapping[str, str] | Sequence[str]]],
) -> LikelihoodComparison:
    """Compare one model's likelihood against a product of model factors."""
    import math

    def log2p(model, row):
        p = model.evaluate(row)
        return math.log2(p) if p > 0 else float("-inf")

    log_a = log2p(model_a, row_a)
    log_b = sum(log2p(model, row) for model, row in model_b_product)
    if log_a > log_b:
        choice = "a"
    elif log_b > log_a:
        choice = "b"
    else:
        choice = "tie"
    return LikelihoodComparison(choice=choice, log2_a=log_a, log2_b=log_b)


@dataclass(frozen=True)
class AttachmentTuple:
    """One test item: a single-site (v) or double-site (v2) pattern."""

    kind: str  # "v" or "v2"
    verb: str
    noun1: str
    prep1: str
    noun2: str
    prep2: str | None = None
    gold: str | None = None


_GOLD_SINGLE = re.compile(r"^[VN]$")
_GOLD_DOUBLE = re.compile(r"^[VN]{2}$")


def parse_attachment_tuples(text: str | Sequence[str]) -> list[AttachmentTuple]:
    """Parse the test-tuple file format.

    ``v <verb> <noun1> <prep> <noun2> [V|N]`` or
    ``v2 <verb> <prep1> <noun1> <prep2> <noun2> [VV|VN|NV|NN]``.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    tuples = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "v":
            if len(parts) not in (5, 6):
                raise ValueError(f"line {lineno}: v-tuple needs 4 tokens + optional gold")
            gold = parts[5] if len(parts) == 6 else None
            if gold is not None and not _GOLD_SINGLE.match(gold):
                raise ValueError(f"line {lineno}: bad gold label {gold!r}")
            tuples.append(
                AttachmentTuple(
                    kind="v",
                    verb=parts[1],
                    noun1=parts[2],
                    prep1=parts[3],
                    noun2=parts[4],
                    gold=gold,
                )
            )
        elif kind == "v2":
            if len(parts) not in (6, 7):
                raise ValueError(f"line {lineno}: v2-tuple needs 5 tokens + optional gold")
            gold = parts[6] if len(parts) == 7 else None
            if gold is not None and not _GOLD_DOUBLE.match(gold):
                raise ValueError(f"line {lineno}: bad gold label {gold!r}")
            tuples.append(
                AttachmentTuple(
                    kind="v2",
                    verb=parts[1],
                    prep1=parts[2],
                    noun1=parts[3],
                    prep2=parts[4],
                    noun2=parts[5],
                    gold=gold,
                )
            )
        else:
            raise ValueError(f"line {lineno}: unknown tuple kind {kind!r}")
    return tuples
