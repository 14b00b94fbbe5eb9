"""Majority-vote mapping from topics or clusters to NFR subcategories."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

__all__ = ["LabelMap", "majority_label", "assign_labels", "assign_topic_labels", "assign_cluster_labels"]


def majority_label(labels: Iterable[str]) -> str:
    """Most frequent label; ties go to the lexicographically smaller code."""
    counts = Counter(labels)
    if not counts:
        raise ValueError("no labels to vote on")
    best = max(counts.values())
    return min(lab for lab, n in counts.items() if n == best)


@dataclass(frozen=True)
class LabelMap:
    mapping: Mapping[int, str]
    fallback: str

    def __getitem__(self, group: int) -> str:
        return self.mapping.get(group, self.fallback)

    def predict(self, groups: Sequence[int]) -> list[str]:
        return [self[g] for g in groups]

    def to_json(self) -> str:
        doc = {"mapping": {str(k): v for k, v in sorted(self.mapping.items())}, "fallback": self.fallback}
        return json.dumps(doc, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "LabelMap":
        doc = json.loads(text)
        return cls({int(k): v for k, v in doc["mapping"].items()}, doc["fallback"])


def assign_labels(groups: Sequence[int], labels: Sequence[Hashable], all_groups: Iterable[int] = ()) -> LabelMap:
    """Map each group to the majority label of its members.

    Groups listed in ``all_groups`` without members get the overall majority label.
    """
    if len(groups) != len(labels):
        raise ValueError("groups and labels differ in length")
    names = [str(lab) for lab in labels]
    fallback = majority_label(names)
    members: dict[int, list[str]] = {}
    for g, lab in zip(groups, names):
        members.setdefault(int(g), []).append(lab)
    mapping = {g: majority_label(labs) for g, labs in members.items()}
    for g in all_groups:
        mapping.setdefault(int(g), fallback)
    return LabelMap(dict(sorted(mapping.items())), fallback)


def assign_topic_labels(model, labels: Sequence[Hashable]) -> LabelMap:
    """Label each topic by the training documents whose dominant topic it is."""
    return assign_labels(model.dominant_topics(), labels, range(model.K))


def assign_cluster_labels(model, labels: Sequence[Hashable]) -> LabelMap:
    return assign_labels(model.assignments, labels, range(1, model.k + 1))
