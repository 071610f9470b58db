"""Phrasebank indexing and queries, plus case retrieval by sequence similarity.

Similarity between component sequences is normalized Levenshtein:
1 - distance / max(len); two empty sequences count as identical. Every
ranking here is total and deterministic: score descending, id ascending.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from sciwb.corpus import Case, ComponentSequence, Taxonomy
from sciwb.editdist import levenshtein
from sciwb.errors import RetrievalError
from sciwb.phrasebank import PhrasebankEntry

SimilarityScore = float

RankedCases = tuple[tuple[str, SimilarityScore], ...]


@dataclass(frozen=True)
class Query:
    """Conjunctive tag filters plus keyword ranking; k limits the result."""

    section: Optional[str] = None
    component: Optional[str] = None
    strategy: Optional[str] = None
    message: Optional[str] = None
    keywords: tuple[str, ...] = ()
    k: Optional[int] = None  # None means unlimited

    def __post_init__(self):
        if self.k is not None and self.k < 0:
            raise RetrievalError(f"query limit must be >= 0, got {self.k}")


@dataclass(frozen=True)
class Index:
    """Immutable phrasebank index: tag postings plus the entry list.

    Queries need no coordination; rebuilding yields a fresh value.
    """

    entries: tuple[PhrasebankEntry, ...]
    taxonomy: Taxonomy
    _by_id: dict = field(repr=False, default_factory=dict)
    _by_section: dict = field(repr=False, default_factory=dict)
    _by_component: dict = field(repr=False, default_factory=dict)
    _by_strategy: dict = field(repr=False, default_factory=dict)
    _by_message: dict = field(repr=False, default_factory=dict)

    def entry(self, entry_id: str) -> PhrasebankEntry:
        try:
            return self._by_id[entry_id]
        except KeyError:
            raise RetrievalError(f"unknown entry id {entry_id!r}")


def build_index(entries: Sequence[PhrasebankEntry], taxonomy: Taxonomy) -> Index:
    """Deterministic index over a validated entry list."""
    by_id: dict[str, PhrasebankEntry] = {}
    by_section: dict[str, set[str]] = {}
    by_component: dict[str, set[str]] = {}
    by_strategy: dict[str, set[str]] = {}
    by_message: dict[str, set[str]] = {}
    for e in entries:
        if e.id in by_id:
            raise RetrievalError(f"duplicate entry id {e.id!r}")
        by_id[e.id] = e
        if e.tags.section is not None:
            by_section.setdefault(e.tags.section, set()).add(e.id)
        if e.tags.component is not None:
            by_component.setdefault(e.tags.component, set()).add(e.id)
        if e.tags.strategy is not None:
            by_strategy.setdefault(e.tags.strategy, set()).add(e.id)
        for m in e.tags.messages:
            by_message.setdefault(m, set()).add(e.id)
    ordered = tuple(sorted(entries, key=lambda e: e.id))
    return Index(entries=ordered, taxonomy=taxonomy, _by_id=by_id,
                 _by_section=by_section, _by_component=by_component,
                 _by_strategy=by_strategy, _by_message=by_message)


def _keyword_score(entry: PhrasebankEntry, keywords: Sequence[str]) -> int:
    """Count of distinct keywords present in the template's fixed text,
    case-insensitive substring match within a segment."""
    texts = [t.lower() for t in entry.template.fixed_texts]
    return sum(1 for kw in keywords if any(kw in t for t in texts))


def query(idx: Index, q: Query) -> tuple[PhrasebankEntry, ...]:
    """Entries satisfying all present tag filters, ranked by keyword score
    (descending), ties by ascending id, truncated to q.k."""
    tax = idx.taxonomy
    if q.section is not None and not tax.has_section(q.section):
        raise RetrievalError(f"unknown section id {q.section!r}")
    if q.component is not None and not tax.has_component(q.component):
        raise RetrievalError(f"unknown component id {q.component!r}")
    if q.strategy is not None and not tax.has_strategy(q.strategy):
        raise RetrievalError(f"unknown strategy id {q.strategy!r}")
    if q.message is not None and not tax.has_message(q.message):
        raise RetrievalError(f"unknown message id {q.message!r}")

    candidates = {e.id for e in idx.entries}
    for value, postings in (
        (q.section, idx._by_section),
        (q.component, idx._by_component),
        (q.strategy, idx._by_strategy),
        (q.message, idx._by_message),
    ):
        if value is not None:
            candidates &= postings.get(value, set())

    keywords = tuple(dict.fromkeys(kw.lower() for kw in q.keywords if kw))
    hits = [e for e in idx.entries if e.id in candidates]
    hits.sort(key=lambda e: (-_keyword_score(e, keywords), e.id))
    if q.k is not None:
        hits = hits[:q.k]
    return tuple(hits)


def sequence_similarity(a: ComponentSequence, b: ComponentSequence) -> SimilarityScore:
    """1 - levenshtein(a, b) / max(len); both empty -> 1.0."""
    a = tuple(a)
    b = tuple(b)
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def retrieve_similar_cases(cases: Sequence[Case], sketch: ComponentSequence,
                           paper_type: Optional[str] = None,
                           k: Optional[int] = None) -> RankedCases:
    """Rank cases by similarity to the sketch, score descending and ties by
    ascending case id; optionally filtered to one paper type first."""
    if paper_type is not None:
        from sciwb.corpus import PAPER_TYPES
        if paper_type not in PAPER_TYPES:
            raise RetrievalError(f"unknown paper type {paper_type!r}")
        cases = [c for c in cases if c.paper_type == paper_type]
    if k is not None and k < 0:
        raise RetrievalError(f"k must be >= 0, got {k}")
    scored = [(c.id, sequence_similarity(c.sequence, sketch)) for c in cases]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    if k is not None:
        scored = scored[:k]
    return tuple(scored)
