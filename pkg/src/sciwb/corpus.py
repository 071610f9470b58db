"""Schematic-structure taxonomy, documents, stand-off annotations, and cases.

The taxonomy is a strict tree: section -> component -> strategy, with a flat
pool of message types referenced by strategies. Annotations are stand-off
character spans (Unicode scalar offsets, end-exclusive) over a document
section; spans within one section never overlap and never nest, so the
component sequence of a section is unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from sciwb import _jsonio
from sciwb.errors import CorpusError, TaxonomyError

PAPER_TYPES = ("empirical", "experience", "system", "theory", "methodology")

ComponentSequence = tuple[str, ...]


@dataclass(frozen=True)
class MessageDef:
    id: str
    verb: str
    description: str = ""


@dataclass(frozen=True)
class StrategyDef:
    id: str
    name: str
    messages: tuple[str, ...] = ()


@dataclass(frozen=True)
class ComponentDef:
    id: str
    name: str
    instruction: str = ""
    strategies: tuple[StrategyDef, ...] = ()


@dataclass(frozen=True)
class SectionDef:
    id: str
    name: str
    components: tuple[ComponentDef, ...] = ()


@dataclass(frozen=True)
class Taxonomy:
    sections: tuple[SectionDef, ...]
    messages: tuple[MessageDef, ...]

    @cached_property
    def _sections(self) -> dict[str, SectionDef]:
        return {s.id: s for s in self.sections}

    @cached_property
    def _components(self) -> dict[str, tuple[str, ComponentDef]]:
        out = {}
        for s in self.sections:
            for c in s.components:
                out[c.id] = (s.id, c)
        return out

    @cached_property
    def _strategies(self) -> dict[str, tuple[str, StrategyDef]]:
        out = {}
        for s in self.sections:
            for c in s.components:
                for st in c.strategies:
                    out[st.id] = (c.id, st)
        return out

    @cached_property
    def _messages(self) -> dict[str, MessageDef]:
        return {m.id: m for m in self.messages}

    def has_section(self, sid: str) -> bool:
        return sid in self._sections

    def has_component(self, cid: str) -> bool:
        return cid in self._components

    def has_strategy(self, stid: str) -> bool:
        return stid in self._strategies

    def has_message(self, mid: str) -> bool:
        return mid in self._messages

    def section(self, sid: str) -> SectionDef:
        try:
            return self._sections[sid]
        except KeyError:
            raise TaxonomyError(f"unknown section id {sid!r}")

    def component(self, cid: str) -> ComponentDef:
        try:
            return self._components[cid][1]
        except KeyError:
            raise TaxonomyError(f"unknown component id {cid!r}")

    def component_section(self, cid: str) -> str:
        try:
            return self._components[cid][0]
        except KeyError:
            raise TaxonomyError(f"unknown component id {cid!r}")

    def strategy(self, stid: str) -> StrategyDef:
        try:
            return self._strategies[stid][1]
        except KeyError:
            raise TaxonomyError(f"unknown strategy id {stid!r}")

    def strategy_component(self, stid: str) -> str:
        try:
            return self._strategies[stid][0]
        except KeyError:
            raise TaxonomyError(f"unknown strategy id {stid!r}")

    def message(self, mid: str) -> MessageDef:
        try:
            return self._messages[mid]
        except KeyError:
            raise TaxonomyError(f"unknown message id {mid!r}")

    def section_component_ids(self, sid: str) -> tuple[str, ...]:
        return tuple(c.id for c in self.section(sid).components)


@dataclass(frozen=True)
class SourceMeta:
    origin: str = ""
    year: Optional[int] = None
    reliability: str = ""


@dataclass(frozen=True)
class Document:
    id: str
    title: str
    source: SourceMeta = SourceMeta()
    sections: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise CorpusError("document id is empty")


@dataclass(frozen=True)
class Annotation:
    """A component-labelled span of one section; strategy and message
    layers are optional so lightly annotated corpora remain usable."""

    section: str
    start: int
    end: int
    component: str
    strategy: Optional[str] = None
    message: Optional[str] = None


@dataclass(frozen=True)
class AnnotatedDocument:
    document: Document
    annotations: tuple[Annotation, ...]


@dataclass(frozen=True)
class Case:
    """One annotated section, tagged with the kind of paper it came from."""

    id: str
    section: str
    text: str
    paper_type: str
    sequence: ComponentSequence
    annotations: tuple[Annotation, ...] = ()


def validate_document(doc: Document, taxonomy: Taxonomy) -> None:
    if not doc.id:
        raise CorpusError("document id is empty")
    for sid in doc.sections:
        if not taxonomy.has_section(sid):
            raise CorpusError(f"document {doc.id!r} references unknown section {sid!r}")


def _validate_annotation(ann: Annotation, doc: Document, taxonomy: Taxonomy) -> None:
    if ann.section not in doc.sections:
        raise CorpusError(f"annotation references section {ann.section!r} absent from document {doc.id!r}")
    text = doc.sections[ann.section]
    if not (0 <= ann.start < ann.end <= len(text)):
        raise CorpusError(
            f"annotation span ({ann.start}, {ann.end}) out of range for "
            f"section {ann.section!r} of length {len(text)}")
    if not taxonomy.has_component(ann.component):
        raise CorpusError(f"unknown component id {ann.component!r}")
    if taxonomy.component_section(ann.component) != ann.section:
        raise CorpusError(
            f"component {ann.component!r} does not belong to section {ann.section!r}")
    if ann.strategy is not None:
        if not taxonomy.has_strategy(ann.strategy):
            raise CorpusError(f"unknown strategy id {ann.strategy!r}")
        if taxonomy.strategy_component(ann.strategy) != ann.component:
            raise CorpusError(
                f"strategy {ann.strategy!r} does not belong to component {ann.component!r}")
    if ann.message is not None:
        if ann.strategy is None:
            raise CorpusError(
                f"annotation carries message {ann.message!r} without a strategy")
        if ann.message not in taxonomy.strategy(ann.strategy).messages:
            raise CorpusError(
                f"message {ann.message!r} does not belong to strategy {ann.strategy!r}")


def attach_annotations(doc: Document, anns: Sequence[Annotation],
                       taxonomy: Taxonomy) -> AnnotatedDocument:
    """Validate and attach stand-off annotations, sorted by (section, start).

    Spans within one section must be pairwise non-overlapping; re-attaching
    the same annotations (in any order) produces an equal document.
    """
    validate_document(doc, taxonomy)
    for ann in anns:
        _validate_annotation(ann, doc, taxonomy)
    ordered = tuple(sorted(anns, key=lambda a: (a.section, a.start, a.end)))
    prev: Annotation | None = None
    for ann in ordered:
        if prev is not None and prev.section == ann.section and ann.start < prev.end:
            raise CorpusError(
                f"overlapping annotation spans in section {ann.section!r}: "
                f"({prev.start}, {prev.end}) and ({ann.start}, {ann.end})")
        prev = ann
    return AnnotatedDocument(document=doc, annotations=ordered)


def component_sequence(adoc: AnnotatedDocument, section: str) -> ComponentSequence:
    """Component ids of a section's annotations, ordered by span start."""
    if section not in adoc.document.sections:
        raise CorpusError(f"document {adoc.document.id!r} has no section {section!r}")
    return tuple(a.component for a in adoc.annotations if a.section == section)


def make_case(adoc: AnnotatedDocument, section: str, paper_type: str) -> Case:
    """Restrict an annotated document to one section and tag it."""
    if paper_type not in PAPER_TYPES:
        raise CorpusError(
            f"invalid paper type {paper_type!r}; expected one of {', '.join(PAPER_TYPES)}")
    seq = component_sequence(adoc, section)
    if not seq:
        raise CorpusError(
            f"section {section!r} of document {adoc.document.id!r} has no annotations; "
            "a case needs at least one component")
    return Case(
        id=f"{adoc.document.id}:{section}",
        section=section,
        text=adoc.document.sections[section],
        paper_type=paper_type,
        sequence=seq,
        annotations=tuple(a for a in adoc.annotations if a.section == section),
    )


# --- taxonomy.json (de)serialization ----------------------------------------

def taxonomy_to_dict(t: Taxonomy) -> dict:
    return {
        "sections": [
            {
                "id": s.id,
                "name": s.name,
                "components": [
                    {
                        "id": c.id,
                        "name": c.name,
                        "instruction": c.instruction,
                        "strategies": [
                            {"id": st.id, "name": st.name, "messages": list(st.messages)}
                            for st in c.strategies
                        ],
                    }
                    for c in s.components
                ],
            }
            for s in t.sections
        ],
        "messages": [
            {"id": m.id, "verb": m.verb, "description": m.description}
            for m in t.messages
        ],
    }


def render_taxonomy(t: Taxonomy) -> bytes:
    """Serialize so that load_taxonomy(render_taxonomy(t)) == t."""
    return _jsonio.dumps_bytes(taxonomy_to_dict(t))


def _require(obj: dict, key: str, kind, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise TaxonomyError(f"missing key {key!r}", location=where)
    val = obj[key]
    if not isinstance(val, kind):
        raise TaxonomyError(
            f"key {key!r} must be {kind.__name__}, got {type(val).__name__}", location=where)
    return val


def load_taxonomy(data: bytes, location: str = "taxonomy.json") -> Taxonomy:
    """Parse and validate a taxonomy file.

    Raises TaxonomyError with a file location for malformed data, duplicate
    ids at any level, and strategy message references that do not exist.
    """
    obj = _jsonio.loads_bytes(data, location=location)
    if not isinstance(obj, dict):
        raise TaxonomyError("top level must be a JSON object", location=location)
    raw_sections = _require(obj, "sections", list, location)
    raw_messages = _require(obj, "messages", list, location)

    messages = []
    seen_messages: set[str] = set()
    for i, rm in enumerate(raw_messages):
        where = f"{location}: messages[{i}]"
        mid = _require(rm, "id", str, where)
        if mid in seen_messages:
            raise TaxonomyError(f"duplicate message id {mid!r}", location=where)
        seen_messages.add(mid)
        messages.append(MessageDef(id=mid, verb=_require(rm, "verb", str, where),
                                   description=rm.get("description", "")))

    sections = []
    seen_sections: set[str] = set()
    seen_components: set[str] = set()
    seen_strategies: set[str] = set()
    for i, rs in enumerate(raw_sections):
        s_where = f"{location}: sections[{i}]"
        sid = _require(rs, "id", str, s_where)
        if sid in seen_sections:
            raise TaxonomyError(f"duplicate section id {sid!r}", location=s_where)
        seen_sections.add(sid)
        components = []
        for j, rc in enumerate(rs.get("components", [])):
            c_where = f"{s_where}.components[{j}]"
            cid = _require(rc, "id", str, c_where)
            if cid in seen_components:
                raise TaxonomyError(f"duplicate component id {cid!r}", location=c_where)
            seen_components.add(cid)
            strategies = []
            for k, rst in enumerate(rc.get("strategies", [])):
                st_where = f"{c_where}.strategies[{k}]"
                stid = _require(rst, "id", str, st_where)
                if stid in seen_strategies:
                    raise TaxonomyError(f"duplicate strategy id {stid!r}", location=st_where)
                seen_strategies.add(stid)
                msg_ids = rst.get("messages", [])
                if not isinstance(msg_ids, list):
                    raise TaxonomyError("key 'messages' must be a list", location=st_where)
                for mid in msg_ids:
                    if mid not in seen_messages:
                        raise TaxonomyError(
                            f"strategy references unknown message id {mid!r}", location=st_where)
                strategies.append(StrategyDef(id=stid, name=_require(rst, "name", str, st_where),
                                              messages=tuple(msg_ids)))
            components.append(ComponentDef(
                id=cid, name=_require(rc, "name", str, c_where),
                instruction=rc.get("instruction", ""), strategies=tuple(strategies)))
        sections.append(SectionDef(id=sid, name=_require(rs, "name", str, s_where),
                                   components=tuple(components)))
    return Taxonomy(sections=tuple(sections), messages=tuple(messages))


# --- corpus file helpers -----------------------------------------------------

def annotation_to_dict(a: Annotation) -> dict:
    out = {"section": a.section, "start": a.start, "end": a.end, "component": a.component}
    if a.strategy is not None:
        out["strategy"] = a.strategy
    if a.message is not None:
        out["message"] = a.message
    return out


def annotation_from_dict(obj: dict, location: str) -> Annotation:
    try:
        return Annotation(
            section=obj["section"], start=int(obj["start"]), end=int(obj["end"]),
            component=obj["component"], strategy=obj.get("strategy"),
            message=obj.get("message"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorpusError(f"malformed annotation: {exc!r}", location=location)
