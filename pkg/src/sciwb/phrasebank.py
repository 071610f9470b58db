"""Gap-marked templates and the phrasebank of reusable expressions.

A template alternates fixed text with named gaps. Concrete syntax:
``[[label]]`` or ``[[label|hint]]`` marks a gap; ``\\[[`` escapes a literal
``[[``; everything else is fixed text. Every template must keep at least
one gap and at least one fixed span (the reuse rule): an expression with
no gap is a whole sentence, and copying whole sentences is exactly what
the phrasebank exists to prevent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

from sciwb.errors import PhrasebankError, TemplateError

_LABEL_RE = re.compile(r"^[A-Za-z0-9_.:-]+$")

ESCAPED_OPEN = "\\[["


@dataclass(frozen=True)
class Fixed:
    """A literal run of text."""

    text: str


@dataclass(frozen=True)
class Gap:
    """A named slot to be filled by the writer; ``hint`` suggests content."""

    label: str
    hint: Optional[str] = None


Segment = Union[Fixed, Gap]


def _check_label(label: str) -> None:
    if not label:
        raise TemplateError("gap label is empty")
    if not _LABEL_RE.match(label):
        raise TemplateError(f"invalid gap label {label!r} (letters, digits, '_', '.', ':', '-' only)")


@dataclass(frozen=True)
class Template:
    """Canonical-form template: no empty or adjacent fixed segments, at
    least one gap and at least one fixed span."""

    segments: tuple[Segment, ...]

    def __post_init__(self):
        if not self.segments:
            raise TemplateError("template has no segments")
        prev_fixed = False
        n_gaps = 0
        n_fixed = 0
        for seg in self.segments:
            if isinstance(seg, Fixed):
                if not seg.text:
                    raise TemplateError("fixed segment is empty")
                if prev_fixed:
                    raise TemplateError("adjacent fixed segments (template not canonical)")
                prev_fixed = True
                n_fixed += 1
            elif isinstance(seg, Gap):
                _check_label(seg.label)
                if seg.hint is not None and "]]" in seg.hint:
                    raise TemplateError(f"gap hint {seg.hint!r} contains ']]'")
                prev_fixed = False
                n_gaps += 1
            else:
                raise TemplateError(f"not a template segment: {seg!r}")
        if n_gaps == 0:
            raise TemplateError("template has no gap; whole expressions cannot be reused")
        if n_fixed == 0:
            raise TemplateError("template has no fixed text")

    @property
    def gaps(self) -> tuple[Gap, ...]:
        return tuple(s for s in self.segments if isinstance(s, Gap))

    @property
    def gap_count(self) -> int:
        return sum(1 for s in self.segments if isinstance(s, Gap))

    @property
    def fixed_texts(self) -> tuple[str, ...]:
        return tuple(s.text for s in self.segments if isinstance(s, Fixed))


def template_from_segments(segments: Iterable[Segment]) -> Template:
    """Canonicalize: drop empty fixed segments, merge adjacent fixed ones."""
    out: list[Segment] = []
    for seg in segments:
        if isinstance(seg, Fixed):
            if not seg.text:
                continue
            if out and isinstance(out[-1], Fixed):
                out[-1] = Fixed(out[-1].text + seg.text)
                continue
        out.append(seg)
    return Template(tuple(out))


def parse_template(s: str) -> Template:
    """Parse concrete gap syntax into a canonical template."""
    if not s:
        raise TemplateError("template is empty")
    segments: list[Segment] = []
    fixed: list[str] = []
    i = 0
    n = len(s)
    while i < n:
        if s.startswith(ESCAPED_OPEN, i):
            fixed.append("[[")
            i += 3
        elif s.startswith("[[", i):
            close = s.find("]]", i + 2)
            if close < 0:
                raise TemplateError(f"unterminated gap marker at offset {i}")
            body = s[i + 2:close]
            label, sep, hint = body.partition("|")
            _check_label(label)
            if fixed:
                segments.append(Fixed("".join(fixed)))
                fixed = []
            segments.append(Gap(label, hint if sep else None))
            i = close + 2
        else:
            fixed.append(s[i])
            i += 1
    if fixed:
        segments.append(Fixed("".join(fixed)))
    return template_from_segments(segments)


def _escape_fixed(text: str) -> str:
    return text.replace("[[", ESCAPED_OPEN)


def render_template(t: Template) -> str:
    """Inverse of parse_template: parse_template(render_template(t)) == t."""
    parts = []
    for seg in t.segments:
        if isinstance(seg, Fixed):
            parts.append(_escape_fixed(seg.text))
        elif seg.hint is None:
            parts.append(f"[[{seg.label}]]")
        else:
            parts.append(f"[[{seg.label}|{seg.hint}]]")
    return "".join(parts)


@dataclass(frozen=True)
class Filling:
    """Positional gap fillers, one per gap in template order."""

    fillers: tuple[str, ...]

    def __post_init__(self):
        for i, f in enumerate(self.fillers):
            if not f:
                raise TemplateError(f"filler {i} is empty")


def fill(t: Template, filling: Filling | Sequence[str]) -> str:
    """Replace each gap with its filler.

    Output never contains an unescaped ``[[``: any occurrence inside a
    filler (or a literal one in fixed text) is emitted as ``\\[[``, so a
    gap scan over the result finds nothing. For text without ``[[`` the
    output length is exactly the sum of fixed and filler lengths.
    """
    if not isinstance(filling, Filling):
        filling = Filling(tuple(filling))
    if len(filling.fillers) != t.gap_count:
        raise TemplateError(
            f"filler count mismatch: template has {t.gap_count} gaps, got {len(filling.fillers)} fillers")
    out = []
    it = iter(filling.fillers)
    for seg in t.segments:
        if isinstance(seg, Fixed):
            out.append(_escape_fixed(seg.text))
        else:
            out.append(_escape_fixed(next(it)))
    return "".join(out)


@dataclass(frozen=True)
class Tags:
    """Taxonomy classification of a phrasebank entry; every field optional."""

    section: Optional[str] = None
    component: Optional[str] = None
    strategy: Optional[str] = None
    messages: frozenset[str] = field(default_factory=frozenset)


@dataclass(frozen=True)
class Provenance:
    """Where an extracted expression came from: a span of one corpus section."""

    doc: str
    section: str
    start: int
    end: int


@dataclass(frozen=True)
class PhrasebankEntry:
    """A reusable expression: template plus classification and origin.

    ``provenance`` is None for user-authored entries.
    """

    id: str
    template: Template
    tags: Tags = Tags()
    provenance: Optional[Provenance] = None

    def __post_init__(self):
        if not self.id:
            raise PhrasebankError("entry id is empty")


def validate_tags(tags: Tags, taxonomy) -> None:
    """Check every tag id against the taxonomy, including hierarchy coherence
    between adjacent levels when both are present."""
    if tags.section is not None and not taxonomy.has_section(tags.section):
        raise PhrasebankError(f"unknown section id {tags.section!r}")
    if tags.component is not None:
        if not taxonomy.has_component(tags.component):
            raise PhrasebankError(f"unknown component id {tags.component!r}")
        if tags.section is not None:
            owner = taxonomy.component_section(tags.component)
            if owner != tags.section:
                raise PhrasebankError(
                    f"component {tags.component!r} belongs to section {owner!r}, not {tags.section!r}")
    if tags.strategy is not None:
        if not taxonomy.has_strategy(tags.strategy):
            raise PhrasebankError(f"unknown strategy id {tags.strategy!r}")
        if tags.component is not None:
            owner = taxonomy.strategy_component(tags.strategy)
            if owner != tags.component:
                raise PhrasebankError(
                    f"strategy {tags.strategy!r} belongs to component {owner!r}, not {tags.component!r}")
    for m in sorted(tags.messages):
        if not taxonomy.has_message(m):
            raise PhrasebankError(f"unknown message id {m!r}")


def classify_entry(entry: PhrasebankEntry, tags: Tags, taxonomy) -> PhrasebankEntry:
    """Re-tag an entry: provided scalar tags replace the old ones, message
    ids are unioned. Classifying twice with the same tags is a no-op."""
    merged = Tags(
        section=tags.section if tags.section is not None else entry.tags.section,
        component=tags.component if tags.component is not None else entry.tags.component,
        strategy=tags.strategy if tags.strategy is not None else entry.tags.strategy,
        messages=entry.tags.messages | tags.messages,
    )
    validate_tags(merged, taxonomy)
    return replace(entry, tags=merged)


def extract_template(adoc, section: str, span: tuple[int, int],
                     gap_spans: Sequence[tuple[int, int, str]]) -> PhrasebankEntry:
    """Lift a corpus span into a phrasebank entry.

    ``gap_spans`` are (start, end, label) sub-spans of ``span`` that become
    gaps; the text they cover becomes each gap's hint. The surrounding text
    becomes the fixed segments. Tags are inherited from the annotation
    enclosing the span, when there is one.
    """
    doc = adoc.document
    if section not in doc.sections:
        raise PhrasebankError(f"document {doc.id!r} has no section {section!r}")
    text = doc.sections[section]
    start, end = span
    if not (0 <= start < end <= len(text)):
        raise PhrasebankError(f"span ({start}, {end}) out of range for section of length {len(text)}")
    if not gap_spans:
        raise TemplateError("no gap spans: an extracted expression must leave at least one gap")
    marked = sorted(gap_spans, key=lambda g: (g[0], g[1]))
    prev_end = start
    for gs, ge, label in marked:
        if not (start <= gs < ge <= end):
            raise TemplateError(f"gap span ({gs}, {ge}) lies outside the extracted span ({start}, {end})")
        if gs < prev_end:
            raise TemplateError(f"gap spans overlap at offset {gs}")
        _check_label(label)
        prev_end = ge

    segments: list[Segment] = []
    cursor = start
    for gs, ge, label in marked:
        if gs > cursor:
            segments.append(Fixed(text[cursor:gs]))
        segments.append(Gap(label, hint=text[gs:ge]))
        cursor = ge
    if cursor < end:
        segments.append(Fixed(text[cursor:end]))
    if not any(isinstance(s, Fixed) for s in segments):
        raise TemplateError("gap spans cover the whole expression; no fixed text would remain")
    template = template_from_segments(segments)

    tags = Tags(section=section)
    for ann in adoc.annotations:
        if ann.section == section and ann.start <= start and end <= ann.end:
            tags = Tags(
                section=section,
                component=ann.component,
                strategy=ann.strategy,
                messages=frozenset({ann.message}) if ann.message else frozenset(),
            )
            break
    return PhrasebankEntry(
        id=f"{doc.id}:{section}:{start}-{end}",
        template=template,
        tags=tags,
        provenance=Provenance(doc=doc.id, section=section, start=start, end=end),
    )


def combine_templates(templates: Sequence[Template], separator: str) -> Template:
    """Concatenate templates with a fixed separator, re-canonicalized."""
    if not templates:
        raise TemplateError("cannot combine an empty template list")
    segments: list[Segment] = []
    for i, t in enumerate(templates):
        if i:
            segments.append(Fixed(separator))
        segments.extend(t.segments)
    return template_from_segments(segments)


def combine(entries: Sequence[PhrasebankEntry], separator: str) -> Template:
    """Combine the member templates of several entries into one template."""
    if not entries:
        raise TemplateError("cannot combine an empty entry list")
    return combine_templates([e.template for e in entries], separator)


# --- phrasebank.json (de)serialization -------------------------------------

def entry_to_dict(entry: PhrasebankEntry) -> dict:
    tags: dict = {}
    if entry.tags.section is not None:
        tags["section"] = entry.tags.section
    if entry.tags.component is not None:
        tags["component"] = entry.tags.component
    if entry.tags.strategy is not None:
        tags["strategy"] = entry.tags.strategy
    tags["messages"] = sorted(entry.tags.messages)
    if entry.provenance is None:
        prov: object = "user-authored"
    else:
        prov = {
            "doc": entry.provenance.doc,
            "section": entry.provenance.section,
            "start": entry.provenance.start,
            "end": entry.provenance.end,
        }
    return {
        "id": entry.id,
        "template": render_template(entry.template),
        "tags": tags,
        "provenance": prov,
    }


def entry_from_dict(obj: dict, location: str = "phrasebank") -> PhrasebankEntry:
    try:
        template = parse_template(obj["template"])
        raw_tags = obj.get("tags", {})
        tags = Tags(
            section=raw_tags.get("section"),
            component=raw_tags.get("component"),
            strategy=raw_tags.get("strategy"),
            messages=frozenset(raw_tags.get("messages", [])),
        )
        raw_prov = obj.get("provenance", "user-authored")
        if raw_prov == "user-authored" or raw_prov is None:
            prov = None
        else:
            prov = Provenance(
                doc=raw_prov["doc"], section=raw_prov["section"],
                start=int(raw_prov["start"]), end=int(raw_prov["end"]),
            )
        return PhrasebankEntry(id=obj["id"], template=template, tags=tags, provenance=prov)
    except (KeyError, TypeError) as exc:
        raise PhrasebankError(f"malformed phrasebank entry: {exc!r}", location=location)


def phrasebank_to_obj(entries: Sequence[PhrasebankEntry]) -> list:
    return [entry_to_dict(e) for e in entries]


def phrasebank_from_obj(obj, location: str = "phrasebank.json") -> tuple[PhrasebankEntry, ...]:
    if not isinstance(obj, list):
        raise PhrasebankError("phrasebank file must be a JSON array of entries", location=location)
    return tuple(entry_from_dict(item, location=f"{location}[{i}]") for i, item in enumerate(obj))
