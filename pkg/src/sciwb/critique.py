"""Structure critiquing: guideline checks, case comparison, and feedback.

A submitted structure sketch is evaluated by two independent analyzers.
The guideline analyzer runs declarative rules over the component sequence;
the case analyzer ranks the case base by sequence similarity and derives
concrete edits from the nearest case. Their findings map onto six critique
types:

  hard guideline violated  -> direct_criticism
  soft guideline violated  -> indirect_criticism (phrased as a question)
  commonly-violated rule satisfied, or nearest case close  -> compliment
  edit step toward the nearest case  -> direct_suggestion (capped)
  component missing per a 'requires' rule -> instruction (component how-to)
  always, exactly once     -> general_suggestion (count summary)

Report generation is a pure function: identical inputs give bit-identical
reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from sciwb.corpus import PAPER_TYPES, Case, ComponentSequence, Taxonomy
from sciwb.editdist import edit_script
from sciwb.errors import CritiqueError, GuidelineError
from sciwb.retrieval import RankedCases, retrieve_similar_cases

GUIDELINE_KINDS = ("requires", "forbids", "precedes", "first", "last", "max_count")
SEVERITIES = ("hard", "soft")
CRITIQUE_TYPES = (
    "compliment",
    "direct_criticism",
    "indirect_criticism",
    "direct_suggestion",
    "instruction",
    "general_suggestion",
)

DEFAULT_COMPLIMENT_THRESHOLD = 0.8
DEFAULT_SUGGESTION_CAP = 5


@dataclass(frozen=True)
class Guideline:
    """A declarative rule over component sequences.

    kinds: requires(C), forbids(C), first(C), last(C) take one component;
    precedes(A, B) takes two distinct ones (A must come before B);
    max_count(C, n) takes one component and a bound n >= 1.
    """

    id: str
    kind: str
    components: tuple[str, ...]
    bound: Optional[int] = None
    severity: str = "hard"
    rationale: str = ""
    instruction: str = ""
    commonly_violated: bool = False
    section: str = "introduction"

    def __post_init__(self):
        if self.kind not in GUIDELINE_KINDS:
            raise GuidelineError(f"unknown guideline kind {self.kind!r}")
        if self.severity not in SEVERITIES:
            raise GuidelineError(f"unknown severity {self.severity!r}")
        if self.kind == "precedes":
            if len(self.components) != 2 or self.components[0] == self.components[1]:
                raise GuidelineError(
                    f"guideline {self.id!r}: precedes takes two distinct components")
        elif len(self.components) != 1:
            raise GuidelineError(f"guideline {self.id!r}: {self.kind} takes one component")
        if self.kind == "max_count":
            if self.bound is None or self.bound < 1:
                raise GuidelineError(f"guideline {self.id!r}: max_count needs a bound >= 1")
        elif self.bound is not None:
            raise GuidelineError(f"guideline {self.id!r}: only max_count takes a bound")


@dataclass(frozen=True)
class StructureSketch:
    """The user's product: a proposed component sequence for one section."""

    section: str
    paper_type: str
    sequence: ComponentSequence

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(self.sequence))


def validate_sketch(sketch: StructureSketch, taxonomy: Taxonomy) -> None:
    if sketch.paper_type not in PAPER_TYPES:
        raise CritiqueError(f"invalid paper type {sketch.paper_type!r}")
    allowed = set(taxonomy.section_component_ids(sketch.section))
    for cid in sketch.sequence:
        if cid not in allowed:
            raise CritiqueError(
                f"component {cid!r} does not belong to section {sketch.section!r}")


@dataclass(frozen=True)
class GuidelineResult:
    guideline_id: str
    violated: bool
    details: str


def _scope_check(g: Guideline, section: str, taxonomy: Taxonomy) -> None:
    allowed = set(taxonomy.section_component_ids(section))
    for cid in g.components:
        if cid not in allowed:
            raise GuidelineError(
                f"guideline {g.id!r} references component {cid!r} "
                f"outside section {section!r}")


def check_guidelines(sketch: StructureSketch, guidelines: Sequence[Guideline],
                     taxonomy: Taxonomy) -> tuple[GuidelineResult, ...]:
    """Evaluate each guideline against the sketch's component sequence."""
    seq = sketch.sequence
    results = []
    for g in guidelines:
        _scope_check(g, sketch.section, taxonomy)
        if g.kind == "requires":
            c = g.components[0]
            violated = c not in seq
            details = f"component {c!r} is missing" if violated else f"component {c!r} is present"
        elif g.kind == "forbids":
            c = g.components[0]
            violated = c in seq
            details = (f"component {c!r} appears at position {seq.index(c)}"
                       if violated else f"component {c!r} is absent")
        elif g.kind == "precedes":
            a, b = g.components
            if a in seq and b in seq:
                first_b = seq.index(b)
                last_a = max(i for i, x in enumerate(seq) if x == a)
                violated = first_b < last_a
                details = (f"{b!r} (position {first_b}) comes before {a!r} (position {last_a})"
                           if violated else f"{a!r} precedes {b!r}")
            else:
                violated = False
                details = f"not applicable: {a!r} and {b!r} are not both present"
        elif g.kind == "first":
            c = g.components[0]
            violated = bool(seq) and seq[0] != c
            details = (f"sequence opens with {seq[0]!r}, not {c!r}" if violated
                       else ("sequence is empty" if not seq else f"sequence opens with {c!r}"))
        elif g.kind == "last":
            c = g.components[0]
            violated = bool(seq) and seq[-1] != c
            details = (f"sequence ends with {seq[-1]!r}, not {c!r}" if violated
                       else ("sequence is empty" if not seq else f"sequence ends with {c!r}"))
        else:  # max_count
            c = g.components[0]
            count = seq.count(c)
            violated = count > g.bound
            details = f"component {c!r} appears {count} time(s), bound is {g.bound}"
        results.append(GuidelineResult(guideline_id=g.id, violated=violated, details=details))
    return tuple(results)


@dataclass(frozen=True)
class Evidence:
    """What a critique rests on: a guideline, or a case with its similarity."""

    guideline_id: Optional[str] = None
    case_id: Optional[str] = None
    similarity: Optional[float] = None


@dataclass(frozen=True)
class Critique:
    type: str
    message: str
    target: Union[str, int, None] = None
    evidence: Optional[Evidence] = None

    def __post_init__(self):
        if self.type not in CRITIQUE_TYPES:
            raise CritiqueError(f"unknown critique type {self.type!r}")
        if self.type != "general_suggestion" and self.evidence is None:
            raise CritiqueError(f"critique of type {self.type!r} requires evidence")


@dataclass(frozen=True)
class CritiqueConfig:
    """Tunables read from the guideline file header."""

    compliment_threshold: float = DEFAULT_COMPLIMENT_THRESHOLD
    suggestion_cap: int = DEFAULT_SUGGESTION_CAP


@dataclass(frozen=True)
class CritiqueReport:
    sketch: StructureSketch
    critiques: tuple[Critique, ...]
    guideline_results: tuple[GuidelineResult, ...]
    ranked_cases: RankedCases

    def by_type(self, type_: str) -> tuple[Critique, ...]:
        return tuple(c for c in self.critiques if c.type == type_)


def _criticism_text(g: Guideline, result: GuidelineResult, taxonomy: Taxonomy) -> str:
    name = {cid: taxonomy.component(cid).name for cid in g.components}
    if g.kind == "requires":
        base = f"The {g.section} is missing the component '{name[g.components[0]]}'."
    elif g.kind == "forbids":
        base = f"The component '{name[g.components[0]]}' does not belong in the {g.section}."
    elif g.kind == "precedes":
        base = (f"'{name[g.components[0]]}' should come before "
                f"'{name[g.components[1]]}' ({result.details}).")
    elif g.kind == "first":
        base = f"The {g.section} should open with '{name[g.components[0]]}' ({result.details})."
    elif g.kind == "last":
        base = f"The {g.section} should close with '{name[g.components[0]]}' ({result.details})."
    else:
        base = (f"'{name[g.components[0]]}' should appear at most "
                f"{g.bound} time(s) ({result.details}).")
    return f"{base} {g.rationale}".strip()


def _question_text(g: Guideline, result: GuidelineResult, taxonomy: Taxonomy) -> str:
    name = {cid: taxonomy.component(cid).name for cid in g.components}
    if g.kind == "requires":
        return f"Could the {g.section} benefit from a '{name[g.components[0]]}' component?"
    if g.kind == "forbids":
        return f"Is '{name[g.components[0]]}' really needed in the {g.section}?"
    if g.kind == "precedes":
        return (f"Would moving '{name[g.components[0]]}' ahead of "
                f"'{name[g.components[1]]}' read better?")
    if g.kind == "first":
        return f"Have you considered opening with '{name[g.components[0]]}'?"
    if g.kind == "last":
        return f"Have you considered closing with '{name[g.components[0]]}'?"
    return (f"Do you need that many occurrences of '{name[g.components[0]]}' "
            f"({result.details})?")


def generate_critiques(sketch: StructureSketch, guidelines: Sequence[Guideline],
                       cases: Sequence[Case], k: int, taxonomy: Taxonomy,
                       config: CritiqueConfig = CritiqueConfig()) -> CritiqueReport:
    """Produce the deterministic critique report for one sketch.

    The case ranking covers the whole supplied base; callers wanting
    type-specific feedback filter the case list first.
    """
    if not cases:
        raise CritiqueError("empty case base")
    if k < 1:
        raise CritiqueError(f"nearest-case count k must be >= 1, got {k}")
    validate_sketch(sketch, taxonomy)
    by_id = {g.id: g for g in guidelines}
    if len(by_id) != len(guidelines):
        raise GuidelineError("duplicate guideline ids")

    results = check_guidelines(sketch, guidelines, taxonomy)
    ranked = retrieve_similar_cases(cases, sketch.sequence, paper_type=None, k=k)
    nearest_id, nearest_score = ranked[0]
    nearest = next(c for c in cases if c.id == nearest_id)

    critiques: list[Critique] = []

    # Compliments: commonly-violated rules this sketch satisfies, then
    # closeness to the best case.
    for res in results:
        g = by_id[res.guideline_id]
        if not res.violated and g.commonly_violated:
            critiques.append(Critique(
                type="compliment",
                message=f"Well done: {res.details}. {g.rationale}".strip(),
                target=g.components[0],
                evidence=Evidence(guideline_id=g.id),
            ))
    if nearest_score >= config.compliment_threshold:
        critiques.append(Critique(
            type="compliment",
            message=(f"Your structure closely matches case '{nearest_id}' "
                     f"(similarity {nearest_score:.3f})."),
            evidence=Evidence(case_id=nearest_id, similarity=nearest_score),
        ))

    # Criticisms from violated guidelines, direct or indirect by severity.
    for res in results:
        g = by_id[res.guideline_id]
        if not res.violated:
            continue
        if g.severity == "hard":
            critiques.append(Critique(
                type="direct_criticism",
                message=_criticism_text(g, res, taxonomy),
                target=g.components[0],
                evidence=Evidence(guideline_id=g.id),
            ))
        else:
            critiques.append(Critique(
                type="indirect_criticism",
                message=_question_text(g, res, taxonomy),
                target=g.components[0],
                evidence=Evidence(guideline_id=g.id),
            ))

    # Suggestions: the minimal edit script toward the nearest case.
    script = edit_script(sketch.sequence, nearest.sequence)
    for op in script[:config.suggestion_cap]:
        if op.kind == "insert":
            msg = f"Insert component '{op.new}' at position {op.pos}."
        elif op.kind == "delete":
            msg = f"Remove component '{op.old}' at position {op.pos}."
        else:
            msg = f"Replace component '{op.old}' at position {op.pos} with '{op.new}'."
        critiques.append(Critique(
            type="direct_suggestion",
            message=f"{msg} (after case '{nearest_id}')",
            target=op.pos,
            evidence=Evidence(case_id=nearest_id, similarity=nearest_score),
        ))

    # Instructions: how to write each component a violated 'requires' names.
    for res in results:
        g = by_id[res.guideline_id]
        if res.violated and g.kind == "requires":
            cid = g.components[0]
            comp = taxonomy.component(cid)
            how = comp.instruction or f"Add a '{comp.name}' component."
            critiques.append(Critique(
                type="instruction",
                message=f"How to write '{comp.name}': {how}",
                target=cid,
                evidence=Evidence(guideline_id=g.id),
            ))

    n_hard = sum(1 for r in results if r.violated and by_id[r.guideline_id].severity == "hard")
    n_soft = sum(1 for r in results if r.violated and by_id[r.guideline_id].severity == "soft")
    n_sugg = len(script[:config.suggestion_cap])
    critiques.append(Critique(
        type="general_suggestion",
        message=(f"Summary: {n_hard} hard violation(s), {n_soft} soft concern(s), "
                 f"{n_sugg} suggested edit(s); nearest case '{nearest_id}' "
                 f"at similarity {nearest_score:.3f}."),
    ))

    return CritiqueReport(sketch=sketch, critiques=tuple(critiques),
                          guideline_results=results, ranked_cases=ranked)


@dataclass(frozen=True)
class CritiqueSession:
    """One user's submit-feedback-revise loop; history is append-only."""

    id: str
    history: tuple[tuple[StructureSketch, CritiqueReport], ...] = ()

    @property
    def cycles(self) -> int:
        return len(self.history)


def cycle_step(session: CritiqueSession, revised: StructureSketch,
               guidelines: Sequence[Guideline], cases: Sequence[Case], k: int,
               taxonomy: Taxonomy,
               config: CritiqueConfig = CritiqueConfig()) -> tuple[CritiqueSession, CritiqueReport]:
    """Critique a revision and append it to the session history.

    Resubmitting an identical sketch yields a report equal to the previous
    one; generation is pure.
    """
    report = generate_critiques(revised, guidelines, cases, k, taxonomy, config)
    new_session = CritiqueSession(id=session.id,
                                  history=session.history + ((revised, report),))
    return new_session, report


# --- guidelines.json (de)serialization ---------------------------------------

def guideline_to_dict(g: Guideline) -> dict:
    out = {
        "id": g.id,
        "kind": g.kind,
        "components": list(g.components),
        "severity": g.severity,
        "rationale": g.rationale,
        "instruction": g.instruction,
        "commonly_violated": g.commonly_violated,
        "section": g.section,
    }
    if g.bound is not None:
        out["bound"] = g.bound
    return out


def guideline_from_dict(obj: dict, location: str) -> Guideline:
    try:
        return Guideline(
            id=obj["id"],
            kind=obj["kind"],
            components=tuple(obj["components"]),
            bound=obj.get("bound"),
            severity=obj.get("severity", "hard"),
            rationale=obj.get("rationale", ""),
            instruction=obj.get("instruction", ""),
            commonly_violated=bool(obj.get("commonly_violated", False)),
            section=obj.get("section", "introduction"),
        )
    except (KeyError, TypeError) as exc:
        raise GuidelineError(f"malformed guideline: {exc!r}", location=location)


def guidelines_to_obj(guidelines: Sequence[Guideline], config: CritiqueConfig) -> dict:
    return {
        "compliment_threshold": config.compliment_threshold,
        "suggestion_cap": config.suggestion_cap,
        "guidelines": [guideline_to_dict(g) for g in guidelines],
    }


def guidelines_from_obj(obj, location: str = "guidelines.json"
                        ) -> tuple[tuple[Guideline, ...], CritiqueConfig]:
    if not isinstance(obj, dict) or "guidelines" not in obj:
        raise GuidelineError("guideline file needs a top-level 'guidelines' array",
                             location=location)
    config = CritiqueConfig(
        compliment_threshold=float(obj.get("compliment_threshold",
                                           DEFAULT_COMPLIMENT_THRESHOLD)),
        suggestion_cap=int(obj.get("suggestion_cap", DEFAULT_SUGGESTION_CAP)),
    )
    guidelines = tuple(
        guideline_from_dict(item, location=f"{location}: guidelines[{i}]")
        for i, item in enumerate(obj["guidelines"])
    )
    return guidelines, config


# --- report serialization (shared by CLI and HTTP API) ------------------------

def evidence_to_dict(e: Evidence | None) -> dict | None:
    if e is None:
        return None
    out: dict = {}
    if e.guideline_id is not None:
        out["guideline"] = e.guideline_id
    if e.case_id is not None:
        out["case"] = e.case_id
    if e.similarity is not None:
        out["similarity"] = round(e.similarity, 6)
    return out


def report_to_dict(report: CritiqueReport) -> dict:
    return {
        "sketch": {
            "section": report.sketch.section,
            "paper_type": report.sketch.paper_type,
            "sequence": list(report.sketch.sequence),
        },
        "critiques": [
            {
                "type": c.type,
                "message": c.message,
                "target": c.target,
                "evidence": evidence_to_dict(c.evidence),
            }
            for c in report.critiques
        ],
        "guideline_results": [
            {"guideline": r.guideline_id, "violated": r.violated, "details": r.details}
            for r in report.guideline_results
        ],
        "ranked_cases": [
            {"case": cid, "similarity": round(score, 6)} for cid, score in report.ranked_cases
        ],
    }
