"""Exception hierarchy shared by every workbench module."""

from __future__ import annotations


class SciwbError(Exception):
    """Base error. ``location`` points at the offending file region or
    JSON path when one is known (e.g. ``taxonomy.json: sections[2]``)."""

    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.message = message
        self.location = location


class TaxonomyError(SciwbError):
    """Malformed or inconsistent taxonomy data."""


class CorpusError(SciwbError):
    """Invalid document, annotation, or case."""


class TemplateError(SciwbError):
    """Bad template syntax, or a template violating the reuse rule."""


class PhrasebankError(SciwbError):
    """Invalid phrasebank entry or tag set."""


class RetrievalError(SciwbError):
    """Bad index construction or query."""


class GuidelineError(SciwbError):
    """Malformed guideline or guideline out of scope for a section."""


class CritiqueError(SciwbError):
    """Critique generation failure (e.g. empty case base)."""


class RevisionError(SciwbError):
    """Draft assembly or text-check failure."""


class AssessmentError(SciwbError):
    """Invalid quiz item, probability vector, or response set."""


class WorkspaceError(SciwbError):
    """Aggregated workspace validation failure.

    Carries *every* error found during the load, not just the first, so a
    broken workspace can be repaired in one pass.
    """

    def __init__(self, errors: list[str]):
        listing = "\n".join(f"  - {e}" for e in errors)
        super().__init__(f"workspace validation failed:\n{listing}")
        self.errors = list(errors)
