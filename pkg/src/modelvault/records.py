"""Vault domain records and their canonical dict forms.

Each record knows how to turn itself into a plain dict (``to_dict``) and
back (``from_dict``). The dict form is what lands in the on-disk metadata
files, so it must stay stable: sets are stored sorted, timestamps as ISO
8601 UTC strings, and exact fractions as ``[numerator, denominator]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from typing import Any

from .exchange import ModelDocument
from .metrics import (
    ComplexityRating,
    ComplexityScore,
    ConnectivityRating,
    ConnectivityScore,
)

DEFAULT_CATEGORIES = ["domain-neutral", "domain-specific", "company-specific"]
DEFAULT_KINDS = ["building-block", "design-pattern", "reference-model", "application-model"]
DEFAULT_LAYERS = ["strategy", "business", "application", "technology", "physical"]

CONDITION_KINDS = frozenset({"qualification", "effectivity", "alternate"})


def now() -> datetime:
    return datetime.now(timezone.utc)


def _ts(value: datetime) -> str:
    return value.isoformat()


def _from_ts(text: str) -> datetime:
    return datetime.fromisoformat(text)


class LifecycleState(str, Enum):
    DRAFT = "Draft"
    RELEASED = "Released"
    IN_USE = "InUse"
    INVALID = "Invalid"


class RelationKind(str, Enum):
    LINK = "Link"
    REPLACE = "Replace"


@dataclass(frozen=True, order=True)
class VersionRef:
    """Pinpoints one stored version: entry, variant, version number."""

    entry_id: str
    variant_id: str
    version_number: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "entry": self.entry_id,
            "variant": self.variant_id,
            "version": self.version_number,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> VersionRef:
        return cls(data["entry"], data["variant"], int(data["version"]))


@dataclass
class LifecycleStatus:
    state: LifecycleState
    changed_at: datetime
    check_required: bool = False
    check_reason: VersionRef | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "state": self.state.value,
            "changed_at": _ts(self.changed_at),
            "check_required": self.check_required,
            "check_reason": self.check_reason.to_dict() if self.check_reason else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> LifecycleStatus:
        reason = data.get("check_reason")
        return cls(
            state=LifecycleState(data["state"]),
            changed_at=_from_ts(data["changed_at"]),
            check_required=bool(data.get("check_required", False)),
            check_reason=VersionRef.from_dict(reason) if reason else None,
        )


@dataclass
class Condition:
    """Inert qualification/effectivity/alternate annotation on a version."""

    kind: str
    value: str

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "value": self.value}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Condition:
        return cls(kind=data["kind"], value=data["value"])


@dataclass
class CompositeRelation:
    """Pinned reference from a composite version to one stored version."""

    relation_kind: RelationKind
    target_entry: str
    target_variant: str
    target_version: int
    placeholder: str | None = None

    def target_ref(self) -> VersionRef:
        return VersionRef(self.target_entry, self.target_variant, self.target_version)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.relation_kind.value,
            "entry": self.target_entry,
            "variant": self.target_variant,
            "version": self.target_version,
            "placeholder": self.placeholder,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CompositeRelation:
        return cls(
            relation_kind=RelationKind(data["kind"]),
            target_entry=data["entry"],
            target_variant=data["variant"],
            target_version=int(data["version"]),
            placeholder=data.get("placeholder"),
        )


@dataclass
class OptionalInfo:
    """Free-form descriptive attributes attached to a version."""

    application_context: str | None = None
    capabilities: str | None = None
    limitations: str | None = None
    example: str | None = None
    stakeholder: list[tuple[str, str]] = field(default_factory=list)
    dependencies: list[str] = field(default_factory=list)
    bricks: list[str] = field(default_factory=list)
    variants_links: list[str] = field(default_factory=list)
    references: list[str] = field(default_factory=list)

    def is_empty(self) -> bool:
        return self == OptionalInfo()

    def entry_references(self) -> list[str]:
        """All entry ids this record points at (must resolve in the vault)."""
        return list(self.bricks) + list(self.variants_links)

    def to_dict(self) -> dict[str, Any]:
        return {
            "application_context": self.application_context,
            "capabilities": self.capabilities,
            "limitations": self.limitations,
            "example": self.example,
            "stakeholder": [[name, role] for name, role in self.stakeholder],
            "dependencies": list(self.dependencies),
            "bricks": list(self.bricks),
            "variants_links": list(self.variants_links),
            "references": list(self.references),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> OptionalInfo:
        return cls(
            application_context=data.get("application_context"),
            capabilities=data.get("capabilities"),
            limitations=data.get("limitations"),
            example=data.get("example"),
            stakeholder=[(pair[0], pair[1]) for pair in data.get("stakeholder", [])],
            dependencies=list(data.get("dependencies", [])),
            bricks=list(data.get("bricks", [])),
            variants_links=list(data.get("variants_links", [])),
            references=list(data.get("references", [])),
        )


@dataclass
class FeedbackComment:
    author: str
    at: datetime
    text: str

    def to_dict(self) -> dict[str, Any]:
        return {"author": self.author, "at": _ts(self.at), "text": self.text}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FeedbackComment:
        return cls(author=data["author"], at=_from_ts(data["at"]), text=data["text"])


def _complexity_to_dict(score: ComplexityScore | None) -> dict[str, Any] | None:
    if score is None:
        return None
    return {"component_count": score.component_count, "rating": score.rating.value}


def _complexity_from_dict(data: dict[str, Any] | None) -> ComplexityScore | None:
    if data is None:
        return None
    return ComplexityScore(int(data["component_count"]), ComplexityRating(data["rating"]))


def _connectivity_to_dict(score: ConnectivityScore | None) -> dict[str, Any] | None:
    if score is None:
        return None
    return {
        "mean_degree": [score.mean_degree.numerator, score.mean_degree.denominator],
        "rating": score.rating.value,
    }


def _connectivity_from_dict(data: dict[str, Any] | None) -> ConnectivityScore | None:
    if data is None:
        return None
    num, den = data["mean_degree"]
    return ConnectivityScore(Fraction(num, den), ConnectivityRating(data["rating"]))


@dataclass
class EntryVersion:
    """One revision of an entry under a variant.

    ``model`` is carried in memory but persisted separately as exchange XML;
    the metadata dict only records whether one exists.
    """

    version_number: int
    created_at: datetime
    status: LifecycleStatus
    model: ModelDocument | None = None
    complexity: ComplexityScore | None = None
    connectivity: ConnectivityScore | None = None
    optional_info: OptionalInfo = field(default_factory=OptionalInfo)
    conditions: list[Condition] = field(default_factory=list)
    relations: list[CompositeRelation] = field(default_factory=list)
    predecessor: int | None = None
    feedback: list[FeedbackComment] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "version_number": self.version_number,
            "created_at": _ts(self.created_at),
            "status": self.status.to_dict(),
            "has_model": self.model is not None,
            "complexity": _complexity_to_dict(self.complexity),
            "connectivity": _connectivity_to_dict(self.connectivity),
            "optional_info": self.optional_info.to_dict(),
            "conditions": [c.to_dict() for c in self.conditions],
            "relations": [r.to_dict() for r in self.relations],
            "predecessor": self.predecessor,
            "feedback": [f.to_dict() for f in self.feedback],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], model: ModelDocument | None) -> EntryVersion:
        return cls(
            version_number=int(data["version_number"]),
            created_at=_from_ts(data["created_at"]),
            status=LifecycleStatus.from_dict(data["status"]),
            model=model,
            complexity=_complexity_from_dict(data.get("complexity")),
            connectivity=_connectivity_from_dict(data.get("connectivity")),
            optional_info=OptionalInfo.from_dict(data.get("optional_info", {})),
            conditions=[Condition.from_dict(c) for c in data.get("conditions", [])],
            relations=[CompositeRelation.from_dict(r) for r in data.get("relations", [])],
            predecessor=data.get("predecessor"),
            feedback=[FeedbackComment.from_dict(f) for f in data.get("feedback", [])],
        )


@dataclass
class Variant:
    """A named fork of an entry with its own gapless version sequence."""

    variant_id: str
    origin: tuple[str, int] | None = None
    versions: list[EntryVersion] = field(default_factory=list)

    def latest(self) -> EntryVersion | None:
        return self.versions[-1] if self.versions else None

    def get(self, version_number: int) -> EntryVersion | None:
        index = version_number - 1
        if 0 <= index < len(self.versions):
            return self.versions[index]
        return None

    def to_dict(self) -> dict[str, Any]:
        return {
            "variant_id": self.variant_id,
            "origin": list(self.origin) if self.origin else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Variant:
        origin = data.get("origin")
        return cls(
            variant_id=data["variant_id"],
            origin=(origin[0], int(origin[1])) if origin else None,
        )


@dataclass
class EntryCore:
    """Author-supplied master attributes for a new entry."""

    title: str
    category: str
    kind: str
    layer: str
    abstract: str = ""
    keywords: set[str] = field(default_factory=set)
    responsible_authors: set[str] = field(default_factory=set)


@dataclass
class EntryMaster:
    """Top-level catalog record owning all variants and versions of one entry."""

    id: str
    title: str
    category: str
    kind: str
    layer: str
    abstract: str
    keywords: set[str]
    responsible_authors: set[str]
    is_composite: bool
    created_at: datetime
    variants: dict[str, Variant] = field(default_factory=dict)

    def all_versions(self) -> list[tuple[str, EntryVersion]]:
        """(variant_id, version) pairs across all variants, in variant order."""
        pairs: list[tuple[str, EntryVersion]] = []
        for variant_id in sorted(self.variants):
            for version in self.variants[variant_id].versions:
                pairs.append((variant_id, version))
        return pairs

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "title": self.title,
            "category": self.category,
            "kind": self.kind,
            "layer": self.layer,
            "abstract": self.abstract,
            "keywords": sorted(self.keywords),
            "responsible_authors": sorted(self.responsible_authors),
            "is_composite": self.is_composite,
            "created_at": _ts(self.created_at),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> EntryMaster:
        return cls(
            id=data["id"],
            title=data["title"],
            category=data["category"],
            kind=data["kind"],
            layer=data["layer"],
            abstract=data.get("abstract", ""),
            keywords=set(data.get("keywords", [])),
            responsible_authors=set(data.get("responsible_authors", [])),
            is_composite=bool(data.get("is_composite", False)),
            created_at=_from_ts(data["created_at"]),
        )


@dataclass
class Notification:
    """Cascade notice to one responsible author of an affected version."""

    recipient: str
    target: VersionRef
    cause: VersionRef
    at: datetime
    acknowledged: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "recipient": self.recipient,
            "target": self.target.to_dict(),
            "cause": self.cause.to_dict(),
            "at": _ts(self.at),
            "acknowledged": self.acknowledged,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Notification:
        return cls(
            recipient=data["recipient"],
            target=VersionRef.from_dict(data["target"]),
            cause=VersionRef.from_dict(data["cause"]),
            at=_from_ts(data["at"]),
            acknowledged=bool(data.get("acknowledged", False)),
        )


@dataclass
class VaultConfig:
    """Per-vault taxonomy: grid axes and the keyword vocabulary."""

    layers: list[str] = field(default_factory=lambda: list(DEFAULT_LAYERS))
    categories: list[str] = field(default_factory=lambda: list(DEFAULT_CATEGORIES))
    kinds: list[str] = field(default_factory=lambda: list(DEFAULT_KINDS))
    keywords: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "layers": list(self.layers),
            "categories": list(self.categories),
            "kinds": list(self.kinds),
            "keywords": list(self.keywords),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> VaultConfig:
        return cls(
            layers=list(data.get("layers", DEFAULT_LAYERS)),
            categories=list(data.get("categories", DEFAULT_CATEGORIES)),
            kinds=list(data.get("kinds", DEFAULT_KINDS)),
            keywords=list(data.get("keywords", [])),
        )
