"""The file-backed vault: entry masters, variants, versions, and composites.

A :class:`Vault` holds the full library state in memory and mirrors every
mutation to disk before returning (see :mod:`modelvault.storage` for the
layout). Mutations serialize on a vault-wide lock; the composite relation
graph over entries is kept acyclic at all times; version numbers per variant
are gapless ascending; and a version's model and relations freeze once it
leaves draft.
"""

from __future__ import annotations

import copy
import logging
import threading
from pathlib import Path
from typing import Iterable

from . import storage
from .access import AccessControl, User, UserStore
from .discovery import SearchIndex
from .errors import (
    CyclicComposition,
    DraftExists,
    DuplicateVariant,
    ImmutableVersion,
    MissingPlaceholder,
    NotFound,
    OriginNotReleased,
    StorageError,
    UnresolvedRelation,
    ValidationError,
)
from .exchange import (
    ModelDocument,
    ModelElement,
    ModelRelationship,
    parse_model,
    serialize_model,
    validate_model,
)
from .ids import new_entry_id
from .metrics import ComplexityScore, ConnectivityScore, complexity_score, connectivity_score
from .records import (
    CONDITION_KINDS,
    CompositeRelation,
    Condition,
    EntryCore,
    EntryMaster,
    EntryVersion,
    LifecycleState,
    LifecycleStatus,
    Notification,
    OptionalInfo,
    RelationKind,
    VaultConfig,
    Variant,
    VersionRef,
    now,
)

logger = logging.getLogger(__name__)

_UNSET = object()


def _score_model(model: ModelDocument | None) -> tuple[ComplexityScore | None, ConnectivityScore | None]:
    """Metrics for a stored model; connectivity is undefined without elements."""
    if model is None:
        return None, None
    complexity = complexity_score(model)
    connectivity = connectivity_score(model) if model.elements else None
    return complexity, connectivity


class Vault:
    """Single-node library store with durable file persistence."""

    def __init__(self, root: Path, config: VaultConfig, users: UserStore):
        self.root = Path(root)
        self.config = config
        self.users = users
        self.access = AccessControl(users, self._authors_of)
        self.entries: dict[str, EntryMaster] = {}
        self.notifications: list[Notification] = []
        self.index = SearchIndex()
        self.lock = threading.RLock()

    # -- construction --------------------------------------------------------

    @classmethod
    def init(cls, root: Path | str, config: VaultConfig | None = None) -> "Vault":
        """Create a fresh vault at *root*; the directory must not already hold one."""
        root = Path(root)
        if storage.config_path(root).exists():
            raise ValidationError(f"{root} already contains a vault")
        vault = cls(root, config or VaultConfig(), UserStore())
        storage.atomic_write(storage.config_path(root), storage.dumps(vault.config.to_dict()))
        vault._persist_users()
        vault._persist_notifications()
        vault._persist_index()
        return vault

    @classmethod
    def open(cls, root: Path | str) -> "Vault":
        """Load a vault from disk, rebuilding the search index if absent."""
        root = Path(root)
        config = VaultConfig.from_dict(storage.read_json(storage.config_path(root)))
        users = UserStore.from_dict(storage.read_json(storage.users_path(root)))
        vault = cls(root, config, users)
        for raw in storage.read_json(storage.notifications_path(root)):
            vault.notifications.append(Notification.from_dict(raw))
        for entry_id in storage.list_entry_ids(root):
            vault.entries[entry_id] = vault._load_entry(entry_id)
        postings = storage.postings_path(root)
        if postings.exists():
            vault.index = SearchIndex.from_dict(storage.read_json(postings))
        else:
            for master in vault.entries.values():
                vault.index.index_entry(master)
            vault._persist_index()
        return vault

    def _load_entry(self, entry_id: str) -> EntryMaster:
        master = EntryMaster.from_dict(
            storage.read_json(storage.master_path(self.root, entry_id))
        )
        if master.id != entry_id:
            raise StorageError(
                f"corrupt metadata file: {storage.master_path(self.root, entry_id)} "
                f"(id {master.id!r} does not match directory)"
            )
        for variant_id in storage.list_variant_ids(self.root, entry_id):
            variant = Variant.from_dict(
                storage.read_json(storage.variant_meta_path(self.root, entry_id, variant_id))
            )
            numbers = storage.list_version_numbers(self.root, entry_id, variant_id)
            if numbers != list(range(1, len(numbers) + 1)):
                raise StorageError(
                    f"corrupt variant {variant_id!r} of {entry_id}: "
                    f"version numbers {numbers} are not gapless from 1"
                )
            for number in numbers:
                meta = storage.read_json(
                    storage.version_meta_path(self.root, entry_id, variant_id, number)
                )
                model = None
                if meta.get("has_model"):
                    model = parse_model(
                        storage.read_bytes(
                            storage.model_path(self.root, entry_id, variant_id, number)
                        )
                    )
                variant.versions.append(EntryVersion.from_dict(meta, model))
            master.variants[variant_id] = variant
        return master

    # -- persistence helpers -------------------------------------------------

    def _persist_master(self, master: EntryMaster) -> None:
        storage.atomic_write(
            storage.master_path(self.root, master.id), storage.dumps(master.to_dict())
        )

    def _persist_variant(self, entry_id: str, variant: Variant) -> None:
        storage.atomic_write(
            storage.variant_meta_path(self.root, entry_id, variant.variant_id),
            storage.dumps(variant.to_dict()),
        )

    def _persist_version(self, entry_id: str, variant_id: str, version: EntryVersion) -> None:
        storage.atomic_write(
            storage.version_meta_path(self.root, entry_id, variant_id, version.version_number),
            storage.dumps(version.to_dict()),
        )
        if version.model is not None:
            storage.atomic_write(
                storage.model_path(self.root, entry_id, variant_id, version.version_number),
                serialize_model(version.model),
            )

    def _persist_users(self) -> None:
        storage.atomic_write(storage.users_path(self.root), storage.dumps(self.users.to_dict()))

    def _persist_notifications(self) -> None:
        storage.atomic_write(
            storage.notifications_path(self.root),
            storage.dumps([n.to_dict() for n in self.notifications]),
        )

    def _persist_index(self) -> None:
        storage.atomic_write(
            storage.postings_path(self.root), storage.dumps(self.index.to_dict())
        )

    # -- users -----------------------------------------------------------------

    def add_user(self, user: User) -> User:
        with self.lock:
            self.users.add(user)
            self._persist_users()
        return user

    def _authors_of(self, entry_id: str) -> set[str]:
        master = self.entries.get(entry_id)
        return set(master.responsible_authors) if master else set()

    # -- validation helpers ----------------------------------------------------

    def _validate_core(self, core: EntryCore) -> None:
        if not core.title.strip():
            raise ValidationError("title must be non-empty")
        if core.category not in self.config.categories:
            raise ValidationError(
                f"category {core.category!r} not in configured taxonomy {self.config.categories}"
            )
        if core.kind not in self.config.kinds:
            raise ValidationError(
                f"kind {core.kind!r} not in configured taxonomy {self.config.kinds}"
            )
        if core.layer not in self.config.layers:
            raise ValidationError(
                f"layer {core.layer!r} not in configured layer list {self.config.layers}"
            )
        if not core.responsible_authors:
            raise ValidationError("at least one responsible author is required")
        for author in core.responsible_authors:
            if author not in self.users:
                raise ValidationError(f"responsible author {author!r} is not a known user")
        if self.config.keywords:
            unknown = sorted(set(core.keywords) - set(self.config.keywords))
            if unknown:
                logger.warning("keywords not in vault vocabulary: %s", ", ".join(unknown))

    def _validate_model(self, model: ModelDocument) -> None:
        findings = validate_model(model)
        if findings:
            raise ValidationError(
                f"model {model.model_id!r} is invalid: {findings[0].message}",
                detail=[f.__dict__ for f in findings],
            )

    def _validate_optional_info(self, info: OptionalInfo) -> None:
        for ref in info.entry_references():
            if ref not in self.entries:
                raise ValidationError(f"optional info references unknown entry {ref!r}")

    def _validate_conditions(self, conditions: Iterable[Condition]) -> None:
        for condition in conditions:
            if condition.kind not in CONDITION_KINDS:
                raise ValidationError(
                    f"condition kind {condition.kind!r} not in {sorted(CONDITION_KINDS)}"
                )

    def _validate_relations(
        self,
        relations: list[CompositeRelation],
        parent_model: ModelDocument | None,
    ) -> None:
        seen_targets: set[str] = set()
        seen_placeholders: set[str] = set()
        parent_ids = parent_model.element_ids() if parent_model else set()
        for rel in relations:
            if not rel.target_variant or not rel.target_version or rel.target_version < 1:
                raise UnresolvedRelation(
                    f"relation to {rel.target_entry!r} must pin a specific variant "
                    "and concrete version",
                    detail={"unpinned": True, "entry": rel.target_entry},
                )
            target = self.entries.get(rel.target_entry)
            if target is None:
                raise UnresolvedRelation(f"relation targets unknown entry {rel.target_entry!r}")
            variant = target.variants.get(rel.target_variant)
            if variant is None or variant.get(rel.target_version) is None:
                raise UnresolvedRelation(
                    f"relation targets missing version "
                    f"{rel.target_entry}/{rel.target_variant}/{rel.target_version}"
                )
            if rel.target_entry in seen_targets:
                raise ValidationError(
                    f"composite relates to entry {rel.target_entry!r} more than once; "
                    "merged identifiers would collide"
                )
            seen_targets.add(rel.target_entry)
            if rel.relation_kind is RelationKind.REPLACE:
                if not rel.placeholder:
                    raise MissingPlaceholder(
                        f"replace relation to {rel.target_entry!r} names no placeholder"
                    )
                if rel.placeholder not in parent_ids:
                    raise MissingPlaceholder(
                        f"placeholder {rel.placeholder!r} is not an element of the parent model"
                    )
                if rel.placeholder in seen_placeholders:
                    raise ValidationError(
                        f"placeholder {rel.placeholder!r} is replaced more than once"
                    )
                seen_placeholders.add(rel.placeholder)

    def _check_acyclic(
        self,
        entry_id: str,
        new_relations: list[CompositeRelation],
        skip: VersionRef | None = None,
    ) -> None:
        """Reject when adding *new_relations* on *entry_id* would close a cycle."""
        edges: dict[str, set[str]] = {}
        for master in self.entries.values():
            for variant_id, version in master.all_versions():
                ref = VersionRef(master.id, variant_id, version.version_number)
                if skip is not None and ref == skip:
                    continue
                for rel in version.relations:
                    edges.setdefault(master.id, set()).add(rel.target_entry)
        for rel in new_relations:
            edges.setdefault(entry_id, set()).add(rel.target_entry)

        path: list[str] = []
        state: dict[str, int] = {}  # 1 = on stack, 2 = done

        def visit(node: str) -> list[str] | None:
            state[node] = 1
            path.append(node)
            for succ in sorted(edges.get(node, ())):
                if state.get(succ) == 1:
                    return path[path.index(succ):] + [succ]
                if state.get(succ) != 2:
                    found = visit(succ)
                    if found:
                        return found
            path.pop()
            state[node] = 2
            return None

        cycle = visit(entry_id)
        if cycle:
            raise CyclicComposition(
                "composition would form a cycle: " + " -> ".join(cycle),
                detail={"cycle": cycle},
            )

    # -- entry operations ------------------------------------------------------

    def create_entry(self, core: EntryCore, model: ModelDocument, actor: str) -> EntryMaster:
        """Create a regular entry with variant ``main`` at version 1 (draft)."""
        with self.lock:
            self.access.require(actor, "create_entry")
            self._validate_core(core)
            self._validate_model(model)
            return self._create_master(core, model=model, relations=[], is_composite=False)

    def create_composite(
        self,
        core: EntryCore,
        relations: list[CompositeRelation],
        parent_model: ModelDocument | None,
        actor: str,
    ) -> EntryMaster:
        """Create a composite entry whose content is pinned relations to others."""
        with self.lock:
            self.access.require(actor, "create_entry")
            self._validate_core(core)
            if parent_model is not None:
                self._validate_model(parent_model)
            self._validate_relations(relations, parent_model)
            return self._create_master(
                core, model=parent_model, relations=list(relations), is_composite=True
            )

    def _create_master(
        self,
        core: EntryCore,
        model: ModelDocument | None,
        relations: list[CompositeRelation],
        is_composite: bool,
    ) -> EntryMaster:
        entry_id = new_entry_id()
        while entry_id in self.entries:
            entry_id = new_entry_id()
        if relations:
            self._check_acyclic(entry_id, relations)
        stamp = now()
        complexity, connectivity = _score_model(model)
        version = EntryVersion(
            version_number=1,
            created_at=stamp,
            status=LifecycleStatus(state=LifecycleState.DRAFT, changed_at=stamp),
            model=model,
            complexity=complexity,
            connectivity=connectivity,
            relations=relations,
        )
        variant = Variant(variant_id="main", versions=[version])
        master = EntryMaster(
            id=entry_id,
            title=core.title,
            category=core.category,
            kind=core.kind,
            layer=core.layer,
            abstract=core.abstract,
            keywords=set(core.keywords),
            responsible_authors=set(core.responsible_authors),
            is_composite=is_composite,
            created_at=stamp,
            variants={"main": variant},
        )
        self.entries[entry_id] = master
        self._persist_master(master)
        self._persist_variant(entry_id, variant)
        self._persist_version(entry_id, "main", version)
        self.index.index_entry(master)
        self._persist_index()
        return master

    def new_version(
        self,
        entry_id: str,
        variant_id: str,
        model: ModelDocument | None,
        actor: str,
    ) -> EntryVersion:
        """Open the next draft in a variant, seeded from its predecessor.

        *model* replaces the predecessor's model when given; relations,
        optional info, and conditions carry over either way.
        """
        with self.lock:
            self.access.require(actor, "modify_entry", entry_id)
            master = self.get_entry(entry_id)
            variant = self._get_variant(master, variant_id)
            latest = variant.latest()
            assert latest is not None
            if latest.status.state is LifecycleState.DRAFT:
                raise DraftExists(
                    f"{entry_id}/{variant_id} already has an open draft "
                    f"(version {latest.version_number}); edit it in place"
                )
            if model is None:
                model = copy.deepcopy(latest.model)
            else:
                self._validate_model(model)
            stamp = now()
            complexity, connectivity = _score_model(model)
            version = EntryVersion(
                version_number=latest.version_number + 1,
                created_at=stamp,
                status=LifecycleStatus(state=LifecycleState.DRAFT, changed_at=stamp),
                model=model,
                complexity=complexity,
                connectivity=connectivity,
                optional_info=copy.deepcopy(latest.optional_info),
                conditions=copy.deepcopy(latest.conditions),
                relations=copy.deepcopy(latest.relations),
                predecessor=latest.version_number,
            )
            variant.versions.append(version)
            self._persist_version(entry_id, variant_id, version)
            return version

    def new_variant(
        self,
        entry_id: str,
        name: str,
        from_variant: str,
        from_version: int,
        actor: str,
    ) -> Variant:
        """Branch a parallel variant from a released or in-use version."""
        with self.lock:
            self.access.require(actor, "modify_entry", entry_id)
            master = self.get_entry(entry_id)
            if not name or any(ch in name for ch in "/\\") or name in (".", ".."):
                raise ValidationError(f"invalid variant name {name!r}")
            if name in master.variants:
                raise DuplicateVariant(f"variant {name!r} already exists on {entry_id}")
            origin_variant = self._get_variant(master, from_variant)
            origin = origin_variant.get(from_version)
            if origin is None:
                raise NotFound(f"no version {from_version} in {entry_id}/{from_variant}")
            if origin.status.state not in (LifecycleState.RELEASED, LifecycleState.IN_USE):
                raise OriginNotReleased(
                    f"cannot branch from {origin.status.state.value} version "
                    f"{entry_id}/{from_variant}/{from_version}"
                )
            stamp = now()
            model = copy.deepcopy(origin.model)
            complexity, connectivity = _score_model(model)
            version = EntryVersion(
                version_number=1,
                created_at=stamp,
                status=LifecycleStatus(state=LifecycleState.DRAFT, changed_at=stamp),
                model=model,
                complexity=complexity,
                connectivity=connectivity,
                optional_info=copy.deepcopy(origin.optional_info),
                conditions=copy.deepcopy(origin.conditions),
                relations=copy.deepcopy(origin.relations),
            )
            variant = Variant(variant_id=name, origin=(from_variant, from_version), versions=[version])
            master.variants[name] = variant
            self._persist_variant(entry_id, variant)
            self._persist_version(entry_id, name, version)
            return variant

    def update_draft(
        self,
        entry_id: str,
        variant_id: str,
        version_number: int,
        actor: str,
        model: ModelDocument | object = _UNSET,
        relations: list[CompositeRelation] | object = _UNSET,
        optional_info: OptionalInfo | object = _UNSET,
        conditions: list[Condition] | object = _UNSET,
    ) -> EntryVersion:
        """Edit an open draft in place; drafts are the only mutable versions."""
        with self.lock:
            self.access.require(actor, "modify_entry", entry_id)
            master = self.get_entry(entry_id)
            version = self.get_version(entry_id, variant_id, version_number)
            if version.status.state is not LifecycleState.DRAFT:
                raise ImmutableVersion(
                    f"version {entry_id}/{variant_id}/{version_number} is "
                    f"{version.status.state.value}; only drafts may change"
                )

            new_model = version.model if model is _UNSET else model
            if model is not _UNSET and new_model is not None:
                self._validate_model(new_model)
            if new_model is None and not master.is_composite:
                raise ValidationError(f"entry {entry_id} is not a composite; a model is required")
            new_relations = version.relations if relations is _UNSET else list(relations)
            if relations is not _UNSET:
                if not master.is_composite and new_relations:
                    raise ValidationError(
                        f"{entry_id} is not a composite; relations are not allowed"
                    )
            if new_relations and (relations is not _UNSET or model is not _UNSET):
                self._validate_relations(new_relations, new_model)
                self._check_acyclic(
                    entry_id, new_relations, skip=VersionRef(entry_id, variant_id, version_number)
                )
            if optional_info is not _UNSET:
                self._validate_optional_info(optional_info)
                version.optional_info = optional_info
            if conditions is not _UNSET:
                self._validate_conditions(conditions)
                version.conditions = list(conditions)
            version.model = new_model
            version.relations = new_relations
            version.complexity, version.connectivity = _score_model(new_model)
            self._persist_version(entry_id, variant_id, version)
            return version

    # -- reads -----------------------------------------------------------------

    def get_entry(self, entry_id: str) -> EntryMaster:
        master = self.entries.get(entry_id)
        if master is None:
            raise NotFound(f"no such entry {entry_id!r}")
        return master

    def _get_variant(self, master: EntryMaster, variant_id: str) -> Variant:
        variant = master.variants.get(variant_id)
        if variant is None:
            raise NotFound(f"no variant {variant_id!r} on entry {master.id}")
        return variant

    def get_variant(self, entry_id: str, variant_id: str) -> Variant:
        return self._get_variant(self.get_entry(entry_id), variant_id)

    def get_version(self, entry_id: str, variant_id: str, version_number: int) -> EntryVersion:
        variant = self.get_variant(entry_id, variant_id)
        version = variant.get(version_number)
        if version is None:
            raise NotFound(f"no version {version_number} in {entry_id}/{variant_id}")
        return version

    def list_entries(
        self,
        category: str | None = None,
        layer: str | None = None,
        state: LifecycleState | None = None,
    ) -> list[EntryMaster]:
        """Masters ordered by id; *state* matches entries having any such version."""
        result = []
        for entry_id in sorted(self.entries):
            master = self.entries[entry_id]
            if category is not None and master.category != category:
                continue
            if layer is not None and master.layer != layer:
                continue
            if state is not None and not any(
                version.status.state is state for _, version in master.all_versions()
            ):
                continue
            result.append(master)
        return result

    # -- composite resolution ----------------------------------------------------

    def resolve_composite(
        self, entry_id: str, variant_id: str, version_number: int
    ) -> ModelDocument:
        """Flatten a composite version into one plain model document.

        Linked children are merged with their ids prefixed ``<child-id>.``;
        replaced placeholders are removed and relationships incident to them
        re-targeted at the child's boundary element (its ``interface``
        property, or its first element). Nested composites flatten
        recursively; termination is guaranteed by write-time acyclicity.
        """
        master = self.get_entry(entry_id)
        if not master.is_composite:
            raise ValidationError(f"entry {entry_id} is not a composite")
        self.get_version(entry_id, variant_id, version_number)
        return self._resolve(VersionRef(entry_id, variant_id, version_number))

    def _resolve(self, ref: VersionRef) -> ModelDocument:
        master = self.entries.get(ref.entry_id)
        if master is None:
            raise UnresolvedRelation(f"relation targets unknown entry {ref.entry_id!r}")
        variant = master.variants.get(ref.variant_id)
        version = variant.get(ref.version_number) if variant else None
        if version is None:
            raise UnresolvedRelation(
                f"relation targets missing version "
                f"{ref.entry_id}/{ref.variant_id}/{ref.version_number}"
            )
        if not master.is_composite:
            if version.model is None:
                raise UnresolvedRelation(
                    f"version {ref.entry_id}/{ref.variant_id}/{ref.version_number} has no model"
                )
            return copy.deepcopy(version.model)

        if version.model is not None:
            doc = copy.deepcopy(version.model)
        else:
            doc = ModelDocument(model_id=master.id, name=master.title)
        for rel in version.relations:
            child = self._resolve(rel.target_ref())
            prefix = rel.target_entry + "."
            merged_elements = [
                ModelElement(
                    id=prefix + e.id, kind=e.kind, name=e.name, documentation=e.documentation
                )
                for e in child.elements
            ]
            merged_relationships = [
                ModelRelationship(
                    id=prefix + r.id,
                    kind=r.kind,
                    source=prefix + r.source,
                    target=prefix + r.target,
                    name=r.name,
                )
                for r in child.relationships
            ]
            if rel.relation_kind is RelationKind.REPLACE:
                placeholder = rel.placeholder
                if placeholder is None or placeholder not in doc.element_ids():
                    raise MissingPlaceholder(
                        f"placeholder {placeholder!r} is not an element of the parent model"
                    )
                if not child.elements:
                    raise UnresolvedRelation(
                        f"replace child {rel.target_entry} resolves to an empty model; "
                        "no boundary element to attach"
                    )
                boundary_raw = child.properties.get("interface") or child.elements[0].id
                if boundary_raw not in child.element_ids():
                    raise UnresolvedRelation(
                        f"child {rel.target_entry} declares interface {boundary_raw!r} "
                        "which is not one of its elements"
                    )
                boundary = prefix + boundary_raw
                doc.elements = [e for e in doc.elements if e.id != placeholder]
                for parent_rel in doc.relationships:
                    if parent_rel.source == placeholder:
                        parent_rel.source = boundary
                    if parent_rel.target == placeholder:
                        parent_rel.target = boundary
            doc.elements.extend(merged_elements)
            doc.relationships.extend(merged_relationships)
        return doc
