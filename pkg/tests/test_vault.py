"""Vault operations, persistence layout, durability, and write atomicity."""

import copy
import os
import random

import pytest

from modelvault import storage
from modelvault.errors import (
    DraftExists,
    DuplicateVariant,
    ImmutableVersion,
    NotFound,
    OriginNotReleased,
    StorageError,
    ValidationError,
)
from modelvault.exchange import ModelDocument, ModelElement, serialize_model
from modelvault.ids import is_entry_id
from modelvault.lifecycle import transition
from modelvault.records import Condition, LifecycleState, OptionalInfo, VaultConfig
from modelvault.vault import Vault

from .conftest import core, make_model, seed_users


def test_init_creates_layout(tmp_path):
    root = tmp_path / "v"
    Vault.init(root)
    assert (root / "config.meta").exists()
    assert (root / "users").exists()
    assert (root / "notifications.meta").exists()
    assert (root / "index" / "postings.meta").exists()


def test_init_refuses_existing_vault(tmp_path):
    Vault.init(tmp_path / "v")
    with pytest.raises(ValidationError):
        Vault.init(tmp_path / "v")


def test_create_entry_shape(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 19, 0), actor="alice")
    assert is_entry_id(master.id)
    assert set(master.variants) == {"main"}
    version = master.variants["main"].versions[0]
    assert version.version_number == 1
    assert version.status.state is LifecycleState.DRAFT
    assert version.predecessor is None
    assert version.complexity.component_count == 19
    assert version.complexity.rating.value == "Easy"
    assert version.connectivity.rating.value == "Simple"


def test_create_entry_files_on_disk(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 3, 1), actor="alice")
    base = vault.root / "entries" / master.id
    assert (base / "master.meta").exists()
    assert (base / "variants" / "main" / "variant.meta").exists()
    assert (base / "variants" / "main" / "versions" / "1" / "meta").exists()
    assert (base / "variants" / "main" / "versions" / "1" / "model.xml").exists()


@pytest.mark.parametrize(
    "field,value,hint",
    [
        ("title", "   ", "title"),
        ("category", "nope", "category"),
        ("kind", "nope", "kind"),
        ("layer", "nope", "layer"),
        ("responsible_authors", set(), "author"),
        ("responsible_authors", {"ghost"}, "ghost"),
    ],
)
def test_core_validation(vault, field, value, hint):
    overrides = {field: value}
    bad = core(overrides.pop("title", "Billing"), **overrides)
    with pytest.raises(ValidationError) as err:
        vault.create_entry(bad, make_model("m", 2, 0), actor="alice")
    assert hint in str(err.value)


def test_unknown_keywords_warn_but_pass(tmp_path, caplog):
    vault = Vault.init(tmp_path / "v", VaultConfig(keywords=["known"]))
    seed_users(vault)
    with caplog.at_level("WARNING"):
        vault.create_entry(
            core("Billing", keywords={"known", "odd"}), make_model("m", 2, 0), actor="alice"
        )
    assert "odd" in caplog.text


def test_invalid_model_rejected_at_create(vault):
    bad = ModelDocument(model_id="m", elements=[ModelElement(id="e", kind="")])
    with pytest.raises(ValidationError):
        vault.create_entry(core("Billing"), bad, actor="alice")


def test_new_version_requires_released_predecessor(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 2, 0), actor="alice")
    with pytest.raises(DraftExists):
        vault.new_version(master.id, "main", None, actor="alice")


def test_new_version_gapless_and_seeded(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 4, 2), actor="alice")
    transition(vault, master.id, "main", 1, "release", actor="alice")
    version = vault.new_version(master.id, "main", None, actor="alice")
    assert version.version_number == 2
    assert version.predecessor == 1
    assert version.model == vault.get_version(master.id, "main", 1).model
    assert version.model is not vault.get_version(master.id, "main", 1).model
    numbers = [v.version_number for v in vault.get_variant(master.id, "main").versions]
    assert numbers == [1, 2]


def test_new_variant_branches_from_released(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 4, 2), actor="alice")
    with pytest.raises(OriginNotReleased):
        vault.new_variant(master.id, "fork", "main", 1, actor="alice")
    transition(vault, master.id, "main", 1, "release", actor="alice")
    variant = vault.new_variant(master.id, "fork", "main", 1, actor="alice")
    assert variant.origin == ("main", 1)
    assert variant.versions[0].version_number == 1
    assert variant.versions[0].model == vault.get_version(master.id, "main", 1).model
    with pytest.raises(DuplicateVariant):
        vault.new_variant(master.id, "fork", "main", 1, actor="alice")


@pytest.mark.parametrize("name", ["", "a/b", "..", "back\\slash"])
def test_variant_name_validation(vault, name):
    master = vault.create_entry(core("Billing"), make_model("m", 2, 0), actor="alice")
    transition(vault, master.id, "main", 1, "release", actor="alice")
    with pytest.raises(ValidationError):
        vault.new_variant(master.id, name, "main", 1, actor="alice")


def test_update_draft_recomputes_metrics(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 2, 0), actor="alice")
    version = vault.update_draft(master.id, "main", 1, actor="alice", model=make_model("m", 41, 0))
    assert version.complexity.component_count == 41
    assert version.complexity.rating.value == "Complex"


def test_update_draft_persists_replacement_model(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 2, 0), actor="alice")
    new_model = make_model("m2", 5, 2)
    vault.update_draft(master.id, "main", 1, actor="alice", model=new_model)
    stored = storage.read_bytes(storage.model_path(vault.root, master.id, "main", 1))
    assert stored == serialize_model(new_model)


def test_update_draft_optional_info_and_conditions(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 2, 0), actor="alice")
    info = OptionalInfo(application_context="claims intake", capabilities="routing")
    conditions = [Condition(kind="qualification", value="needs SSO")]
    version = vault.update_draft(
        master.id, "main", 1, actor="alice", optional_info=info, conditions=conditions
    )
    assert version.optional_info.application_context == "claims intake"
    assert version.conditions[0].kind == "qualification"


def test_update_draft_rejects_unknown_condition_kind(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 2, 0), actor="alice")
    with pytest.raises(ValidationError):
        vault.update_draft(
            master.id, "main", 1, actor="alice", conditions=[Condition(kind="nope", value="x")]
        )


def test_update_draft_rejects_unknown_brick_reference(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 2, 0), actor="alice")
    with pytest.raises(ValidationError):
        vault.update_draft(
            master.id, "main", 1, actor="alice", optional_info=OptionalInfo(bricks=["ghost"])
        )


def test_released_version_is_immutable(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 2, 0), actor="alice")
    transition(vault, master.id, "main", 1, "release", actor="alice")
    with pytest.raises(ImmutableVersion):
        vault.update_draft(master.id, "main", 1, actor="alice", model=make_model("m", 3, 0))


def test_non_composite_cannot_drop_model_or_take_relations(vault):
    master = vault.create_entry(core("Billing"), make_model("m", 2, 0), actor="alice")
    with pytest.raises(ValidationError):
        vault.update_draft(master.id, "main", 1, actor="alice", model=None)
    other = vault.create_entry(core("Other"), make_model("m", 2, 0), actor="alice")
    from modelvault.records import CompositeRelation, RelationKind

    rel = CompositeRelation(RelationKind.LINK, other.id, "main", 1)
    with pytest.raises(ValidationError):
        vault.update_draft(master.id, "main", 1, actor="alice", relations=[rel])


def test_reads_raise_not_found(vault):
    with pytest.raises(NotFound):
        vault.get_entry("missing")
    master = vault.create_entry(core("Billing"), make_model("m", 2, 0), actor="alice")
    with pytest.raises(NotFound):
        vault.get_variant(master.id, "nope")
    with pytest.raises(NotFound):
        vault.get_version(master.id, "main", 9)


def test_list_entries_filters(vault):
    a = vault.create_entry(core("A", layer="business"), make_model("m", 2, 0), actor="alice")
    b = vault.create_entry(
        core("B", layer="application", category="company-specific"),
        make_model("m", 2, 0),
        actor="alice",
    )
    transition(vault, b.id, "main", 1, "release", actor="alice")
    assert [m.id for m in vault.list_entries()] == sorted([a.id, b.id])
    assert [m.id for m in vault.list_entries(layer="application")] == [b.id]
    assert [m.id for m in vault.list_entries(category="domain-neutral")] == [a.id]
    assert [m.id for m in vault.list_entries(state=LifecycleState.RELEASED)] == [b.id]
    assert [m.id for m in vault.list_entries(state=LifecycleState.DRAFT)] == [a.id]


# -- reload and durability -------------------------------------------------------


def build_random_vault(root, n_entries: int, seed: int) -> Vault:
    vault = Vault.init(root)
    seed_users(vault)
    rng = random.Random(seed)
    ids = []
    for i in range(n_entries):
        c = core(
            f"Entry {i}",
            author=rng.choice(["alice", "bob"]),
            layer=rng.choice(vault.config.layers),
            category=rng.choice(vault.config.categories),
            keywords={rng.choice(["billing", "claims", "risk", "crm"])},
        )
        model = make_model(f"m{i}", rng.randint(1, 25), rng.randint(0, 20), rng)
        master = vault.create_entry(c, model, actor="alice")
        ids.append(master.id)
        if rng.random() < 0.7:
            transition(vault, master.id, "main", 1, "release", actor="root")
            if rng.random() < 0.4:
                vault.new_version(master.id, "main", None, actor="root")
            if rng.random() < 0.3:
                vault.new_variant(master.id, f"var{i}", "main", 1, actor="root")
    return vault


def snapshot_files(root) -> dict[str, bytes]:
    out = {}
    for base, _dirs, files in os.walk(root):
        for name in files:
            path = os.path.join(base, name)
            with open(path, "rb") as handle:
                out[os.path.relpath(path, root)] = handle.read()
    return out


def test_reload_equality_and_byte_stability(tmp_path):
    root = tmp_path / "v"
    vault = build_random_vault(root, 12, seed=3)
    before = snapshot_files(root)

    reloaded = Vault.open(root)
    assert set(reloaded.entries) == set(vault.entries)
    for entry_id, master in vault.entries.items():
        twin = reloaded.entries[entry_id]
        assert twin.to_dict() == master.to_dict()
        for variant_id, version in master.all_versions():
            other = reloaded.get_version(entry_id, variant_id, version.version_number)
            assert other.to_dict() == version.to_dict()
            assert other.model == version.model
    assert reloaded.users.to_dict() == vault.users.to_dict()

    # a full re-persist of the reloaded state writes identical bytes
    for master in reloaded.entries.values():
        reloaded._persist_master(master)
        for variant in master.variants.values():
            reloaded._persist_variant(master.id, variant)
            for version in variant.versions:
                reloaded._persist_version(master.id, variant.variant_id, version)
    reloaded._persist_users()
    reloaded._persist_notifications()
    reloaded._persist_index()
    assert snapshot_files(root) == before


def test_open_rebuilds_missing_index(tmp_path):
    root = tmp_path / "v"
    vault = build_random_vault(root, 6, seed=5)
    from modelvault.discovery import SearchQuery, search

    expected = search(vault, SearchQuery(terms=["entry"]))
    storage.postings_path(root).unlink()
    reloaded = Vault.open(root)
    assert storage.postings_path(root).exists()
    assert search(reloaded, SearchQuery(terms=["entry"])) == expected


def test_open_rejects_version_gap(tmp_path):
    root = tmp_path / "v"
    vault = Vault.init(root)
    seed_users(vault)
    master = vault.create_entry(core("A"), make_model("m", 2, 0), actor="alice")
    transition(vault, master.id, "main", 1, "release", actor="alice")
    vault.new_version(master.id, "main", None, actor="alice")
    version_dir = root / "entries" / master.id / "variants" / "main" / "versions" / "1"
    for name in os.listdir(version_dir):
        os.unlink(version_dir / name)
    os.rmdir(version_dir)
    with pytest.raises(StorageError) as err:
        Vault.open(root)
    assert "gapless" in str(err.value)


def test_open_rejects_mismatched_master_id(tmp_path):
    root = tmp_path / "v"
    vault = Vault.init(root)
    seed_users(vault)
    master = vault.create_entry(core("A"), make_model("m", 2, 0), actor="alice")
    path = storage.master_path(root, master.id)
    data = storage.read_json(path)
    data["id"] = "SOMETHINGELSE0000000000000"
    storage.atomic_write(path, storage.dumps(data))
    with pytest.raises(StorageError):
        Vault.open(root)


# -- atomic writes ------------------------------------------------------------------


def test_atomic_write_replaces_and_cleans_up(tmp_path):
    target = tmp_path / "file.meta"
    storage.atomic_write(target, b"one")
    storage.atomic_write(target, b"two")
    assert target.read_bytes() == b"two"
    assert [p.name for p in tmp_path.iterdir()] == ["file.meta"]


def test_failed_write_leaves_original_intact(tmp_path, monkeypatch):
    target = tmp_path / "file.meta"
    storage.atomic_write(target, b"original")

    def boom(src, dst):
        raise OSError("simulated crash")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(StorageError):
        storage.atomic_write(target, b"partial")
    monkeypatch.undo()
    assert target.read_bytes() == b"original"
    assert [p.name for p in tmp_path.iterdir()] == ["file.meta"]


def test_canonical_dumps_is_deterministic():
    data = {"b": [2, 1], "a": {"y": None, "x": "ü"}}
    first = storage.dumps(data)
    second = storage.dumps({"a": {"x": "ü", "y": None}, "b": [2, 1]})
    assert first == second
    assert first.endswith(b"\n")
    assert "ü".encode() in first
