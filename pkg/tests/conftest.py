"""Shared fixtures: seeded vaults, deterministic model generators."""

from __future__ import annotations

import random
import string

import pytest

from modelvault import storage
from modelvault.access import Role, User
from modelvault.exchange import ModelDocument, ModelElement, ModelRelationship
from modelvault.records import EntryCore, VaultConfig
from modelvault.vault import Vault

TOKENS = {
    "root": "tok-root",
    "alice": "tok-alice",
    "bob": "tok-bob",
    "rita": "tok-rita",
}

# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def seed_users(vault: Vault) -> None:
    vault.add_user(User("root", "Root", Role.ADMIN, TOKENS["root"]))
    vault.add_user(User("alice", "Alice", Role.MODELER, TOKENS["alice"]))
    vault.add_user(User("bob", "Bob", Role.MODELER, TOKENS["bob"]))
    vault.add_user(User("rita", "Rita", Role.READER, TOKENS["rita"]))


@pytest.fixture
def vault(tmp_path):
    """Disk-backed vault with an admin, two modelers, and a reader."""
    v = Vault.init(tmp_path / "vault")
    seed_users(v)
    return v


@pytest.fixture
def mem_vault(tmp_path, monkeypatch):
    """Vault with persistence stubbed out, for high-volume pure-logic trials."""
    monkeypatch.setattr(storage, "atomic_write", lambda path, data: None)
    v = Vault.init(tmp_path / "mem")
    seed_users(v)
    return v


# -- model generators ----------------------------------------------------------

_NAME_ALPHABET = string.ascii_letters + string.digits + " &<>'\"_-.,:;!?#*/()"


def _text(rng: random.Random, lo: int = 1, hi: int = 24) -> str:
    n = rng.randint(lo, hi)
    text = "".join(rng.choice(_NAME_ALPHABET) for _ in range(n))
    # XML text nodes keep leading/trailing blanks as written, but a value of
    # only blanks reads back fine too; just avoid the empty string sentinel
    return text or "x"


def make_model(
    model_id: str,
    n_elements: int,
    n_relationships: int,
    rng: random.Random | None = None,
    properties: dict[str, str] | None = None,
) -> ModelDocument:
    """Valid document with the exact requested component counts."""
    rng = rng or random.Random(0)
    doc = ModelDocument(model_id=model_id, name=_text(rng) if rng.random() < 0.8 else "")
    for i in range(n_elements):
        doc.elements.append(
            ModelElement(
                id=f"e{i}",
                kind=rng.choice(["BusinessProcess", "ApplicationComponent", "Node", "DataObject"]),
                name=_text(rng) if rng.random() < 0.9 else "",
                documentation=_text(rng, 0, 60) if rng.random() < 0.3 else None,
            )
        )
    assert n_relationships == 0 or n_elements > 0, "relationships need endpoints"
    for i in range(n_relationships):
        doc.relationships.append(
            ModelRelationship(
                id=f"r{i}",
                kind=rng.choice(["Flow", "Triggering", "Serving", "Assignment"]),
                source=f"e{rng.randrange(n_elements)}",
                target=f"e{rng.randrange(n_elements)}",
                name=_text(rng) if rng.random() < 0.2 else None,
            )
        )
    if properties:
        doc.properties.update(properties)
    elif rng.random() < 0.3:
        for _ in range(rng.randint(1, 3)):
            doc.properties[_text(rng, 1, 8)] = _text(rng, 0, 20)
    return doc


def core(title: str, author: str = "alice", **overrides) -> EntryCore:
    """Entry core with defaults from the stock taxonomy."""
    fields = dict(
        title=title,
        category="domain-neutral",
        kind="building-block",
        layer="business",
        abstract=f"About {title}",
        keywords=set(),
        responsible_authors={author},
    )
    fields.update(overrides)
    return EntryCore(**fields)


def default_config() -> VaultConfig:
    return VaultConfig()
