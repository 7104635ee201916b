"""Catalog discovery: token index, faceted search, and the landscape grid.

Tokenization is Unicode-aware lowercase word splitting with no stemming and
no stop-words. Ranking counts distinct matched query terms, with matches in
the keyword field weighted double; ties break on the most recent lifecycle
change, then ascending entry id. The index is derived data only: it can be
rebuilt from the vault at any time and is persisted merely as a cache.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from .errors import EmptyQuery
from .records import EntryMaster, LifecycleState

if TYPE_CHECKING:
    from .vault import Vault

_WORD_RE = re.compile(r"\w+", re.UNICODE)


def tokenize(text: str) -> set[str]:
    return {match.group(0).lower() for match in _WORD_RE.finditer(text)}


@dataclass
class SearchQuery:
    """Free terms plus exact-match facets; at least one of either is required."""

    terms: list[str] = field(default_factory=list)
    category: str | None = None
    layer: str | None = None
    state: LifecycleState | None = None
    keywords: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.terms = [t.lower() for t in self.terms if t.strip()]
        if not self.terms and not (
            self.category or self.layer or self.state or self.keywords
        ):
            raise EmptyQuery("query needs at least one term or one filter")


@dataclass
class GridView:
    """Layer x category matrix counting entries with a live (non-invalid) version."""

    rows: list[str]
    columns: list[str]
    cells: dict[tuple[str, str], int]

    def cell(self, layer: str, category: str) -> int:
        return self.cells.get((layer, category), 0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "rows": list(self.rows),
            "columns": list(self.columns),
            "cells": [[self.cell(layer, cat) for cat in self.columns] for layer in self.rows],
        }


class SearchIndex:
    """Inverted index over entry titles, abstracts, and keywords."""

    def __init__(self) -> None:
        self._text: dict[str, set[str]] = {}
        self._keyword: dict[str, set[str]] = {}
        self._entry_tokens: dict[str, tuple[set[str], set[str]]] = {}

    def index_entry(self, master: EntryMaster) -> None:
        """(Re-)index one entry, replacing any prior postings for it."""
        self.remove_entry(master.id)
        text_tokens = tokenize(master.title) | tokenize(master.abstract)
        keyword_tokens: set[str] = set()
        for keyword in master.keywords:
            keyword_tokens |= tokenize(keyword)
        for token in text_tokens:
            self._text.setdefault(token, set()).add(master.id)
        for token in keyword_tokens:
            self._keyword.setdefault(token, set()).add(master.id)
        self._entry_tokens[master.id] = (text_tokens, keyword_tokens)

    def remove_entry(self, entry_id: str) -> None:
        tokens = self._entry_tokens.pop(entry_id, None)
        if tokens is None:
            return
        text_tokens, keyword_tokens = tokens
        for token in text_tokens:
            postings = self._text.get(token)
            if postings:
                postings.discard(entry_id)
                if not postings:
                    del self._text[token]
        for token in keyword_tokens:
            postings = self._keyword.get(token)
            if postings:
                postings.discard(entry_id)
                if not postings:
                    del self._keyword[token]

    def candidates(self, terms: list[str]) -> set[str]:
        found: set[str] = set()
        for term in terms:
            found |= self._text.get(term, set())
            found |= self._keyword.get(term, set())
        return found

    def term_score(self, entry_id: str, terms: list[str]) -> int:
        """Distinct matched terms; a keyword-field match counts double."""
        text_tokens, keyword_tokens = self._entry_tokens.get(entry_id, (set(), set()))
        score = 0
        for term in set(terms):
            if term in keyword_tokens:
                score += 2
            elif term in text_tokens:
                score += 1
        return score

    def to_dict(self) -> dict[str, Any]:
        return {
            "entries": {
                entry_id: {"text": sorted(text), "keyword": sorted(keyword)}
                for entry_id, (text, keyword) in sorted(self._entry_tokens.items())
            }
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SearchIndex":
        index = cls()
        for entry_id, tokens in data.get("entries", {}).items():
            text_tokens = set(tokens.get("text", []))
            keyword_tokens = set(tokens.get("keyword", []))
            for token in text_tokens:
                index._text.setdefault(token, set()).add(entry_id)
            for token in keyword_tokens:
                index._keyword.setdefault(token, set()).add(entry_id)
            index._entry_tokens[entry_id] = (text_tokens, keyword_tokens)
        return index


def _last_change(master: EntryMaster):
    return max(version.status.changed_at for _, version in master.all_versions())


def _states_of(master: EntryMaster) -> set[LifecycleState]:
    return {version.status.state for _, version in master.all_versions()}


def search(vault: "Vault", query: SearchQuery) -> list[tuple[str, int]]:
    """Ranked ``(entry_id, score)`` pairs for *query* over the vault."""
    if query.terms:
        candidate_ids = vault.index.candidates(query.terms)
    else:
        candidate_ids = set(vault.entries)

    hits: list[tuple[str, int]] = []
    for entry_id in candidate_ids:
        master = vault.entries.get(entry_id)
        if master is None:
            continue
        states = _states_of(master)
        if query.state is not LifecycleState.INVALID and states == {LifecycleState.INVALID}:
            continue
        if query.category is not None and master.category != query.category:
            continue
        if query.layer is not None and master.layer != query.layer:
            continue
        if query.state is not None and query.state not in states:
            continue
        if query.keywords and not set(query.keywords) <= master.keywords:
            continue
        score = vault.index.term_score(entry_id, query.terms)
        if query.terms and score == 0:
            continue
        hits.append((entry_id, score))

    def rank(hit: tuple[str, int]):
        entry_id, score = hit
        return (-score, -_last_change(vault.entries[entry_id]).timestamp(), entry_id)

    hits.sort(key=rank)
    return hits


def overview_grid(vault: "Vault") -> GridView:
    """Count entries with at least one non-invalid version per (layer, category)."""
    cells = {
        (layer, category): 0
        for layer in vault.config.layers
        for category in vault.config.categories
    }
    for master in vault.entries.values():
        if all(
            version.status.state is LifecycleState.INVALID
            for _, version in master.all_versions()
        ):
            continue
        key = (master.layer, master.category)
        if key in cells:
            cells[key] += 1
    return GridView(
        rows=list(vault.config.layers), columns=list(vault.config.categories), cells=cells
    )
