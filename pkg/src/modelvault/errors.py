"""Exception hierarchy with stable machine codes.

Every error carries a ``code`` from a closed set so the API and CLI can
map failures onto one documented contract:

    VALIDATION, AUTH, NOT_FOUND, ILLEGAL_TRANSITION, CYCLE, CONFLICT, STORAGE
"""

from __future__ import annotations

from typing import Any

VALIDATION = "VALIDATION"
AUTH = "AUTH"
NOT_FOUND = "NOT_FOUND"
ILLEGAL_TRANSITION = "ILLEGAL_TRANSITION"
CYCLE = "CYCLE"
CONFLICT = "CONFLICT"
STORAGE = "STORAGE"

ERROR_CODES = frozenset(
    {VALIDATION, AUTH, NOT_FOUND, ILLEGAL_TRANSITION, CYCLE, CONFLICT, STORAGE}
)


class LibraryError(Exception):
    """Base class for all library failures."""

    code = VALIDATION

    def __init__(self, message: str, *, detail: Any = None):
        super().__init__(message)
        self.message = message
        self.detail = detail


# -- model exchange ----------------------------------------------------------


class MalformedXml(LibraryError):
    """Input is not parseable XML (or uses a rejected encoding)."""

    code = VALIDATION


class SchemaViolation(LibraryError):
    """Parseable XML that breaks the exchange subset rules."""

    code = VALIDATION


class InvariantViolation(LibraryError):
    """A document handed to the serializer fails its structural invariants."""

    code = VALIDATION


# -- metrics -----------------------------------------------------------------


class EmptyModel(LibraryError):
    """Connectivity is undefined for a model without elements."""

    code = VALIDATION


# -- vault -------------------------------------------------------------------


class ValidationError(LibraryError):
    code = VALIDATION


class NotFound(LibraryError):
    code = NOT_FOUND


class DraftExists(LibraryError):
    """The variant already has an open draft; drafts are edited in place."""

    code = CONFLICT


class DuplicateVariant(LibraryError):
    code = CONFLICT


class OriginNotReleased(LibraryError):
    """Variants may only branch from released or in-use versions."""

    code = CONFLICT


class ImmutableVersion(LibraryError):
    """Model and relations are frozen once a version leaves draft."""

    code = CONFLICT


class CyclicComposition(LibraryError):
    code = CYCLE


class UnresolvedRelation(LibraryError):
    """A composite relation does not pin an existing entry/variant/version."""

    code = VALIDATION


class MissingPlaceholder(LibraryError):
    """A replace relation names no placeholder, or one absent from the shell."""

    code = VALIDATION


class StorageError(LibraryError):
    code = STORAGE


# -- lifecycle ---------------------------------------------------------------


class IllegalTransition(LibraryError):
    code = ILLEGAL_TRANSITION


class NothingToAcknowledge(LibraryError):
    code = CONFLICT


# -- access ------------------------------------------------------------------


class AuthorizationError(LibraryError):
    code = AUTH


class UnknownUser(LibraryError):
    code = AUTH


class InvalidToken(LibraryError):
    code = AUTH


# -- discovery ---------------------------------------------------------------


class EmptyQuery(LibraryError):
    code = VALIDATION
