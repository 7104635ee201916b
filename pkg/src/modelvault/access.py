"""Role-based access control: users, bearer tokens, and the permission matrix.

Three coarse roles (Reader, Modeler, Admin) plus per-entry responsibility:
the responsible authors of an entry may modify, release, deprecate, and
acknowledge it regardless of their role. Admins may do anything.

    action        | Reader | Modeler | Admin | responsible author
    --------------+--------+---------+-------+-------------------
    read          |  yes   |  yes    |  yes  |  yes
    feedback      |  yes   |  yes    |  yes  |  yes
    create_entry  |  no    |  yes    |  yes  |  (n/a)
    modify_entry  |  no    |  no     |  yes  |  yes
    release       |  no    |  no     |  yes  |  yes
    deprecate     |  no    |  no     |  yes  |  yes
    acknowledge   |  no    |  no     |  yes  |  yes
    admin         |  no    |  no     |  yes  |  no
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Iterable

from .errors import AuthorizationError, InvalidToken, UnknownUser, ValidationError


class Role(str, Enum):
    READER = "Reader"
    MODELER = "Modeler"
    ADMIN = "Admin"


ACTIONS = (
    "read",
    "create_entry",
    "modify_entry",
    "release",
    "deprecate",
    "acknowledge",
    "feedback",
    "admin",
)

_OPEN_ACTIONS = frozenset({"read", "feedback"})
_ENTRY_ACTIONS = frozenset({"modify_entry", "release", "deprecate", "acknowledge"})


@dataclass
class User:
    user_id: str
    display_name: str
    role: Role
    token: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "user_id": self.user_id,
            "display_name": self.display_name,
            "role": self.role.value,
            "token": self.token,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> User:
        return cls(
            user_id=data["user_id"],
            display_name=data.get("display_name", data["user_id"]),
            role=Role(data["role"]),
            token=data["token"],
        )


@dataclass(frozen=True)
class Decision:
    allow: bool
    rule: str
    reason: str


class UserStore:
    """In-memory user registry backed by the vault's ``users`` file."""

    def __init__(self, users: Iterable[User] = ()):
        self._by_id: dict[str, User] = {}
        self._by_token: dict[str, User] = {}
        for user in users:
            self.add(user)

    def add(self, user: User) -> None:
        if user.user_id in self._by_id:
            raise ValidationError(f"user id {user.user_id!r} already exists")
        if user.token in self._by_token:
            raise ValidationError(f"token already assigned to another user")
        self._by_id[user.user_id] = user
        self._by_token[user.token] = user

    def get(self, user_id: str) -> User:
        user = self._by_id.get(user_id)
        if user is None:
            raise UnknownUser(f"no such user {user_id!r}")
        return user

    def by_token(self, token: str) -> User:
        user = self._by_token.get(token)
        if user is None:
            raise InvalidToken("token does not identify any user")
        return user

    def __contains__(self, user_id: str) -> bool:
        return user_id in self._by_id

    def all(self) -> list[User]:
        return [self._by_id[uid] for uid in sorted(self._by_id)]

    def to_dict(self) -> dict[str, Any]:
        return {"users": [u.to_dict() for u in self.all()]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> UserStore:
        return cls(User.from_dict(u) for u in data.get("users", []))


class AccessControl:
    """Permission decisions over a user store and an entry-authors resolver.

    ``authors_of`` maps an entry id to its responsible author set; the vault
    supplies it so decisions always reflect current vault state.
    """

    def __init__(self, users: UserStore, authors_of: Callable[[str], set[str]]):
        self.users = users
        self._authors_of = authors_of

    def authenticate(self, token: str) -> User:
        return self.users.by_token(token)

    def authorize(self, user_id: str, action: str, subject: str | None = None) -> Decision:
        if action not in ACTIONS:
            raise ValueError(f"unknown action {action!r}")
        user = self.users.get(user_id)
        if user.role is Role.ADMIN:
            return Decision(True, "admin", "admins may perform any action")
        if action in _OPEN_ACTIONS:
            return Decision(True, "any-role", f"{action} is open to all roles")
        if action == "create_entry":
            if user.role is Role.MODELER:
                return Decision(True, "modeler-or-admin", "modelers may create entries")
            return Decision(
                False, "modeler-or-admin", f"role {user.role.value} may not create entries"
            )
        if action in _ENTRY_ACTIONS:
            authors = self._authors_of(subject) if subject else set()
            if user.user_id in authors:
                return Decision(
                    True, "owner-or-admin", "responsible authors maintain their entries"
                )
            return Decision(
                False,
                "owner-or-admin",
                f"{user.user_id!r} is not a responsible author of {subject!r}",
            )
        # action == "admin"
        return Decision(False, "admin-only", f"role {user.role.value} lacks admin rights")

    def require(self, user_id: str, action: str, subject: str | None = None) -> User:
        """Authorize or raise; returns the resolved user on success."""
        decision = self.authorize(user_id, action, subject)
        if not decision.allow:
            raise AuthorizationError(
                f"{action} denied by rule {decision.rule}: {decision.reason}",
                detail={"rule": decision.rule},
            )
        return self.users.get(user_id)
