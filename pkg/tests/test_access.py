"""Authorization matrix (48 cases), token auth, and deny-all double checks."""

import pytest

from modelvault.access import ACTIONS, AccessControl, Role, User, UserStore
from modelvault.errors import (
    AuthorizationError,
    InvalidToken,
    UnknownUser,
    ValidationError,
)
from modelvault.lifecycle import acknowledge_check, transition
from modelvault.records import OptionalInfo

from .conftest import core, make_model

# (action, role, is_responsible_author) -> allowed
def expected_allow(action: str, role: Role, author: bool) -> bool:
    if role is Role.ADMIN:
        return True
    if action in ("read", "feedback"):
        return True
    if action == "create_entry":
        return role is Role.MODELER
    if action in ("modify_entry", "release", "deprecate", "acknowledge"):
        return author
    return False  # admin action


@pytest.fixture
def control():
    users = UserStore(
        [
            User("reader", "R", Role.READER, "t-r"),
            User("modeler", "M", Role.MODELER, "t-m"),
            User("admin", "A", Role.ADMIN, "t-a"),
        ]
    )
    authors = {"owned": {"reader", "modeler", "admin"}}
    return AccessControl(users, lambda entry: authors.get(entry, set()))


def test_full_matrix_48_cases(control):
    cases = 0
    for role, user_id in ((Role.READER, "reader"), (Role.MODELER, "modeler"), (Role.ADMIN, "admin")):
        for author in (True, False):
            subject = "owned" if author else "foreign"
            for action in ACTIONS:
                decision = control.authorize(user_id, action, subject)
                assert decision.allow == expected_allow(action, role, author), (
                    f"{role.value} author={author} {action}"
                )
                cases += 1
    assert cases == 48


def test_decisions_carry_rule_names(control):
    assert control.authorize("admin", "admin").rule == "admin"
    assert control.authorize("reader", "read", "foreign").rule == "any-role"
    assert control.authorize("modeler", "create_entry").rule == "modeler-or-admin"
    assert control.authorize("modeler", "release", "owned").rule == "owner-or-admin"
    assert control.authorize("reader", "admin").rule == "admin-only"


def test_require_raises_with_rule_detail(control):
    with pytest.raises(AuthorizationError) as err:
        control.require("reader", "create_entry")
    assert err.value.detail == {"rule": "modeler-or-admin"}
    assert control.require("modeler", "create_entry").user_id == "modeler"


def test_unknown_action_is_a_programming_error(control):
    with pytest.raises(ValueError):
        control.authorize("admin", "explode")


def test_authenticate_by_token(control):
    assert control.authenticate("t-m").user_id == "modeler"
    with pytest.raises(InvalidToken):
        control.authenticate("t-x")


def test_unknown_user_rejected(control):
    with pytest.raises(UnknownUser):
        control.authorize("ghost", "read")


def test_user_store_uniqueness():
    store = UserStore([User("a", "A", Role.READER, "t-1")])
    with pytest.raises(ValidationError):
        store.add(User("a", "A2", Role.READER, "t-2"))
    with pytest.raises(ValidationError):
        store.add(User("b", "B", Role.READER, "t-1"))


def test_user_store_round_trip():
    store = UserStore(
        [User("b", "B", Role.ADMIN, "t-b"), User("a", "A", Role.READER, "t-a")]
    )
    twin = UserStore.from_dict(store.to_dict())
    assert twin.to_dict() == store.to_dict()
    assert [u.user_id for u in twin.all()] == ["a", "b"]


# -- enforcement through the real operations -----------------------------------------


def test_reader_nonowner_is_blocked_from_every_mutation(vault):
    """The deny-all double: a Reader who owns nothing can only look and comment."""
    master = vault.create_entry(core("Owned", author="alice"), make_model("m", 2, 0), actor="alice")
    transition(vault, master.id, "main", 1, "release", actor="alice")
    vault.get_version(master.id, "main", 1).status.check_required = True

    blocked = [
        lambda: vault.create_entry(core("New", author="rita"), make_model("m", 2, 0), actor="rita"),
        lambda: vault.create_composite(core("New", author="rita"), [], None, actor="rita"),
        lambda: vault.new_version(master.id, "main", None, actor="rita"),
        lambda: vault.new_variant(master.id, "fork", "main", 1, actor="rita"),
        lambda: vault.update_draft(master.id, "main", 1, actor="rita", optional_info=OptionalInfo()),
        lambda: transition(vault, master.id, "main", 1, "release", actor="rita"),
        lambda: transition(vault, master.id, "main", 1, "implement", actor="rita"),
        lambda: transition(vault, master.id, "main", 1, "deprecate", actor="rita"),
        lambda: acknowledge_check(vault, master.id, "main", 1, actor="rita"),
    ]
    for attempt in blocked:
        with pytest.raises(AuthorizationError):
            attempt()
    # nothing moved
    status = vault.get_version(master.id, "main", 1).status
    assert status.state.value == "Released"
    assert status.check_required is True
    assert set(master.variants) == {"main"}


def test_responsible_reader_maintains_own_entry(vault):
    """Responsibility, not role, grants maintenance rights."""
    master = vault.create_entry(core("Hers", author="rita"), make_model("m", 2, 0), actor="alice")
    version = vault.new_version  # rita cannot create entries ...
    with pytest.raises(AuthorizationError):
        vault.create_entry(core("Nope", author="rita"), make_model("m", 2, 0), actor="rita")
    # ... but she releases and deprecates the one she is responsible for
    transition(vault, master.id, "main", 1, "release", actor="rita")
    version = vault.new_version(master.id, "main", None, actor="rita")
    assert version.version_number == 2
    transition(vault, master.id, "main", 2, "deprecate", actor="rita")


def test_admin_bypasses_ownership(vault):
    master = vault.create_entry(core("Bobs", author="bob"), make_model("m", 2, 0), actor="bob")
    transition(vault, master.id, "main", 1, "release", actor="root")
    assert vault.get_version(master.id, "main", 1).status.state.value == "Released"


def test_modeler_cannot_touch_foreign_entry(vault):
    master = vault.create_entry(core("Bobs", author="bob"), make_model("m", 2, 0), actor="bob")
    with pytest.raises(AuthorizationError):
        transition(vault, master.id, "main", 1, "release", actor="alice")
    with pytest.raises(AuthorizationError):
        vault.update_draft(master.id, "main", 1, actor="alice", optional_info=OptionalInfo())
