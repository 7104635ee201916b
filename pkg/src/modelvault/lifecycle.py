"""Release lifecycle: state transitions, cascading checks, feedback, inbox.

Versions move through four states::

    Draft --release--> Released --implement--> InUse
      \\                  |                      |
       \\--deprecate------+------deprecate------/---> Invalid (terminal)

Releasing a version fires a cascade: every released or in-use version whose
composite relations or brick references point at the changed entry (in any
pinned variant/version) is flagged for a manual compatibility check, closed
transitively over the reverse dependency graph, and each responsible author
of an affected entry is notified. The cascade runs synchronously inside the
releasing operation, so observers never see a released version with
unflagged dependents.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from .errors import IllegalTransition, NotFound, NothingToAcknowledge, ValidationError
from .records import (
    FeedbackComment,
    LifecycleState,
    LifecycleStatus,
    Notification,
    VersionRef,
    now,
)

if TYPE_CHECKING:
    from .vault import Vault

ACTIONS = ("release", "implement", "deprecate")

TRANSITIONS: dict[tuple[LifecycleState, str], LifecycleState] = {
    (LifecycleState.DRAFT, "release"): LifecycleState.RELEASED,
    (LifecycleState.RELEASED, "implement"): LifecycleState.IN_USE,
    (LifecycleState.DRAFT, "deprecate"): LifecycleState.INVALID,
    (LifecycleState.RELEASED, "deprecate"): LifecycleState.INVALID,
    (LifecycleState.IN_USE, "deprecate"): LifecycleState.INVALID,
}

# implement is plain maintenance; release/deprecate have their own matrix rows
_ACTION_PERMISSION = {"release": "release", "implement": "modify_entry", "deprecate": "deprecate"}


def transition(
    vault: "Vault",
    entry_id: str,
    variant_id: str,
    version_number: int,
    action: str,
    actor: str,
) -> LifecycleStatus:
    """Apply a lifecycle action; releasing also runs the dependency cascade."""
    if action not in ACTIONS:
        raise ValidationError(f"unknown lifecycle action {action!r}; expected one of {ACTIONS}")
    with vault.lock:
        vault.access.require(actor, _ACTION_PERMISSION[action], entry_id)
        version = vault.get_version(entry_id, variant_id, version_number)
        current = version.status.state
        new_state = TRANSITIONS.get((current, action))
        if new_state is None:
            raise IllegalTransition(
                f"cannot {action} a {current.value} version "
                f"({entry_id}/{variant_id}/{version_number})",
                detail={"state": current.value, "action": action},
            )
        version.status.state = new_state
        version.status.changed_at = now()
        if new_state is LifecycleState.INVALID:
            version.status.check_required = False
            version.status.check_reason = None
        vault._persist_version(entry_id, variant_id, version)
        if action == "release":
            propagate_check(vault, VersionRef(entry_id, variant_id, version_number))
        return version.status


def dependencies_of(version) -> set[str]:
    """Entry ids a version points at via composite relations or bricks."""
    deps = {rel.target_entry for rel in version.relations}
    deps.update(version.optional_info.bricks)
    return deps


def propagate_check(vault: "Vault", changed: VersionRef) -> list[VersionRef]:
    """Flag all transitive dependents of the just-released *changed* version.

    Walks the reverse dependency graph breadth-first over entries. Only
    released or in-use versions are flagged; each at most once per
    propagation. Returns the affected refs sorted by entry id.
    """
    with vault.lock:
        stamp = now()
        affected: list[VersionRef] = []
        visited: set[VersionRef] = {changed}
        frontier: set[str] = {changed.entry_id}
        while frontier:
            next_frontier: set[str] = set()
            for entry_id in sorted(vault.entries):
                master = vault.entries[entry_id]
                for variant_id, version in master.all_versions():
                    ref = VersionRef(master.id, variant_id, version.version_number)
                    if ref in visited:
                        continue
                    if version.status.state not in (
                        LifecycleState.RELEASED,
                        LifecycleState.IN_USE,
                    ):
                        continue
                    if not (dependencies_of(version) & frontier):
                        continue
                    visited.add(ref)
                    affected.append(ref)
                    version.status.check_required = True
                    version.status.check_reason = changed
                    vault._persist_version(master.id, variant_id, version)
                    for author in sorted(master.responsible_authors):
                        vault.notifications.append(
                            Notification(recipient=author, target=ref, cause=changed, at=stamp)
                        )
                    next_frontier.add(master.id)
            frontier = next_frontier
        if affected:
            vault._persist_notifications()
        return sorted(affected)


def acknowledge_check(
    vault: "Vault", entry_id: str, variant_id: str, version_number: int, actor: str
) -> LifecycleStatus:
    """Clear a version's check flag and acknowledge its notifications."""
    with vault.lock:
        vault.access.require(actor, "acknowledge", entry_id)
        version = vault.get_version(entry_id, variant_id, version_number)
        if not version.status.check_required:
            raise NothingToAcknowledge(
                f"{entry_id}/{variant_id}/{version_number} has no pending check"
            )
        version.status.check_required = False
        version.status.check_reason = None
        vault._persist_version(entry_id, variant_id, version)
        ref = VersionRef(entry_id, variant_id, version_number)
        touched = False
        for notification in vault.notifications:
            if notification.target == ref and not notification.acknowledged:
                notification.acknowledged = True
                touched = True
        if touched:
            vault._persist_notifications()
        return version.status


def allowed_actions(
    vault: "Vault", entry_id: str, variant_id: str, version_number: int, actor: str
) -> dict[str, bool]:
    """Dry-run the controls *actor* may use on a version right now.

    Mirrors the exact checks of transition, update_draft, acknowledge_check
    and add_feedback without mutating anything, so user interfaces can render
    buttons from this map instead of re-implementing the rules.
    """
    with vault.lock:
        version = vault.get_version(entry_id, variant_id, version_number)
        state = version.status.state

        def permitted(action: str) -> bool:
            return vault.access.authorize(actor, action, entry_id).allow

        actions = {
            action: (state, action) in TRANSITIONS and permitted(_ACTION_PERMISSION[action])
            for action in ACTIONS
        }
        actions["edit"] = state is LifecycleState.DRAFT and permitted("modify_entry")
        actions["acknowledge"] = version.status.check_required and permitted("acknowledge")
        actions["feedback"] = permitted("feedback")
        return actions


def add_feedback(
    vault: "Vault", entry_id: str, variant_id: str, version_number: int, text: str, actor: str
) -> FeedbackComment:
    """Append a comment to a version; allowed in every state, any role."""
    with vault.lock:
        vault.access.require(actor, "feedback", entry_id)
        if not text.strip():
            raise ValidationError("feedback text must be non-empty")
        version = vault.get_version(entry_id, variant_id, version_number)
        comment = FeedbackComment(author=actor, at=now(), text=text)
        version.feedback.append(comment)
        vault._persist_version(entry_id, variant_id, version)
        return comment


def list_notifications(vault: "Vault", recipient: str) -> list[Notification]:
    """A user's inbox: unacknowledged first, newest first within each group."""
    mine = [n for n in vault.notifications if n.recipient == recipient]
    pending = [n for n in reversed(mine) if not n.acknowledged]
    done = [n for n in reversed(mine) if n.acknowledged]
    return pending + done
