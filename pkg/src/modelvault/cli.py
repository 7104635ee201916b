"""Line-oriented operator tool for the vault.

Every command prints stable, grep-friendly lines on stdout. Failures
print ``<CODE>: <message>`` on stderr and exit 1; usage errors print a
synopsis and exit 2. Read commands take ``--json`` for structured
output. The vault directory comes from ``--root`` or MODELVAULT_ROOT;
the acting user from ``--as`` or MODELVAULT_USER.
"""

from __future__ import annotations

import argparse
import json
import os
import secrets
import sys
from pathlib import Path

from . import discovery, lifecycle
from .access import Role, User
from .errors import LibraryError, UnknownUser, ValidationError
from .exchange import parse_model, serialize_model
from .metrics import complexity_score, connectivity_score, decomposition_advice
from .records import (
    CompositeRelation,
    EntryCore,
    LifecycleState,
    RelationKind,
    VaultConfig,
)
from .vault import Vault


def _split_keywords(values: list[str]) -> set[str]:
    out: set[str] = set()
    for value in values:
        out.update(part.strip() for part in value.split(",") if part.strip())
    return out


def _parse_relation(text: str) -> CompositeRelation:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise ValidationError(
            f"relation {text!r} must look like Kind:entry:variant:version[:placeholder]"
        )
    try:
        kind = RelationKind(parts[0])
    except ValueError:
        raise ValidationError(
            f"relation kind must be Link or Replace, got {parts[0]!r}"
        ) from None
    try:
        number = int(parts[3])
    except ValueError:
        raise ValidationError(f"relation version must be an integer, got {parts[3]!r}") from None
    return CompositeRelation(
        relation_kind=kind,
        target_entry=parts[1],
        target_variant=parts[2],
        target_version=number,
        placeholder=parts[4] if len(parts) == 5 else None,
    )


def _parse_state(value: str | None) -> LifecycleState | None:
    if value is None:
        return None
    try:
        return LifecycleState(value)
    except ValueError:
        raise ValidationError(
            f"unknown state {value!r}; expected one of {[s.value for s in LifecycleState]}"
        ) from None


def _load_model(path: str | None):
    if path is None:
        return None
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ValidationError(f"cannot read model file {path}: {exc}") from None
    return parse_model(data)


def _ref(args: argparse.Namespace) -> tuple[str, str, int]:
    return args.entry, args.variant, args.version


class _Context:
    """Lazily opened vault plus the acting user id."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self._vault: Vault | None = None

    @property
    def root(self) -> Path:
        root = self.args.root or os.environ.get("MODELVAULT_ROOT")
        if not root:
            raise ValidationError("no vault directory; pass --root or set MODELVAULT_ROOT")
        return Path(root)

    @property
    def vault(self) -> Vault:
        if self._vault is None:
            self._vault = Vault.open(self.root)
        return self._vault

    @property
    def actor(self) -> str:
        actor = self.args.actor or os.environ.get("MODELVAULT_USER")
        if not actor:
            raise UnknownUser("no acting user; pass --as or set MODELVAULT_USER")
        return actor

    def latest(self, entry_id: str, variant_id: str) -> int:
        latest = self.vault.get_variant(entry_id, variant_id).latest()
        assert latest is not None
        return latest.version_number


# -- command handlers ----------------------------------------------------------


def cmd_init(ctx: _Context) -> int:
    args = ctx.args
    config = VaultConfig()
    if args.layer:
        config.layers = list(dict.fromkeys(args.layer))
    if args.category:
        config.categories = list(dict.fromkeys(args.category))
    if args.kind:
        config.kinds = list(dict.fromkeys(args.kind))
    if args.keyword:
        config.keywords = sorted(_split_keywords(args.keyword))
    Vault.init(args.dir, config)
    print(f"initialized vault at {args.dir}")
    return 0


def cmd_user_add(ctx: _Context) -> int:
    args = ctx.args
    vault = ctx.vault
    if vault.users.all():  # first user bootstraps; afterwards admins only
        vault.access.require(ctx.actor, "admin")
    role = Role(args.role.capitalize())
    token = args.token or secrets.token_hex(16)
    vault.add_user(User(user_id=args.id, display_name=args.name or args.id, role=role, token=token))
    print(f"user {args.id} role={role.value} token={token}")
    return 0


def cmd_entry_create(ctx: _Context) -> int:
    args = ctx.args
    core = EntryCore(
        title=args.title,
        category=args.category,
        kind=args.kind,
        layer=args.layer,
        abstract=args.abstract,
        keywords=_split_keywords(args.keywords or []),
        responsible_authors=set(args.author or [ctx.actor]),
    )
    model = _load_model(args.model)
    if args.composite or args.relation:
        relations = [_parse_relation(r) for r in args.relation or []]
        master = ctx.vault.create_composite(core, relations, model, actor=ctx.actor)
    else:
        if model is None:
            raise ValidationError("a --model file is required for a regular entry")
        master = ctx.vault.create_entry(core, model, actor=ctx.actor)
    print(f"entry {master.id} variant=main version=1 state=Draft")
    return 0


def cmd_entry_version(ctx: _Context) -> int:
    args = ctx.args
    version = ctx.vault.new_version(
        args.entry, args.variant, _load_model(args.model), actor=ctx.actor
    )
    print(f"version {args.entry}/{args.variant}/{version.version_number} state=Draft")
    return 0


def cmd_entry_variant(ctx: _Context) -> int:
    args = ctx.args
    variant = ctx.vault.new_variant(
        args.entry,
        name=args.name,
        from_variant=args.from_variant,
        from_version=args.from_version,
        actor=ctx.actor,
    )
    print(f"variant {args.entry}/{variant.variant_id}/1 state=Draft")
    return 0


def _cmd_transition(ctx: _Context, action: str) -> int:
    args = ctx.args
    number = args.version or ctx.latest(args.entry, args.variant)
    status = lifecycle.transition(ctx.vault, args.entry, args.variant, number, action, ctx.actor)
    print(f"{args.entry}/{args.variant}/{number} state={status.state.value}")
    return 0


def cmd_entry_resolve(ctx: _Context) -> int:
    args = ctx.args
    number = args.version or ctx.latest(args.entry, args.variant)
    resolved = ctx.vault.resolve_composite(args.entry, args.variant, number)
    sys.stdout.buffer.write(serialize_model(resolved))
    return 0


def cmd_entry_show(ctx: _Context) -> int:
    args = ctx.args
    master = ctx.vault.get_entry(args.entry)
    if args.json:
        payload = master.to_dict()
        payload["variants"] = {
            name: [v.to_dict() for v in variant.versions]
            for name, variant in master.variants.items()
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    print(
        f"entry {master.id} title={master.title!r} category={master.category} "
        f"kind={master.kind} layer={master.layer} composite={str(master.is_composite).lower()}"
    )
    for name in sorted(master.variants):
        for version in master.variants[name].versions:
            status = version.status
            line = (
                f"{master.id}/{name}/{version.version_number} state={status.state.value} "
                f"check_required={str(status.check_required).lower()}"
            )
            if version.complexity is not None:
                line += f" complexity={version.complexity.rating.value}"
            if version.connectivity is not None:
                line += f" connectivity={version.connectivity.rating.value}"
            print(line)
    return 0


def _metrics_line(model) -> tuple[str, dict]:
    complexity = complexity_score(model)
    connectivity = connectivity_score(model) if model.elements else None
    advice = decomposition_advice(complexity, connectivity)
    degree = connectivity.display() if connectivity else "-"
    rating = connectivity.rating.value if connectivity else "-"
    verdict = "subdivide" if advice.subdivide else "none"
    line = (
        f"count={complexity.component_count} complexity={complexity.rating.value} "
        f"mean_degree={degree} connectivity={rating} advice={verdict}"
    )
    payload = {
        "count": complexity.component_count,
        "complexity": complexity.rating.value,
        "mean_degree": None if connectivity is None else degree,
        "connectivity": None if connectivity is None else rating,
        "advice": {"subdivide": advice.subdivide, "reason": advice.reason},
    }
    return line, payload


def cmd_metrics(ctx: _Context) -> int:
    args = ctx.args
    results = []
    for path in args.files:
        model = _load_model(path)
        line, payload = _metrics_line(model)
        payload["file"] = path
        results.append((path, line, payload))
    if args.json:
        print(json.dumps([p for _, _, p in results], indent=2, sort_keys=True))
    else:
        for _, line, _ in results:
            print(line)
    return 0


def cmd_search(ctx: _Context) -> int:
    args = ctx.args
    query = discovery.SearchQuery(
        terms=list(args.terms),
        category=args.category,
        layer=args.layer,
        state=_parse_state(args.state),
        keywords=_split_keywords(args.keyword or []),
    )
    hits = discovery.search(ctx.vault, query)
    if args.json:
        items = [
            {"entry": ctx.vault.entries[eid].to_dict(), "score": score} for eid, score in hits
        ]
        print(json.dumps(items, indent=2, sort_keys=True))
        return 0
    for entry_id, score in hits:
        print(f"{score} {entry_id} {ctx.vault.entries[entry_id].title}")
    return 0


def cmd_grid(ctx: _Context) -> int:
    grid = discovery.overview_grid(ctx.vault)
    if ctx.args.json:
        print(json.dumps(grid.to_dict(), indent=2, sort_keys=True))
        return 0
    for layer in grid.rows:
        for category in grid.columns:
            print(f"{layer} {category} {grid.cell(layer, category)}")
    return 0


def cmd_inbox(ctx: _Context) -> int:
    items = lifecycle.list_notifications(ctx.vault, ctx.actor)
    if ctx.args.json:
        print(json.dumps([n.to_dict() for n in items], indent=2, sort_keys=True))
        return 0
    for n in items:
        tag = "done" if n.acknowledged else "pending"
        target = f"{n.target.entry_id}/{n.target.variant_id}/{n.target.version_number}"
        cause = f"{n.cause.entry_id}/{n.cause.variant_id}/{n.cause.version_number}"
        print(f"{tag} {target} cause={cause} at={n.at.isoformat()}")
    return 0


def cmd_ack(ctx: _Context) -> int:
    args = ctx.args
    number = args.version or ctx.latest(args.entry, args.variant)
    lifecycle.acknowledge_check(ctx.vault, args.entry, args.variant, number, actor=ctx.actor)
    print(f"acknowledged {args.entry}/{args.variant}/{number}")
    return 0


def cmd_feedback(ctx: _Context) -> int:
    args = ctx.args
    number = args.version or ctx.latest(args.entry, args.variant)
    comment = lifecycle.add_feedback(
        ctx.vault, args.entry, args.variant, number, text=args.text, actor=ctx.actor
    )
    print(f"feedback {args.entry}/{args.variant}/{number} author={comment.author}")
    return 0


def cmd_serve(ctx: _Context) -> int:
    import uvicorn

    from .api import create_app

    args = ctx.args
    app = create_app(
        ctx.vault,
        allow_origins=args.cors or None,
        static_dir=args.static,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


# -- parser --------------------------------------------------------------------


def _add_ref_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("entry", help="entry id")
    parser.add_argument("--variant", default="main")
    parser.add_argument("--version", type=int, default=None, help="defaults to the latest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modelvault",
        description="Versioned library of architecture models: store, score, release, search.",
    )
    parser.add_argument("--root", default=None, help="vault directory (or MODELVAULT_ROOT)")
    parser.add_argument(
        "--as", dest="actor", default=None, help="acting user id (or MODELVAULT_USER)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create an empty vault")
    p.add_argument("dir")
    p.add_argument("--layer", action="append", help="repeat to override the layer rows")
    p.add_argument("--category", action="append", help="repeat to override the category columns")
    p.add_argument("--kind", action="append", help="repeat to override the entry kinds")
    p.add_argument("--keyword", action="append", help="repeat to seed the controlled keywords")
    p.set_defaults(func=cmd_init)

    p_user = sub.add_parser("user", help="manage users")
    user_sub = p_user.add_subparsers(dest="user_command", required=True)
    p = user_sub.add_parser("add", help="add a user (first one needs no actor)")
    p.add_argument("--id", required=True)
    p.add_argument("--name", default=None)
    p.add_argument("--role", required=True, choices=["reader", "modeler", "admin"])
    p.add_argument("--token", default=None, help="generated when omitted")
    p.set_defaults(func=cmd_user_add)

    p_entry = sub.add_parser("entry", help="create and manage entries")
    entry_sub = p_entry.add_subparsers(dest="entry_command", required=True)

    p = entry_sub.add_parser("create", help="create an entry (regular or composite)")
    p.add_argument("--title", required=True)
    p.add_argument("--category", required=True)
    p.add_argument("--kind", default="building-block")
    p.add_argument("--layer", required=True)
    p.add_argument("--abstract", default="")
    p.add_argument("--keywords", action="append", help="comma-separated, repeatable")
    p.add_argument("--author", action="append", help="defaults to the acting user")
    p.add_argument("--model", default=None, help="exchange XML file")
    p.add_argument("--composite", action="store_true")
    p.add_argument(
        "--relation",
        action="append",
        help="Kind:entry:variant:version[:placeholder]; implies --composite",
    )
    p.set_defaults(func=cmd_entry_create)

    p = entry_sub.add_parser("version", help="open the next draft of a variant")
    p.add_argument("entry")
    p.add_argument("--variant", default="main")
    p.add_argument("--model", default=None, help="replacement exchange XML file")
    p.set_defaults(func=cmd_entry_version)

    p = entry_sub.add_parser("variant", help="branch a variant from a released version")
    p.add_argument("entry")
    p.add_argument("--name", required=True)
    p.add_argument("--from-variant", default="main")
    p.add_argument("--from-version", type=int, required=True)
    p.set_defaults(func=cmd_entry_variant)

    for action in lifecycle.ACTIONS:
        p = entry_sub.add_parser(action, help=f"{action} a version")
        _add_ref_arguments(p)
        p.set_defaults(func=lambda ctx, action=action: _cmd_transition(ctx, action))

    p = entry_sub.add_parser("resolve", help="print the flattened model of a composite")
    _add_ref_arguments(p)
    p.set_defaults(func=cmd_entry_resolve)

    p = entry_sub.add_parser("show", help="print an entry's metadata and versions")
    p.add_argument("entry")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_entry_show)

    p = sub.add_parser("metrics", help="score exchange XML files")
    p.add_argument("files", nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("search", help="rank entries by term relevance")
    p.add_argument("terms", nargs="*")
    p.add_argument("--category", default=None)
    p.add_argument("--layer", default=None)
    p.add_argument("--state", default=None)
    p.add_argument("--keyword", action="append")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("grid", help="layer-by-category coverage counts")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("inbox", help="list the acting user's change notifications")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_inbox)

    p = sub.add_parser("ack", help="acknowledge a version's pending change check")
    _add_ref_arguments(p)
    p.set_defaults(func=cmd_ack)

    p = sub.add_parser("feedback", help="comment on a version")
    _add_ref_arguments(p)
    p.add_argument("--text", required=True)
    p.set_defaults(func=cmd_feedback)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", default=None, help="directory of web UI files to mount at /")
    p.add_argument("--cors", action="append", help="allowed origin, repeatable")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    ctx = _Context(args)
    try:
        return args.func(ctx)
    except LibraryError as exc:
        print(f"{exc.code}: {exc.message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
