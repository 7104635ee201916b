/** Pure view-model builders: API payloads in, render-ready structures out.
 *
 * Every number and flag here is copied from the service's answer. In
 * particular the lifecycle buttons take their enabled state verbatim from
 * the per-user actions dry run; no rule lives in the client.
 */

import type {
  ActionsPayload,
  EntryDetailPayload,
  GridPayload,
  NotificationPayload,
  SearchResultPayload,
  VersionPayload,
  VersionRefPayload,
} from "./api.js";
import { SEARCH_PAGE_SIZE, formatRoute, searchRoute, type SearchParams } from "./router.js";

// -- landscape grid -----------------------------------------------------------

export interface GridCell {
  layer: string;
  category: string;
  count: number;
  empty: boolean;
  searchHash: string;
}

export interface GridRow {
  layer: string;
  cells: GridCell[];
}

export interface GridVM {
  columns: string[];
  rows: GridRow[];
}

export function gridView(grid: GridPayload): GridVM {
  const rows = grid.rows.map((layer, rowIndex) => ({
    layer,
    cells: grid.columns.map((category, columnIndex) => {
      const count = grid.cells[rowIndex][columnIndex];
      return {
        layer,
        category,
        count,
        empty: count === 0,
        searchHash: formatRoute(searchRoute({ layer, category })),
      };
    }),
  }));
  return { columns: [...grid.columns], rows };
}

// -- search -------------------------------------------------------------------

export interface SearchItem {
  id: string;
  title: string;
  snippet: string;
  score: number;
  category: string;
  layer: string;
  kind: string;
  keywords: string[];
  detailHash: string;
}

export interface SearchPage {
  offset: number;
  shown: number;
  total: number;
  prevHash: string | null;
  nextHash: string | null;
}

export interface SearchVM {
  total: number;
  items: SearchItem[];
  page: SearchPage;
}

export function snippet(text: string, max = 160): string {
  const flat = text.replace(/\s+/g, " ").trim();
  if (flat.length <= max) return flat;
  return `${flat.slice(0, max - 1).trimEnd()}…`;
}

export function searchView(payload: SearchResultPayload, params: SearchParams): SearchVM {
  const items = payload.items.map(({ entry, score }) => ({
    id: entry.id,
    title: entry.title,
    snippet: snippet(entry.abstract),
    score,
    category: entry.category,
    layer: entry.layer,
    kind: entry.kind,
    keywords: [...entry.keywords],
    detailHash: formatRoute({ view: "entry", entry: entry.id, variant: null, version: null }),
  }));
  const prevHash =
    params.offset > 0
      ? formatRoute(
          searchRoute({ ...params, offset: Math.max(0, params.offset - SEARCH_PAGE_SIZE) }),
        )
      : null;
  const nextHash =
    params.offset + items.length < payload.total
      ? formatRoute(searchRoute({ ...params, offset: params.offset + SEARCH_PAGE_SIZE }))
      : null;
  return {
    total: payload.total,
    items,
    page: { offset: params.offset, shown: items.length, total: payload.total, prevHash, nextHash },
  };
}

// -- entry detail -------------------------------------------------------------

export interface ActionButton {
  action: "release" | "implement" | "deprecate";
  label: string;
  enabled: boolean;
}

const ACTION_LABELS = [
  ["release", "Release"],
  ["implement", "Implement"],
  ["deprecate", "Deprecate"],
] as const;

export function actionButtons(actions: ActionsPayload): ActionButton[] {
  return ACTION_LABELS.map(([action, label]) => ({
    action,
    label,
    enabled: actions[action] === true,
  }));
}

export interface Badge {
  label: string;
  value: string;
}

export function metricBadges(version: VersionPayload): Badge[] {
  const badges: Badge[] = [];
  if (version.complexity) {
    badges.push({
      label: "complexity",
      value: `${version.complexity.rating} (${version.complexity.component_count})`,
    });
  }
  if (version.connectivity) {
    badges.push({
      label: "connectivity",
      value: `${version.connectivity.rating} (${version.connectivity.mean_degree_display})`,
    });
  }
  return badges;
}

export interface VersionNode {
  variant: string;
  number: number;
  state: string;
  checkRequired: boolean;
  predecessor: string | null;
  createdAt: string;
  hash: string;
  selected: boolean;
}

export interface VariantGroup {
  variant: string;
  origin: string | null;
  versions: VersionNode[];
}

export function versionTree(
  entry: EntryDetailPayload,
  selected: { variant: string; version: number },
): VariantGroup[] {
  return entry.variants.map((variant) => ({
    variant: variant.variant_id,
    origin: variant.origin ? `branched from ${variant.origin[0]}/${variant.origin[1]}` : null,
    versions: variant.versions.map((version) => ({
      variant: variant.variant_id,
      number: version.version_number,
      state: version.status.state,
      checkRequired: version.status.check_required,
      predecessor:
        version.predecessor === null
          ? null
          : `succeeds ${variant.variant_id}/${version.predecessor}`,
      createdAt: version.created_at,
      hash: formatRoute({
        view: "entry",
        entry: entry.id,
        variant: variant.variant_id,
        version: version.version_number,
      }),
      selected:
        variant.variant_id === selected.variant && version.version_number === selected.version,
    })),
  }));
}

/** The version shown when the route names none: latest of main, else of the
 * first variant. Every stored variant carries at least one version. */
export function defaultSelection(entry: EntryDetailPayload): { variant: string; version: number } {
  const main = entry.variants.find((variant) => variant.variant_id === "main") ?? entry.variants[0];
  const last = main.versions[main.versions.length - 1];
  return { variant: main.variant_id, version: last.version_number };
}

export function findVersion(
  entry: EntryDetailPayload,
  selected: { variant: string; version: number },
): VersionPayload | null {
  const variant = entry.variants.find((candidate) => candidate.variant_id === selected.variant);
  if (!variant) return null;
  return variant.versions.find((version) => version.version_number === selected.version) ?? null;
}

// -- cascade inbox ------------------------------------------------------------

export function refLabel(ref: VersionRefPayload): string {
  return `${ref.entry}/${ref.variant}/${ref.version}`;
}

export interface InboxItem {
  target: VersionRefPayload;
  targetLabel: string;
  cause: VersionRefPayload;
  causeLabel: string;
  at: string;
  acknowledged: boolean;
  jumpHash: string;
}

export interface InboxVM {
  pending: InboxItem[];
  done: InboxItem[];
  pendingCount: number;
  doneCount: number;
}

export function inboxView(items: NotificationPayload[]): InboxVM {
  const mapped = items.map((notification) => ({
    target: notification.target,
    targetLabel: refLabel(notification.target),
    cause: notification.cause,
    causeLabel: refLabel(notification.cause),
    at: notification.at,
    acknowledged: notification.acknowledged,
    jumpHash: formatRoute({
      view: "entry",
      entry: notification.target.entry,
      variant: notification.target.variant,
      version: notification.target.version,
    }),
  }));
  const pending = mapped.filter((item) => !item.acknowledged);
  const done = mapped.filter((item) => item.acknowledged);
  return { pending, done, pendingCount: pending.length, doneCount: done.length };
}
