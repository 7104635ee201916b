import { describe, expect, it } from "vitest";

import type {
  ActionsPayload,
  EntryDetailPayload,
  EntryPayload,
  GridPayload,
  NotificationPayload,
  VersionPayload,
} from "../src/api.js";
import { searchRoute } from "../src/router.js";
import {
  actionButtons,
  defaultSelection,
  findVersion,
  gridView,
  inboxView,
  metricBadges,
  refLabel,
  searchView,
  snippet,
  versionTree,
} from "../src/views.js";

function entryPayload(overrides: Partial<EntryPayload> = {}): EntryPayload {
  return {
    id: "01HZX5K9",
    title: "Incident Management Reference",
    category: "domain-neutral",
    kind: "reference-model",
    layer: "business",
    abstract: "Reference flow for handling incidents.",
    keywords: ["incident"],
    responsible_authors: ["alice"],
    is_composite: false,
    created_at: "2026-08-14T08:00:00+00:00",
    ...overrides,
  };
}

function versionPayload(overrides: Partial<VersionPayload> = {}): VersionPayload {
  return {
    version_number: 1,
    created_at: "2026-08-14T08:00:00+00:00",
    status: {
      state: "Draft",
      changed_at: "2026-08-14T08:00:00+00:00",
      check_required: false,
      check_reason: null,
    },
    has_model: true,
    complexity: { component_count: 7, rating: "Easy" },
    connectivity: { mean_degree: [3, 2], mean_degree_display: "1.50", rating: "Simple" },
    relations: [],
    optional_info: {
      application_context: null,
      capabilities: null,
      limitations: null,
      example: null,
      stakeholder: [],
      dependencies: [],
      bricks: [],
      variants_links: [],
      references: [],
    },
    conditions: [],
    predecessor: null,
    feedback_count: 0,
    ...overrides,
  };
}

describe("gridView", () => {
  const grid: GridPayload = {
    rows: ["business", "application"],
    columns: ["domain-neutral", "domain-specific", "company-specific"],
    cells: [
      [3, 0, 1],
      [0, 2, 0],
    ],
  };

  it("copies every count and marks zero cells as open areas", () => {
    const model = gridView(grid);
    expect(model.columns).toEqual(grid.columns);
    expect(model.rows.map((row) => row.layer)).toEqual(grid.rows);
    const counts = model.rows.map((row) => row.cells.map((cell) => cell.count));
    expect(counts).toEqual(grid.cells);
    const empties = model.rows.map((row) => row.cells.map((cell) => cell.empty));
    expect(empties).toEqual([
      [false, true, false],
      [true, false, true],
    ]);
  });

  it("links each cell to the search pre-filtered by its slot", () => {
    const cell = gridView(grid).rows[1].cells[1];
    expect(cell.searchHash).toBe("#/search?category=domain-specific&layer=application");
  });
});

describe("searchView", () => {
  it("maps hits in ranked order with scores and detail links", () => {
    const payload = {
      total: 2,
      items: [
        { entry: entryPayload(), score: 2 },
        { entry: entryPayload({ id: "01ZZZZZZ", title: "Acme Composite" }), score: 1 },
      ],
    };
    const params = searchRoute({ term: "incident" });
    if (params.view !== "search") throw new Error("unreachable");
    const model = searchView(payload, params.params);
    expect(model.total).toBe(2);
    expect(model.items.map((item) => item.title)).toEqual([
      "Incident Management Reference",
      "Acme Composite",
    ]);
    expect(model.items.map((item) => item.score)).toEqual([2, 1]);
    expect(model.items[0].detailHash).toBe("#/entries/01HZX5K9");
  });

  it("pages forward and backward against the total", () => {
    const hits = { total: 45, items: Array(20).fill({ entry: entryPayload(), score: 0 }) };
    const first = searchRoute({ term: "x" });
    const later = searchRoute({ term: "x", offset: 20 });
    if (first.view !== "search" || later.view !== "search") throw new Error("unreachable");
    const page1 = searchView(hits, first.params).page;
    expect(page1.prevHash).toBeNull();
    expect(page1.nextHash).toBe("#/search?term=x&offset=20");
    const page2 = searchView(hits, later.params).page;
    expect(page2.prevHash).toBe("#/search?term=x");
    expect(page2.nextHash).toBe("#/search?term=x&offset=40");
    const lastPage = searchView({ total: 45, items: hits.items.slice(0, 5) }, {
      ...later.params,
      offset: 40,
    }).page;
    expect(lastPage.nextHash).toBeNull();
  });

  it("truncates long abstracts into a single-line snippet", () => {
    expect(snippet("short text")).toBe("short text");
    expect(snippet("a\n  b\tc")).toBe("a b c");
    const long = "word ".repeat(80);
    const cut = snippet(long);
    expect(cut.length).toBeLessThanOrEqual(160);
    expect(cut.endsWith("…")).toBe(true);
  });
});

describe("actionButtons", () => {
  it("mirrors the dry-run payload verbatim for every combination", () => {
    for (const release of [true, false]) {
      for (const implement of [true, false]) {
        for (const deprecate of [true, false]) {
          const actions: ActionsPayload = {
            release,
            implement,
            deprecate,
            edit: false,
            acknowledge: false,
            feedback: true,
          };
          const buttons = actionButtons(actions);
          expect(buttons.map((button) => button.action)).toEqual([
            "release",
            "implement",
            "deprecate",
          ]);
          expect(buttons.map((button) => button.enabled)).toEqual([
            release,
            implement,
            deprecate,
          ]);
        }
      }
    }
  });
});

describe("entry detail view-models", () => {
  const detail: EntryDetailPayload = {
    ...entryPayload(),
    variants: [
      {
        variant_id: "acme-app",
        origin: ["main", 1],
        versions: [versionPayload({ version_number: 1 })],
      },
      {
        variant_id: "main",
        origin: null,
        versions: [
          versionPayload({
            version_number: 1,
            status: {
              state: "Released",
              changed_at: "2026-08-14T09:00:00+00:00",
              check_required: false,
              check_reason: null,
            },
          }),
          versionPayload({ version_number: 2, predecessor: 1 }),
        ],
      },
    ],
  };

  it("selects the latest version of main by default", () => {
    expect(defaultSelection(detail)).toEqual({ variant: "main", version: 2 });
  });

  it("falls back to the first variant when main is absent", () => {
    const noMain = { ...detail, variants: [detail.variants[0]] };
    expect(defaultSelection(noMain)).toEqual({ variant: "acme-app", version: 1 });
  });

  it("finds the selected version payload or reports null", () => {
    expect(findVersion(detail, { variant: "main", version: 2 })?.version_number).toBe(2);
    expect(findVersion(detail, { variant: "main", version: 9 })).toBeNull();
    expect(findVersion(detail, { variant: "ghost", version: 1 })).toBeNull();
  });

  it("builds the variant tree with origins, predecessors, and selection", () => {
    const tree = versionTree(detail, { variant: "main", version: 2 });
    expect(tree.map((group) => group.variant)).toEqual(["acme-app", "main"]);
    expect(tree[0].origin).toBe("branched from main/1");
    expect(tree[1].origin).toBeNull();
    const mainNodes = tree[1].versions;
    expect(mainNodes.map((node) => node.selected)).toEqual([false, true]);
    expect(mainNodes[1].predecessor).toBe("succeeds main/1");
    expect(mainNodes[0].hash).toBe("#/entries/01HZX5K9/variants/main/versions/1");
    expect(mainNodes.map((node) => node.state)).toEqual(["Released", "Draft"]);
  });

  it("renders metric badges only when the version carries metrics", () => {
    expect(metricBadges(versionPayload())).toEqual([
      { label: "complexity", value: "Easy (7)" },
      { label: "connectivity", value: "Simple (1.50)" },
    ]);
    expect(metricBadges(versionPayload({ complexity: null, connectivity: null }))).toEqual([]);
  });
});

describe("inboxView", () => {
  const notification = (acknowledged: boolean, at: string): NotificationPayload => ({
    recipient: "bob",
    target: { entry: "01AAA", variant: "main", version: 1 },
    cause: { entry: "01BBB", variant: "main", version: 2 },
    at,
    acknowledged,
  });

  it("splits pending from acknowledged and counts both", () => {
    const model = inboxView([
      notification(false, "t3"),
      notification(false, "t2"),
      notification(true, "t1"),
    ]);
    expect(model.pendingCount).toBe(2);
    expect(model.doneCount).toBe(1);
    expect(model.pending.map((item) => item.at)).toEqual(["t3", "t2"]);
    expect(model.done.map((item) => item.at)).toEqual(["t1"]);
  });

  it("labels the cause triple and links to the flagged version", () => {
    const model = inboxView([notification(false, "t1")]);
    expect(model.pending[0].targetLabel).toBe("01AAA/main/1");
    expect(model.pending[0].causeLabel).toBe("01BBB/main/2");
    expect(model.pending[0].jumpHash).toBe("#/entries/01AAA/variants/main/versions/1");
  });

  it("shows empty sections for an empty inbox", () => {
    expect(inboxView([])).toEqual({ pending: [], done: [], pendingCount: 0, doneCount: 0 });
  });
});

describe("refLabel", () => {
  it("joins the triple", () => {
    expect(refLabel({ entry: "e", variant: "v", version: 3 })).toBe("e/v/3");
  });
});
