import { describe, expect, it } from "vitest";

import { SEARCH_PAGE_SIZE, formatRoute, parseRoute, searchRoute } from "../src/router.js";

describe("parseRoute", () => {
  it("maps the five views", () => {
    expect(parseRoute("#/login")).toEqual({ view: "login" });
    expect(parseRoute("#/grid")).toEqual({ view: "grid" });
    expect(parseRoute("#/inbox")).toEqual({ view: "inbox" });
    expect(parseRoute("#/search")).toEqual(searchRoute());
    expect(parseRoute("#/entries/01ABC")).toEqual({
      view: "entry",
      entry: "01ABC",
      variant: null,
      version: null,
    });
    expect(parseRoute("#/entries/01ABC/variants/acme-app/versions/3")).toEqual({
      view: "entry",
      entry: "01ABC",
      variant: "acme-app",
      version: 3,
    });
  });

  it("defaults unknown and empty hashes to the grid", () => {
    expect(parseRoute("")).toEqual({ view: "grid" });
    expect(parseRoute("#")).toEqual({ view: "grid" });
    expect(parseRoute("#/")).toEqual({ view: "grid" });
    expect(parseRoute("#/bogus")).toEqual({ view: "grid" });
  });

  it("parses search parameters and clamps bad offsets", () => {
    const route = parseRoute("#/search?term=incident+flow&layer=business&offset=40");
    expect(route).toEqual(
      searchRoute({ term: "incident flow", layer: "business", offset: 40 }),
    );
    expect(parseRoute("#/search?offset=-3")).toEqual(searchRoute());
    expect(parseRoute("#/search?offset=abc")).toEqual(searchRoute());
  });

  it("falls back to the bare entry view on a malformed version focus", () => {
    expect(parseRoute("#/entries/01ABC/variants/main/versions/abc")).toEqual({
      view: "entry",
      entry: "01ABC",
      variant: null,
      version: null,
    });
    expect(parseRoute("#/entries/01ABC/variants/main/versions/0")).toEqual({
      view: "entry",
      entry: "01ABC",
      variant: null,
      version: null,
    });
  });
});

describe("formatRoute", () => {
  it("round trips every route shape", () => {
    const routes = [
      { view: "login" } as const,
      { view: "grid" } as const,
      { view: "inbox" } as const,
      { view: "entry", entry: "01ABC", variant: null, version: null } as const,
      { view: "entry", entry: "01ABC", variant: "acme app", version: 2 } as const,
      searchRoute({ term: "incident itil", category: "domain-neutral", offset: SEARCH_PAGE_SIZE }),
    ];
    for (const route of routes) {
      expect(parseRoute(formatRoute(route))).toEqual(route);
    }
  });

  it("omits empty search parameters", () => {
    expect(formatRoute(searchRoute())).toBe("#/search");
    expect(formatRoute(searchRoute({ layer: "business" }))).toBe("#/search?layer=business");
  });
});
