/** Hash-fragment routing: parse and format the five view addresses. */

export type SearchParams = {
  term: string;
  category: string;
  layer: string;
  state: string;
  keyword: string;
  offset: number;
};

export type Route =
  | { view: "login" }
  | { view: "grid" }
  | { view: "search"; params: SearchParams }
  | { view: "entry"; entry: string; variant: string | null; version: number | null }
  | { view: "inbox" };

export const SEARCH_PAGE_SIZE = 20;

export function searchRoute(overrides: Partial<SearchParams> = {}): Route {
  return {
    view: "search",
    params: { term: "", category: "", layer: "", state: "", keyword: "", offset: 0, ...overrides },
  };
}

function nonNegativeInt(raw: string | null): number {
  const value = Number(raw ?? "");
  return Number.isInteger(value) && value > 0 ? value : 0;
}

export function parseRoute(hash: string): Route {
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  const queryStart = raw.indexOf("?");
  const path = queryStart === -1 ? raw : raw.slice(0, queryStart);
  const query = queryStart === -1 ? "" : raw.slice(queryStart + 1);
  const segments = path.split("/").filter((segment) => segment !== "");

  if (segments[0] === "login") return { view: "login" };
  if (segments[0] === "inbox") return { view: "inbox" };
  if (segments[0] === "search") {
    const params = new URLSearchParams(query);
    return {
      view: "search",
      params: {
        term: params.get("term") ?? "",
        category: params.get("category") ?? "",
        layer: params.get("layer") ?? "",
        state: params.get("state") ?? "",
        keyword: params.get("keyword") ?? "",
        offset: nonNegativeInt(params.get("offset")),
      },
    };
  }
  if (segments[0] === "entries" && segments.length >= 2) {
    const entry = decodeURIComponent(segments[1]);
    if (segments.length === 6 && segments[2] === "variants" && segments[4] === "versions") {
      const version = Number(segments[5]);
      if (Number.isInteger(version) && version > 0) {
        return { view: "entry", entry, variant: decodeURIComponent(segments[3]), version };
      }
    }
    return { view: "entry", entry, variant: null, version: null };
  }
  return { view: "grid" };
}

export function formatRoute(route: Route): string {
  switch (route.view) {
    case "login":
      return "#/login";
    case "grid":
      return "#/grid";
    case "inbox":
      return "#/inbox";
    case "entry":
      if (route.variant !== null && route.version !== null) {
        return (
          `#/entries/${encodeURIComponent(route.entry)}` +
          `/variants/${encodeURIComponent(route.variant)}/versions/${route.version}`
        );
      }
      return `#/entries/${encodeURIComponent(route.entry)}`;
    case "search": {
      const query = new URLSearchParams();
      const params = route.params;
      if (params.term) query.set("term", params.term);
      if (params.category) query.set("category", params.category);
      if (params.layer) query.set("layer", params.layer);
      if (params.state) query.set("state", params.state);
      if (params.keyword) query.set("keyword", params.keyword);
      if (params.offset > 0) query.set("offset", String(params.offset));
      const encoded = query.toString();
      return encoded ? `#/search?${encoded}` : "#/search";
    }
  }
}
