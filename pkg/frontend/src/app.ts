/** View wiring: fetch on navigation, build view-models, render, repeat.
 *
 * Errors surface as dismissible banners carrying the envelope code; a 401
 * ends the session and returns to the login screen; a missing entry renders
 * the not-found page. Nothing is updated optimistically: every action round
 * trips to the service and re-renders from fresh data.
 */

import {
  ApiClient,
  ApiError,
  type ActionsPayload,
  type EntryDetailPayload,
  type SearchResultPayload,
  type VersionPayload,
  type VersionRefPayload,
} from "./api.js";
import { button, clear, el } from "./dom.js";
import {
  SEARCH_PAGE_SIZE,
  formatRoute,
  parseRoute,
  searchRoute,
  type Route,
  type SearchParams,
} from "./router.js";
import { Session, SnapshotCache } from "./state.js";
import * as vm from "./views.js";

// display vocabulary for the state facet; the service owns the semantics
const STATE_NAMES = ["Draft", "Released", "InUse", "Invalid"];

function splitWords(text: string): string[] {
  return text.trim().split(/\s+/).filter((word) => word !== "");
}

function splitList(text: string): string[] {
  return text.trim().split(/[\s,]+/).filter((word) => word !== "");
}

export function toSearchRequest(params: SearchParams) {
  return {
    term: splitWords(params.term),
    category: params.category || undefined,
    layer: params.layer || undefined,
    state: params.state || undefined,
    keyword: splitList(params.keyword),
    offset: params.offset,
    limit: SEARCH_PAGE_SIZE,
  };
}

export class App {
  private readonly session: Session;
  private readonly snapshots = new SnapshotCache();
  private bannerArea: HTMLElement | null = null;

  constructor(private readonly root: HTMLElement) {
    this.session = new Session(window.localStorage);
  }

  start(): void {
    window.addEventListener("hashchange", () => void this.render());
    void this.render();
  }

  private refresh = (): void => {
    void this.render();
  };

  private async render(): Promise<void> {
    const route = parseRoute(window.location.hash || "#/grid");
    clear(this.root);
    this.bannerArea = null;
    if (route.view === "login") {
      this.renderLogin();
      return;
    }
    if (!this.session.token) {
      window.location.hash = "#/login";
      return;
    }
    const client = new ApiClient(this.session.token);
    const banners = el("div", { class: "banners" });
    const view = el("main", { class: "view" });
    this.root.append(this.topNav(route), banners, view);
    this.bannerArea = banners;
    void this.fillIdentity(client);
    try {
      switch (route.view) {
        case "grid":
          await this.renderGrid(client, view);
          break;
        case "search":
          await this.renderSearch(client, view, route.params);
          break;
        case "entry":
          await this.renderEntry(client, view, route);
          break;
        case "inbox":
          await this.renderInbox(client, view);
          break;
      }
    } catch (error) {
      this.handleError(error, route, view);
    }
  }

  private handleError(error: unknown, route: Route, view: HTMLElement): void {
    if (error instanceof ApiError && error.status === 401) {
      this.session.signOut();
      window.location.hash = "#/login";
      return;
    }
    if (error instanceof ApiError && error.code === "NOT_FOUND" && route.view === "entry") {
      this.renderNotFound(view, error.message);
      return;
    }
    this.banner(error);
  }

  private banner(error: unknown): void {
    const code = error instanceof ApiError ? error.code : "ERROR";
    const message = error instanceof Error ? error.message : String(error);
    const node = el("div", { class: "banner", role: "alert" }, [
      el("strong", {}, [code]),
      ` ${message} `,
    ]);
    node.append(button("Dismiss", { className: "dismiss" }, () => node.remove()));
    this.bannerArea?.append(node);
  }

  private topNav(route: Route): HTMLElement {
    const link = (label: string, hash: string, active: boolean) =>
      el("a", { href: hash, class: active ? "active" : "" }, [label]);
    const nav = el("header", { class: "topnav" }, [
      el("span", { class: "brand" }, ["modelvault"]),
      link("Grid", "#/grid", route.view === "grid"),
      link("Search", formatRoute(searchRoute()), route.view === "search"),
      link("Inbox", "#/inbox", route.view === "inbox"),
      el("span", { class: "spacer" }),
      el("span", { class: "whoami", id: "whoami" }),
    ]);
    nav.append(
      button("Sign out", { className: "signout" }, () => {
        this.session.signOut();
        window.location.hash = "#/login";
      }),
    );
    return nav;
  }

  private async fillIdentity(client: ApiClient): Promise<void> {
    const slot = this.root.querySelector("#whoami");
    if (!slot) return;
    try {
      const me = await client.me();
      slot.textContent = `${me.display_name} (${me.role})`;
    } catch (error) {
      if (error instanceof ApiError && error.status === 401) {
        this.session.signOut();
        window.location.hash = "#/login";
      }
    }
  }

  private asOfLine(key: string): HTMLElement {
    const snapshot = this.snapshots.get(key);
    const line = el("p", { class: "as-of" });
    if (snapshot) {
      line.append(`Fetched ${new Date(snapshot.fetchedAt).toLocaleTimeString()} `);
    }
    line.append(button("Refresh", { className: "refresh" }, this.refresh));
    return line;
  }

  // -- login -------------------------------------------------------------------

  private renderLogin(): void {
    const input = el("input", {
      type: "password",
      placeholder: "access token",
      autocomplete: "off",
    });
    const problem = el("p", { class: "inline-error", hidden: "hidden" });
    const form = el("form", { class: "login-card" }, [
      el("h1", {}, ["modelvault"]),
      el("p", {}, ["Paste the bearer token issued by your administrator."]),
      input,
      el("button", { type: "submit" }, ["Sign in"]),
      problem,
    ]);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void (async () => {
        const token = input.value.trim();
        if (!token) {
          problem.hidden = false;
          problem.textContent = "Enter a token first.";
          return;
        }
        try {
          await new ApiClient(token).me();
          this.session.signIn(token);
          window.location.hash = "#/grid";
        } catch (error) {
          problem.hidden = false;
          problem.textContent =
            error instanceof ApiError
              ? `The service rejected this token (${error.code}).`
              : `Could not reach the service: ${String(error)}`;
        }
      })();
    });
    this.root.append(el("main", { class: "view login" }, [form]));
  }

  // -- landscape grid ------------------------------------------------------------

  private async renderGrid(client: ApiClient, view: HTMLElement): Promise<void> {
    const grid = await client.grid();
    this.snapshots.put("grid", grid);
    const model = vm.gridView(grid);
    view.append(el("h1", {}, ["Landscape grid"]), this.asOfLine("grid"));
    const table = el("table", { class: "grid" });
    const head = el("tr", {}, [el("th", { class: "corner" }, ["layer / category"])]);
    for (const column of model.columns) head.append(el("th", {}, [column]));
    table.append(head);
    for (const row of model.rows) {
      const tr = el("tr", {}, [el("th", { class: "layer" }, [row.layer])]);
      for (const cell of row.cells) {
        tr.append(
          el("td", {}, [
            el(
              "a",
              {
                href: cell.searchHash,
                class: cell.empty ? "cell empty" : "cell filled",
                title: `${cell.layer} / ${cell.category}`,
              },
              [String(cell.count)],
            ),
          ]),
        );
      }
      table.append(tr);
    }
    view.append(
      table,
      el("p", { class: "hint" }, [
        "Each cell counts the entries filed under its layer and category; ",
        "0 marks an open area. Click a cell to search that slot.",
      ]),
    );
  }

  // -- search ---------------------------------------------------------------------

  private async renderSearch(
    client: ApiClient,
    view: HTMLElement,
    params: SearchParams,
  ): Promise<void> {
    const grid = await client.grid();
    view.append(el("h1", {}, ["Search the catalog"]));
    view.append(this.searchForm(grid.columns, grid.rows, params));

    let result: SearchResultPayload;
    try {
      result = await client.search(toSearchRequest(params));
    } catch (error) {
      if (error instanceof ApiError && error.code === "VALIDATION") {
        view.append(el("p", { class: "inline-error" }, [`Nothing to show: ${error.message}`]));
        return;
      }
      throw error;
    }
    this.snapshots.put("search", result);
    const model = vm.searchView(result, params);
    view.append(
      el("p", { class: "result-count" }, [
        `${model.total} ${model.total === 1 ? "entry" : "entries"} found`,
      ]),
      this.asOfLine("search"),
    );
    if (model.items.length === 0) {
      view.append(
        el("p", { class: "empty-state" }, [
          "No entries match. Try fewer terms or different facets.",
        ]),
      );
      return;
    }
    const list = el("div", { class: "results" });
    for (const item of model.items) {
      const chips = el("div", { class: "chips" }, [
        el("span", { class: "chip" }, [item.kind]),
        el("span", { class: "chip" }, [item.category]),
        el("span", { class: "chip" }, [item.layer]),
        el("span", { class: "chip score" }, [`score ${item.score}`]),
      ]);
      const card = el("article", { class: "result" }, [
        el("h3", {}, [el("a", { href: item.detailHash }, [item.title])]),
        chips,
      ]);
      if (item.snippet) card.append(el("p", { class: "snippet" }, [item.snippet]));
      if (item.keywords.length) {
        card.append(el("p", { class: "keywords" }, [`keywords: ${item.keywords.join(", ")}`]));
      }
      list.append(card);
    }
    view.append(list);
    const pager = el("nav", { class: "pager" });
    if (model.page.prevHash) pager.append(el("a", { href: model.page.prevHash }, ["Previous"]));
    pager.append(
      el("span", {}, [
        ` showing ${model.page.offset + 1}–${model.page.offset + model.page.shown} of ${model.page.total} `,
      ]),
    );
    if (model.page.nextHash) pager.append(el("a", { href: model.page.nextHash }, ["Next"]));
    view.append(pager);
  }

  private searchForm(categories: string[], layers: string[], params: SearchParams): HTMLElement {
    const select = (name: string, options: string[], current: string) => {
      const node = el("select", { name });
      node.append(el("option", { value: "" }, [`any ${name}`]));
      for (const option of options) {
        const item = el("option", { value: option }, [option]);
        if (option === current) item.selected = true;
        node.append(item);
      }
      return node;
    };
    const term = el("input", { type: "search", name: "term", placeholder: "terms" });
    term.value = params.term;
    const keyword = el("input", { type: "text", name: "keyword", placeholder: "keywords" });
    keyword.value = params.keyword;
    const category = select("category", categories, params.category);
    const layer = select("layer", layers, params.layer);
    const state = select("state", STATE_NAMES, params.state);
    const form = el("form", { class: "search-form" }, [
      term,
      category,
      layer,
      state,
      keyword,
      el("button", { type: "submit" }, ["Search"]),
    ]);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const target = formatRoute(
        searchRoute({
          term: term.value,
          category: category.value,
          layer: layer.value,
          state: state.value,
          keyword: keyword.value,
          offset: 0,
        }),
      );
      if (window.location.hash === target) this.refresh();
      else window.location.hash = target;
    });
    return form;
  }

  // -- entry detail ------------------------------------------------------------------

  private async renderEntry(
    client: ApiClient,
    view: HTMLElement,
    route: { entry: string; variant: string | null; version: number | null },
  ): Promise<void> {
    const entry = await client.getEntry(route.entry);
    const selected =
      route.variant !== null && route.version !== null
        ? { variant: route.variant, version: route.version }
        : vm.defaultSelection(entry);
    const version = vm.findVersion(entry, selected);
    if (!version) {
      this.renderNotFound(
        view,
        `version ${selected.variant}/${selected.version} does not exist on ${entry.id}`,
      );
      return;
    }
    const ref: VersionRefPayload = {
      entry: entry.id,
      variant: selected.variant,
      version: selected.version,
    };
    const cacheKey = `entry:${ref.entry}/${ref.variant}/${ref.version}`;
    const [actions, feedback] = await Promise.all([
      client.getActions(ref),
      client.listFeedback(ref),
    ]);
    this.snapshots.put(cacheKey, { entry, actions, feedback });

    view.append(this.entryHeader(entry), this.asOfLine(cacheKey));
    view.append(this.statusCard(version, ref));
    view.append(this.versionTreeSection(entry, selected));
    view.append(this.actionSection(client, entry, version, ref, actions));
    if (entry.is_composite) view.append(this.compositionSection(version));
    view.append(this.feedbackSection(client, ref, actions, feedback.items));
  }

  private entryHeader(entry: EntryDetailPayload): HTMLElement {
    const chips = el("div", { class: "chips" }, [
      el("span", { class: "chip" }, [entry.kind]),
      el("span", { class: "chip" }, [entry.category]),
      el("span", { class: "chip" }, [entry.layer]),
    ]);
    if (entry.is_composite) chips.append(el("span", { class: "chip composite" }, ["composite"]));
    const header = el("section", { class: "entry-header" }, [
      el("h1", {}, [entry.title]),
      chips,
    ]);
    if (entry.abstract) header.append(el("p", { class: "abstract" }, [entry.abstract]));
    header.append(
      el("p", { class: "meta-line" }, [
        `id ${entry.id} · created ${entry.created_at} · authors ${entry.responsible_authors.join(", ")}`,
      ]),
    );
    if (entry.keywords.length) {
      header.append(el("p", { class: "keywords" }, [`keywords: ${entry.keywords.join(", ")}`]));
    }
    return header;
  }

  private statusCard(version: VersionPayload, ref: VersionRefPayload): HTMLElement {
    const card = el("section", { class: "status-card" });
    const chips = el("div", { class: "chips" }, [
      el("span", { class: `chip state-${version.status.state.toLowerCase()}` }, [
        version.status.state,
      ]),
    ]);
    for (const badge of vm.metricBadges(version)) {
      chips.append(el("span", { class: "chip metric" }, [`${badge.label}: ${badge.value}`]));
    }
    card.append(
      el("h2", {}, [`${ref.variant} / v${ref.version}`]),
      chips,
      el("p", { class: "meta-line" }, [
        `created ${version.created_at} · state changed ${version.status.changed_at}`,
      ]),
    );
    if (version.status.check_required && version.status.check_reason) {
      const cause = version.status.check_reason;
      card.append(
        el("p", { class: "check-flag" }, [
          "Change check pending: caused by ",
          el(
            "a",
            {
              href: formatRoute({
                view: "entry",
                entry: cause.entry,
                variant: cause.variant,
                version: cause.version,
              }),
            },
            [vm.refLabel(cause)],
          ),
        ]),
      );
    }
    return card;
  }

  private versionTreeSection(
    entry: EntryDetailPayload,
    selected: { variant: string; version: number },
  ): HTMLElement {
    const section = el("section", { class: "tree" }, [el("h2", {}, ["Variants and versions"])]);
    for (const group of vm.versionTree(entry, selected)) {
      const heading = el("h3", {}, [group.variant]);
      if (group.origin) heading.append(el("span", { class: "origin" }, [` (${group.origin})`]));
      const list = el("ul");
      for (const node of group.versions) {
        const item = el("li", { class: node.selected ? "selected" : "" }, [
          el("a", { href: node.hash }, [`v${node.number}`]),
          ` ${node.state}`,
        ]);
        if (node.checkRequired) item.append(el("span", { class: "flag" }, [" check pending"]));
        if (node.predecessor) item.append(el("span", { class: "pred" }, [` · ${node.predecessor}`]));
        list.append(item);
      }
      section.append(heading, list);
    }
    return section;
  }

  private actionSection(
    client: ApiClient,
    entry: EntryDetailPayload,
    version: VersionPayload,
    ref: VersionRefPayload,
    actions: ActionsPayload,
  ): HTMLElement {
    const section = el("section", { class: "actions" }, [
      el("h2", {}, [`Actions on ${ref.variant}/v${ref.version}`]),
    ]);
    const row = el("div", { class: "action-row" });
    for (const spec of vm.actionButtons(actions)) {
      row.append(
        button(spec.label, { enabled: spec.enabled, className: "action" }, () => {
          void client
            .transition(ref, spec.action)
            .then(this.refresh)
            .catch((error) => this.banner(error));
        }),
      );
    }
    if (version.status.check_required) {
      row.append(
        button("Acknowledge check", { enabled: actions.acknowledge, className: "action" }, () => {
          void client
            .acknowledge(ref)
            .then(this.refresh)
            .catch((error) => this.banner(error));
        }),
      );
    }
    section.append(row);

    const io = el("div", { class: "action-row" });
    if (version.has_model) {
      io.append(
        button("Download model XML", { className: "secondary" }, () => {
          void client
            .getModelXml(ref)
            .then((xml) => downloadXml(`${ref.entry}-${ref.variant}-v${ref.version}.xml`, xml))
            .catch((error) => this.banner(error));
        }),
      );
    }
    if (entry.is_composite) {
      io.append(
        button("Download resolved model", { className: "secondary" }, () => {
          void client
            .getResolvedXml(ref)
            .then((xml) =>
              downloadXml(`${ref.entry}-${ref.variant}-v${ref.version}-resolved.xml`, xml),
            )
            .catch((error) => this.banner(error));
        }),
      );
    }
    if (actions.edit) {
      const file = el("input", { type: "file", accept: ".xml,application/xml" });
      io.append(
        file,
        button("Upload draft model", { className: "secondary" }, () => {
          const chosen = file.files?.[0];
          if (!chosen) {
            this.banner(new Error("choose an exchange XML file first"));
            return;
          }
          void chosen
            .text()
            .then((xml) => client.putModelXml(ref, xml))
            .then(this.refresh)
            .catch((error) => this.banner(error));
        }),
      );
    }
    if (io.childNodes.length) section.append(io);
    return section;
  }

  private compositionSection(version: VersionPayload): HTMLElement {
    const section = el("section", { class: "composition" }, [el("h2", {}, ["Composed from"])]);
    const list = el("ul");
    for (const relation of version.relations) {
      const target = { entry: relation.entry, variant: relation.variant, version: relation.version };
      const item = el("li", {}, [
        el("span", { class: "chip" }, [relation.kind]),
        " ",
        el(
          "a",
          { href: formatRoute({ view: "entry", ...target }) },
          [vm.refLabel(target)],
        ),
      ]);
      if (relation.placeholder) {
        item.append(el("span", { class: "pred" }, [` replaces ${relation.placeholder}`]));
      }
      list.append(item);
    }
    if (!version.relations.length) list.append(el("li", {}, ["no pinned relations"]));
    section.append(list);
    return section;
  }

  private feedbackSection(
    client: ApiClient,
    ref: VersionRefPayload,
    actions: ActionsPayload,
    items: { author: string; at: string; text: string }[],
  ): HTMLElement {
    const section = el("section", { class: "feedback" }, [
      el("h2", {}, [`Feedback (${items.length})`]),
    ]);
    if (!items.length) section.append(el("p", { class: "empty-state" }, ["No comments yet."]));
    for (const comment of items) {
      section.append(
        el("article", { class: "comment" }, [
          el("p", { class: "meta-line" }, [`${comment.author} · ${comment.at}`]),
          el("p", {}, [comment.text]),
        ]),
      );
    }
    const box = el("textarea", { rows: "3", placeholder: "Leave a comment" });
    const post = button("Post comment", { enabled: actions.feedback, className: "action" }, () => {
      void client
        .postFeedback(ref, box.value)
        .then(this.refresh)
        .catch((error) => this.banner(error));
    });
    section.append(el("div", { class: "post-box" }, [box, post]));
    return section;
  }

  // -- cascade inbox ---------------------------------------------------------------

  private async renderInbox(client: ApiClient, view: HTMLElement): Promise<void> {
    const payload = await client.notifications();
    this.snapshots.put("inbox", payload);
    const model = vm.inboxView(payload.items);
    view.append(el("h1", {}, ["Cascade inbox"]), this.asOfLine("inbox"));

    view.append(el("h2", {}, [`Pending checks (${model.pendingCount})`]));
    if (!model.pending.length) {
      view.append(el("p", { class: "empty-state" }, ["No pending checks."]));
    } else {
      const list = el("ul", { class: "inbox" });
      for (const item of model.pending) {
        const node = el("li", {}, [
          el("a", { href: item.jumpHash }, [item.targetLabel]),
          ` flagged by ${item.causeLabel} at ${item.at} `,
        ]);
        node.append(
          button("Acknowledge", { className: "action" }, () => {
            void client
              .acknowledge(item.target)
              .then(this.refresh)
              .catch((error) => this.banner(error));
          }),
        );
        list.append(node);
      }
      view.append(list);
    }

    view.append(el("h2", {}, [`Acknowledged (${model.doneCount})`]));
    if (!model.done.length) {
      view.append(el("p", { class: "empty-state" }, ["Nothing acknowledged yet."]));
    } else {
      const list = el("ul", { class: "inbox done" });
      for (const item of model.done) {
        list.append(
          el("li", {}, [
            el("a", { href: item.jumpHash }, [item.targetLabel]),
            ` flagged by ${item.causeLabel} at ${item.at}`,
          ]),
        );
      }
      view.append(list);
    }
  }

  private renderNotFound(view: HTMLElement, message: string): void {
    clear(view);
    view.append(
      el("h1", {}, ["Not found"]),
      el("p", {}, [message]),
      el("p", {}, [el("a", { href: "#/grid" }, ["Back to the grid"])]),
    );
  }
}

function downloadXml(filename: string, xml: string): void {
  const blob = new Blob([xml], { type: "application/xml" });
  const url = URL.createObjectURL(blob);
  const anchor = el("a", { href: url, download: filename });
  document.body.append(anchor);
  anchor.click();
  anchor.remove();
  URL.revokeObjectURL(url);
}
