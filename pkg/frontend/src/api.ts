/** Typed client for the /api/v1 HTTP surface.
 *
 * This module is the only place the UI talks to the outside world. It
 * mirrors the documented routes one to one and adds no interpretation of
 * its own beyond decoding the error envelope.
 */

export interface VersionRefPayload {
  entry: string;
  variant: string;
  version: number;
}

export interface StatusPayload {
  state: string;
  changed_at: string;
  check_required: boolean;
  check_reason: VersionRefPayload | null;
}

export interface ComplexityPayload {
  component_count: number;
  rating: string;
}

export interface ConnectivityPayload {
  mean_degree: [number, number];
  mean_degree_display: string;
  rating: string;
}

export interface RelationPayload {
  kind: string;
  entry: string;
  variant: string;
  version: number;
  placeholder: string | null;
}

export interface OptionalInfoPayload {
  application_context: string | null;
  capabilities: string | null;
  limitations: string | null;
  example: string | null;
  stakeholder: [string, string][];
  dependencies: string[];
  bricks: string[];
  variants_links: string[];
  references: string[];
}

export interface ConditionPayload {
  kind: string;
  value: string;
}

export interface VersionPayload {
  version_number: number;
  created_at: string;
  status: StatusPayload;
  has_model: boolean;
  complexity: ComplexityPayload | null;
  connectivity: ConnectivityPayload | null;
  relations: RelationPayload[];
  optional_info: OptionalInfoPayload;
  conditions: ConditionPayload[];
  predecessor: number | null;
  feedback_count: number;
}

export interface VariantPayload {
  variant_id: string;
  origin: [string, number] | null;
  versions: VersionPayload[];
}

export interface EntryPayload {
  id: string;
  title: string;
  category: string;
  kind: string;
  layer: string;
  abstract: string;
  keywords: string[];
  responsible_authors: string[];
  is_composite: boolean;
  created_at: string;
}

export interface EntryDetailPayload extends EntryPayload {
  variants: VariantPayload[];
}

export interface EntryListPayload {
  total: number;
  items: EntryPayload[];
}

export interface SearchHitPayload {
  entry: EntryPayload;
  score: number;
}

export interface SearchResultPayload {
  total: number;
  items: SearchHitPayload[];
}

export interface GridPayload {
  rows: string[];
  columns: string[];
  cells: number[][];
}

export interface NotificationPayload {
  recipient: string;
  target: VersionRefPayload;
  cause: VersionRefPayload;
  at: string;
  acknowledged: boolean;
}

export interface FeedbackPayload {
  author: string;
  at: string;
  text: string;
}

export interface FeedbackListPayload {
  items: FeedbackPayload[];
}

export interface NotificationListPayload {
  items: NotificationPayload[];
}

/** Per-user dry run of every control on a version; rendered verbatim. */
export interface ActionsPayload {
  release: boolean;
  implement: boolean;
  deprecate: boolean;
  edit: boolean;
  acknowledge: boolean;
  feedback: boolean;
}

export interface MetricsPayload {
  component_count: number;
  complexity: string;
  mean_degree: [number, number] | null;
  mean_degree_display: string | null;
  connectivity: string | null;
  advice: { subdivide: boolean; reason: string };
}

export interface MePayload {
  user_id: string;
  display_name: string;
  role: string;
}

export type LifecycleAction = "release" | "implement" | "deprecate";

export type EntryFilter = {
  category?: string;
  layer?: string;
  state?: string;
  offset?: number;
  limit?: number;
};

export type SearchRequest = {
  term?: string[];
  category?: string;
  layer?: string;
  state?: string;
  keyword?: string[];
  offset?: number;
  limit?: number;
};

/** Decoded error envelope; status 401 signals a dead session. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: unknown;

  constructor(status: number, code: string, message: string, detail: unknown = null) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.detail = detail;
  }
}

export async function toApiError(response: Response): Promise<ApiError> {
  let code = "UNKNOWN";
  let message = `HTTP ${response.status}`;
  let detail: unknown = null;
  try {
    const payload = (await response.json()) as { error?: { code?: unknown; message?: unknown; detail?: unknown } };
    const error = payload.error;
    if (error && typeof error.code === "string" && typeof error.message === "string") {
      code = error.code;
      message = error.message;
      detail = error.detail ?? null;
    }
  } catch {
    // non-envelope body; keep the HTTP fallback
  }
  return new ApiError(response.status, code, message, detail);
}

/** Serialize query parameters, skipping empty values and flattening lists. */
export function buildQuery(
  params: Record<string, string | number | string[] | null | undefined>,
): string {
  const query = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value === null || value === undefined || value === "") continue;
    if (Array.isArray(value)) {
      for (const item of value) if (item !== "") query.append(key, item);
    } else {
      query.set(key, String(value));
    }
  }
  const encoded = query.toString();
  return encoded ? `?${encoded}` : "";
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

function versionPath(ref: VersionRefPayload): string {
  return (
    `/api/v1/entries/${encodeURIComponent(ref.entry)}` +
    `/variants/${encodeURIComponent(ref.variant)}/versions/${ref.version}`
  );
}

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly token: string,
    private readonly base = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request(
    method: string,
    path: string,
    body?: BodyInit,
    contentType?: string,
  ): Promise<Response> {
    const headers: Record<string, string> = { Authorization: `Bearer ${this.token}` };
    if (contentType) headers["Content-Type"] = contentType;
    const response = await this.fetchImpl(`${this.base}${path}`, { method, headers, body });
    if (!response.ok) throw await toApiError(response);
    return response;
  }

  private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
    const encoded = body === undefined ? undefined : JSON.stringify(body);
    const contentType = body === undefined ? undefined : "application/json";
    const response = await this.request(method, path, encoded, contentType);
    return (await response.json()) as T;
  }

  me(): Promise<MePayload> {
    return this.json("GET", "/api/v1/me");
  }

  listEntries(filter: EntryFilter = {}): Promise<EntryListPayload> {
    return this.json("GET", `/api/v1/entries${buildQuery({ ...filter })}`);
  }

  getEntry(entryId: string): Promise<EntryDetailPayload> {
    return this.json("GET", `/api/v1/entries/${encodeURIComponent(entryId)}`);
  }

  getVersion(ref: VersionRefPayload): Promise<VersionPayload> {
    return this.json("GET", versionPath(ref));
  }

  getActions(ref: VersionRefPayload): Promise<ActionsPayload> {
    return this.json("GET", `${versionPath(ref)}/actions`);
  }

  transition(ref: VersionRefPayload, action: LifecycleAction): Promise<StatusPayload> {
    return this.json("POST", `${versionPath(ref)}/${action}`);
  }

  acknowledge(ref: VersionRefPayload): Promise<StatusPayload> {
    return this.json("POST", `${versionPath(ref)}/acknowledge`);
  }

  listFeedback(ref: VersionRefPayload): Promise<FeedbackListPayload> {
    return this.json("GET", `${versionPath(ref)}/feedback`);
  }

  postFeedback(ref: VersionRefPayload, text: string): Promise<FeedbackPayload> {
    return this.json("POST", `${versionPath(ref)}/feedback`, { text });
  }

  async getModelXml(ref: VersionRefPayload): Promise<string> {
    const response = await this.request("GET", `${versionPath(ref)}/model`);
    return response.text();
  }

  putModelXml(ref: VersionRefPayload, xml: string): Promise<VersionPayload> {
    return this.request("PUT", `${versionPath(ref)}/model`, xml, "application/xml").then(
      (response) => response.json() as Promise<VersionPayload>,
    );
  }

  async getResolvedXml(ref: VersionRefPayload): Promise<string> {
    const response = await this.request("GET", `${versionPath(ref)}/resolved`);
    return response.text();
  }

  versionMetrics(ref: VersionRefPayload): Promise<MetricsPayload> {
    return this.json("GET", `${versionPath(ref)}/metrics`);
  }

  scoreModelXml(xml: string): Promise<MetricsPayload> {
    return this.request("POST", "/api/v1/metrics", xml, "application/xml").then(
      (response) => response.json() as Promise<MetricsPayload>,
    );
  }

  search(request: SearchRequest): Promise<SearchResultPayload> {
    return this.json("GET", `/api/v1/search${buildQuery({ ...request })}`);
  }

  grid(): Promise<GridPayload> {
    return this.json("GET", "/api/v1/grid");
  }

  notifications(): Promise<NotificationListPayload> {
    return this.json("GET", "/api/v1/notifications");
  }
}
