import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, buildQuery, toApiError, type FetchLike } from "../src/api.js";

function recordingFetch(status = 200, body: unknown = {}) {
  const calls: { url: string; init: RequestInit | undefined }[] = [];
  const impl: FetchLike = async (url, init) => {
    calls.push({ url, init });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { calls, impl };
}

describe("buildQuery", () => {
  it("skips empty values and flattens lists", () => {
    expect(buildQuery({})).toBe("");
    expect(buildQuery({ a: "", b: null, c: undefined })).toBe("");
    expect(buildQuery({ term: ["x", "y"], layer: "business", offset: 0 })).toBe(
      "?term=x&term=y&layer=business&offset=0",
    );
    expect(buildQuery({ term: [] })).toBe("");
  });

  it("percent-encodes values", () => {
    expect(buildQuery({ term: ["a b"] })).toBe("?term=a+b");
  });
});

describe("ApiClient", () => {
  it("sends the bearer token on every request", async () => {
    const { calls, impl } = recordingFetch(200, { user_id: "u", display_name: "U", role: "Reader" });
    await new ApiClient("sekrit", "", impl).me();
    expect(calls).toHaveLength(1);
    expect(calls[0].url).toBe("/api/v1/me");
    expect((calls[0].init?.headers as Record<string, string>).Authorization).toBe("Bearer sekrit");
  });

  it("prefixes the base URL and builds repeated search parameters", async () => {
    const { calls, impl } = recordingFetch(200, { total: 0, items: [] });
    const client = new ApiClient("t", "http://127.0.0.1:9", impl);
    await client.search({ term: ["a", "b"], layer: "business", offset: 20, limit: 20 });
    expect(calls[0].url).toBe(
      "http://127.0.0.1:9/api/v1/search?term=a&term=b&layer=business&offset=20&limit=20",
    );
  });

  it("posts lifecycle actions to the documented route", async () => {
    const { calls, impl } = recordingFetch(200, { state: "Released" });
    const client = new ApiClient("t", "", impl);
    await client.transition({ entry: "01A", variant: "main", version: 2 }, "release");
    expect(calls[0].url).toBe("/api/v1/entries/01A/variants/main/versions/2/release");
    expect(calls[0].init?.method).toBe("POST");
  });

  it("uploads draft models as application/xml", async () => {
    const { calls, impl } = recordingFetch(200, { version_number: 1 });
    const client = new ApiClient("t", "", impl);
    await client.putModelXml({ entry: "01A", variant: "main", version: 1 }, "<model/>");
    expect(calls[0].init?.method).toBe("PUT");
    expect((calls[0].init?.headers as Record<string, string>)["Content-Type"]).toBe(
      "application/xml",
    );
    expect(calls[0].init?.body).toBe("<model/>");
  });

  it("decodes the error envelope into an ApiError", async () => {
    const envelope = {
      error: { code: "NOT_FOUND", message: "no entry GHOST", detail: null },
    };
    const { impl } = recordingFetch(404, envelope);
    const client = new ApiClient("t", "", impl);
    const failure = await client.getEntry("GHOST").catch((error: unknown) => error);
    expect(failure).toBeInstanceOf(ApiError);
    const apiError = failure as ApiError;
    expect(apiError.status).toBe(404);
    expect(apiError.code).toBe("NOT_FOUND");
    expect(apiError.message).toBe("no entry GHOST");
  });

  it("falls back to an HTTP label when the body is not an envelope", async () => {
    const error = await toApiError(new Response("<html>boom</html>", { status: 502 }));
    expect(error.status).toBe(502);
    expect(error.code).toBe("UNKNOWN");
    expect(error.message).toBe("HTTP 502");
  });

  it("keeps percent-encoding for variant names in paths", async () => {
    const { calls, impl } = recordingFetch(200, {});
    const client = new ApiClient("t", "", impl);
    await client.getVersion({ entry: "01A", variant: "acme app", version: 1 });
    expect(calls[0].url).toBe("/api/v1/entries/01A/variants/acme%20app/versions/1");
  });
});
