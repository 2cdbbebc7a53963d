import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, LatestOnly } from "../src/api.js";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("de-duplicates concurrent identical GETs", async () => {
    let calls = 0;
    const client = new ApiClient("", async () => {
      calls += 1;
      await new Promise((resolve) => setTimeout(resolve, 10));
      return jsonResponse({ status: "ok" });
    });
    const [a, b, c] = await Promise.all([
      client.health(),
      client.health(),
      client.health(),
    ]);
    expect(calls).toBe(1);
    expect(a).toEqual({ status: "ok" });
    expect(b).toEqual(a);
    expect(c).toEqual(a);
    await client.health();
    expect(calls).toBe(2); // sequential calls fetch again
  });

  it("surfaces structured service errors", async () => {
    const client = new ApiClient("", async () =>
      jsonResponse({ code: "unknown_dgm", message: "unknown DGM", detail: null }, 422));
    await expect(client.health()).rejects.toThrowError(ApiError);
    await expect(client.health()).rejects.toMatchObject({
      status: 422,
      code: "unknown_dgm",
    });
  });

  it("builds wide-table queries with display options", async () => {
    const urls: string[] = [];
    const client = new ApiClient("", async (input) => {
      urls.push(String(input));
      return jsonResponse([]);
    });
    await client.wideTable("s1", "2", { measures: ["bias", "coverage"], sigDigits: 3, mcse: false });
    expect(urls[0]).toContain("/api/datasets/s1/export?");
    expect(urls[0]).toContain("what=table");
    expect(urls[0]).toContain("orientation=wide");
    expect(urls[0]).toContain("dgm=2");
    expect(urls[0]).toContain("measures=bias%2Ccoverage");
    expect(urls[0]).toContain("sig_digits=3");
    expect(urls[0]).toContain("mcse=0");
  });
});

describe("LatestOnly", () => {
  it("discards superseded responses", async () => {
    const gate = new LatestOnly();
    let releaseFirst!: () => void;
    const first = gate.run(
      () =>
        new Promise<string>((resolve) => {
          releaseFirst = () => resolve("stale");
        }),
    );
    const second = gate.run(async () => "fresh");
    expect(await second).toBe("fresh");
    releaseFirst();
    expect(await first).toBeNull(); // the stale response is dropped
  });
});
