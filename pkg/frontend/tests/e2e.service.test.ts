/** End-to-end against the real analysis service: load the case-study
 * fixture by URL, map the variables, read the DGM 2 table, and save a
 * plot. Exercises the same ApiClient the screens use, over real HTTP. */

import { spawn, type ChildProcess } from "node:child_process";
import { createServer, type Server } from "node:http";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";

const FIXTURE = join(__dirname, "..", "..", "tests", "data", "estimates.csv");
const SERVICE_PORT = 18760 + Math.floor(Math.random() * 120);
const FILES_PORT = SERVICE_PORT + 200;

let service: ChildProcess;
let files: Server;
let api: ApiClient;

async function waitForHealth(base: string, timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const resp = await fetch(`${base}/api/health`);
      if (resp.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("analysis service did not come up");
}

beforeAll(async () => {
  const fixture = readFileSync(FIXTURE);
  files = createServer((req, resp) => {
    if (req.url?.endsWith("/estimates.csv")) {
      resp.writeHead(200, { "Content-Type": "text/csv" });
      resp.end(fixture);
    } else {
      resp.writeHead(404);
      resp.end();
    }
  });
  await new Promise<void>((resolve) => files.listen(FILES_PORT, "127.0.0.1", resolve));

  service = spawn("simexplore", ["serve", "--port", String(SERVICE_PORT)], {
    stdio: "ignore",
  });
  api = new ApiClient(`http://127.0.0.1:${SERVICE_PORT}`);
  await waitForHealth(`http://127.0.0.1:${SERVICE_PORT}`);
});

afterAll(async () => {
  service?.kill();
  await new Promise<void>((resolve) => files.close(() => resolve()));
});

describe("end-to-end exploration flow", () => {
  let sessionId: string;

  it("loads the fixture by URL and reports its columns", async () => {
    const result = await api.uploadUrl(
      `http://127.0.0.1:${FILES_PORT}/data/estimates.csv`,
    );
    sessionId = result.session_id;
    expect(result.n_rows).toBe(9600);
    expect(result.columns.map((c) => c.name)).toEqual(
      ["dataset", "dgm", "model", "b", "se"],
    );
  });

  it("maps variables and enumerates the six strata", async () => {
    const mapped = await api.putMapping(sessionId, {
      estimate: "b",
      se: "se",
      truth: { value: -0.5 },
      method: "model",
      dgm: ["dgm"],
      rep: "dataset",
    });
    expect(mapped.strata).toHaveLength(6);
    expect(mapped.strata.every((s) => s.n === 1600)).toBe(true);
  });

  it("serves the published DGM 2 table cell-for-cell", async () => {
    const rows = await api.wideTable(sessionId, "2", {
      measures: ["bias", "emp_se", "mod_se", "coverage"],
    });
    const byLabel = new Map(rows.map((r) => [r["Performance Measure"], r]));
    expect(byLabel.get("Bias in point estimate")).toMatchObject({
      "1": "0.0494 (0.0035)", "2": "0.0048 (0.0038)", "3": "0.0062 (0.0038)",
    });
    expect(byLabel.get("Empirical standard error")).toMatchObject({
      "1": "0.1381 (0.0024)", "2": "0.1516 (0.0027)", "3": "0.1511 (0.0027)",
    });
    expect(byLabel.get("Model-based standard error")).toMatchObject({
      "1": "0.1539 (0.0001)", "2": "0.1541 (0.0001)", "3": "0.1542 (0.0001)",
    });
    expect(byLabel.get("Coverage of nominal 95% confidence interval")).toMatchObject({
      "1": "0.9600 (0.0049)", "2": "0.9556 (0.0051)", "3": "0.9575 (0.0050)",
    });
  });

  it("switching DGM yields a different table from the same session", async () => {
    const dgm1 = await api.wideTable(sessionId, "1", { measures: ["bias"] });
    const dgm2 = await api.wideTable(sessionId, "2", { measures: ["bias"] });
    expect(dgm1).not.toEqual(dgm2);
  });

  it("latex export matches the displayed cells", async () => {
    const latex = await api.latexTable(sessionId, "2", {
      measures: ["bias", "emp_se", "mod_se", "coverage"],
    });
    expect(latex).toContain("0.0494 (0.0035)");
    expect(latex).toContain("Coverage of nominal 95\\% confidence interval");
    expect(latex).toContain("\\toprule");
  });

  it("save-plot returns nonempty deterministic SVG bytes", async () => {
    const body = { measure: "bias", width: 640, height: 480, theme: "default" };
    const first = await api.renderPlot(sessionId, "forest", body);
    const second = await api.renderPlot(sessionId, "forest", body);
    expect(first.size).toBeGreaterThan(0);
    const firstText = await first.text();
    expect(firstText.startsWith("<?xml")).toBe(true);
    expect(firstText).toBe(await second.text()); // byte-identical render
  });

  it("serves raw pairs for the client-binned views", async () => {
    const payload = await api.plotData<{ points: unknown[] }>(
      sessionId, "density-pairs", { method_a: "1", method_b: "3" });
    expect(payload.points).toHaveLength(3200);
  });
});
