// @vitest-environment jsdom
import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderDataScreen, mappingFromForm } from "../src/screens/data.js";
import { renderPlots, plotParams } from "../src/screens/plots.js";
import { renderPlot } from "../src/plots/render.js";
import { DEFAULT_STATE, type AppState } from "../src/state.js";
import type { Column, ForestPayload, SessionInfo, ZipPayload } from "../src/types.js";

const COLUMNS: Column[] = [
  { name: "dataset", kind: "numeric" },
  { name: "dgm", kind: "numeric" },
  { name: "model", kind: "numeric" },
  { name: "b", kind: "numeric" },
  { name: "se", kind: "numeric" },
];

const SESSION: SessionInfo = {
  session_id: "s1",
  source_name: null,
  columns: COLUMNS,
  n_rows: 10,
  mapping: { estimate: "b" },
  strata: [
    { dgm: ["1"], method: "1", n: 5 },
    { dgm: ["2"], method: "1", n: 5 },
    { dgm: ["2"], method: "3", n: 5 },
  ],
  options: { sig_digits: 4, include_mcse: true, caption: "", measures: null },
};

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("data screen", () => {
  it("populates the mapping selectors from the reported columns", () => {
    const root = document.createElement("div");
    document.body.append(root);
    renderDataScreen(root, {
      api: new ApiClient("", async () => new Response("{}")),
      state: { ...DEFAULT_STATE, session: "s1" },
      setState: () => {},
      columns: COLUMNS,
      onLoaded: () => {},
      onMapped: () => {},
      notify: () => {},
    });
    const options = [...root.querySelectorAll("#map-estimate option")].map(
      (o) => (o as HTMLOptionElement).value,
    );
    expect(options).toEqual(["", "dataset", "dgm", "model", "b", "se"]);
    const analyze = root.querySelector("#analyze-btn") as HTMLButtonElement;
    expect(analyze.hasAttribute("disabled")).toBe(true);

    const estimate = root.querySelector("#map-estimate") as HTMLSelectElement;
    estimate.value = "b";
    estimate.dispatchEvent(new Event("change"));
    expect(analyze.hasAttribute("disabled")).toBe(false);

    estimate.value = "";
    estimate.dispatchEvent(new Event("change"));
    expect(analyze.hasAttribute("disabled")).toBe(true);
  });

  it("collects the mapping body from the form", () => {
    const root = document.createElement("div");
    document.body.append(root);
    renderDataScreen(root, {
      api: new ApiClient("", async () => new Response("{}")),
      state: { ...DEFAULT_STATE, session: "s1" },
      setState: () => {},
      columns: COLUMNS,
      onLoaded: () => {},
      onMapped: () => {},
      notify: () => {},
    });
    const form = root.querySelector("#mapping-form") as HTMLElement;
    (form.querySelector('[name="map-estimate"]') as HTMLSelectElement).value = "b";
    (form.querySelector('[name="map-se"]') as HTMLSelectElement).value = "se";
    (form.querySelector('[name="map-truth-mode"]') as HTMLSelectElement).value = "value";
    (form.querySelector('[name="map-truth-value"]') as HTMLInputElement).value = "-0.5";
    (form.querySelector('[name="map-method"]') as HTMLSelectElement).value = "model";
    (form.querySelector('[name="map-dgm"]') as HTMLInputElement).value = "dgm";
    (form.querySelector('[name="map-rep"]') as HTMLSelectElement).value = "dataset";

    expect(mappingFromForm(form)).toEqual({
      estimate: "b",
      se: "se",
      truth: { value: -0.5 },
      method: "model",
      reference: null,
      dgm: ["dgm"],
      df: null,
      rep: "dataset",
      alpha: 0.05,
    });
  });
});

describe("missing screen", () => {
  it("shows the no-missing-data banner for a complete dataset", async () => {
    const { renderMissing } = await import("../src/screens/missing.js");
    const api = new ApiClient("", async (input) => {
      const url = String(input);
      if (url.includes("/missing") && !url.includes("/missing/")) {
        return new Response(JSON.stringify({
          summaries: [
            { variable: "b", dgm: ["1"], method: "1", n_missing: 0,
              prop_missing: 0, n_cumulative: 0 },
            { variable: "se", dgm: ["1"], method: "1", n_missing: 0,
              prop_missing: 0, n_cumulative: 0 },
          ],
        }), { status: 200 });
      }
      throw new Error(`unexpected ${url}`);
    });
    const root = document.createElement("div");
    document.body.append(root);
    const state: AppState = { ...DEFAULT_STATE, session: "s1", missingView: "table" };
    await renderMissing(root, {
      api,
      state,
      setState: (patch) => Object.assign(state, patch),
      session: SESSION,
      notify: () => {},
    });
    expect(root.querySelector("#no-missing-banner")?.textContent).toContain(
      "No missing data");
    expect(root.querySelectorAll("#missing-table tbody tr")).toHaveLength(2);
  });
});

describe("plots screen save-plot", () => {
  it("downloads exactly the bytes the render endpoint returns", async () => {
    const svgBytes = '<?xml version="1.0"?><svg xmlns="http://www.w3.org/2000/svg"></svg>';
    const forest: ForestPayload = {
      kind: "forest",
      points: [
        { dgm: ["1"], method: "1", value: 0.1, mcse: 0.01, lower: 0.08, upper: 0.12 },
      ],
    };
    const api = new ApiClient("", async (input, init) => {
      const url = String(input);
      if (url.includes("/plots/forest/render")) {
        expect(init?.method).toBe("POST");
        return new Response(svgBytes, {
          status: 200,
          headers: { "Content-Type": "image/svg+xml" },
        });
      }
      if (url.includes("/plots/forest")) {
        return new Response(JSON.stringify(forest), { status: 200 });
      }
      throw new Error(`unexpected ${url}`);
    });

    const captured: Blob[] = [];
    (URL as unknown as Record<string, unknown>).createObjectURL = (blob: Blob) => {
      captured.push(blob);
      return "blob:mock";
    };
    (URL as unknown as Record<string, unknown>).revokeObjectURL = () => {};

    const root = document.createElement("div");
    document.body.append(root);
    const state: AppState = { ...DEFAULT_STATE, session: "s1", kind: "forest" };
    await renderPlots(root, {
      api,
      state,
      setState: (patch) => Object.assign(state, patch),
      session: SESSION,
      notify: () => {},
    });

    (root.querySelector("#save-plot") as HTMLButtonElement).click();
    await new Promise((resolve) => setTimeout(resolve, 20));

    expect(captured).toHaveLength(1);
    expect(captured[0].size).toBeGreaterThan(0);
    expect(await captured[0].text()).toBe(svgBytes); // byte-for-byte the response
  });

  it("derives request parameters from the state per kind", () => {
    const forest = plotParams({ ...DEFAULT_STATE, kind: "forest", measure: "bias", dgm: "2" }, SESSION);
    expect(forest).toEqual({ measure: "bias", dgm: "2" });
    const scatter = plotParams({ ...DEFAULT_STATE, kind: "scatter", methodA: "1", methodB: "3" }, SESSION);
    expect(scatter).toEqual({ method_a: "1", method_b: "3", quantity: "estimate" });
    const hexbin = plotParams({ ...DEFAULT_STATE, kind: "hexbin" }, SESSION);
    expect(hexbin.method_a).toBe("1"); // defaults to the first two methods
    expect(hexbin.method_b).toBe("3");
  });
});

describe("plot components", () => {
  const opts = { width: 400, height: 300, theme: "default" };

  it("forest draws one marker per stratum and exact interval bars", () => {
    const payload: ForestPayload = {
      kind: "forest",
      points: [
        { dgm: ["1"], method: "1", value: 0.1, mcse: 0.01, lower: 0.08, upper: 0.12 },
        { dgm: ["2"], method: "1", value: 0.2, mcse: 0.01, lower: 0.18, upper: 0.22 },
        { dgm: ["2"], method: "3", value: 0.3, mcse: 0.01, lower: 0.28, upper: 0.32 },
      ],
    };
    const svg = renderPlot("forest", payload, opts);
    expect(svg.querySelectorAll("circle")).toHaveLength(3);
  });

  it("zip colors covering and missing stripes differently", () => {
    const payload: ZipPayload = {
      kind: "zip",
      stripes: [
        { dgm: ["1"], method: "1", rank_percentile: 50, lower: -1, upper: 1, covers: true },
        { dgm: ["1"], method: "1", rank_percentile: 100, lower: 2, upper: 3, covers: false },
      ],
    };
    const svg = renderPlot("zip", payload, opts);
    const lines = [...svg.querySelectorAll("line")];
    const colors = new Set(lines.map((l) => l.getAttribute("stroke")));
    expect(colors.size).toBe(2);
  });

  it("labels pass through verbatim", () => {
    const payload: ForestPayload = {
      kind: "forest",
      points: [{ dgm: [], method: "A", value: 1, mcse: 0.1, lower: 0.8, upper: 1.2 }],
    };
    const svg = renderPlot("forest", payload, { ...opts, xlab: "Bias & more" });
    expect(svg.textContent).toContain("Bias & more");
  });
});
