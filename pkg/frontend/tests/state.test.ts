import { describe, expect, it } from "vitest";

import {
  DEFAULT_STATE,
  decodeState,
  encodeState,
  serviceKind,
  type AppState,
} from "../src/state.js";

describe("URL state round trip", () => {
  it("encodes defaults compactly", () => {
    expect(encodeState(DEFAULT_STATE)).toBe("#/data");
  });

  it("round-trips a fully populated exploration view", () => {
    const state: AppState = {
      ...DEFAULT_STATE,
      screen: "plots",
      session: "abc123",
      dgm: "2",
      kind: "zip",
      measure: "coverage",
      methodA: "1",
      methodB: "3",
      quantity: "se",
      missingView: "shadow",
      shadowX: "b",
      shadowY: "se",
      sigDigits: 3,
      mcse: false,
      measures: ["bias", "coverage"],
      theme: "dark",
      xlab: "log HR",
      ylab: "method",
      width: 800,
      height: 500,
      dpi: 300,
    };
    const decoded = decodeState(encodeState(state));
    expect(decoded).toEqual(state);
  });

  it("decodes unknown screens and parameters to defaults", () => {
    expect(decodeState("#/nonsense").screen).toBe("data");
    expect(decodeState("").screen).toBe("data");
    expect(decodeState("#/performance?session=s1").session).toBe("s1");
  });

  it("keeps dgm selection addressable", () => {
    const state = { ...DEFAULT_STATE, screen: "performance" as const, dgm: "2" };
    expect(encodeState(state)).toContain("dgm=2");
    expect(decodeState(encodeState(state)).dgm).toBe("2");
  });
});

describe("service kind mapping", () => {
  it("maps the client-binned kinds to density-pairs", () => {
    expect(serviceKind("hexbin")).toBe("density-pairs");
    expect(serviceKind("contour")).toBe("density-pairs");
    expect(serviceKind("forest")).toBe("forest");
  });
});
