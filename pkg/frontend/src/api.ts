/** Typed client for the analysis service. The UI computes no statistics:
 * every number it shows comes back from these calls. */

import type {
  MappingBody,
  MappingResult,
  PreviewPage,
  SessionInfo,
  UploadResult,
  WideTableRow,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function raise(resp: Response): Promise<never> {
  let code = "error";
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = await resp.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    /* non-json error body */
  }
  throw new ApiError(resp.status, code, message);
}

/** Wraps a request topic so only the latest response is ever delivered;
 * superseded responses resolve to null and are dropped by callers. */
export class LatestOnly {
  private token = 0;

  async run<T>(work: () => Promise<T>): Promise<T | null> {
    const mine = ++this.token;
    const result = await work();
    return mine === this.token ? result : null;
  }
}

export class ApiClient {
  /** In-flight GET de-duplication: concurrent identical requests share one fetch. */
  private inflight = new Map<string, Promise<unknown>>();

  constructor(
    private base = "",
    private fetcher: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async getJSON<T>(path: string): Promise<T> {
    const existing = this.inflight.get(path);
    if (existing) return existing as Promise<T>;
    const request = (async () => {
      try {
        const resp = await this.fetcher(this.base + path);
        if (!resp.ok) await raise(resp);
        return (await resp.json()) as T;
      } finally {
        this.inflight.delete(path);
      }
    })();
    this.inflight.set(path, request);
    return request;
  }

  private async send<T>(path: string, method: string, body: unknown): Promise<T> {
    const resp = await this.fetcher(this.base + path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await raise(resp);
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.getJSON("/api/health");
  }

  async uploadFile(file: File | Blob, name: string): Promise<UploadResult> {
    const form = new FormData();
    form.append("file", file, name);
    const resp = await this.fetcher(this.base + "/api/datasets", {
      method: "POST",
      body: form,
    });
    if (!resp.ok) await raise(resp);
    return (await resp.json()) as UploadResult;
  }

  uploadPasted(pasted: string): Promise<UploadResult> {
    return this.send("/api/datasets", "POST", { pasted });
  }

  uploadUrl(url: string): Promise<UploadResult> {
    return this.send("/api/datasets", "POST", { url });
  }

  session(id: string): Promise<SessionInfo> {
    return this.getJSON(`/api/datasets/${id}`);
  }

  putMapping(id: string, mapping: MappingBody): Promise<MappingResult> {
    return this.send(`/api/datasets/${id}/mapping`, "PUT", mapping);
  }

  putOptions(
    id: string,
    options: Partial<SessionInfo["options"]>,
  ): Promise<SessionInfo["options"]> {
    return this.send(`/api/datasets/${id}/options`, "PUT", options);
  }

  preview(id: string, offset: number, limit: number): Promise<PreviewPage> {
    return this.getJSON(`/api/datasets/${id}/preview?offset=${offset}&limit=${limit}`);
  }

  /** Formatted per-DGM table exactly as the service displays it. */
  wideTable(
    id: string,
    dgm: string,
    opts: { measures?: string[]; sigDigits?: number; mcse?: boolean } = {},
  ): Promise<WideTableRow[]> {
    const params = new URLSearchParams({
      what: "table",
      format: "json",
      orientation: "wide",
      dgm,
    });
    if (opts.measures?.length) params.set("measures", opts.measures.join(","));
    if (opts.sigDigits !== undefined) params.set("sig_digits", String(opts.sigDigits));
    if (opts.mcse !== undefined) params.set("mcse", opts.mcse ? "1" : "0");
    return this.getJSON(`/api/datasets/${id}/export?${params}`);
  }

  async latexTable(
    id: string,
    dgm: string,
    opts: { measures?: string[]; sigDigits?: number; mcse?: boolean } = {},
  ): Promise<string> {
    const params = new URLSearchParams({ what: "table", format: "latex", dgm });
    if (opts.measures?.length) params.set("measures", opts.measures.join(","));
    if (opts.sigDigits !== undefined) params.set("sig_digits", String(opts.sigDigits));
    if (opts.mcse !== undefined) params.set("mcse", opts.mcse ? "1" : "0");
    const resp = await this.fetcher(
      this.base + `/api/datasets/${id}/export?${params}`,
    );
    if (!resp.ok) await raise(resp);
    return resp.text();
  }

  exportHref(id: string, what: string, format: string, dgm?: string): string {
    const params = new URLSearchParams({ what, format });
    if (dgm) params.set("dgm", dgm);
    return `${this.base}/api/datasets/${id}/export?${params}`;
  }

  missingTable(id: string): Promise<{ summaries: import("./types.js").MissingSummaryRow[] }> {
    return this.getJSON(`/api/datasets/${id}/missing`);
  }

  missingBar(id: string, by: string): Promise<{ by: string; bars: import("./types.js").MissingBar[] }> {
    return this.getJSON(`/api/datasets/${id}/missing/bar?by=${by}`);
  }

  missingHeat(id: string, variable?: string): Promise<{ tiles: import("./types.js").MissingTile[] }> {
    const suffix = variable ? `?variable=${encodeURIComponent(variable)}` : "";
    return this.getJSON(`/api/datasets/${id}/missing/heat${suffix}`);
  }

  missingShadow(
    id: string,
    x: string,
    y: string,
  ): Promise<{ points: import("./types.js").ShadowPoint[] }> {
    const params = new URLSearchParams({ x, y });
    return this.getJSON(`/api/datasets/${id}/missing/shadow?${params}`);
  }

  plotData<T>(id: string, kind: string, params: Record<string, string>): Promise<T> {
    const query = new URLSearchParams(params).toString();
    return this.getJSON(`/api/datasets/${id}/plots/${kind}${query ? "?" + query : ""}`);
  }

  /** Server-side render for Save-plot; returns the exact bytes to download. */
  async renderPlot(
    id: string,
    kind: string,
    body: Record<string, unknown>,
  ): Promise<Blob> {
    const resp = await this.fetcher(
      this.base + `/api/datasets/${id}/plots/${kind}/render`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      },
    );
    if (!resp.ok) await raise(resp);
    return resp.blob();
  }
}
