/** Application shell: sidebar navigation plus hash-routed screens. All
 * selection state lives in the URL, so views are shareable; screen
 * changes and in-screen updates never reload the page. */

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import { renderDataScreen } from "./screens/data.js";
import { renderGuide } from "./screens/guide.js";
import { renderMissing } from "./screens/missing.js";
import { renderOptions } from "./screens/options.js";
import { renderPerformance } from "./screens/performance.js";
import { renderPlots } from "./screens/plots.js";
import { renderViewData } from "./screens/viewData.js";
import {
  decodeState,
  encodeState,
  SCREENS,
  type AppState,
  type Screen,
} from "./state.js";
import type { Column, SessionInfo, UploadResult } from "./types.js";

const SCREEN_TITLES: Record<Screen, string> = {
  "data": "Data",
  "view-data": "View uploaded data",
  "missing": "Missing data",
  "performance": "Performance measures",
  "plots": "Plots",
  "options": "Options",
  "guide": "User guide",
};

export class App {
  state: AppState;
  session: SessionInfo | null = null;
  columns: Column[] | null = null;
  private rendering = false;

  constructor(
    private root: HTMLElement,
    private api = new ApiClient(),
  ) {
    this.state = decodeState(location.hash);
    window.addEventListener("hashchange", () => {
      const next = decodeState(location.hash);
      const sessionChanged = next.session !== this.state.session;
      this.state = next;
      if (sessionChanged) this.session = null;
      void this.render();
    });
  }

  setState(patch: Partial<AppState>): void {
    this.state = { ...this.state, ...patch };
    const encoded = encodeState(this.state);
    if (location.hash !== encoded) {
      // update the address without triggering a re-render storm
      history.replaceState(null, "", encoded);
    }
  }

  navigate(screen: Screen): void {
    this.state = { ...this.state, screen };
    location.hash = encodeState(this.state);
  }

  notify(message: string, isError = false): void {
    const status = document.getElementById("app-status");
    if (status) {
      status.textContent = message;
      status.className = isError ? "status error" : "status";
    }
  }

  private async ensureSession(): Promise<void> {
    if (this.session || !this.state.session) return;
    try {
      this.session = await this.api.session(this.state.session);
      this.columns = this.session.columns;
    } catch {
      this.session = null;
    }
  }

  async render(): Promise<void> {
    if (this.rendering) return;
    this.rendering = true;
    try {
      await this.ensureSession();
      clear(this.root);
      const nav = el("nav", { class: "sidebar" },
        el("h1", {}, "simexplore"),
        ...SCREENS.map((screen) =>
          el("button", {
            class: screen === this.state.screen ? "nav active" : "nav",
            "data-screen": screen,
            onclick: () => this.navigate(screen),
          }, SCREEN_TITLES[screen])),
        el("p", { id: "app-status", class: "status" }),
      );
      const mainHost = el("main", { class: "main", id: "screen-host" });
      this.root.append(nav, mainHost);

      const ctx = {
        api: this.api,
        state: this.state,
        setState: (patch: Partial<AppState>) => this.setState(patch),
        notify: (message: string, isError = false) => this.notify(message, isError),
      };

      switch (this.state.screen) {
        case "data":
          renderDataScreen(mainHost, {
            ...ctx,
            columns: this.columns,
            onLoaded: (result: UploadResult) => {
              this.columns = result.columns;
              this.session = null;
              this.setState({ session: result.session_id, dgm: null });
              void this.render2();
            },
            onMapped: () => {
              this.session = null;
              this.navigate("performance");
            },
          });
          break;
        case "view-data":
          if (this.state.session) {
            await renderViewData(mainHost, { api: this.api, session: this.state.session });
          } else {
            mainHost.append(el("p", { class: "hint" }, "Load a dataset first."));
          }
          break;
        case "missing":
          if (this.session) {
            await renderMissing(mainHost, { ...ctx, session: this.session });
          } else {
            mainHost.append(el("p", { class: "hint" }, "Load a dataset first."));
          }
          break;
        case "performance":
          if (this.session) {
            await renderPerformance(mainHost, { ...ctx, session: this.session });
          } else {
            mainHost.append(el("p", { class: "hint" }, "Load a dataset first."));
          }
          break;
        case "plots":
          if (this.session) {
            await renderPlots(mainHost, { ...ctx, session: this.session });
          } else {
            mainHost.append(el("p", { class: "hint" }, "Load a dataset first."));
          }
          break;
        case "options":
          renderOptions(mainHost, ctx);
          break;
        case "guide":
          renderGuide(mainHost);
          break;
      }
    } finally {
      this.rendering = false;
    }
  }

  /** Re-render after the guard released (used by nested update flows). */
  private async render2(): Promise<void> {
    await Promise.resolve();
    await this.render();
  }
}

export function mount(root: HTMLElement): App {
  const app = new App(root);
  void app.render();
  return app;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app")!);
}
