/** View-uploaded-data screen: paginated, sortable, filterable table over
 * the raw rows served by the preview endpoint. Sorting and filtering are
 * pure row rearrangement, computed over the fetched window. */

import type { ApiClient } from "../api.js";
import { clear, el } from "../dom.js";

export interface TableView {
  sortColumn: number | null;
  sortAscending: boolean;
  filter: string;
}

/** Numeric-aware comparison: numbers order numerically, text lexically. */
export function compareCells(a: string, b: string): number {
  const na = Number(a);
  const nb = Number(b);
  const aNum = a.trim() !== "" && Number.isFinite(na);
  const bNum = b.trim() !== "" && Number.isFinite(nb);
  if (aNum && bNum) return na - nb;
  if (aNum !== bNum) return aNum ? -1 : 1;
  return a < b ? -1 : a > b ? 1 : 0;
}

export function arrangeRows(rows: string[][], view: TableView): string[][] {
  let out = rows;
  if (view.filter) {
    const needle = view.filter.toLowerCase();
    out = out.filter((row) => row.some((cell) => cell.toLowerCase().includes(needle)));
  }
  if (view.sortColumn !== null) {
    const col = view.sortColumn;
    const sign = view.sortAscending ? 1 : -1;
    out = [...out].sort((a, b) => sign * compareCells(a[col], b[col]));
  }
  return out;
}

export interface ViewDataCtx {
  api: ApiClient;
  session: string;
  pageSize?: number;
}

export async function renderViewData(root: HTMLElement, ctx: ViewDataCtx): Promise<void> {
  clear(root);
  root.append(el("h2", {}, "View uploaded data"));
  const pageSize = ctx.pageSize ?? 50;
  const view: TableView = { sortColumn: null, sortAscending: true, filter: "" };
  let offset = 0;

  const info = el("span", { id: "page-info", class: "hint" });
  const filterInput = el("input", {
    type: "search",
    id: "row-filter",
    placeholder: "filter rows…",
  });
  const prev = el("button", { id: "prev-page" }, "‹ prev");
  const next = el("button", { id: "next-page" }, "next ›");
  const tableHost = el("div", { class: "table-host" });
  root.append(
    el("div", { class: "toolbar" }, filterInput, prev, next, info),
    tableHost,
  );

  async function draw(): Promise<void> {
    const page = await ctx.api.preview(ctx.session, offset, pageSize);
    clear(tableHost);
    const header = el("tr", {});
    page.columns.forEach((name, index) => {
      const arrow =
        view.sortColumn === index ? (view.sortAscending ? " ↑" : " ↓") : "";
      header.append(
        el("th", {
          onclick: () => {
            if (view.sortColumn === index) view.sortAscending = !view.sortAscending;
            else {
              view.sortColumn = index;
              view.sortAscending = true;
            }
            void draw();
          },
        }, name + arrow),
      );
    });
    const body = el("tbody", {});
    for (const row of arrangeRows(page.rows, view)) {
      body.append(el("tr", {}, ...row.map((cell) => el("td", {}, cell))));
    }
    tableHost.append(el("table", { class: "data-table", id: "data-table" },
      el("thead", {}, header), body));
    info.textContent = `rows ${page.offset + 1}–${page.offset + page.rows.length} of ${page.total}`;
    prev.toggleAttribute("disabled", offset === 0);
    next.toggleAttribute("disabled", offset + pageSize >= page.total);
  }

  filterInput.addEventListener("input", () => {
    view.filter = (filterInput as HTMLInputElement).value;
    void draw();
  });
  prev.addEventListener("click", () => {
    offset = Math.max(0, offset - pageSize);
    void draw();
  });
  next.addEventListener("click", () => {
    offset += pageSize;
    void draw();
  });

  await draw();
}
