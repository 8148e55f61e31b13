/** Browser bootstrap: renders the whole view from state on every change. */
import { ApiClient } from "./api.js";
import { App } from "./app.js";
import { formatNumber, renderErrorPanel, renderMetrics, renderModel } from "./render.js";
import { explainedRatio, type ViewState } from "./state.js";
import type { SortColumn } from "./table.js";
import { h, mount, type VNode } from "./vdom.js";

const COLUMNS: { key: SortColumn; label: string }[] = [
  { key: "entropy", label: "entropy" },
  { key: "frequency", label: "frequency" },
  { key: "rank", label: "removal rank" },
  { key: "name", label: "activity" },
];

function renderTable(app: App, state: ViewState): VNode {
  const header = h("tr", {}, [
    h("th", {}, ["on"]),
    ...COLUMNS.map(({ key, label }) =>
      h(
        "th",
        { class: state.sortColumn === key ? "sorted" : "", "data-column": key },
        [label],
        { click: () => app.sortBy(key) },
      ),
    ),
  ]);
  const body = state.rows.map((row) =>
    h("tr", { class: row.enabled ? "" : "disabled-row", "data-activity": row.name }, [
      h(
        "td",
        {},
        [
          h(
            "input",
            row.enabled
              ? { type: "checkbox", checked: "checked" }
              : { type: "checkbox" },
            [],
            { change: () => app.toggleActivity(row.name) },
          ),
        ],
      ),
      h("td", { class: "num" }, [formatNumber(row.entropy)]),
      h("td", { class: "num" }, [String(row.frequency)]),
      h("td", { class: "num" }, [String(row.removalRank)]),
      h("td", {}, [row.name]),
    ]),
  );
  return h("table", { class: "activities" }, [header, ...body]);
}

function renderControls(app: App, state: ViewState): VNode {
  const methods = [
    "direct-entropy",
    "indirect-entropy",
    "least-frequent-first",
    "most-frequent-first",
  ];
  return h("div", { class: "controls" }, [
    h(
      "select",
      { id: "method" },
      methods.map((m) =>
        h("option", state.method === m ? { value: m, selected: "selected" } : { value: m }, [m]),
      ),
      {
        change: (event) =>
          void app.selectMethod((event.target as HTMLSelectElement).value, state.laplace),
      },
    ),
    h("label", {}, [
      h(
        "input",
        state.laplace
          ? { type: "checkbox", id: "laplace", checked: "checked" }
          : { type: "checkbox", id: "laplace" },
        [],
        { change: () => void app.selectMethod(state.method, !state.laplace) },
      ),
      "Laplace smoothing",
    ]),
    h("button", { id: "mode-tree" }, ["tree"], { click: () => app.setRenderMode("tree") }),
    h("button", { id: "mode-dfg" }, ["dfg"], { click: () => app.setRenderMode("dfg") }),
    h("button", { id: "disable-top" }, ["disable top 1"], { click: () => app.disableTopN(1) }),
  ]);
}

export function renderApp(app: App, state: ViewState): VNode {
  const pieces: VNode[] = [renderControls(app, state)];
  if (state.blockedMessage) {
    pieces.push(h("div", { class: "blocked" }, [state.blockedMessage]));
  }
  if (state.error) {
    pieces.push(renderErrorPanel(state.error));
  }
  pieces.push(renderTable(app, state));
  if (state.discoveryPending) {
    pieces.push(h("div", { class: "pending" }, ["rediscovering…"]));
  }
  if (state.model) {
    pieces.push(renderModel({ mode: state.renderMode, payload: state.model }));
    pieces.push(
      renderMetrics({
        nondeterminism: state.model.nondeterminism,
        fitness: state.model.fitness_fraction,
        flowerBaseline: state.model.flower_baseline,
        explainedRatio: explainedRatio(state.alphabet, state.disabled),
      }),
    );
  }
  return h("div", { class: "chaosfilter" }, pieces);
}

export function boot(doc: Document, baseUrl: string): App {
  const api = new ApiClient(baseUrl);
  const app = new App(api);
  const root = doc.getElementById("app");
  if (!root) {
    throw new Error("missing #app element");
  }
  app.onChange = (state) => {
    root.replaceChildren(mount(renderApp(app, state), doc));
  };

  const input = doc.getElementById("log-upload") as HTMLInputElement | null;
  input?.addEventListener("change", async () => {
    const file = input.files?.[0];
    if (!file) {
      return;
    }
    const type = file.name.endsWith(".csv")
      ? "text/csv"
      : file.name.endsWith(".xes")
        ? "application/xml"
        : "text/plain";
    await app.upload(await file.text(), type);
  });
  return app;
}
