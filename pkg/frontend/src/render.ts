/** View-only renderers for the model panel: nested tree blocks, a
 * directly-follows graph with count-scaled edges, and the metrics strip.
 * All functions are pure (VNode in, VNode out) and never call the server. */
import type { DfgDoc, DiscoverResponse, TreeDoc } from "./api.js";
import { h, type VNode } from "./vdom.js";

const EPSILON = 1e-9;

export function renderTree(node: TreeDoc): VNode {
  switch (node.op) {
    case "act":
      return h("span", { class: "block activity" }, [node.label ?? "?"]);
    case "tau":
      return h("span", { class: "block silent" }, ["τ"]);
    case "seq":
      return h("span", { class: "group seq" }, intersperse(children(node), "→"));
    case "xor":
      return h("span", { class: "group xor" }, [
        h("span", { class: "op" }, ["×"]),
        h("span", { class: "stack" }, children(node)),
      ]);
    case "par":
      return h("span", { class: "group par" }, [
        h("span", { class: "op" }, ["∧["]),
        ...intersperse(children(node), "∥"),
        h("span", { class: "op" }, ["]"]),
      ]);
    case "loop":
      return h("span", { class: "group loop" }, [
        h("span", { class: "op" }, ["↺"]),
        ...intersperse(children(node), "⇤"),
      ]);
    default:
      throw new Error(`unknown tree node kind ${node.op}`);
  }
}

function children(node: TreeDoc): VNode[] {
  return (node.children ?? []).map(renderTree);
}

function intersperse(nodes: VNode[], separator: string): (VNode | string)[] {
  const out: (VNode | string)[] = [];
  nodes.forEach((node, index) => {
    if (index > 0) {
      out.push(h("span", { class: "sep" }, [separator]));
    }
    out.push(node);
  });
  return out;
}

/** Circular layout; edge stroke width grows with the directly-follows count. */
export function renderDfg(dfg: DfgDoc, size = 420): VNode {
  const nodes = [...dfg.nodes].sort();
  const radius = size / 2 - 40;
  const center = size / 2;
  const position = new Map<string, { x: number; y: number }>();
  nodes.forEach((name, index) => {
    const angle = (2 * Math.PI * index) / nodes.length - Math.PI / 2;
    position.set(name, {
      x: center + radius * Math.cos(angle),
      y: center + radius * Math.sin(angle),
    });
  });
  const maxCount = Math.max(1, ...dfg.edges.map((edge) => edge.count));
  const edges = dfg.edges.map((edge) => {
    const from = position.get(edge.source)!;
    const to = position.get(edge.target)!;
    return h("line", {
      x1: from.x.toFixed(1),
      y1: from.y.toFixed(1),
      x2: to.x.toFixed(1),
      y2: to.y.toFixed(1),
      class: "dfg-edge",
      "data-count": String(edge.count),
      "stroke-width": (1 + (4 * edge.count) / maxCount).toFixed(2),
    });
  });
  const circles = nodes.flatMap((name) => {
    const at = position.get(name)!;
    return [
      h("circle", { cx: at.x.toFixed(1), cy: at.y.toFixed(1), r: "16", class: "dfg-node" }),
      h("text", { x: at.x.toFixed(1), y: (at.y + 4).toFixed(1), class: "dfg-label" }, [name]),
    ];
  });
  return h("svg", { viewBox: `0 0 ${size} ${size}`, class: "dfg" }, [...edges, ...circles]);
}

export interface MetricsSnapshot {
  nondeterminism: number | null;
  fitness: number;
  flowerBaseline: number;
  explainedRatio: number;
}

export function renderMetrics(metrics: MetricsSnapshot): VNode {
  const rows: VNode[] = [
    metricRow("nondeterminism", metrics.nondeterminism),
    metricRow("fitness", metrics.fitness),
    metricRow("flower baseline", metrics.flowerBaseline),
    metricRow("activities explained", metrics.explainedRatio),
  ];
  // The flower model enables every activity everywhere; when the replayed
  // value reaches the server-reported baseline the model says nothing.
  if (
    metrics.nondeterminism !== null &&
    Math.abs(metrics.nondeterminism - metrics.flowerBaseline) < EPSILON
  ) {
    rows.push(h("div", { class: "badge all-behavior" }, ["all-behavior model"]));
  }
  return h("div", { class: "metrics" }, rows);
}

function metricRow(label: string, value: number | null): VNode {
  return h("div", { class: "metric" }, [
    h("span", { class: "metric-label" }, [label]),
    h("span", { class: "metric-value" }, [value === null ? "n/a" : formatNumber(value)]),
  ]);
}

export function formatNumber(value: number): string {
  return Number.isInteger(value) ? String(value) : value.toFixed(3);
}

export interface ModelView {
  mode: "tree" | "dfg";
  payload: DiscoverResponse;
}

/** Renders the last good model; malformed payloads raise so the caller can
 * keep the previous rendering and show the error panel instead. */
export function renderModel(view: ModelView): VNode {
  const payload = view.payload;
  if (!payload || !payload.tree || !payload.dfg) {
    throw new Error("malformed discovery payload");
  }
  const body = view.mode === "tree" ? renderTree(payload.tree) : renderDfg(payload.dfg);
  return h("div", { class: `model ${view.mode}` }, [body]);
}

export function renderErrorPanel(message: string): VNode {
  return h("div", { class: "error-panel" }, [message]);
}
