/** Minimal virtual nodes: renderers build plain objects, tests assert on
 * them directly, and `mount` turns them into real DOM in the browser. */

export interface VNode {
  tag: string;
  attrs: Record<string, string>;
  children: (VNode | string)[];
  on?: Record<string, (event: Event) => void>;
}

export function h(
  tag: string,
  attrs: Record<string, string> = {},
  children: (VNode | string)[] = [],
  on?: Record<string, (event: Event) => void>,
): VNode {
  return { tag, attrs, children, on };
}

const SVG_TAGS = new Set(["svg", "line", "circle", "text", "marker", "path", "defs"]);

export function mount(node: VNode | string, doc: Document): Node {
  if (typeof node === "string") {
    return doc.createTextNode(node);
  }
  const element = SVG_TAGS.has(node.tag)
    ? doc.createElementNS("http://www.w3.org/2000/svg", node.tag)
    : doc.createElement(node.tag);
  for (const [key, value] of Object.entries(node.attrs)) {
    element.setAttribute(key, value);
  }
  for (const [event, handler] of Object.entries(node.on ?? {})) {
    element.addEventListener(event, handler);
  }
  for (const child of node.children) {
    element.appendChild(mount(child, doc));
  }
  return element;
}

/** Depth-first search helper for tests. */
export function findAll(node: VNode | string, predicate: (n: VNode) => boolean): VNode[] {
  if (typeof node === "string") {
    return [];
  }
  const hits = predicate(node) ? [node] : [];
  return hits.concat(node.children.flatMap((child) => findAll(child, predicate)));
}

export function textOf(node: VNode | string): string {
  if (typeof node === "string") {
    return node;
  }
  return node.children.map(textOf).join("");
}
