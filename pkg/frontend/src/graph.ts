import { escapeHtml } from "./format.js";
import type { GraphDoc } from "./types.js";

const VAR_X = 220;
const EQ_X = 540;
const ROW_H = 26;
const TOP = 30;

function edgeClass(label: string): string {
  if (label === "input") return "edge input";
  if (label === "solves") return "edge solves";
  return "edge undirected";
}

/**
 * Two-column bipartite layout: variables on the left, equation instances on
 * the right, rows in the server's node order. Pure string construction so
 * the output is deterministic and testable without a DOM.
 */
export function renderGraphSvg(doc: GraphDoc): string {
  const variables = doc.nodes.filter((n) => n.kind === "Variable");
  const equations = doc.nodes.filter((n) => n.kind === "Equation");
  const rows = Math.max(variables.length, equations.length, 1);
  const height = TOP + rows * ROW_H;
  const width = 760;

  const pos = new Map<string, { x: number; y: number }>();
  variables.forEach((node, i) => pos.set(node.id, { x: VAR_X, y: TOP + i * ROW_H }));
  equations.forEach((node, i) => pos.set(node.id, { x: EQ_X, y: TOP + i * ROW_H }));

  const parts: string[] = [];
  parts.push(
    `<svg class="reasoning-graph" viewBox="0 0 ${width} ${height}" ` +
      `width="100%" role="img" aria-label="reasoning graph">`,
  );

  for (const edge of doc.edges) {
    const a = pos.get(edge.from);
    const b = pos.get(edge.to);
    if (!a || !b) continue;
    parts.push(
      `<line class="${edgeClass(edge.label)}" x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}"/>`,
    );
  }

  for (const node of variables) {
    const p = pos.get(node.id);
    if (!p) continue;
    const classes = ["node", "variable"];
    if (node.known) classes.push("known");
    if (node.determined) classes.push("determined");
    if (node.target) classes.push("target");
    parts.push(`<circle class="${classes.join(" ")}" cx="${p.x}" cy="${p.y}" r="6"/>`);
    parts.push(
      `<text class="label variable-label" x="${p.x - 12}" y="${p.y + 4}" text-anchor="end">` +
        `${escapeHtml(node.id)}</text>`,
    );
  }

  for (const node of equations) {
    const p = pos.get(node.id);
    if (!p) continue;
    const classes = ["node", "equation"];
    if (node.fired) classes.push("fired");
    parts.push(
      `<rect class="${classes.join(" ")}" x="${p.x - 6}" y="${p.y - 6}" width="12" height="12"/>`,
    );
    parts.push(
      `<text class="label equation-label" x="${p.x + 12}" y="${p.y + 4}">${escapeHtml(node.id)}</text>`,
    );
  }

  parts.push("</svg>");
  return parts.join("");
}
