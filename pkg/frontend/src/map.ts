/** Pure SVG renderer for the top-down world map.
 *
 * Top-down 2-D view built from node x/y only. North (+y) points up, so the
 * vertical axis is flipped when projecting to screen space. The current
 * position is always marked; the goal node is marked only once the session
 * is DONE and the server has revealed it in the final report.
 */

import type { SessionView, WorldMap } from "./types.js";

export interface RenderOptions {
  width?: number;
  height?: number;
  pad?: number;
}

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function fmt(x: number): string {
  return Number(x.toFixed(2)).toString();
}

export function renderMapSvg(
  map: WorldMap,
  view: SessionView | null,
  opts: RenderOptions = {},
): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 480;
  const pad = opts.pad ?? 32;

  const xs = map.nodes.map((n) => n.x);
  const ys = map.nodes.map((n) => n.y);
  const minX = Math.min(...xs, 0);
  const maxX = Math.max(...xs, 0);
  const minY = Math.min(...ys, 0);
  const maxY = Math.max(...ys, 0);
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  const scale = Math.min((width - 2 * pad) / spanX, (height - 2 * pad) / spanY);

  const px = (x: number) => pad + (x - minX) * scale;
  // +y is north; flip so north renders upward
  const py = (y: number) => height - pad - (y - minY) * scale;

  const pos = new Map(map.nodes.map((n) => [n.id, { x: px(n.x), y: py(n.y) }]));
  const options = new Set(
    view && view.phase === "INSTRUCTED"
      ? view.neighbor_options.map((o) => o.to)
      : [],
  );
  const goal =
    view && view.phase === "DONE" && view.final_report
      ? view.final_report.goal
      : null;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" data-world-id="${esc(map.world_id)}">`,
  );

  for (const e of map.edges) {
    const a = pos.get(e.a);
    const b = pos.get(e.b);
    if (!a || !b) {
      continue;
    }
    parts.push(
      `<line class="edge" x1="${fmt(a.x)}" y1="${fmt(a.y)}" ` +
        `x2="${fmt(b.x)}" y2="${fmt(b.y)}"/>`,
    );
    if (e.labels.length > 0) {
      const mx = (a.x + b.x) / 2;
      const my = (a.y + b.y) / 2;
      parts.push(
        `<text class="edge-label" x="${fmt(mx)}" y="${fmt(my)}">` +
          `${esc(e.labels.join(", "))}</text>`,
      );
    }
  }

  for (const n of map.nodes) {
    const p = pos.get(n.id)!;
    const classes = ["node"];
    if (options.has(n.id)) {
      classes.push("option");
    }
    const title = n.labels.length > 0 ? ` data-labels="${esc(n.labels.join(", "))}"` : "";
    parts.push(
      `<g class="${classes.join(" ")}" data-node-id="${esc(n.id)}"${title}>` +
        `<circle cx="${fmt(p.x)}" cy="${fmt(p.y)}" r="7"/>` +
        `<text class="node-label" x="${fmt(p.x + 10)}" y="${fmt(p.y - 10)}">` +
        `${esc(n.id)}</text></g>`,
    );
  }

  if (view) {
    const here = pos.get(view.user_node);
    if (here) {
      parts.push(
        `<circle class="here" data-marker="here" cx="${fmt(here.x)}" ` +
          `cy="${fmt(here.y)}" r="12"/>`,
      );
    }
  }
  if (goal !== null) {
    const gp = pos.get(goal);
    if (gp) {
      parts.push(
        `<circle class="goal" data-marker="goal" cx="${fmt(gp.x)}" ` +
          `cy="${fmt(gp.y)}" r="12"/>`,
      );
    }
  }

  parts.push("</svg>");
  return parts.join("");
}
