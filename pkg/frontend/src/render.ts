/** Canvas adapter: draws a computed Scene. Edges go beneath nodes; larger
 * circles are drawn first so small ones stay clickable on top. */

import type { Scene } from "./scene.js";

export const BACKGROUND = "#14161c";
const EDGE_COLOR = "rgba(160, 170, 190, 0.16)";
const EDGE_DIMMED = "rgba(160, 170, 190, 0.03)";
const LABEL_COLOR = "#dde3ee";
const HALO_COLOR = "#ffffff";
const DIMMED_ALPHA = 0.12;

export function drawScene(ctx: CanvasRenderingContext2D, scene: Scene, width: number, height: number): void {
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, width, height);

  ctx.lineWidth = 1;
  for (const edge of scene.edges) {
    ctx.strokeStyle = edge.dimmed ? EDGE_DIMMED : EDGE_COLOR;
    ctx.beginPath();
    ctx.moveTo(edge.x1, edge.y1);
    ctx.lineTo(edge.x2, edge.y2);
    ctx.stroke();
  }

  const ordered = [...scene.circles].sort((a, b) => b.r - a.r);
  for (const c of ordered) {
    ctx.globalAlpha = c.dimmed ? DIMMED_ALPHA : 1;
    ctx.fillStyle = c.color;
    ctx.beginPath();
    ctx.arc(c.x, c.y, c.r, 0, Math.PI * 2);
    ctx.fill();
    if (c.selected) {
      ctx.globalAlpha = 1;
      ctx.strokeStyle = HALO_COLOR;
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.arc(c.x, c.y, c.r + 3, 0, Math.PI * 2);
      ctx.stroke();
      ctx.lineWidth = 1;
    }
  }
  ctx.globalAlpha = 1;

  ctx.fillStyle = LABEL_COLOR;
  ctx.font = "11px system-ui, sans-serif";
  ctx.textAlign = "center";
  for (const label of scene.labels) {
    ctx.fillText(label.text, label.x, label.y - 8);
  }
}
