import type { SceneGraphJson } from "./types.js";

/** The slice of CanvasRenderingContext2D the schematic needs (stubable in tests). */
export interface DrawContext {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  fillText(text: string, x: number, y: number): void;
}

const BACKGROUND = "#fafafa";
const BOX = "#607080";
const HIGHLIGHT = "#e07020";
const LABEL = "#202020";

function labelTint(label: string): string {
  let h = 0;
  for (let i = 0; i < label.length; i++) h = (h * 31 + label.charCodeAt(i)) >>> 0;
  return `hsla(${h % 360}, 45%, 60%, 0.25)`;
}

/**
 * Draw a scene graph as its box layout: every object's bbox scaled to the
 * canvas, tinted by label, with bound objects outlined in the highlight
 * color. This is the stand-in thumbnail for scenes with no image file.
 */
export function drawSchematic(
  ctx: DrawContext,
  graph: SceneGraphJson,
  width: number,
  height: number,
  highlightIds: ReadonlySet<number> = new Set(),
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = BACKGROUND;
  ctx.fillRect(0, 0, width, height);
  ctx.font = `${Math.max(10, Math.round(height / 24))}px sans-serif`;

  // larger objects first so small ones stay visible on top
  const byArea = [...graph.objects].sort((a, b) => b.area - a.area);
  for (const obj of byArea) {
    const [x0, y0, x1, y1] = obj.bbox;
    const x = x0 * width;
    const y = y0 * height;
    const w = (x1 - x0) * width;
    const h = (y1 - y0) * height;
    const bound = highlightIds.has(obj.object_id);

    ctx.fillStyle = labelTint(obj.label);
    ctx.fillRect(x, y, w, h);
    ctx.strokeStyle = bound ? HIGHLIGHT : BOX;
    ctx.lineWidth = bound ? 3 : 1;
    ctx.strokeRect(x, y, w, h);
    ctx.fillStyle = LABEL;
    ctx.fillText(obj.label, x + 3, y + 12);
  }
}

/** Render into a fresh canvas element; returns null where 2d contexts
 * are unavailable (headless DOMs), letting callers keep a text fallback. */
export function schematicCanvas(
  doc: Document,
  graph: SceneGraphJson,
  width: number,
  height: number,
  highlightIds?: ReadonlySet<number>,
): HTMLCanvasElement | null {
  const canvas = doc.createElement("canvas");
  canvas.width = width;
  canvas.height = height;
  canvas.className = "schematic";
  const ctx = canvas.getContext("2d");
  if (!ctx) return null;
  drawSchematic(ctx, graph, width, height, highlightIds);
  return canvas;
}
