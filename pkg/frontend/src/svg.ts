/** Minimal SVG string builder. Coordinates are written with a fixed number of
 *  decimals so the same figure always serializes to the same bytes. */

export type Attrs = Record<string, string | number>;

export function num(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function attrText(attrs: Attrs): string {
  let out = "";
  for (const key of Object.keys(attrs)) {
    const v = attrs[key] as string | number;
    out += ` ${key}="${typeof v === "number" ? num(v) : esc(v)}"`;
  }
  return out;
}

export function tag(name: string, attrs: Attrs, content?: string): string {
  if (content === undefined) return `<${name}${attrText(attrs)}/>`;
  return `<${name}${attrText(attrs)}>${content}</${name}>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, attrs: Attrs): string {
  return tag("line", { x1, y1, x2, y2, ...attrs });
}

export function polyline(
  points: ReadonlyArray<readonly [number, number]>,
  attrs: Attrs,
): string {
  const pts = points.map(([x, y]) => `${num(x)},${num(y)}`).join(" ");
  return tag("polyline", { points: pts, fill: "none", ...attrs });
}

export function circle(cx: number, cy: number, r: number, attrs: Attrs): string {
  return tag("circle", { cx, cy, r, ...attrs });
}

export function rect(
  x: number,
  y: number,
  width: number,
  height: number,
  attrs: Attrs,
): string {
  return tag("rect", { x, y, width, height, ...attrs });
}

export function text(x: number, y: number, content: string, attrs: Attrs): string {
  return tag("text", { x, y, ...attrs }, esc(content));
}

export function group(attrs: Attrs, children: readonly string[]): string {
  return `<g${attrText(attrs)}>\n${children.join("\n")}\n</g>`;
}

export function document(width: number, height: number, children: readonly string[]): string {
  const open =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"` +
    ` viewBox="0 0 ${width} ${height}">`;
  return [open, ...children, "</svg>"].join("\n") + "\n";
}
