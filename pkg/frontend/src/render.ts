import { writeFileSync } from "node:fs";
import { extname } from "node:path";
import { Resvg } from "@resvg/resvg-js";
import { DataError, readTable } from "./csv.js";
import { figureSvg, type FigureKind, type FigureOptions } from "./figures.js";

export interface FigureSpec extends FigureOptions {
  kind: FigureKind;
  input: string;
  output: string;
}

/** Read the CSV, build the figure, and write it in the format implied by the
 *  output extension. No timestamps or absolute paths end up in the file, so
 *  rendering the same spec twice gives identical bytes. */
export function render(spec: FigureSpec): void {
  const table = readTable(spec.input);
  const svg = figureSvg(spec.kind, table, spec);
  const ext = extname(spec.output).toLowerCase();
  if (ext === ".svg") {
    writeFileSync(spec.output, svg);
  } else if (ext === ".png") {
    const png = new Resvg(svg, {
      background: "#ffffff",
      font: { loadSystemFonts: true, defaultFontFamily: "DejaVu Sans" },
    })
      .render()
      .asPng();
    writeFileSync(spec.output, png);
  } else {
    throw new DataError(`unsupported output extension "${ext}" (use .svg or .png)`);
  }
}
