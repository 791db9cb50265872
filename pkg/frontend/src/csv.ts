import { readFileSync } from "node:fs";

/** Parsed numeric table: header columns, one record per data row, and any
 *  `# key: value` metadata lines that preceded the data. */
export interface Table {
  columns: string[];
  rows: Record<string, number>[];
  meta: Record<string, string>;
}

/** Anything wrong with the input data or how it was asked for. The CLI turns
 *  these into a message on stderr and a nonzero exit. */
export class DataError extends Error {}

export function parseTable(text: string): Table {
  const meta: Record<string, string> = {};
  let header: string[] | null = null;
  const rows: Record<string, number>[] = [];

  const lines = text.split(/\r?\n/);
  for (let n = 0; n < lines.length; n++) {
    const line = (lines[n] ?? "").trim();
    if (line === "") continue;
    if (line.startsWith("#")) {
      // metadata only counts before the header; later comments are skipped
      if (header === null) {
        const body = line.slice(1).trim();
        const sep = body.indexOf(":");
        if (sep > 0) meta[body.slice(0, sep).trim()] = body.slice(sep + 1).trim();
      }
      continue;
    }
    const cells = line.split(",").map((c) => c.trim());
    if (header === null) {
      header = cells;
      continue;
    }
    if (cells.length !== header.length) {
      throw new DataError(
        `line ${n + 1}: expected ${header.length} cells, got ${cells.length}`,
      );
    }
    const row: Record<string, number> = {};
    for (let j = 0; j < header.length; j++) {
      const name = header[j] as string;
      const cell = cells[j] as string;
      const value = Number(cell);
      if (cell === "" || !Number.isFinite(value)) {
        throw new DataError(`line ${n + 1}: column ${name} is not numeric: "${cell}"`);
      }
      row[name] = value;
    }
    rows.push(row);
  }

  if (header === null) throw new DataError("no header row found");
  if (rows.length === 0) throw new DataError("no data rows found");
  return { columns: header, rows, meta };
}

export function readTable(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new DataError(`cannot read ${path}: ${(err as Error).message}`);
  }
  try {
    return parseTable(text);
  } catch (err) {
    if (err instanceof DataError) throw new DataError(`${path}: ${err.message}`);
    throw err;
  }
}

export function requireColumns(
  table: Table,
  required: readonly string[],
  kind: string,
): void {
  const missing = required.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new DataError(
      `${kind} input is missing required column(s): ${missing.join(", ")} ` +
        `(found: ${table.columns.join(", ")})`,
    );
  }
}

/** Column values in row order. Assumes requireColumns already passed. */
export function column(table: Table, name: string): number[] {
  return table.rows.map((r) => r[name] as number);
}
