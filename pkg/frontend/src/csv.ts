import * as fs from "node:fs";

export interface Table {
  path: string;
  columns: string[];
  rows: string[][];
}

export function parseCsv(text: string, label: string): Table {
  const lines = text.split(/\r?\n/);
  while (lines.length > 0 && lines[lines.length - 1] === "") {
    lines.pop();
  }
  if (lines.length === 0) {
    throw new Error(`${label} is empty`);
  }
  const columns = lines[0].split(",");
  if (lines.length === 1) {
    throw new Error(`${label} has a header but no data rows`);
  }
  const rows = lines.slice(1).map((line, index) => {
    const cells = line.split(",");
    if (cells.length !== columns.length) {
      throw new Error(
        `${label} row ${index + 1} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    return cells;
  });
  return { path: label, columns, rows };
}

export function readTable(path: string): Table {
  return parseCsv(fs.readFileSync(path, "utf8"), path);
}

export function numericColumn(table: Table, name: string): number[] {
  const index = table.columns.indexOf(name);
  if (index < 0) {
    throw new Error(
      `missing column "${name}" in ${table.path} (found: ${table.columns.join(", ")})`,
    );
  }
  return table.rows.map((cells, row) => {
    const value = Number(cells[index]);
    if (!Number.isFinite(value)) {
      throw new Error(
        `${table.path} row ${row + 1}, column "${name}": "${cells[index]}" is not a number`,
      );
    }
    return value;
  });
}

/** First input table carrying the named column; the data contract of each
 * figure is "some input has this column", so --in order never matters. */
export function findTable(tables: Table[], column: string): Table {
  for (const table of tables) {
    if (table.columns.includes(column)) {
      return table;
    }
  }
  const seen = tables.map((t) => `${t.path} [${t.columns.join(", ")}]`).join("; ");
  throw new Error(`none of the inputs has column "${column}" (inputs: ${seen})`);
}
