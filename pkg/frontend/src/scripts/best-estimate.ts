import { findTable, numericColumn, Table } from "../csv.js";
import { buildFigure } from "../figure.js";
import { isDirectRun, runFigureScript } from "../cli.js";

export function render(tables: Table[]): string {
  const sweep = findTable(tables, "BE");
  return buildFigure(
    [
      {
        label: "best estimate",
        marker: "circle",
        x: numericColumn(sweep, "T"),
        y: numericColumn(sweep, "BE"),
      },
    ],
    { xLabel: "years to expiry", yLabel: "expected payments" },
  );
}

export function main(argv: string[]): number {
  return runFigureScript(argv, render);
}

if (isDirectRun(import.meta.url)) {
  process.exit(main(process.argv.slice(2)));
}
