import { findTable, numericColumn, Table } from "../csv.js";
import { buildFigure } from "../figure.js";
import { isDirectRun, runFigureScript } from "../cli.js";

export function render(tables: Table[]): string {
  const exact = findTable(tables, "V0");
  const regulatory = findTable(tables, "RM");
  return buildFigure(
    [
      {
        label: "cost-of-capital margin",
        marker: "circle",
        x: numericColumn(exact, "T"),
        y: numericColumn(exact, "V0"),
      },
      {
        label: "EIOPA risk margin",
        marker: "disc",
        x: numericColumn(regulatory, "T"),
        y: numericColumn(regulatory, "RM"),
      },
    ],
    { xLabel: "years to expiry", yLabel: "margin" },
  );
}

export function main(argv: string[]): number {
  return runFigureScript(argv, render);
}

if (isDirectRun(import.meta.url)) {
  process.exit(main(process.argv.slice(2)));
}
