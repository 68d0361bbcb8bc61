import { findTable, numericColumn, Table } from "../csv.js";
import { buildFigure } from "../figure.js";
import { isDirectRun, runFigureScript } from "../cli.js";

export function render(tables: Table[]): string {
  const exact = findTable(tables, "V0");
  const proxy = findTable(tables, "V0_gaussian");
  return buildFigure(
    [
      {
        label: "cost-of-capital margin",
        marker: "circle",
        x: numericColumn(exact, "T"),
        y: numericColumn(exact, "V0"),
      },
      {
        label: "Gaussian approximation",
        marker: "disc",
        x: numericColumn(proxy, "T"),
        y: numericColumn(proxy, "V0_gaussian"),
      },
      {
        label: "upper bound",
        marker: "triangle",
        x: numericColumn(exact, "T"),
        y: numericColumn(exact, "bound"),
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
