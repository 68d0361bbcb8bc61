import * as fs from "node:fs";
import { parseArgs } from "node:util";
import { pathToFileURL } from "node:url";
import { readTable, Table } from "./csv.js";

export interface FigureArgs {
  inputs: string[];
  out: string;
}

export function parseFigureArgs(argv: string[]): FigureArgs {
  const { values } = parseArgs({
    args: argv,
    options: {
      in: { type: "string", multiple: true },
      out: { type: "string" },
    },
    allowPositionals: false,
  });
  const inputs = values.in ?? [];
  if (inputs.length === 0) {
    throw new Error("at least one --in CSV is required");
  }
  if (values.out === undefined) {
    throw new Error("--out is required");
  }
  return { inputs, out: values.out };
}

/** Read and validate every input before writing anything, so a bad CSV
 * never leaves a partial or stale output file behind. */
export function runFigureScript(
  argv: string[],
  render: (tables: Table[]) => string,
): number {
  try {
    const args = parseFigureArgs(argv);
    const tables = args.inputs.map(readTable);
    const svg = render(tables);
    fs.writeFileSync(args.out, svg, "utf8");
    return 0;
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    return 1;
  }
}

export function isDirectRun(moduleUrl: string): boolean {
  return process.argv[1] !== undefined && moduleUrl === pathToFileURL(process.argv[1]).href;
}
