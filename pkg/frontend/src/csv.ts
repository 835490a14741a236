/**
 * Parser for the solver's annotated figure CSVs.
 *
 * Layout: `#`-prefixed annotation lines, then one header row, then numeric
 * rows. Annotations carry the figure title, axis labels, and one
 * `# series:` line per plotted column with its role (equilibrium or
 * efficient), stroke style and declared monotonicity. The parser enforces
 * the schema: every annotated series must exist in the header, the first
 * column is the strictly increasing x grid, all rows are numeric and of
 * equal length, and the data must actually match each declared
 * monotonicity. Renderers downstream consume the parsed structure only --
 * nothing here recomputes model quantities.
 */

export type Monotone = "increasing" | "decreasing" | "flat";

export interface SeriesSpec {
  column: string;
  role: string;
  style: string;
  monotone: Monotone;
}

export interface FigureData {
  title: string;
  xlabel: string;
  ylabel: string;
  series: SeriesSpec[];
  x: number[];
  columns: Map<string, number[]>;
}

export class SchemaError extends Error {}

const MONOTONE_VALUES = new Set(["increasing", "decreasing", "flat"]);

function parseSeriesLine(line: string): SeriesSpec {
  const fields = line.split(/\s+/).filter((f) => f.length > 0);
  // fields[0] is "series:", fields[1] the column name
  const column = fields[1];
  if (!column) throw new SchemaError(`series annotation without a column: ${line}`);
  const attrs = new Map<string, string>();
  for (const field of fields.slice(2)) {
    const eq = field.indexOf("=");
    if (eq < 0) throw new SchemaError(`malformed series attribute: ${field}`);
    attrs.set(field.slice(0, eq), field.slice(eq + 1));
  }
  const monotone = attrs.get("monotone") ?? "";
  if (!MONOTONE_VALUES.has(monotone)) {
    throw new SchemaError(`series ${column}: unknown monotonicity '${monotone}'`);
  }
  return {
    column,
    role: attrs.get("role") ?? "series",
    style: attrs.get("style") ?? "black",
    monotone: monotone as Monotone,
  };
}

function checkMonotone(spec: SeriesSpec, values: number[]): void {
  for (let i = 1; i < values.length; i++) {
    const d = values[i] - values[i - 1];
    const ok =
      spec.monotone === "increasing" ? d > 0
      : spec.monotone === "decreasing" ? d < 0
      : Math.abs(d) <= 1e-9;
    if (!ok) {
      throw new SchemaError(
        `series ${spec.column} is annotated ${spec.monotone} but steps by ` +
        `${d} at row ${i}`);
    }
  }
}

export function parseFigureCsv(text: string): FigureData {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) throw new SchemaError("empty file");

  let title = "";
  let xlabel = "";
  let ylabel = "";
  const series: SeriesSpec[] = [];
  let headerIndex = -1;
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (!line.startsWith("#")) {
      headerIndex = i;
      break;
    }
    const body = line.replace(/^#\s*/, "");
    if (body.startsWith("series:")) series.push(parseSeriesLine(body));
    else if (body.startsWith("figure:")) title = body.slice(7).trim();
    else if (body.startsWith("xlabel:")) xlabel = body.slice(7).trim();
    else if (body.startsWith("ylabel:")) ylabel = body.slice(7).trim();
    else throw new SchemaError(`unknown annotation: ${line}`);
  }
  if (headerIndex < 0) throw new SchemaError("no header row");
  if (series.length === 0) throw new SchemaError("no series annotations");

  const header = lines[headerIndex].split(",").map((h) => h.trim());
  if (header.length < 2) throw new SchemaError("header needs x plus a series");
  for (const spec of series) {
    if (!header.includes(spec.column)) {
      throw new SchemaError(`annotated series ${spec.column} missing from header`);
    }
  }
  if (series.length !== header.length - 1) {
    throw new SchemaError(
      `header has ${header.length - 1} data columns but ` +
      `${series.length} series annotations`);
  }

  const rows: number[][] = [];
  for (const line of lines.slice(headerIndex + 1)) {
    const cells = line.split(",").map((c) => Number(c));
    if (cells.length !== header.length || cells.some((c) => !Number.isFinite(c))) {
      throw new SchemaError(`bad data row: ${line}`);
    }
    rows.push(cells);
  }
  if (rows.length < 2) throw new SchemaError("need at least two data rows");

  const x = rows.map((r) => r[0]);
  for (let i = 1; i < x.length; i++) {
    if (x[i] <= x[i - 1]) throw new SchemaError("x grid must increase strictly");
  }
  const columns = new Map<string, number[]>();
  header.slice(1).forEach((name, j) => {
    columns.set(name, rows.map((r) => r[j + 1]));
  });
  for (const spec of series) {
    checkMonotone(spec, columns.get(spec.column)!);
  }
  return { title, xlabel: xlabel || header[0], ylabel, series, x, columns };
}
