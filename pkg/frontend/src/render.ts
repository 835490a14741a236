/**
 * Figure renderer: one annotated CSV in, one 800x600 PNG out.
 *
 *     node dist/render.js <figure.csv> <out.png>
 *
 * Series styling follows the CSV annotations (equilibrium black, efficient
 * grey); axes are labelled from the annotations; nothing is recomputed
 * from the model. Schema violations exit nonzero with the parser message.
 */

import { readFileSync, writeFileSync } from "fs";
import { PNG } from "pngjs";

import { FigureData, parseFigureCsv, SchemaError } from "./csv.js";
import { Color, Raster, textWidth } from "./raster.js";

export const WIDTH = 800;
export const HEIGHT = 600;

const MARGIN = { left: 90, right: 30, top: 60, bottom: 70 };
const BLACK: Color = [0, 0, 0];
const GREY: Color = [150, 150, 150];
const AXIS: Color = [60, 60, 60];
const GRID: Color = [225, 225, 225];

export function styleColor(style: string): Color {
  return style === "grey" || style === "gray" ? GREY : BLACK;
}

function niceTicks(lo: number, hi: number, count = 5): number[] {
  const ticks: number[] = [];
  for (let i = 0; i < count; i++) ticks.push(lo + ((hi - lo) * i) / (count - 1));
  return ticks;
}

function fmt(value: number): string {
  return Number(value.toPrecision(3)).toString();
}

export function renderFigure(figure: FigureData): Raster {
  const raster = new Raster(WIDTH, HEIGHT);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

  const xs = figure.x;
  const allY = figure.series.flatMap((s) => figure.columns.get(s.column)!);
  const xLo = xs[0];
  const xHi = xs[xs.length - 1];
  let yLo = Math.min(...allY);
  let yHi = Math.max(...allY);
  if (yHi - yLo < 1e-12) {
    yLo -= 0.5;
    yHi += 0.5;
  }
  const pad = 0.06 * (yHi - yLo);
  yLo -= pad;
  yHi += pad;

  const px = (x: number) =>
    MARGIN.left + ((x - xLo) / (xHi - xLo)) * plotW;
  const py = (y: number) =>
    MARGIN.top + plotH - ((y - yLo) / (yHi - yLo)) * plotH;

  // grid and ticks
  for (const t of niceTicks(xLo, xHi)) {
    const x = Math.round(px(t));
    raster.line(x, MARGIN.top, x, MARGIN.top + plotH, GRID);
    raster.line(x, MARGIN.top + plotH, x, MARGIN.top + plotH + 6, AXIS);
    const label = fmt(t);
    raster.text(x - textWidth(label) / 2, MARGIN.top + plotH + 12, label,
                AXIS);
  }
  for (const t of niceTicks(yLo + pad, yHi - pad)) {
    const y = Math.round(py(t));
    raster.line(MARGIN.left, y, MARGIN.left + plotW, y, GRID);
    raster.line(MARGIN.left - 6, y, MARGIN.left, y, AXIS);
    const label = fmt(t);
    raster.text(MARGIN.left - 10 - textWidth(label), y - 7, label, AXIS);
  }

  // axes
  raster.line(MARGIN.left, MARGIN.top, MARGIN.left, MARGIN.top + plotH, AXIS, 2);
  raster.line(MARGIN.left, MARGIN.top + plotH, MARGIN.left + plotW,
              MARGIN.top + plotH, AXIS, 2);

  // series: polyline plus markers
  for (const spec of figure.series) {
    const color = styleColor(spec.style);
    const values = figure.columns.get(spec.column)!;
    for (let i = 1; i < xs.length; i++) {
      raster.line(px(xs[i - 1]), py(values[i - 1]), px(xs[i]), py(values[i]),
                  color, 3);
    }
    for (let i = 0; i < xs.length; i++) {
      raster.disc(px(xs[i]), py(values[i]), 4, color);
    }
  }

  // title, axis labels, legend
  raster.text(MARGIN.left, 14, figure.title, BLACK);
  raster.text(MARGIN.left, 34, figure.ylabel, AXIS);
  const xlab = figure.xlabel;
  raster.text(MARGIN.left + plotW / 2 - textWidth(xlab) / 2,
              HEIGHT - 28, xlab, AXIS);
  let ly = MARGIN.top + 8;
  for (const spec of figure.series) {
    const color = styleColor(spec.style);
    const lx = MARGIN.left + plotW - 240;
    raster.line(lx, ly + 6, lx + 30, ly + 6, color, 3);
    raster.text(lx + 38, ly, `${spec.column} (${spec.role})`, color);
    ly += 22;
  }
  return raster;
}

export function rasterToPng(raster: Raster): Buffer {
  const png = new PNG({ width: raster.width, height: raster.height });
  raster.data.copy(png.data);
  return PNG.sync.write(png);
}

export function renderFile(csvPath: string, outPath: string): FigureData {
  const figure = parseFigureCsv(readFileSync(csvPath, "utf8"));
  writeFileSync(outPath, rasterToPng(renderFigure(figure)));
  return figure;
}

export function main(argv: string[]): number {
  if (argv.length !== 2) {
    console.error("usage: render <figure.csv> <out.png>");
    return 2;
  }
  try {
    const figure = renderFile(argv[0], argv[1]);
    console.log(
      `${argv[1]}: ${figure.series.length} series, ` +
      `${figure.x.length} points`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema mismatch: ${err.message}`);
      return 1;
    }
    console.error(String(err));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("render.js")) {
  process.exit(main(process.argv.slice(2)));
}
