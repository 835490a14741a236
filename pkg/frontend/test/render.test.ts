import { execFileSync } from "child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { PNG } from "pngjs";
import { describe, expect, it } from "vitest";

import { parseFigureCsv, SchemaError } from "../src/csv.js";
import {
  HEIGHT,
  WIDTH,
  main,
  rasterToPng,
  renderFigure,
  styleColor,
} from "../src/render.js";

const FIXTURES = join(__dirname, "fixtures");
const BUNDLE = ["figure1.csv", "figure2.csv", "figure3.csv"];

function fixture(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

function countColor(png: PNG, [r, g, b]: [number, number, number]): number {
  let count = 0;
  for (let i = 0; i < png.data.length; i += 4) {
    if (png.data[i] === r && png.data[i + 1] === g && png.data[i + 2] === b) {
      count += 1;
    }
  }
  return count;
}

describe("parseFigureCsv", () => {
  it("reads the solver bundle with annotations intact", () => {
    const fig2 = parseFigureCsv(fixture("figure2.csv"));
    expect(fig2.series.map((s) => s.column)).toEqual(["c2_eq", "c2_eff"]);
    expect(fig2.series[0].role).toBe("equilibrium");
    expect(fig2.series[0].style).toBe("black");
    expect(fig2.series[1].style).toBe("grey");
    expect(fig2.x.length).toBe(10);
    expect(fig2.xlabel).toBe("delta2");
  });

  it("enforces the annotated monotonicity against the data", () => {
    const lines = fixture("figure1.csv").split("\n");
    const doctored = lines
      .map((l) => l.replace("monotone=increasing", "monotone=decreasing"))
      .join("\n");
    expect(() => parseFigureCsv(doctored)).toThrow(SchemaError);
  });

  it("rejects empty files and missing headers", () => {
    expect(() => parseFigureCsv("")).toThrow(SchemaError);
    expect(() => parseFigureCsv("# series: a monotone=flat\n")).toThrow(
      SchemaError);
  });

  it("rejects series annotations that miss the header", () => {
    const bad = [
      "# series: nope role=equilibrium style=black monotone=increasing",
      "delta2,cont_npv_eq",
      "0.5,1.0",
      "0.6,2.0",
    ].join("\n");
    expect(() => parseFigureCsv(bad)).toThrow(/missing from header/);
  });

  it("rejects non-numeric cells and unsorted grids", () => {
    const head =
      "# series: y role=equilibrium style=black monotone=increasing\n" +
      "delta2,y\n";
    expect(() => parseFigureCsv(head + "0.5,oops\n0.6,1")).toThrow(
      SchemaError);
    expect(() => parseFigureCsv(head + "0.6,1\n0.5,2")).toThrow(
      /increase strictly/);
  });
});

describe("renderFigure", () => {
  it("produces fixed-size images with both stroke colours", () => {
    const fig = parseFigureCsv(fixture("figure3.csv"));
    const raster = renderFigure(fig);
    expect(raster.width).toBe(WIDTH);
    expect(raster.height).toBe(HEIGHT);
    const png = PNG.sync.read(rasterToPng(raster));
    expect(png.width).toBe(800);
    expect(png.height).toBe(600);
    expect(countColor(png, [0, 0, 0])).toBeGreaterThan(500);
    expect(countColor(png, [150, 150, 150])).toBeGreaterThan(500);
  });

  it("renders the single-series figure without grey strokes", () => {
    const fig = parseFigureCsv(fixture("figure1.csv"));
    const png = PNG.sync.read(rasterToPng(renderFigure(fig)));
    expect(countColor(png, [0, 0, 0])).toBeGreaterThan(500);
    expect(countColor(png, [150, 150, 150])).toBe(0);
  });

  it("maps the style names to strokes", () => {
    expect(styleColor("black")).toEqual([0, 0, 0]);
    expect(styleColor("grey")).toEqual([150, 150, 150]);
    expect(styleColor("gray")).toEqual([150, 150, 150]);
  });
});

describe("command line", () => {
  it("renders the whole bundle and reports series counts", () => {
    const out = mkdtempSync(join(tmpdir(), "figs-"));
    for (const name of BUNDLE) {
      const target = join(out, name.replace(".csv", ".png"));
      const code = main([join(FIXTURES, name), target]);
      expect(code).toBe(0);
      const png = PNG.sync.read(readFileSync(target));
      expect([png.width, png.height]).toEqual([800, 600]);
      const annotated = (fixture(name).match(/# series:/g) ?? []).length;
      const parsed = parseFigureCsv(fixture(name));
      expect(parsed.series.length).toBe(annotated);
    }
  });

  it("exits nonzero on schema mismatch and empty input", () => {
    const out = mkdtempSync(join(tmpdir(), "figs-"));
    const empty = join(out, "empty.csv");
    writeFileSync(empty, "");
    expect(main([empty, join(out, "x.png")])).toBe(1);
    const bad = join(out, "bad.csv");
    writeFileSync(bad, "delta2,y\n0.5,1\n0.6,2\n");
    expect(main([bad, join(out, "y.png")])).toBe(1);
    expect(main([])).toBe(2);
  });

  it("runs as a node executable", () => {
    const out = mkdtempSync(join(tmpdir(), "figs-"));
    const target = join(out, "figure1.png");
    execFileSync("node", [join(__dirname, "..", "dist", "render.js"),
                          join(FIXTURES, "figure1.csv"), target]);
    const png = PNG.sync.read(readFileSync(target));
    expect([png.width, png.height]).toEqual([800, 600]);
  });
});
