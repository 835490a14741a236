/**
 * Tiny software rasteriser over an RGBA byte buffer: filled rectangles,
 * thick line segments, filled discs and bitmap text. Everything the plot
 * needs and nothing more, so the renderer stays dependency-light.
 */

import { GLYPH_HEIGHT, GLYPH_WIDTH, glyph } from "./font.js";

export type Color = [number, number, number];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Buffer;

  constructor(width: number, height: number, background: Color = [255, 255, 255]) {
    this.width = width;
    this.height = height;
    this.data = Buffer.alloc(width * height * 4);
    this.fillRect(0, 0, width, height, background);
  }

  set(x: number, y: number, [r, g, b]: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = (y * this.width + x) * 4;
    this.data[i] = r;
    this.data[i + 1] = g;
    this.data[i + 2] = b;
    this.data[i + 3] = 255;
  }

  fillRect(x0: number, y0: number, w: number, h: number, color: Color): void {
    for (let y = y0; y < y0 + h; y++) {
      for (let x = x0; x < x0 + w; x++) this.set(x, y, color);
    }
  }

  disc(cx: number, cy: number, radius: number, color: Color): void {
    for (let y = -radius; y <= radius; y++) {
      for (let x = -radius; x <= radius; x++) {
        if (x * x + y * y <= radius * radius) {
          this.set(Math.round(cx + x), Math.round(cy + y), color);
        }
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, color: Color,
       thickness = 1): void {
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1);
    const r = Math.max(0, Math.floor((thickness - 1) / 2));
    for (let s = 0; s <= steps; s++) {
      const x = Math.round(x0 + ((x1 - x0) * s) / steps);
      const y = Math.round(y0 + ((y1 - y0) * s) / steps);
      if (r === 0) this.set(x, y, color);
      else this.disc(x, y, r + 0.5, color);
    }
  }

  text(x: number, y: number, content: string, color: Color, scale = 2): void {
    let cursor = x;
    for (const ch of content) {
      const rows = glyph(ch);
      for (let gy = 0; gy < GLYPH_HEIGHT; gy++) {
        for (let gx = 0; gx < GLYPH_WIDTH; gx++) {
          if (rows[gy][gx] !== "#") continue;
          this.fillRect(cursor + gx * scale, y + gy * scale, scale, scale,
                        color);
        }
      }
      cursor += (GLYPH_WIDTH + 1) * scale;
    }
  }
}

export function textWidth(content: string, scale = 2): number {
  return content.length * (GLYPH_WIDTH + 1) * scale;
}
