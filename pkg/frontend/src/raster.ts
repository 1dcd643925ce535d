/** Scene -> RGBA raster -> PNG bytes.  Integer-pixel drawing only, so the
 * output is deterministic across platforms. */

import { FONT, GLYPH_HEIGHT, GLYPH_WIDTH } from "./font5x7";
import { encodePng } from "./png";
import { Color, Scene, SceneItem, TextItem } from "./scene";

class Raster {
  readonly data: Uint8Array;

  constructor(readonly width: number, readonly height: number, background: Color) {
    this.data = new Uint8Array(width * height * 4);
    for (let i = 0; i < width * height; i++) {
      this.data[4 * i] = background[0];
      this.data[4 * i + 1] = background[1];
      this.data[4 * i + 2] = background[2];
      this.data[4 * i + 3] = 255;
    }
  }

  set(x: number, y: number, color: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = 4 * (y * this.width + x);
    this.data[i] = color[0];
    this.data[i + 1] = color[1];
    this.data[i + 2] = color[2];
    this.data[i + 3] = 255;
  }

  fillRect(x: number, y: number, w: number, h: number, color: Color): void {
    const x0 = Math.round(x);
    const y0 = Math.round(y);
    const x1 = Math.round(x + w);
    const y1 = Math.round(y + h);
    for (let yy = y0; yy < Math.max(y1, y0 + 1); yy++) {
      for (let xx = x0; xx < Math.max(x1, x0 + 1); xx++) {
        this.set(xx, yy, color);
      }
    }
  }

  /** Bresenham line with an optional [on, off] dash pattern and width. */
  line(
    x1: number,
    y1: number,
    x2: number,
    y2: number,
    color: Color,
    width: number,
    dash?: [number, number],
  ): void {
    let x = Math.round(x1);
    let y = Math.round(y1);
    const xEnd = Math.round(x2);
    const yEnd = Math.round(y2);
    const dx = Math.abs(xEnd - x);
    const dy = -Math.abs(yEnd - y);
    const sx = x < xEnd ? 1 : -1;
    const sy = y < yEnd ? 1 : -1;
    let err = dx + dy;
    const steep = dy < -dx; // mostly vertical: widen horizontally
    const half = Math.floor(Math.max(1, Math.round(width)) / 2);
    const period = dash ? dash[0] + dash[1] : 0;
    let step = 0;
    for (;;) {
      const on = !dash || step % period < dash[0];
      if (on) {
        for (let o = -half; o <= half - (Math.round(width) % 2 === 0 ? 1 : 0); o++) {
          if (steep) this.set(x + o, y, color);
          else this.set(x, y + o, color);
        }
      }
      if (x === xEnd && y === yEnd) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
      step++;
    }
  }

  text(item: TextItem): void {
    const scale = Math.max(1, Math.round(item.size / 8));
    const advance = (GLYPH_WIDTH + 1) * scale;
    const textWidth = item.text.length * advance - scale;
    // (x, y) is the baseline anchor, like SVG text
    let offset = 0;
    if (item.anchor === "middle") offset = -Math.round(textWidth / 2);
    if (item.anchor === "end") offset = -textWidth;
    for (let index = 0; index < item.text.length; index++) {
      const glyph = FONT[item.text[index]];
      if (!glyph) continue;
      const gx = offset + index * advance;
      for (let col = 0; col < GLYPH_WIDTH; col++) {
        for (let row = 0; row < GLYPH_HEIGHT; row++) {
          if (!((glyph[col] >> row) & 1)) continue;
          for (let fy = 0; fy < scale; fy++) {
            for (let fx = 0; fx < scale; fx++) {
              const px = gx + col * scale + fx;
              const py = (row - GLYPH_HEIGHT) * scale + fy;
              if (item.vertical) {
                // rotate -90 deg around the anchor: (px, py) -> (py, -px)
                this.set(Math.round(item.x) + py, Math.round(item.y) - px, item.color);
              } else {
                this.set(Math.round(item.x) + px, Math.round(item.y) + py, item.color);
              }
            }
          }
        }
      }
    }
  }

  draw(item: SceneItem): void {
    switch (item.kind) {
      case "rect":
        this.fillRect(item.x, item.y, item.w, item.h, item.fill);
        break;
      case "line":
        this.line(item.x1, item.y1, item.x2, item.y2, item.color, item.width, item.dash);
        break;
      case "polyline":
        for (let i = 1; i < item.points.length; i++) {
          this.line(
            item.points[i - 1][0],
            item.points[i - 1][1],
            item.points[i][0],
            item.points[i][1],
            item.color,
            item.width,
            item.dash,
          );
        }
        break;
      case "text":
        this.text(item);
        break;
    }
  }
}

export function sceneToPng(scene: Scene): Buffer {
  const raster = new Raster(scene.width, scene.height, scene.background);
  for (const item of scene.items) {
    raster.draw(item);
  }
  return encodePng(scene.width, scene.height, raster.data);
}
