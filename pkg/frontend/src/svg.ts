/** Scene -> SVG text.  Coordinates use a fixed 2-decimal format so identical
 * scenes serialize to identical bytes. */

import { Color, Scene, SceneItem } from "./scene";

function fmt(n: number): string {
  const fixed = n.toFixed(2);
  return fixed.replace(/\.00$/, "").replace(/(\.\d)0$/, "$1");
}

function rgb(c: Color): string {
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

function escapeText(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function itemToSvg(item: SceneItem): string {
  switch (item.kind) {
    case "rect":
      return (
        `<rect x="${fmt(item.x)}" y="${fmt(item.y)}" width="${fmt(item.w)}" ` +
        `height="${fmt(item.h)}" fill="${rgb(item.fill)}"/>`
      );
    case "line": {
      const dash = item.dash ? ` stroke-dasharray="${fmt(item.dash[0])} ${fmt(item.dash[1])}"` : "";
      return (
        `<line x1="${fmt(item.x1)}" y1="${fmt(item.y1)}" x2="${fmt(item.x2)}" ` +
        `y2="${fmt(item.y2)}" stroke="${rgb(item.color)}" stroke-width="${fmt(item.width)}"${dash}/>`
      );
    }
    case "polyline": {
      const dash = item.dash ? ` stroke-dasharray="${fmt(item.dash[0])} ${fmt(item.dash[1])}"` : "";
      const points = item.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      return (
        `<polyline points="${points}" fill="none" stroke="${rgb(item.color)}" ` +
        `stroke-width="${fmt(item.width)}"${dash}/>`
      );
    }
    case "text": {
      const transform = item.vertical
        ? ` transform="rotate(-90 ${fmt(item.x)} ${fmt(item.y)})"`
        : "";
      return (
        `<text x="${fmt(item.x)}" y="${fmt(item.y)}" font-family="monospace" ` +
        `font-size="${fmt(item.size)}" text-anchor="${item.anchor}" ` +
        `fill="${rgb(item.color)}"${transform}>${escapeText(item.text)}</text>`
      );
    }
  }
}

export function sceneToSvg(scene: Scene): string {
  const lines = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" ` +
      `height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`,
    `<rect x="0" y="0" width="${scene.width}" height="${scene.height}" ` +
      `fill="${rgb(scene.background)}"/>`,
  ];
  for (const item of scene.items) {
    lines.push(itemToSvg(item));
  }
  lines.push("</svg>");
  return lines.join("\n") + "\n";
}
