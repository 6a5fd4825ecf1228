/** Deterministic PNG fixtures standing in for banknote scans. */

import * as fs from 'fs';
import * as path from 'path';

import { PNG } from 'pngjs';

export type Painter = (x: number, y: number) => [number, number, number];

export function writePng(file: string, painter: Painter, width = 120, height = 60): void {
  const png = new PNG({ width, height });
  for (let y = 0; y < height; y++) {
    for (let x = 0; x < width; x++) {
      const [r, g, b] = painter(x, y);
      const i = (width * y + x) << 2;
      png.data[i] = r;
      png.data[i + 1] = g;
      png.data[i + 2] = b;
      png.data[i + 3] = 255;
    }
  }
  fs.writeFileSync(file, PNG.sync.write(png));
}

export const gradient =
  (offset: number): Painter =>
  (x, y) =>
    [(2 * x + offset) % 256, (4 * y + offset) % 256, 60];

export const checker =
  (offset: number): Painter =>
  (x, y) =>
    ((x >> 3) + (y >> 3)) % 2
      ? [230 - offset, 40 + offset, 180]
      : [20 + offset, 200, 40];

export const solid =
  (value: number): Painter =>
  () =>
    [value, value, value];

/** Two classes, three visually similar scans each. */
export function makeSixImageFixture(root: string): void {
  const classes: Array<[string, (offset: number) => Painter]> = [
    ['EUR_005_a_1', gradient],
    ['EUR_010_a_3', checker],
  ];
  for (const [folder, family] of classes) {
    const dir = path.join(root, folder);
    fs.mkdirSync(dir, { recursive: true });
    for (let i = 0; i < 3; i++) {
      writePng(path.join(dir, `note_${i}.png`), family(10 * i));
    }
  }
}
