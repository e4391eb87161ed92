import { mkdirSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

import { PNG } from 'pngjs';

/** Deterministic little RGB PNGs, zero-padded names so sort order is obvious. */
export function makePngDir(dir: string, count: number, width = 40, height = 30): string[] {
  mkdirSync(dir, { recursive: true });
  const names: string[] = [];
  for (let i = 0; i < count; i++) {
    const png = new PNG({ width, height });
    for (let y = 0; y < height; y++) {
      for (let x = 0; x < width; x++) {
        const idx = (width * y + x) << 2;
        png.data[idx] = (x * 7 + i * 31) % 256;
        png.data[idx + 1] = (y * 11 + i * 17) % 256;
        png.data[idx + 2] = (x + y + i * 53) % 256;
        png.data[idx + 3] = 255;
      }
    }
    const name = `img${String(i).padStart(3, '0')}.png`;
    writeFileSync(join(dir, name), PNG.sync.write(png));
    names.push(name);
  }
  return names;
}
