/** Image ingestion: PNG and JPEG decoding in deterministic filename order. */

import { readdirSync, readFileSync } from 'node:fs';
import { join } from 'node:path';

import jpeg from 'jpeg-js';
import { PNG } from 'pngjs';

export interface DecodedImage {
  file: string;
  width: number;
  height: number;
  /** Interleaved RGB, alpha stripped. */
  rgb: Uint8Array;
}

const PNG_SIGNATURE = Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]);

function rgbaToRgb(data: Uint8Array | Buffer, pixels: number): Uint8Array {
  const rgb = new Uint8Array(pixels * 3);
  for (let p = 0; p < pixels; p++) {
    rgb[p * 3] = data[p * 4];
    rgb[p * 3 + 1] = data[p * 4 + 1];
    rgb[p * 3 + 2] = data[p * 4 + 2];
  }
  return rgb;
}

export function decodeImage(file: string, bytes: Buffer): DecodedImage {
  if (bytes.subarray(0, 8).equals(PNG_SIGNATURE)) {
    const png = PNG.sync.read(bytes);
    return {
      file,
      width: png.width,
      height: png.height,
      rgb: rgbaToRgb(png.data, png.width * png.height),
    };
  }
  if (bytes.length >= 2 && bytes[0] === 0xff && bytes[1] === 0xd8) {
    const img = jpeg.decode(bytes, { useTArray: true, maxMemoryUsageInMB: 512 });
    return {
      file,
      width: img.width,
      height: img.height,
      rgb: rgbaToRgb(img.data, img.width * img.height),
    };
  }
  throw new Error('not a PNG or JPEG file');
}

const IMAGE_EXTENSIONS = /\.(png|jpe?g)$/i;

/** Image filenames in the directory, sorted so row order is reproducible. */
export function listImageFiles(dir: string): string[] {
  return readdirSync(dir)
    .filter((name) => IMAGE_EXTENSIONS.test(name))
    .sort();
}

export interface LoadResult {
  images: DecodedImage[];
  skipped: { file: string; reason: string }[];
}

/** Decode every image in the directory; failures are skipped, not fatal. */
export function loadImages(dir: string, warn: (msg: string) => void = () => {}): LoadResult {
  const images: DecodedImage[] = [];
  const skipped: { file: string; reason: string }[] = [];
  for (const file of listImageFiles(dir)) {
    try {
      images.push(decodeImage(file, readFileSync(join(dir, file))));
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      skipped.push({ file, reason });
      warn(`skipping ${file}: ${reason}`);
    }
  }
  return { images, skipped };
}
