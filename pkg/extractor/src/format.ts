/**
 * CORREMB1 container: 8-byte ASCII magic, n and d as unsigned 32-bit
 * little-endian, one dtype byte (0 = float32, 1 = float64), then exactly
 * n*d*(4 or 8) payload bytes, row-major. Ids travel in a sidecar text file,
 * one non-empty UTF-8 line per row, LF separated.
 */

import { mkdirSync, renameSync, writeFileSync } from 'node:fs';
import { dirname, join } from 'node:path';

export const MAGIC = 'CORREMB1';
export const HEADER_SIZE = 17;

export interface DecodedMatrix {
  rows: number;
  cols: number;
  dtype: 'float32' | 'float64';
  data: Float64Array;
}

export function encodeEmbeddings(rows: number, cols: number, data: Float32Array): Buffer {
  if (rows < 2) throw new Error(`n >= 2 required, got ${rows}`);
  if (cols < 1) throw new Error(`d >= 1 required, got ${cols}`);
  if (data.length !== rows * cols) {
    throw new Error(`payload has ${data.length} values, expected ${rows * cols}`);
  }
  const buf = Buffer.alloc(HEADER_SIZE + data.length * 4);
  buf.write(MAGIC, 0, 'ascii');
  buf.writeUInt32LE(rows, 8);
  buf.writeUInt32LE(cols, 12);
  buf.writeUInt8(0, 16); // float32
  for (let i = 0; i < data.length; i++) {
    buf.writeFloatLE(data[i], HEADER_SIZE + i * 4);
  }
  return buf;
}

/** Reader counterpart, used to verify what the writer produced. */
export function decodeEmbeddings(buf: Buffer): DecodedMatrix {
  if (buf.length < HEADER_SIZE) throw new Error('not a CORREMB1 file (truncated header)');
  if (buf.toString('ascii', 0, 8) !== MAGIC) throw new Error('not a CORREMB1 file');
  const rows = buf.readUInt32LE(8);
  const cols = buf.readUInt32LE(12);
  const code = buf.readUInt8(16);
  if (code !== 0 && code !== 1) throw new Error(`unknown dtype code ${code}`);
  if (rows < 2) throw new Error(`n >= 2 required, header says n=${rows}`);
  const itemSize = code === 0 ? 4 : 8;
  const expected = rows * cols * itemSize;
  const payload = buf.length - HEADER_SIZE;
  if (payload < expected) throw new Error(`truncated payload (${payload} bytes, expected ${expected})`);
  if (payload > expected) throw new Error(`oversized payload (${payload} bytes, expected ${expected})`);
  const data = new Float64Array(rows * cols);
  for (let i = 0; i < data.length; i++) {
    data[i] = code === 0
      ? buf.readFloatLE(HEADER_SIZE + i * 4)
      : buf.readDoubleLE(HEADER_SIZE + i * 8);
  }
  return { rows, cols, dtype: code === 0 ? 'float32' : 'float64', data };
}

export function encodeIds(ids: string[]): Buffer {
  for (const id of ids) {
    if (!id || id.includes('\n')) {
      throw new Error(`item id ${JSON.stringify(id)} cannot be written to an ids file`);
    }
  }
  return Buffer.from(ids.join('\n') + '\n', 'utf8');
}

/** Temp-and-rename write; a failed run never leaves a partial file behind. */
export function atomicWriteFile(path: string, data: Buffer | string): void {
  mkdirSync(dirname(path), { recursive: true });
  const tmp = join(dirname(path), `.${process.pid}.${Date.now()}.tmp`);
  writeFileSync(tmp, data);
  renameSync(tmp, path);
}
