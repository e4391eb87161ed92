import { describe, expect, it } from 'vitest';

import {
  decodeEmbeddings,
  encodeEmbeddings,
  encodeIds,
  HEADER_SIZE,
  MAGIC,
} from '../src/format.js';

describe('CORREMB1 encoding', () => {
  it('lays out the 17-byte header with little-endian fields', () => {
    const buf = encodeEmbeddings(2, 3, new Float32Array([1, 2, 3, 4, 5, 6]));
    expect(buf.toString('ascii', 0, 8)).toBe(MAGIC);
    expect(buf.readUInt32LE(8)).toBe(2);
    expect(buf.readUInt32LE(12)).toBe(3);
    expect(buf.readUInt8(16)).toBe(0); // float32
    expect(buf.length).toBe(HEADER_SIZE + 2 * 3 * 4);
  });

  it('round-trips values exactly', () => {
    const values = new Float32Array([0.5, -1.25, 3.75, 1e-8, 255.0, -0.0]);
    const decoded = decodeEmbeddings(encodeEmbeddings(2, 3, values));
    expect(decoded.rows).toBe(2);
    expect(decoded.cols).toBe(3);
    expect(decoded.dtype).toBe('float32');
    expect(Array.from(decoded.data)).toEqual(Array.from(values));
  });

  it('rejects single-row matrices', () => {
    expect(() => encodeEmbeddings(1, 3, new Float32Array(3))).toThrow('n >= 2');
  });

  it('rejects mismatched payload length', () => {
    expect(() => encodeEmbeddings(2, 3, new Float32Array(5))).toThrow('expected 6');
  });

  it('rejects a corrupt magic on read', () => {
    const buf = encodeEmbeddings(2, 2, new Float32Array(4));
    buf.write('CORREMBX', 0, 'ascii');
    expect(() => decodeEmbeddings(buf)).toThrow('not a CORREMB1 file');
  });

  it('rejects truncated and oversized payloads', () => {
    const buf = encodeEmbeddings(2, 2, new Float32Array(4));
    expect(() => decodeEmbeddings(buf.subarray(0, buf.length - 1))).toThrow('truncated');
    expect(() => decodeEmbeddings(Buffer.concat([buf, Buffer.from([0])]))).toThrow(
      'oversized',
    );
  });
});

describe('ids sidecar', () => {
  it('joins ids with LF and a trailing newline', () => {
    expect(encodeIds(['a.png', 'b.png']).toString('utf8')).toBe('a.png\nb.png\n');
  });

  it('rejects empty ids and embedded newlines', () => {
    expect(() => encodeIds([''])).toThrow();
    expect(() => encodeIds(['a\nb'])).toThrow();
  });
});
