/** Batch extraction pipeline: images in, CORREMB1 + ids + manifest out. */

import * as tf from '@tensorflow/tfjs';

import { atomicWriteFile, encodeEmbeddings, encodeIds } from './format.js';
import { DecodedImage, loadImages } from './images.js';
import { getZooEntry, loadModelFromDisk, PENULTIMATE_LAYER, ZooEntry } from './zoo.js';

export type TapPoint = 'output' | 'penultimate';

export interface ExtractOptions {
  model: string;
  tap: TapPoint;
  imagesDir: string;
  outPath: string;
  idsPath: string;
  batchSize?: number;
  /** Directory with tfjs layers-model artifacts; seeded init otherwise. */
  weightsDir?: string;
  log?: (msg: string) => void;
}

export interface BatchTiming {
  index: number;
  size: number;
  seconds: number;
}

export interface ExtractResult {
  rows: number;
  cols: number;
  ids: string[];
  skipped: { file: string; reason: string }[];
  batches: BatchTiming[];
}

function imageToTensor(img: DecodedImage, entry: ZooEntry): tf.Tensor3D {
  return tf.tidy(() => {
    const raw = tf.tensor3d(img.rgb, [img.height, img.width, 3], 'int32');
    const resized = tf.image.resizeBilinear(raw.toFloat() as tf.Tensor3D, [
      entry.inputSize,
      entry.inputSize,
    ]);
    const scaled = resized.div(255.0);
    return scaled.sub(tf.tensor1d(entry.mean)).div(tf.tensor1d(entry.std));
  });
}

function nonFlatMessage(entry: ZooEntry): string {
  const shape = entry.penultimateShape.join(', ');
  return (
    `model '${entry.name}' pools into shape (${shape}) only inside its final ` +
    `layer; the tensor entering that layer is not flat, so tap=penultimate ` +
    `is not supported for it (use tap=output instead)`
  );
}

export async function extract(opts: ExtractOptions): Promise<ExtractResult> {
  const log = opts.log ?? (() => {});
  const batchSize = opts.batchSize ?? 16;
  if (batchSize < 1) throw new Error(`batch size must be >= 1, got ${batchSize}`);
  const entry = getZooEntry(opts.model);
  if (opts.tap === 'penultimate' && entry.penultimateWidth === null) {
    throw new Error(nonFlatMessage(entry));
  }

  const { images, skipped } = loadImages(opts.imagesDir, log);
  if (images.length === 0) {
    throw new Error(`no decodable images in ${opts.imagesDir}`);
  }
  if (images.length < 2) {
    throw new Error(`need at least 2 decodable images, got ${images.length}`);
  }

  const full = opts.weightsDir ? await loadModelFromDisk(opts.weightsDir) : entry.build();
  const model =
    opts.tap === 'output'
      ? full
      : tf.model({
          inputs: full.inputs,
          outputs: full.getLayer(PENULTIMATE_LAYER).output as tf.SymbolicTensor,
        });

  const cols = opts.tap === 'output' ? 1000 : (entry.penultimateWidth as number);
  const data = new Float32Array(images.length * cols);
  const batches: BatchTiming[] = [];
  for (let start = 0, index = 0; start < images.length; start += batchSize, index++) {
    const chunk = images.slice(start, start + batchSize);
    const t0 = process.hrtime.bigint();
    const rows = tf.tidy(() => {
      const batch = tf.stack(chunk.map((img) => imageToTensor(img, entry)));
      const out = model.predict(batch) as tf.Tensor;
      if (out.shape.length !== 2) {
        throw new Error(`tap produced a rank-${out.shape.length} tensor`);
      }
      return out.dataSync() as Float32Array;
    });
    data.set(rows, start * cols);
    const seconds = Number(process.hrtime.bigint() - t0) / 1e9;
    batches.push({ index, size: chunk.length, seconds });
    log(`batch ${index}: ${chunk.length} images in ${seconds.toFixed(3)}s`);
  }

  const ids = images.map((img) => img.file);
  atomicWriteFile(opts.outPath, encodeEmbeddings(images.length, cols, data));
  atomicWriteFile(opts.idsPath, encodeIds(ids));
  atomicWriteFile(
    `${opts.outPath}.manifest.json`,
    JSON.stringify(
      {
        model: opts.model,
        tap: opts.tap,
        rows: images.length,
        cols,
        batchSize,
        skipped,
      },
      null,
      2,
    ) + '\n',
  );
  return { rows: images.length, cols, ids, skipped, batches };
}
