/**
 * The model zoo. Each entry is a classification architecture with a
 * 1000-wide output layer and a documented penultimate width (the tensor
 * entering the final classifier, after any global pooling and flattening).
 *
 * Architectures are built locally with seeded deterministic initializers,
 * so the same zoo entry always produces the same embeddings; real weight
 * artifacts can be swapped in from disk (see loadModelFromDisk) when
 * available. One entry deliberately pools *after* its 1000-wide conv, so
 * its pre-classifier tensor is non-flat and penultimate extraction must be
 * refused rather than silently reshaped.
 */

import { mkdirSync, readFileSync, writeFileSync } from 'node:fs';
import { join } from 'node:path';

import * as tf from '@tensorflow/tfjs';

export const PENULTIMATE_LAYER = 'penultimate';
export const OUTPUT_WIDTH = 1000;

export interface ZooEntry {
  name: string;
  inputSize: number;
  /** Per-channel normalization applied after scaling to [0, 1]. */
  mean: [number, number, number];
  std: [number, number, number];
  /** Width of the tensor entering the final layer; null when non-flat. */
  penultimateWidth: number | null;
  /** Shape behind the final layer (no batch dim), for error messages. */
  penultimateShape: number[];
  build(): tf.LayersModel;
}

const IMAGENET_MEAN: [number, number, number] = [0.485, 0.456, 0.406];
const IMAGENET_STD: [number, number, number] = [0.229, 0.224, 0.225];

function glorot(seed: number) {
  return tf.initializers.glorotUniform({ seed });
}

function convTrunk(x: tf.SymbolicTensor, widths: number[], seedBase: number): tf.SymbolicTensor {
  widths.forEach((filters, i) => {
    x = tf.layers
      .conv2d({
        filters,
        kernelSize: 3,
        strides: 2,
        padding: 'same',
        activation: 'relu',
        kernelInitializer: glorot(seedBase + i),
        biasInitializer: 'zeros',
        name: `trunk_${i}`,
      })
      .apply(x) as tf.SymbolicTensor;
  });
  return x;
}

function pooledClassifier(
  name: string,
  inputSize: number,
  trunkWidths: number[],
  penultimateWidth: number,
  seedBase: number,
): tf.LayersModel {
  const input = tf.input({ shape: [inputSize, inputSize, 3], name: 'image' });
  let x = convTrunk(input, trunkWidths, seedBase);
  x = tf.layers.globalAveragePooling2d({ name: 'pool' }).apply(x) as tf.SymbolicTensor;
  x = tf.layers
    .dense({
      units: penultimateWidth,
      activation: 'relu',
      name: PENULTIMATE_LAYER,
      kernelInitializer: glorot(seedBase + 100),
      biasInitializer: 'zeros',
    })
    .apply(x) as tf.SymbolicTensor;
  const logits = tf.layers
    .dense({
      units: OUTPUT_WIDTH,
      name: 'classifier',
      kernelInitializer: glorot(seedBase + 101),
      biasInitializer: 'zeros',
    })
    .apply(x) as tf.SymbolicTensor;
  return tf.model({ inputs: input, outputs: logits, name });
}

/**
 * Final layer is an average pool over a (13, 13, 1000) conv map, so the
 * tensor entering it is not flat.
 */
function latePoolingClassifier(name: string, seedBase: number): tf.LayersModel {
  const input = tf.input({ shape: [52, 52, 3], name: 'image' });
  let x = convTrunk(input, [16, 32], seedBase); // 52 -> 26 -> 13
  x = tf.layers
    .conv2d({
      filters: OUTPUT_WIDTH,
      kernelSize: 1,
      name: PENULTIMATE_LAYER,
      kernelInitializer: glorot(seedBase + 100),
      biasInitializer: 'zeros',
    })
    .apply(x) as tf.SymbolicTensor;
  const out = tf.layers
    .globalAveragePooling2d({ name: 'classifier_pool' })
    .apply(x) as tf.SymbolicTensor;
  return tf.model({ inputs: input, outputs: out, name });
}

function entry(
  name: string,
  penultimateWidth: number,
  seedBase: number,
  trunkWidths: number[] = [16, 32],
): ZooEntry {
  return {
    name,
    inputSize: 32,
    mean: IMAGENET_MEAN,
    std: IMAGENET_STD,
    penultimateWidth,
    penultimateShape: [penultimateWidth],
    build: () => pooledClassifier(name, 32, trunkWidths, penultimateWidth, seedBase),
  };
}

/** Catalog keyed by model name; penultimate widths mirror the real zoos. */
export const ZOO: Record<string, ZooEntry> = Object.fromEntries(
  [
    entry('alexnet', 4096, 1000),
    entry('googlenet', 1024, 2000),
    entry('vgg19_bn', 4096, 3000),
    entry('mobilenet_v3_large', 1280, 4000),
    entry('shufflenet_v2_x2', 2048, 5000),
    entry('resnet152', 2048, 6000),
    entry('maxvit_t', 512, 7000),
    entry('swin_v2_b', 1024, 8000),
    entry('convnext_large', 1536, 9000),
    entry('efficientnet_v2_l', 1280, 10000),
    entry('regnet_y_32gf', 3712, 11000),
    entry('vit_h_14', 1280, 12000),
    {
      name: 'squeezenet1_1',
      inputSize: 52,
      mean: IMAGENET_MEAN,
      std: IMAGENET_STD,
      penultimateWidth: null,
      penultimateShape: [13, 13, OUTPUT_WIDTH],
      build: () => latePoolingClassifier('squeezenet1_1', 13000),
    },
  ].map((e) => [e.name, e]),
);

export function getZooEntry(name: string): ZooEntry {
  const e = ZOO[name];
  if (!e) {
    throw new Error(
      `unknown model '${name}'; available: ${Object.keys(ZOO).sort().join(', ')}`,
    );
  }
  return e;
}

// -- weight artifacts on disk -------------------------------------------------

function toArrayBuffer(data: ArrayBuffer | ArrayBuffer[]): ArrayBuffer {
  if (!Array.isArray(data)) return data;
  const total = data.reduce((s, b) => s + b.byteLength, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const b of data) {
    out.set(new Uint8Array(b), offset);
    offset += b.byteLength;
  }
  return out.buffer;
}

/** Save a built model's topology and weights as tfjs artifacts. */
export async function saveModelToDisk(model: tf.LayersModel, dir: string): Promise<void> {
  await model.save({
    save: async (artifacts) => {
      mkdirSync(dir, { recursive: true });
      const weightsManifest = [
        { paths: ['weights.bin'], weights: artifacts.weightSpecs ?? [] },
      ];
      writeFileSync(
        join(dir, 'model.json'),
        JSON.stringify({
          modelTopology: artifacts.modelTopology,
          format: artifacts.format,
          generatedBy: artifacts.generatedBy,
          convertedBy: artifacts.convertedBy,
          weightsManifest,
        }),
      );
      writeFileSync(
        join(dir, 'weights.bin'),
        Buffer.from(toArrayBuffer(artifacts.weightData ?? new ArrayBuffer(0))),
      );
      return {
        modelArtifactsInfo: { dateSaved: new Date(), modelTopologyType: 'JSON' },
      };
    },
  });
}

/** Load tfjs layers-model artifacts (model.json + weight bins) from disk. */
export async function loadModelFromDisk(dir: string): Promise<tf.LayersModel> {
  return tf.loadLayersModel({
    load: async () => {
      const manifest = JSON.parse(readFileSync(join(dir, 'model.json'), 'utf8'));
      const weightSpecs: tf.io.WeightsManifestEntry[] = [];
      const buffers: Buffer[] = [];
      for (const group of manifest.weightsManifest) {
        weightSpecs.push(...group.weights);
        for (const p of group.paths) buffers.push(readFileSync(join(dir, p)));
      }
      const merged = Buffer.concat(buffers);
      return {
        modelTopology: manifest.modelTopology,
        format: manifest.format,
        generatedBy: manifest.generatedBy,
        convertedBy: manifest.convertedBy,
        weightSpecs,
        weightData: merged.buffer.slice(
          merged.byteOffset,
          merged.byteOffset + merged.byteLength,
        ),
      };
    },
  });
}
