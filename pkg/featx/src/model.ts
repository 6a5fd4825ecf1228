/**
 * Feature models: image batch in, one embedding row per image out.
 *
 * Two sources are supported. A TFJS graph model (for example a converted
 * Inception-v3-class feature-vector network) can be loaded from a local
 * model.json or a URL; its output width defines the embedding dimension,
 * 2048 for the canonical model. For fully offline use there is a built-in
 * stand-in, "seeded-cnn": a small convolutional stack whose weights come
 * from a fixed-seed generator, honoring the same 299x299x3 input contract
 * and 2048-wide output. It is not pretrained and exists so the pipeline can
 * be exercised end to end without fetching weights.
 */

import * as fs from 'fs';
import * as path from 'path';

import * as tf from '@tensorflow/tfjs';

import { INPUT_SIZE } from './image';

export const SEEDED_CNN = 'seeded-cnn';
export const SEEDED_CNN_DIM = 2048;

export interface FeatureModel {
  readonly id: string;
  readonly dim: number;
  /** [N, 299, 299, 3] in [-1, 1] -> [N, dim] */
  embed(batch: tf.Tensor4D): tf.Tensor2D;
  dispose(): void;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Deterministic standard normals via Box-Muller over the seeded stream. */
function gaussianArray(rand: () => number, size: number, scale: number): Float32Array {
  const out = new Float32Array(size);
  for (let i = 0; i < size; i += 2) {
    const u = Math.max(rand(), 1e-12);
    const v = rand();
    const r = Math.sqrt(-2.0 * Math.log(u));
    out[i] = r * Math.cos(2.0 * Math.PI * v) * scale;
    if (i + 1 < size) {
      out[i + 1] = r * Math.sin(2.0 * Math.PI * v) * scale;
    }
  }
  return out;
}

interface ConvSpec {
  size: number;
  inCh: number;
  outCh: number;
  stride: number;
  relu: boolean;
}

const SEEDED_LAYERS: ConvSpec[] = [
  { size: 3, inCh: 3, outCh: 16, stride: 2, relu: true },
  { size: 3, inCh: 16, outCh: 32, stride: 2, relu: true },
  { size: 3, inCh: 32, outCh: 64, stride: 2, relu: true },
  { size: 3, inCh: 64, outCh: 128, stride: 2, relu: true },
  { size: 1, inCh: 128, outCh: SEEDED_CNN_DIM, stride: 1, relu: false },
];

export function seededCnn(seed = 0x0bade5): FeatureModel {
  const rand = mulberry32(seed);
  const kernels = SEEDED_LAYERS.map((spec) => {
    const fanIn = spec.size * spec.size * spec.inCh;
    const values = gaussianArray(
      rand,
      spec.size * spec.size * spec.inCh * spec.outCh,
      Math.sqrt(2.0 / fanIn),
    );
    return tf.tensor4d(values, [spec.size, spec.size, spec.inCh, spec.outCh]);
  });
  return {
    id: SEEDED_CNN,
    dim: SEEDED_CNN_DIM,
    embed(batch: tf.Tensor4D): tf.Tensor2D {
      return tf.tidy(() => {
        let x: tf.Tensor4D = batch;
        SEEDED_LAYERS.forEach((spec, i) => {
          x = tf.conv2d(x, kernels[i] as tf.Tensor4D, spec.stride, 'same');
          if (spec.relu) {
            x = tf.relu(x);
          }
        });
        return tf.mean(x, [1, 2]) as tf.Tensor2D;
      });
    },
    dispose() {
      kernels.forEach((k) => k.dispose());
    },
  };
}

/** IO handler for graph models stored on the local file system. */
function localFileHandler(modelJsonPath: string): tf.io.IOHandler {
  return {
    async load(): Promise<tf.io.ModelArtifacts> {
      const dir = path.dirname(modelJsonPath);
      const doc = JSON.parse(fs.readFileSync(modelJsonPath, 'utf-8'));
      const manifest = doc.weightsManifest as Array<{
        paths: string[];
        weights: tf.io.WeightsManifestEntry[];
      }>;
      const specs: tf.io.WeightsManifestEntry[] = [];
      const shards: Buffer[] = [];
      for (const group of manifest) {
        specs.push(...group.weights);
        for (const rel of group.paths) {
          shards.push(fs.readFileSync(path.join(dir, rel)));
        }
      }
      const blob = Buffer.concat(shards);
      return {
        modelTopology: doc.modelTopology,
        format: doc.format,
        generatedBy: doc.generatedBy,
        convertedBy: doc.convertedBy,
        weightSpecs: specs,
        weightData: blob.buffer.slice(blob.byteOffset, blob.byteOffset + blob.byteLength),
      };
    },
  };
}

export async function loadGraphFeatureModel(idOrPath: string): Promise<FeatureModel> {
  const source = /^https?:\/\//.test(idOrPath)
    ? idOrPath
    : localFileHandler(
        idOrPath.endsWith('.json') ? idOrPath : path.join(idOrPath, 'model.json'),
      );
  const model = await tf.loadGraphModel(source as string | tf.io.IOHandler);
  const probeDim = () => {
    const out = model.outputs[0].shape;
    return out ? out[out.length - 1] ?? -1 : -1;
  };
  const dim = probeDim();
  if (dim <= 0) {
    throw new Error('graph model does not declare a flat feature output');
  }
  return {
    id: idOrPath,
    dim,
    embed(batch: tf.Tensor4D): tf.Tensor2D {
      return tf.tidy(() => {
        const out = model.predict(batch) as tf.Tensor;
        return out.reshape([batch.shape[0], dim]) as tf.Tensor2D;
      });
    },
    dispose() {
      model.dispose();
    },
  };
}

export async function loadFeatureModel(id: string): Promise<FeatureModel> {
  if (id === SEEDED_CNN) {
    return seededCnn();
  }
  return loadGraphFeatureModel(id);
}

export { INPUT_SIZE };
