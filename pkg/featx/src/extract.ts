/**
 * Walk a directory of labeled images and emit an FVEC file of embeddings.
 *
 * The input directory holds one subfolder per class, named by the canonical
 * label grammar (EUR_005_a_1, ...), plus optionally "cat1" for objects
 * outside every banknote class. Images are resized to 299x299, scaled to
 * [-1, 1], embedded and written with their class labels and provenance
 * tags. Unreadable images are skipped with a warning and counted; an
 * unrecognized folder name is an error.
 */

import * as fs from 'fs';
import * as path from 'path';

import * as tf from '@tensorflow/tfjs';

import {
  FvecData,
  PROVENANCE_ACCEPTED_GENUINE,
  PROVENANCE_NON_EURO_CAT1,
  writeFvec,
} from './fvec';
import { INPUT_SIZE, decodeImage, preprocess } from './image';
import { CANONICAL_LABELS } from './labels';
import { folderLabel } from './labels';
import { FeatureModel, SEEDED_CNN, loadFeatureModel } from './model';

const IMAGE_EXTENSIONS = new Set(['.png', '.jpg', '.jpeg']);

export interface ExtractorConfig {
  inDir: string;
  outPath: string;
  /** "seeded-cnn" or a TFJS graph model path/URL. */
  model?: string;
  batchSize?: number;
}

export interface ExtractResult {
  count: number;
  dim: number;
  skipped: number;
  perImageMs: number;
  manifestPath: string;
}

interface PendingImage {
  file: string;
  label: number;
}

function listImages(inDir: string): PendingImage[] {
  const folders = fs
    .readdirSync(inDir, { withFileTypes: true })
    .filter((e) => e.isDirectory())
    .map((e) => e.name)
    .sort();
  if (folders.length === 0) {
    throw new Error(`no class folders in ${inDir}`);
  }
  const pending: PendingImage[] = [];
  for (const folder of folders) {
    const label = folderLabel(folder); // throws on unknown folder names
    const files = fs.readdirSync(path.join(inDir, folder)).sort();
    for (const file of files) {
      if (IMAGE_EXTENSIONS.has(path.extname(file).toLowerCase())) {
        pending.push({ file: path.join(inDir, folder, file), label });
      }
    }
  }
  return pending;
}

export function manifestPath(outPath: string): string {
  return outPath.replace(/\.[^./\\]*$/, '') + '.manifest.json';
}

export async function extract(config: ExtractorConfig): Promise<ExtractResult> {
  const modelId = config.model ?? SEEDED_CNN;
  const batchSize = config.batchSize ?? 8;
  if (batchSize < 1) {
    throw new Error('batch size must be >= 1');
  }
  const pending = listImages(config.inDir);
  const model: FeatureModel = await loadFeatureModel(modelId);
  try {
    const rows: Float32Array[] = [];
    const labels: number[] = [];
    let skipped = 0;
    let embedMs = 0;
    for (let start = 0; start < pending.length; start += batchSize) {
      const slice = pending.slice(start, start + batchSize);
      const tensors: tf.Tensor3D[] = [];
      const batchLabels: number[] = [];
      for (const item of slice) {
        try {
          const image = decodeImage(item.file);
          tensors.push(preprocess(image));
          batchLabels.push(item.label);
        } catch (err) {
          skipped += 1;
          console.warn(`skipping unreadable image ${item.file}: ${(err as Error).message}`);
        }
      }
      if (tensors.length === 0) {
        continue;
      }
      const begin = performance.now();
      const batch = tf.stack(tensors) as tf.Tensor4D;
      tensors.forEach((t) => t.dispose());
      const embedded = model.embed(batch);
      const values = (await embedded.data()) as Float32Array;
      embedMs += performance.now() - begin;
      batch.dispose();
      embedded.dispose();
      for (let i = 0; i < batchLabels.length; i++) {
        rows.push(values.slice(i * model.dim, (i + 1) * model.dim));
        labels.push(batchLabels[i]);
      }
    }
    if (rows.length === 0) {
      throw new Error(`no readable images found in ${config.inDir}`);
    }
    const features = new Float32Array(rows.length * model.dim);
    rows.forEach((row, i) => features.set(row, i * model.dim));
    const data: FvecData = {
      dim: model.dim,
      features,
      labels: Int32Array.from(labels),
      provenance: Uint8Array.from(
        labels.map((l) => (l === 0 ? PROVENANCE_NON_EURO_CAT1 : PROVENANCE_ACCEPTED_GENUINE)),
      ),
    };
    writeFvec(config.outPath, data);
    const manifest = {
      format_version: 1,
      n_classes: CANONICAL_LABELS.length,
      dim: model.dim,
      class_names: CANONICAL_LABELS,
      model: modelId,
      preprocessing: {
        resize: [INPUT_SIZE, INPUT_SIZE],
        scale: '[-1,1]',
        channels: 'RGB',
      },
      source_dir: config.inDir,
      count: rows.length,
      skipped,
    };
    const mPath = manifestPath(config.outPath);
    fs.writeFileSync(mPath, JSON.stringify(manifest, null, 2) + '\n');
    return {
      count: rows.length,
      dim: model.dim,
      skipped,
      perImageMs: embedMs / rows.length,
      manifestPath: mPath,
    };
  } finally {
    model.dispose();
  }
}
