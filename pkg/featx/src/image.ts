/**
 * Image loading and the preprocessing contract of the feature extractor:
 * decode, resize (aspect-distorting) to 299x299 and scale channels from
 * [0, 255] to [-1, 1].
 */

import * as fs from 'fs';
import * as path from 'path';

import * as tf from '@tensorflow/tfjs';
import * as jpeg from 'jpeg-js';
import { PNG } from 'pngjs';

export const INPUT_SIZE = 299;

export interface RawImage {
  /** RGB interleaved, values 0..255 */
  pixels: Uint8Array;
  width: number;
  height: number;
}

export function decodeImage(filePath: string): RawImage {
  const ext = path.extname(filePath).toLowerCase();
  const blob = fs.readFileSync(filePath);
  if (ext === '.png') {
    const png = PNG.sync.read(blob);
    return { pixels: dropAlpha(png.data, 4), width: png.width, height: png.height };
  }
  if (ext === '.jpg' || ext === '.jpeg') {
    const img = jpeg.decode(blob, { useTArray: true });
    return { pixels: dropAlpha(img.data, 4), width: img.width, height: img.height };
  }
  throw new Error(`unsupported image type: ${filePath}`);
}

function dropAlpha(rgba: Uint8Array | Buffer, stride: number): Uint8Array {
  const pixels = rgba.length / stride;
  const rgb = new Uint8Array(pixels * 3);
  for (let i = 0; i < pixels; i++) {
    rgb[3 * i] = rgba[stride * i];
    rgb[3 * i + 1] = rgba[stride * i + 1];
    rgb[3 * i + 2] = rgba[stride * i + 2];
  }
  return rgb;
}

/** [height, width, 3] tensor in [-1, 1] at the model input size. */
export function preprocess(image: RawImage): tf.Tensor3D {
  return tf.tidy(() => {
    const raw = tf.tensor3d(image.pixels, [image.height, image.width, 3], 'float32');
    const resized = tf.image.resizeBilinear(raw as tf.Tensor3D, [INPUT_SIZE, INPUT_SIZE]);
    return resized.div(127.5).sub(1.0) as tf.Tensor3D;
  });
}
