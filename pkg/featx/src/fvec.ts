/**
 * FVEC binary format: labeled feature vectors, bit-exact interchange.
 *
 * Layout (little-endian): magic "FVEC", version u8, dim u32, count u32,
 * count x dim float32 features row-major, count int32 labels (1..n, 0 for
 * category-1 objects), count u8 provenance tags.
 */

import * as fs from 'fs';

export const FVEC_VERSION = 1;
const MAGIC = 'FVEC';
const HEADER_BYTES = 4 + 1 + 4 + 4;

export const PROVENANCE_ACCEPTED_GENUINE = 0;
export const PROVENANCE_NON_EURO_CAT1 = 2;

export interface FvecData {
  dim: number;
  /** count x dim, row-major */
  features: Float32Array;
  labels: Int32Array;
  provenance: Uint8Array;
}

export function writeFvec(path: string, data: FvecData): void {
  const count = data.labels.length;
  if (data.features.length !== count * data.dim) {
    throw new Error('feature block size does not match count and dim');
  }
  if (data.provenance.length !== count) {
    throw new Error('provenance length does not match count');
  }
  for (const v of data.features) {
    if (!Number.isFinite(v)) {
      throw new Error('non-finite feature value');
    }
  }
  const buf = Buffer.alloc(HEADER_BYTES + count * data.dim * 4 + count * 4 + count);
  buf.write(MAGIC, 0, 'ascii');
  buf.writeUInt8(FVEC_VERSION, 4);
  buf.writeUInt32LE(data.dim, 5);
  buf.writeUInt32LE(count, 9);
  let off = HEADER_BYTES;
  for (const v of data.features) {
    buf.writeFloatLE(v, off);
    off += 4;
  }
  for (const v of data.labels) {
    buf.writeInt32LE(v, off);
    off += 4;
  }
  for (const v of data.provenance) {
    buf.writeUInt8(v, off);
    off += 1;
  }
  fs.writeFileSync(path, buf);
}

export function readFvec(path: string): FvecData {
  const buf = fs.readFileSync(path);
  if (buf.length < HEADER_BYTES) {
    throw new Error('truncated header in FVEC file');
  }
  if (buf.toString('ascii', 0, 4) !== MAGIC) {
    throw new Error(`bad magic in FVEC file: ${buf.toString('ascii', 0, 4)}`);
  }
  if (buf.readUInt8(4) !== FVEC_VERSION) {
    throw new Error(`unsupported FVEC format version: ${buf.readUInt8(4)}`);
  }
  const dim = buf.readUInt32LE(5);
  const count = buf.readUInt32LE(9);
  const expected = HEADER_BYTES + count * dim * 4 + count * 4 + count;
  if (buf.length < expected) {
    throw new Error('truncated payload in FVEC file');
  }
  if (buf.length > expected) {
    throw new Error('trailing data in FVEC file');
  }
  const features = new Float32Array(count * dim);
  let off = HEADER_BYTES;
  for (let i = 0; i < features.length; i++, off += 4) {
    features[i] = buf.readFloatLE(off);
  }
  const labels = new Int32Array(count);
  for (let i = 0; i < count; i++, off += 4) {
    labels[i] = buf.readInt32LE(off);
  }
  const provenance = new Uint8Array(count);
  for (let i = 0; i < count; i++, off += 1) {
    provenance[i] = buf.readUInt8(off);
  }
  return { dim, features, labels, provenance };
}
