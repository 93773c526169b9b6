/**
 * Embedding backends: text prompts and frame stacks to unit vectors
 * in a shared d-dimensional space.
 *
 * The `hash-<d>` backend is fully deterministic and needs no model
 * weights: token and feature identities seed small xorshift streams
 * whose outputs accumulate into the vector.  It exists so the whole
 * pipeline runs and stays byte-reproducible offline; swapping in a
 * real video-language model means implementing this same interface.
 */

import { RawClip, frameBytes } from './clips.js';

export interface EmbeddingModel {
  id: string;
  width: number;
  embedText(text: string): Float64Array;
  embedFrames(clip: RawClip, frameIndices: number[]): Float64Array;
}

export class ModelError extends Error {}

function fnv1a32(text: string): number {
  let hash = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash >>> 0;
}

/** xorshift32 stream of floats in [-1, 1). */
function* unitStream(seed: number): Generator<number> {
  let state = seed === 0 ? 0x9e3779b9 : seed >>> 0;
  while (true) {
    state ^= state << 13;
    state >>>= 0;
    state ^= state >>> 17;
    state ^= state << 5;
    state >>>= 0;
    yield (state >>> 8) / 0x800000 - 1;
  }
}

function addStream(vec: Float64Array, seed: number, scale: number): void {
  const stream = unitStream(seed);
  for (let j = 0; j < vec.length; j++) {
    vec[j] = (vec[j] as number) + scale * (stream.next().value as number);
  }
}

function normalized(vec: Float64Array): Float64Array {
  let sumSq = 0;
  for (let j = 0; j < vec.length; j++) {
    sumSq += (vec[j] as number) ** 2;
  }
  if (sumSq === 0) {
    throw new ModelError('cannot normalize a zero embedding');
  }
  const inv = 1 / Math.sqrt(sumSq);
  for (let j = 0; j < vec.length; j++) {
    vec[j] = (vec[j] as number) * inv;
  }
  return vec;
}

const GRID = 4;
/** mean R, G, B + GRID x GRID luminance cells + constant bias. */
const FRAME_FEATURES = 3 + GRID * GRID + 1;

function frameFeatures(clip: RawClip, index: number): Float64Array {
  const bytes = frameBytes(clip, index);
  const { width, height } = clip;
  const features = new Float64Array(FRAME_FEATURES);
  const cellCounts = new Float64Array(GRID * GRID);
  for (let y = 0; y < height; y++) {
    const cellY = Math.min(GRID - 1, Math.floor((y * GRID) / height));
    for (let x = 0; x < width; x++) {
      const at = (y * width + x) * 3;
      const r = bytes[at] as number;
      const g = bytes[at + 1] as number;
      const b = bytes[at + 2] as number;
      features[0] = (features[0] as number) + r;
      features[1] = (features[1] as number) + g;
      features[2] = (features[2] as number) + b;
      const cellX = Math.min(GRID - 1, Math.floor((x * GRID) / width));
      const cell = cellY * GRID + cellX;
      const luma = 0.299 * r + 0.587 * g + 0.114 * b;
      features[3 + cell] = (features[3 + cell] as number) + luma;
      cellCounts[cell] = (cellCounts[cell] as number) + 1;
    }
  }
  const pixelCount = width * height;
  for (let c = 0; c < 3; c++) {
    features[c] = (features[c] as number) / (pixelCount * 255);
  }
  for (let cell = 0; cell < GRID * GRID; cell++) {
    const count = cellCounts[cell] as number;
    if (count > 0) {
      features[3 + cell] = (features[3 + cell] as number) / (count * 255);
    }
  }
  features[FRAME_FEATURES - 1] = 1;
  return features;
}

class HashModel implements EmbeddingModel {
  readonly id: string;
  readonly width: number;

  constructor(width: number) {
    this.id = `hash-${width}`;
    this.width = width;
  }

  embedText(text: string): Float64Array {
    const tokens = text.toLowerCase().match(/[a-z0-9']+/g) ?? [];
    if (tokens.length === 0) {
      throw new ModelError(`prompt has no tokens: '${text}'`);
    }
    const vec = new Float64Array(this.width);
    for (const token of tokens) {
      addStream(vec, fnv1a32(`text:${token}`), 1);
    }
    return normalized(vec);
  }

  embedFrames(clip: RawClip, frameIndices: number[]): Float64Array {
    if (frameIndices.length === 0) {
      throw new ModelError('no frames to embed');
    }
    const mean = new Float64Array(FRAME_FEATURES);
    for (const index of frameIndices) {
      const features = frameFeatures(clip, index);
      for (let k = 0; k < FRAME_FEATURES; k++) {
        mean[k] = (mean[k] as number) + (features[k] as number);
      }
    }
    for (let k = 0; k < FRAME_FEATURES; k++) {
      mean[k] = (mean[k] as number) / frameIndices.length;
    }
    const vec = new Float64Array(this.width);
    for (let k = 0; k < FRAME_FEATURES; k++) {
      addStream(vec, fnv1a32(`frame-feature:${k}`), mean[k] as number);
    }
    return normalized(vec);
  }
}

/** `hash-<width>` is the only offline backend; width must be >= 8. */
export function resolveModel(modelId: string): EmbeddingModel {
  const match = modelId.match(/^hash-(\d+)$/);
  if (match === null) {
    throw new ModelError(
      `unknown model id '${modelId}'; available: hash-<width>, e.g. hash-64`,
    );
  }
  const width = Number(match[1]);
  if (width < 8) {
    throw new ModelError(`model width must be >= 8, got ${width}`);
  }
  return new HashModel(width);
}
