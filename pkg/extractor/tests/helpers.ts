/** Shared fixtures: tiny taxonomies and synthetic raw clips. */

import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

import { RawClip, encodeClip } from '../src/clips.js';
import { Taxonomy, parseTaxonomy } from '../src/taxonomy.js';

export const SMALL_TAXONOMY_TEXT = [
  'shotwright-taxonomy v1',
  'pace\tslow,medium,fast',
  'light\tday,night',
  'mood\tcalm,tense,warm,cold',
  '',
].join('\n');

export function smallTaxonomy(): Taxonomy {
  return parseTaxonomy(SMALL_TAXONOMY_TEXT);
}

export function tempDir(label: string): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), `extractor-${label}-`));
}

/**
 * A deterministic clip whose pixels vary with the seed, the frame
 * index, and the position, so different seeds embed differently and
 * the luminance grid sees spatial structure.
 */
export function makeClip(seed: number, frames: number, width = 8, height = 6): RawClip {
  const pixels = Buffer.alloc(frames * width * height * 3);
  let at = 0;
  for (let f = 0; f < frames; f++) {
    for (let y = 0; y < height; y++) {
      for (let x = 0; x < width; x++) {
        pixels[at++] = (seed * 37 + f * 11 + x * 5) % 256;
        pixels[at++] = (seed * 59 + f * 7 + y * 13) % 256;
        pixels[at++] = (seed * 83 + f * 3 + x * y) % 256;
      }
    }
  }
  return { width, height, frameCount: frames, pixels };
}

export function writeClip(dir: string, name: string, clip: RawClip): string {
  const clipPath = path.join(dir, name);
  fs.writeFileSync(clipPath, encodeClip(clip));
  return clipPath;
}

export function writeText(dir: string, name: string, text: string): string {
  const filePath = path.join(dir, name);
  fs.writeFileSync(filePath, text, 'utf8');
  return filePath;
}
