/**
 * Raw clip decoding and uniform frame sampling.
 *
 * Clips use a self-describing uncompressed format so extraction runs
 * without codec binaries:
 *
 *     shotwright-rawclip v1
 *     width <W>
 *     height <H>
 *     frames <N>
 *     <N * W * H * 3 bytes of interleaved RGB, frame-major>
 *
 * The four header lines are newline-terminated ASCII; pixel bytes
 * start immediately after the fourth newline.
 */

import * as fs from 'node:fs';

export const CLIP_HEADER = 'shotwright-rawclip v1';
export const SAMPLED_FRAMES = 32;

export class ClipError extends Error {}

export interface RawClip {
  width: number;
  height: number;
  frameCount: number;
  /** pixel payload: frameCount * width * height * 3 bytes. */
  pixels: Buffer;
}

function headerNumber(line: string | undefined, key: string, lineNo: number): number {
  if (line === undefined) {
    throw new ClipError(`truncated header: missing '${key}' line`);
  }
  const match = line.match(/^([a-z]+) (\d+)$/);
  if (match === null || match[1] !== key) {
    throw new ClipError(`line ${lineNo}: expected '${key} <N>', found '${line}'`);
  }
  const value = Number(match[2]);
  if (value <= 0) {
    throw new ClipError(`line ${lineNo}: ${key} must be positive, got ${value}`);
  }
  return value;
}

export function decodeClip(buffer: Buffer): RawClip {
  let cursor = 0;
  const lines: string[] = [];
  for (let i = 0; i < 4; i++) {
    const nl = buffer.indexOf(0x0a, cursor);
    if (nl < 0) {
      throw new ClipError('truncated header: fewer than 4 lines');
    }
    lines.push(buffer.subarray(cursor, nl).toString('utf8'));
    cursor = nl + 1;
  }
  if (lines[0] !== CLIP_HEADER) {
    throw new ClipError(
      `bad clip header: expected '${CLIP_HEADER}', found '${lines[0]}'`,
    );
  }
  const width = headerNumber(lines[1], 'width', 2);
  const height = headerNumber(lines[2], 'height', 3);
  const frameCount = headerNumber(lines[3], 'frames', 4);
  const expected = frameCount * width * height * 3;
  const pixels = buffer.subarray(cursor);
  if (pixels.length !== expected) {
    throw new ClipError(
      `pixel payload holds ${pixels.length} bytes, expected ${expected}`,
    );
  }
  return { width, height, frameCount, pixels: Buffer.from(pixels) };
}

export function loadClip(path: string): RawClip {
  let buffer: Buffer;
  try {
    buffer = fs.readFileSync(path);
  } catch (err) {
    throw new ClipError(`cannot read clip file '${path}': ${(err as Error).message}`);
  }
  return decodeClip(buffer);
}

export function encodeClip(clip: RawClip): Buffer {
  const header = Buffer.from(
    `${CLIP_HEADER}\nwidth ${clip.width}\nheight ${clip.height}\nframes ${clip.frameCount}\n`,
    'utf8',
  );
  const expected = clip.frameCount * clip.width * clip.height * 3;
  if (clip.pixels.length !== expected) {
    throw new ClipError(
      `pixel payload holds ${clip.pixels.length} bytes, expected ${expected}`,
    );
  }
  return Buffer.concat([header, clip.pixels]);
}

/** One frame's pixel bytes (a view, not a copy). */
export function frameBytes(clip: RawClip, index: number): Buffer {
  if (index < 0 || index >= clip.frameCount) {
    throw new ClipError(`frame index ${index} outside 0..${clip.frameCount - 1}`);
  }
  const size = clip.width * clip.height * 3;
  return clip.pixels.subarray(index * size, (index + 1) * size);
}

/**
 * Indices of `count` frames drawn uniformly from [start, end), always
 * including the first and last frame of the range.  A range shorter
 * than `count` repeats frames rather than dropping any.
 */
export function uniformFrameIndices(start: number, end: number, count: number = SAMPLED_FRAMES): number[] {
  if (count < 1) {
    throw new ClipError(`frame count must be >= 1, got ${count}`);
  }
  if (start < 0 || end <= start) {
    throw new ClipError(`bad frame range [${start}, ${end})`);
  }
  const span = end - 1 - start;
  const indices: number[] = [];
  for (let k = 0; k < count; k++) {
    const fraction = count === 1 ? 0 : k / (count - 1);
    indices.push(start + Math.round(fraction * span));
  }
  return indices;
}
