/**
 * Extraction manifest: which clip holds which shot, and where.
 *
 *     shotwright-clips v1
 *     <scene_id> TAB <shot_id> TAB <clip_path> TAB <start>:<end>
 *
 * start/end are 0-based frame indices into the clip, end exclusive.
 * Relative clip paths resolve against the manifest file's directory.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { FormatError } from './taxonomy.js';

export const MANIFEST_HEADER = 'shotwright-clips v1';

export interface ClipEntry {
  sceneId: string;
  shotId: string;
  clipPath: string;
  startFrame: number;
  endFrame: number;
}

export function parseManifest(text: string, baseDir: string): ClipEntry[] {
  const lines = text.split('\n');
  if (lines.length === 0 || lines[0] !== MANIFEST_HEADER) {
    const found = lines.length > 0 ? lines[0] : '';
    throw new FormatError(
      `bad manifest header: expected '${MANIFEST_HEADER}', found '${found}'`,
    );
  }
  const entries: ClipEntry[] = [];
  const seen = new Set<string>();
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i] as string;
    if (line.trim() === '') {
      continue;
    }
    const lineNo = i + 1;
    const fields = line.split('\t');
    if (fields.length !== 4) {
      throw new FormatError(
        `line ${lineNo}: expected 4 tab-separated fields, got ${fields.length}`,
      );
    }
    const [sceneId, shotId, clipPath, range] = fields as [string, string, string, string];
    if (sceneId === '' || shotId === '' || clipPath === '') {
      throw new FormatError(`line ${lineNo}: empty field`);
    }
    const key = `${sceneId}\t${shotId}`;
    if (seen.has(key)) {
      throw new FormatError(
        `line ${lineNo}: duplicate shot '${shotId}' in scene '${sceneId}'`,
      );
    }
    seen.add(key);
    const match = range.match(/^(\d+):(\d+)$/);
    if (match === null) {
      throw new FormatError(`line ${lineNo}: expected '<start>:<end>', found '${range}'`);
    }
    const startFrame = Number(match[1]);
    const endFrame = Number(match[2]);
    if (endFrame <= startFrame) {
      throw new FormatError(
        `line ${lineNo}: empty frame range ${startFrame}:${endFrame}`,
      );
    }
    entries.push({
      sceneId,
      shotId,
      clipPath: path.isAbsolute(clipPath) ? clipPath : path.join(baseDir, clipPath),
      startFrame,
      endFrame,
    });
  }
  if (entries.length === 0) {
    throw new FormatError('manifest lists no clips');
  }
  return entries;
}

export function loadManifest(manifestPath: string): ClipEntry[] {
  const text = fs.readFileSync(manifestPath, 'utf8');
  return parseManifest(text, path.dirname(manifestPath));
}
