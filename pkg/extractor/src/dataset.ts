/**
 * Reading and writing the core dataset format:
 *
 *     shotwright-dataset v1
 *     <scene_id> TAB <shot_id> TAB c1,...,cN [TAB comma-separated decimals]
 *
 * Shots of a scene sit on consecutive lines; the optional fourth
 * column is the concatenated per-attribute distribution row.
 */

import { FormatError } from './taxonomy.js';

export const DATASET_HEADER = 'shotwright-dataset v1';

export interface DatasetRow {
  sceneId: string;
  shotId: string;
  classes: number[];
  distribution: number[] | null;
  lineNo: number;
}

/** Strict parse: any structural defect throws. */
export function parseDataset(text: string): DatasetRow[] {
  const lines = text.split('\n');
  if (lines.length === 0 || lines[0] !== DATASET_HEADER) {
    const found = lines.length > 0 ? lines[0] : '';
    throw new FormatError(
      `bad dataset header: expected '${DATASET_HEADER}', found '${found}'`,
    );
  }
  const rows: DatasetRow[] = [];
  const finishedScenes = new Set<string>();
  let currentScene: string | null = null;
  const currentShotIds = new Set<string>();
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i] as string;
    if (line.trim() === '') {
      continue;
    }
    const lineNo = i + 1;
    const fields = line.split('\t');
    if (fields.length !== 3 && fields.length !== 4) {
      throw new FormatError(
        `line ${lineNo}: expected 3 or 4 tab-separated fields, got ${fields.length}`,
      );
    }
    const sceneId = fields[0] as string;
    const shotId = fields[1] as string;
    if (sceneId === '' || shotId === '') {
      throw new FormatError(`line ${lineNo}: empty scene or shot id`);
    }
    const classes = (fields[2] as string).split(',').map(part => {
      if (!/^\d+$/.test(part)) {
        throw new FormatError(`line ${lineNo}: non-integer class index '${part}'`);
      }
      return Number(part);
    });
    let distribution: number[] | null = null;
    if (fields.length === 4) {
      distribution = (fields[3] as string).split(',').map(part => {
        const value = Number(part);
        if (part.trim() === '' || !Number.isFinite(value)) {
          throw new FormatError(`line ${lineNo}: bad distribution value '${part}'`);
        }
        return value;
      });
    }
    if (sceneId !== currentScene) {
      if (finishedScenes.has(sceneId)) {
        throw new FormatError(
          `line ${lineNo}: scene '${sceneId}' reappears after other scenes`,
        );
      }
      if (currentScene !== null) {
        finishedScenes.add(currentScene);
      }
      currentScene = sceneId;
      currentShotIds.clear();
    }
    if (currentShotIds.has(shotId)) {
      throw new FormatError(
        `line ${lineNo}: duplicate shot id '${shotId}' in scene '${sceneId}'`,
      );
    }
    currentShotIds.add(shotId);
    rows.push({ sceneId, shotId, classes, distribution, lineNo });
  }
  return rows;
}

export function formatDataset(rows: DatasetRow[]): string {
  const lines = [DATASET_HEADER];
  for (const row of rows) {
    const fields = [row.sceneId, row.shotId, row.classes.join(',')];
    if (row.distribution !== null) {
      fields.push(row.distribution.map(v => String(v)).join(','));
    }
    lines.push(fields.join('\t'));
  }
  return lines.join('\n') + '\n';
}
