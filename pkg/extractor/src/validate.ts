/**
 * Output validation: re-checks a distribution file against the
 * taxonomy and the dataset format contract, reporting every violation
 * with its line number instead of stopping at the first.
 */

import { Taxonomy } from './taxonomy.js';
import { DATASET_HEADER } from './dataset.js';

export const NORMALIZATION_TOLERANCE = 1e-5;

export interface Violation {
  line: number;
  message: string;
}

export interface ValidationReport {
  rowCount: number;
  violations: Violation[];
}

export function validateOutput(text: string, taxonomy: Taxonomy): ValidationReport {
  const violations: Violation[] = [];
  const lines = text.split('\n');
  if (lines.length === 0 || lines[0] !== DATASET_HEADER) {
    const found = lines.length > 0 ? lines[0] : '';
    violations.push({
      line: 1,
      message: `bad dataset header: expected '${DATASET_HEADER}', found '${found}'`,
    });
    return { rowCount: 0, violations };
  }

  let rowCount = 0;
  const finishedScenes = new Set<string>();
  let currentScene: string | null = null;
  const currentShotIds = new Set<string>();

  for (let i = 1; i < lines.length; i++) {
    const line = lines[i] as string;
    if (line.trim() === '') {
      continue;
    }
    const lineNo = i + 1;
    rowCount += 1;
    const fields = line.split('\t');
    if (fields.length === 3) {
      violations.push({ line: lineNo, message: 'missing distribution column' });
      continue;
    }
    if (fields.length !== 4) {
      violations.push({
        line: lineNo,
        message: `expected 4 tab-separated fields, got ${fields.length}`,
      });
      continue;
    }
    const sceneId = fields[0] as string;
    const shotId = fields[1] as string;
    if (sceneId === '' || shotId === '') {
      violations.push({ line: lineNo, message: 'empty scene or shot id' });
      continue;
    }

    if (sceneId !== currentScene) {
      if (finishedScenes.has(sceneId)) {
        violations.push({
          line: lineNo,
          message: `scene '${sceneId}' reappears after other scenes`,
        });
      }
      if (currentScene !== null) {
        finishedScenes.add(currentScene);
      }
      currentScene = sceneId;
      currentShotIds.clear();
    }
    if (currentShotIds.has(shotId)) {
      violations.push({
        line: lineNo,
        message: `duplicate shot id '${shotId}' in scene '${sceneId}'`,
      });
    }
    currentShotIds.add(shotId);

    const classParts = (fields[2] as string).split(',');
    if (classParts.length !== taxonomy.attributes.length) {
      violations.push({
        line: lineNo,
        message: `expected ${taxonomy.attributes.length} class indices, got ${classParts.length}`,
      });
    } else {
      classParts.forEach((part, attr) => {
        const count = taxonomy.classCounts[attr] as number;
        if (!/^\d+$/.test(part)) {
          violations.push({ line: lineNo, message: `non-integer class index '${part}'` });
        } else if (Number(part) >= count) {
          violations.push({
            line: lineNo,
            message: `class index ${part} outside 0..${count - 1} for '${(taxonomy.attributes[attr] as { name: string }).name}'`,
          });
        }
      });
    }

    const valueParts = (fields[3] as string).split(',');
    if (valueParts.length !== taxonomy.totalClasses) {
      violations.push({
        line: lineNo,
        message: `expected ${taxonomy.totalClasses} distribution values, got ${valueParts.length}`,
      });
      continue;
    }
    const values = valueParts.map(part => Number(part));
    let parseable = true;
    values.forEach((value, at) => {
      if ((valueParts[at] as string).trim() === '' || !Number.isFinite(value)) {
        violations.push({
          line: lineNo,
          message: `bad distribution value '${valueParts[at]}'`,
        });
        parseable = false;
      } else if (value < 0 || value > 1) {
        violations.push({
          line: lineNo,
          message: `distribution value ${value} outside [0, 1]`,
        });
        parseable = false;
      }
    });
    if (!parseable) {
      continue;
    }
    for (let attr = 0; attr < taxonomy.attributes.length; attr++) {
      const start = taxonomy.blockOffsets[attr] as number;
      const count = taxonomy.classCounts[attr] as number;
      let total = 0;
      for (let j = start; j < start + count; j++) {
        total += values[j] as number;
      }
      if (Math.abs(total - 1) > NORMALIZATION_TOLERANCE) {
        violations.push({
          line: lineNo,
          message: `block '${(taxonomy.attributes[attr] as { name: string }).name}' sums to ${total}`,
        });
      }
    }
  }
  return { rowCount, violations };
}
