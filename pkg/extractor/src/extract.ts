/**
 * The extraction pipeline: clips to attribute distribution rows.
 *
 * For each manifest entry, 32 frames are sampled uniformly across the
 * shot's frame range (first and last included), embedded, and scored
 * against every attribute's prompt embeddings by inner product; a
 * softmax within each attribute block turns the scores into the
 * concatenated distribution row.  Undecodable clips are skipped and
 * recorded, not fatal.
 */

import { ClipError, loadClip, uniformFrameIndices } from './clips.js';
import { DatasetRow } from './dataset.js';
import { EmbeddingModel } from './embedding.js';
import { ClipEntry } from './manifest.js';
import { PromptSet, buildPromptSets } from './prompts.js';
import { FormatError, Taxonomy } from './taxonomy.js';

export interface SkippedClip {
  sceneId: string;
  shotId: string;
  message: string;
}

export interface ExtractionResult {
  rows: DatasetRow[];
  skipped: SkippedClip[];
}

function softmaxBlock(scores: number[]): number[] {
  let max = -Infinity;
  for (const s of scores) {
    if (s > max) {
      max = s;
    }
  }
  const exps = scores.map(s => Math.exp(s - max));
  let total = 0;
  for (const e of exps) {
    total += e;
  }
  return exps.map(e => e / total);
}

function argmax(values: number[]): number {
  let best = 0;
  for (let j = 1; j < values.length; j++) {
    if ((values[j] as number) > (values[best] as number)) {
      best = j;
    }
  }
  return best;
}

function dot(a: Float64Array, b: Float64Array): number {
  let total = 0;
  for (let j = 0; j < a.length; j++) {
    total += (a[j] as number) * (b[j] as number);
  }
  return total;
}

export interface PromptEmbeddings {
  sets: PromptSet[];
  /** per attribute: one embedding per class, in class order. */
  vectors: Float64Array[][];
}

export function embedPromptSets(
  taxonomy: Taxonomy,
  model: EmbeddingModel,
  overrides: Record<string, string> = {},
): PromptEmbeddings {
  const sets = buildPromptSets(taxonomy, overrides);
  const vectors = sets.map(set => set.prompts.map(prompt => model.embedText(prompt)));
  return { sets, vectors };
}

/** One clip's concatenated distribution row plus per-block argmaxes. */
export function distributionForClip(
  entry: ClipEntry,
  taxonomy: Taxonomy,
  model: EmbeddingModel,
  promptEmbeddings: PromptEmbeddings,
): { classes: number[]; distribution: number[] } {
  const clip = loadClip(entry.clipPath);
  if (entry.endFrame > clip.frameCount) {
    throw new ClipError(
      `frame range ${entry.startFrame}:${entry.endFrame} exceeds clip length ${clip.frameCount}`,
    );
  }
  const indices = uniformFrameIndices(entry.startFrame, entry.endFrame);
  const videoVec = model.embedFrames(clip, indices);
  const classes: number[] = [];
  const distribution: number[] = [];
  for (let i = 0; i < taxonomy.attributes.length; i++) {
    const scores = (promptEmbeddings.vectors[i] as Float64Array[]).map(promptVec =>
      dot(videoVec, promptVec),
    );
    const block = softmaxBlock(scores);
    classes.push(argmax(block));
    distribution.push(...block);
  }
  return { classes, distribution };
}

/**
 * Run the pipeline over every manifest entry.  Output rows are sorted
 * by scene id then shot id, so scenes are contiguous as the dataset
 * format requires.
 */
export function extractDistributions(
  entries: ClipEntry[],
  taxonomy: Taxonomy,
  model: EmbeddingModel,
  overrides: Record<string, string> = {},
): ExtractionResult {
  const promptEmbeddings = embedPromptSets(taxonomy, model, overrides);
  const rows: DatasetRow[] = [];
  const skipped: SkippedClip[] = [];
  for (const entry of entries) {
    try {
      const { classes, distribution } = distributionForClip(
        entry, taxonomy, model, promptEmbeddings,
      );
      rows.push({
        sceneId: entry.sceneId,
        shotId: entry.shotId,
        classes,
        distribution,
        lineNo: 0,
      });
    } catch (err) {
      if (err instanceof ClipError) {
        skipped.push({ sceneId: entry.sceneId, shotId: entry.shotId, message: err.message });
      } else {
        throw err;
      }
    }
  }
  rows.sort((a, b) =>
    a.sceneId < b.sceneId ? -1 : a.sceneId > b.sceneId ? 1
    : a.shotId < b.shotId ? -1 : a.shotId > b.shotId ? 1 : 0,
  );
  return { rows, skipped };
}

/**
 * Merge mode: carry an existing dataset's rows and class labels,
 * replacing only the distribution column for shots that were
 * extracted.  Every extracted shot must exist in the dataset.
 */
export function mergeDistributions(
  existing: DatasetRow[],
  extracted: DatasetRow[],
): DatasetRow[] {
  const byShot = new Map<string, DatasetRow>();
  for (const row of existing) {
    byShot.set(`${row.sceneId}\t${row.shotId}`, row);
  }
  const merged = existing.map(row => ({ ...row }));
  const index = new Map<string, number>();
  merged.forEach((row, at) => index.set(`${row.sceneId}\t${row.shotId}`, at));
  for (const row of extracted) {
    const key = `${row.sceneId}\t${row.shotId}`;
    const at = index.get(key);
    if (at === undefined) {
      throw new FormatError(
        `extracted shot '${row.shotId}' of scene '${row.sceneId}' is not in the dataset`,
      );
    }
    (merged[at] as DatasetRow).distribution = row.distribution;
  }
  return merged;
}
