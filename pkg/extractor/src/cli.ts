#!/usr/bin/env node
/**
 * Command line for the extractor.
 *
 *   shotwright-extract extract  --manifest clips.txt --taxonomy taxonomy.txt --out DIR
 *                               [--model hash-64] [--templates overrides.cfg]
 *                               [--dataset existing.txt]
 *   shotwright-extract validate --dataset dataset.txt --taxonomy taxonomy.txt
 *
 * `extract` writes DIR/dataset.txt, DIR/errors.txt, and DIR/manifest.json.
 * With --dataset it keeps that file's rows and class labels and only
 * fills in the distribution column for the extracted shots.
 * `validate` re-checks a distribution file and exits 1 if any row
 * violates the format or normalization contract.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { formatDataset, parseDataset } from './dataset.js';
import { ModelError, resolveModel } from './embedding.js';
import { extractDistributions, mergeDistributions } from './extract.js';
import { loadManifest } from './manifest.js';
import { loadTemplateOverrides } from './prompts.js';
import { FormatError, loadTaxonomy } from './taxonomy.js';
import { validateOutput } from './validate.js';

export const VERSION = '0.1.0';
const DEFAULT_MODEL = 'hash-64';

class UsageError extends Error {}

function parseFlags(argv: string[], spec: Record<string, boolean>): Record<string, string> {
  const values: Record<string, string> = {};
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i] as string;
    if (!(flag in spec)) {
      throw new UsageError(`unknown flag '${flag}'`);
    }
    const value = argv[i + 1];
    if (value === undefined) {
      throw new UsageError(`flag '${flag}' needs a value`);
    }
    if (flag.slice(2) in values) {
      throw new UsageError(`flag '${flag}' given twice`);
    }
    values[flag.slice(2)] = value;
    i++;
  }
  for (const [flag, required] of Object.entries(spec)) {
    if (required && !(flag.slice(2) in values)) {
      throw new UsageError(`missing required flag '${flag}'`);
    }
  }
  return values;
}

function writeJsonManifest(outPath: string, payload: Record<string, unknown>): void {
  fs.writeFileSync(outPath, JSON.stringify(payload, null, 2) + '\n', 'utf8');
}

function cmdExtract(argv: string[]): number {
  const flags = parseFlags(argv, {
    '--manifest': true,
    '--taxonomy': true,
    '--out': true,
    '--model': false,
    '--templates': false,
    '--dataset': false,
  });
  const started = Date.now();
  const modelId = flags['model'] ?? DEFAULT_MODEL;
  const model = resolveModel(modelId);
  const taxonomy = loadTaxonomy(flags['taxonomy'] as string);
  const entries = loadManifest(flags['manifest'] as string);
  const overrides =
    flags['templates'] !== undefined ? loadTemplateOverrides(flags['templates']) : {};

  const result = extractDistributions(entries, taxonomy, model, overrides);
  for (const skip of result.skipped) {
    console.error(
      `warning: skipped shot '${skip.shotId}' of scene '${skip.sceneId}': ${skip.message}`,
    );
  }

  let rows = result.rows;
  if (flags['dataset'] !== undefined) {
    const existing = parseDataset(fs.readFileSync(flags['dataset'], 'utf8'));
    rows = mergeDistributions(existing, result.rows);
  }

  const outDir = flags['out'] as string;
  fs.mkdirSync(outDir, { recursive: true });
  const datasetPath = path.join(outDir, 'dataset.txt');
  const errorsPath = path.join(outDir, 'errors.txt');
  fs.writeFileSync(datasetPath, formatDataset(rows), 'utf8');
  const errorLines = result.skipped.map(s => `${s.sceneId}\t${s.shotId}\t${s.message}`);
  fs.writeFileSync(errorsPath, errorLines.map(l => l + '\n').join(''), 'utf8');

  const inputs: Record<string, string> = {
    manifest: flags['manifest'] as string,
    taxonomy: flags['taxonomy'] as string,
  };
  if (flags['dataset'] !== undefined) {
    inputs['dataset'] = flags['dataset'];
  }
  if (flags['templates'] !== undefined) {
    inputs['templates'] = flags['templates'];
  }
  writeJsonManifest(path.join(outDir, 'manifest.json'), {
    command: 'extract',
    config: { model: modelId, sampled_frames: 32 },
    duration_seconds: (Date.now() - started) / 1000,
    inputs,
    outputs: [datasetPath, errorsPath],
    tool: 'shotwright-extract',
    version: VERSION,
  });
  console.log(
    `extracted ${result.rows.length} of ${entries.length} shots` +
    (result.skipped.length > 0 ? ` (${result.skipped.length} skipped)` : '') +
    `; wrote ${datasetPath}`,
  );
  return 0;
}

function cmdValidate(argv: string[]): number {
  const flags = parseFlags(argv, { '--dataset': true, '--taxonomy': true });
  const taxonomy = loadTaxonomy(flags['taxonomy'] as string);
  const text = fs.readFileSync(flags['dataset'] as string, 'utf8');
  const report = validateOutput(text, taxonomy);
  if (report.violations.length === 0) {
    console.log(`ok: ${report.rowCount} rows, every block normalized`);
    return 0;
  }
  for (const violation of report.violations) {
    console.error(`line ${violation.line}: ${violation.message}`);
  }
  console.error(`${report.violations.length} violations in ${report.rowCount} rows`);
  return 1;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === 'extract') {
      return cmdExtract(rest);
    }
    if (command === 'validate') {
      return cmdValidate(rest);
    }
    if (command === '--version') {
      console.log(`shotwright-extract ${VERSION}`);
      return 0;
    }
    throw new UsageError(
      `unknown command '${command ?? ''}'; available: extract, validate`,
    );
  } catch (err) {
    if (
      err instanceof UsageError ||
      err instanceof FormatError ||
      err instanceof ModelError ||
      (err as NodeJS.ErrnoException).code === 'ENOENT'
    ) {
      console.error(`error: ${(err as Error).message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${path.resolve(process.argv[1])}`).href;
if (invokedDirectly) {
  process.exitCode = main(process.argv.slice(2));
}
