import * as fs from 'node:fs';
import * as path from 'node:path';

import { describe, expect, it } from 'vitest';

import { main } from '../src/cli.js';
import { parseDataset } from '../src/dataset.js';
import {
  SMALL_TAXONOMY_TEXT,
  makeClip,
  tempDir,
  writeClip,
  writeText,
} from './helpers.js';

function setUpInputs(dir: string): { manifest: string; taxonomy: string } {
  writeClip(dir, 'a.rgbv', makeClip(1, 8));
  writeClip(dir, 'b.rgbv', makeClip(2, 8));
  const manifest = writeText(dir, 'clips.txt', [
    'shotwright-clips v1',
    'sc01\tsh01\ta.rgbv\t0:8',
    'sc01\tsh02\tb.rgbv\t2:7',
    '',
  ].join('\n'));
  const taxonomy = writeText(dir, 'taxonomy.txt', SMALL_TAXONOMY_TEXT);
  return { manifest, taxonomy };
}

describe('cli extract', () => {
  it('writes dataset, errors file, and manifest, then validates clean', () => {
    const dir = tempDir('cli');
    const { manifest, taxonomy } = setUpInputs(dir);
    const out = path.join(dir, 'out');
    const code = main([
      'extract', '--manifest', manifest, '--taxonomy', taxonomy, '--out', out,
    ]);
    expect(code).toBe(0);

    const datasetPath = path.join(out, 'dataset.txt');
    expect(fs.existsSync(datasetPath)).toBe(true);
    expect(fs.readFileSync(path.join(out, 'errors.txt'), 'utf8')).toBe('');
    const rows = parseDataset(fs.readFileSync(datasetPath, 'utf8'));
    expect(rows.length).toBe(2);

    const runManifest = JSON.parse(
      fs.readFileSync(path.join(out, 'manifest.json'), 'utf8'),
    );
    expect(runManifest.command).toBe('extract');
    expect(runManifest.config.model).toBe('hash-64');
    expect(runManifest.outputs).toContain(datasetPath);

    expect(main(['validate', '--dataset', datasetPath, '--taxonomy', taxonomy])).toBe(0);
  });

  it('records skipped clips in errors.txt and still exits 0', () => {
    const dir = tempDir('cli-skip');
    const { taxonomy } = setUpInputs(dir);
    fs.writeFileSync(path.join(dir, 'broken.rgbv'), 'garbage');
    const manifest = writeText(dir, 'with-broken.txt', [
      'shotwright-clips v1',
      'sc01\tsh01\ta.rgbv\t0:8',
      'sc01\tsh02\tbroken.rgbv\t0:8',
      '',
    ].join('\n'));
    const out = path.join(dir, 'out');
    const code = main([
      'extract', '--manifest', manifest, '--taxonomy', taxonomy, '--out', out,
    ]);
    expect(code).toBe(0);
    const errors = fs.readFileSync(path.join(out, 'errors.txt'), 'utf8');
    expect(errors).toMatch(/^sc01\tsh02\t/);
    const rows = parseDataset(fs.readFileSync(path.join(out, 'dataset.txt'), 'utf8'));
    expect(rows.map(r => r.shotId)).toEqual(['sh01']);
  });

  it('merge mode keeps the input dataset rows and class labels', () => {
    const dir = tempDir('cli-merge');
    const { manifest, taxonomy } = setUpInputs(dir);
    const existing = writeText(dir, 'existing.txt', [
      'shotwright-dataset v1',
      'sc01\tsh01\t2,1,3',
      'sc01\tsh02\t0,0,0',
      'sc01\tsh03\t1,1,1',
      '',
    ].join('\n'));
    const out = path.join(dir, 'merged');
    const code = main([
      'extract', '--manifest', manifest, '--taxonomy', taxonomy,
      '--out', out, '--dataset', existing,
    ]);
    expect(code).toBe(0);
    const rows = parseDataset(fs.readFileSync(path.join(out, 'dataset.txt'), 'utf8'));
    expect(rows.length).toBe(3);
    expect(rows[0]?.classes).toEqual([2, 1, 3]);
    expect(rows[0]?.distribution?.length).toBe(9);
    expect(rows[1]?.distribution?.length).toBe(9);
    expect(rows[2]?.distribution).toBeNull();
  });

  it('a rerun with the same arguments reproduces the dataset bytes', () => {
    const dir = tempDir('cli-rerun');
    const { manifest, taxonomy } = setUpInputs(dir);
    const outA = path.join(dir, 'run-a');
    const outB = path.join(dir, 'run-b');
    main(['extract', '--manifest', manifest, '--taxonomy', taxonomy, '--out', outA]);
    main(['extract', '--manifest', manifest, '--taxonomy', taxonomy, '--out', outB]);
    const bytesA = fs.readFileSync(path.join(outA, 'dataset.txt'));
    const bytesB = fs.readFileSync(path.join(outB, 'dataset.txt'));
    expect(bytesA.equals(bytesB)).toBe(true);
  });
});

describe('cli validate', () => {
  it('exits 1 on violations', () => {
    const dir = tempDir('cli-validate');
    const taxonomy = writeText(dir, 'taxonomy.txt', SMALL_TAXONOMY_TEXT);
    const bad = writeText(dir, 'bad.txt', 'shotwright-dataset v1\ns1\ta\t0,0,0\n');
    expect(main(['validate', '--dataset', bad, '--taxonomy', taxonomy])).toBe(1);
  });
});

describe('cli errors', () => {
  it('exits 2 on usage and input problems', () => {
    expect(main(['unknown-command'])).toBe(2);
    expect(main(['extract', '--manifest'])).toBe(2);
    expect(main(['extract', '--bogus', 'x'])).toBe(2);
    const dir = tempDir('cli-err');
    const taxonomy = writeText(dir, 'taxonomy.txt', SMALL_TAXONOMY_TEXT);
    expect(main([
      'extract', '--manifest', path.join(dir, 'missing.txt'),
      '--taxonomy', taxonomy, '--out', path.join(dir, 'out'),
    ])).toBe(2);
    const { manifest } = setUpInputs(dir);
    expect(main([
      'extract', '--manifest', manifest, '--taxonomy', taxonomy,
      '--out', path.join(dir, 'out'), '--model', 'resnet-50',
    ])).toBe(2);
  });
});
