/**
 * Attribute taxonomy: ordered attributes, each with ordered class names.
 *
 * File format (shared with the core toolkit):
 *
 *     shotwright-taxonomy v1
 *     <attribute_name> TAB <class1>,<class2>,...
 */

import * as fs from 'node:fs';

export const TAXONOMY_HEADER = 'shotwright-taxonomy v1';

export interface AttributeSpec {
  name: string;
  classNames: string[];
}

export interface Taxonomy {
  attributes: AttributeSpec[];
  /** classNames.length per attribute, in order. */
  classCounts: number[];
  /** start index of each attribute's block in the concatenated vector. */
  blockOffsets: number[];
  /** sum of classCounts: width of one concatenated distribution row. */
  totalClasses: number;
}

export class FormatError extends Error {}

function buildTaxonomy(attributes: AttributeSpec[]): Taxonomy {
  const classCounts = attributes.map(a => a.classNames.length);
  const blockOffsets: number[] = [];
  let offset = 0;
  for (const count of classCounts) {
    blockOffsets.push(offset);
    offset += count;
  }
  return { attributes, classCounts, blockOffsets, totalClasses: offset };
}

export function parseTaxonomy(text: string): Taxonomy {
  const lines = text.split('\n').filter(line => line.trim() !== '');
  if (lines.length === 0 || lines[0] !== TAXONOMY_HEADER) {
    const found = lines.length > 0 ? lines[0] : '';
    throw new FormatError(
      `bad taxonomy header: expected '${TAXONOMY_HEADER}', found '${found}'`,
    );
  }
  const attributes: AttributeSpec[] = [];
  const seen = new Set<string>();
  for (let i = 1; i < lines.length; i++) {
    const lineNo = i + 1;
    const fields = (lines[i] as string).split('\t');
    if (fields.length !== 2) {
      throw new FormatError(
        `line ${lineNo}: expected 'name TAB classes', got ${fields.length} fields`,
      );
    }
    const [name, classes] = fields as [string, string];
    if (name === '') {
      throw new FormatError(`line ${lineNo}: empty attribute name`);
    }
    if (seen.has(name)) {
      throw new FormatError(`line ${lineNo}: duplicate attribute '${name}'`);
    }
    seen.add(name);
    const classNames = classes.split(',').map(c => c.trim());
    if (classNames.some(c => c === '')) {
      throw new FormatError(`line ${lineNo}: empty class name`);
    }
    attributes.push({ name, classNames });
  }
  if (attributes.length === 0) {
    throw new FormatError('taxonomy file lists no attributes');
  }
  return buildTaxonomy(attributes);
}

export function loadTaxonomy(path: string): Taxonomy {
  return parseTaxonomy(fs.readFileSync(path, 'utf8'));
}
