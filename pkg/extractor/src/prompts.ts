/**
 * Per-attribute prompt sets for zero-shot attribute recognition.
 *
 * Each attribute has one template with a `{class}` placeholder; the
 * template renders once per class name, so every attribute's prompt
 * count equals its class count.  A flat `name = template` config file
 * overrides individual attribute templates.
 */

import * as fs from 'node:fs';

import { FormatError, Taxonomy } from './taxonomy.js';

export const CLASS_PLACEHOLDER = '{class}';

const DEFAULT_TEMPLATES: Record<string, string> = {
  number_of_people: 'there are {class} in the shot',
  shot_angle: 'it is a/an {class} shot',
  shot_location: 'the shot takes place in a/an {class}',
  shot_motion: 'the camera is {class} during the shot',
  shot_size: 'it is a/an {class} shot',
  shot_subject: 'the shot focuses on a/an {class}',
  shot_type: 'it is a/an {class} shot',
  sound_source: 'the sound of the shot comes from {class}',
};

const FALLBACK_TEMPLATE = 'a video shot showing {class}';

export interface PromptSet {
  attribute: string;
  template: string;
  /** one rendered prompt per class, in taxonomy class order. */
  prompts: string[];
}

function checkTemplate(attribute: string, template: string): void {
  if (!template.includes(CLASS_PLACEHOLDER)) {
    throw new FormatError(
      `template for '${attribute}' lacks the ${CLASS_PLACEHOLDER} placeholder: '${template}'`,
    );
  }
}

/** Parse a flat `attribute = template` override file. */
export function parseTemplateOverrides(text: string): Record<string, string> {
  const overrides: Record<string, string> = {};
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = (lines[i] as string).trim();
    if (line === '' || line.startsWith('#')) {
      continue;
    }
    const eq = line.indexOf('=');
    if (eq < 0) {
      throw new FormatError(`line ${i + 1}: expected 'attribute = template', found '${line}'`);
    }
    const name = line.slice(0, eq).trim();
    const template = line.slice(eq + 1).trim();
    if (name === '' || template === '') {
      throw new FormatError(`line ${i + 1}: empty attribute name or template`);
    }
    if (name in overrides) {
      throw new FormatError(`line ${i + 1}: duplicate override for '${name}'`);
    }
    checkTemplate(name, template);
    overrides[name] = template;
  }
  return overrides;
}

export function loadTemplateOverrides(path: string): Record<string, string> {
  return parseTemplateOverrides(fs.readFileSync(path, 'utf8'));
}

/**
 * Render every attribute's prompt set.  Overrides must name attributes
 * that exist in the taxonomy; unknown names are configuration errors.
 */
export function buildPromptSets(
  taxonomy: Taxonomy,
  overrides: Record<string, string> = {},
): PromptSet[] {
  const known = new Set(taxonomy.attributes.map(a => a.name));
  for (const name of Object.keys(overrides)) {
    if (!known.has(name)) {
      throw new FormatError(`template override for unknown attribute '${name}'`);
    }
  }
  return taxonomy.attributes.map(spec => {
    const template =
      overrides[spec.name] ?? DEFAULT_TEMPLATES[spec.name] ?? FALLBACK_TEMPLATE;
    checkTemplate(spec.name, template);
    const prompts = spec.classNames.map(className =>
      template.split(CLASS_PLACEHOLDER).join(className),
    );
    return { attribute: spec.name, template, prompts };
  });
}
