#!/usr/bin/env node
/**
 * corrembed-extract --model NAME --tap {output|penultimate} --images DIR
 *                   --out FILE --ids FILE [--batch N] [--weights DIR]
 */

import { pathToFileURL } from 'node:url';
import { parseArgs } from 'node:util';

import { extract, TapPoint } from './extract.js';
import { ZOO } from './zoo.js';

function usage(): string {
  return [
    'usage: corrembed-extract --model NAME --tap {output|penultimate}',
    '                         --images DIR --out FILE --ids FILE',
    '                         [--batch N] [--weights DIR]',
    '',
    `models: ${Object.keys(ZOO).sort().join(', ')}`,
  ].join('\n');
}

export async function main(argv: string[]): Promise<number> {
  let values;
  try {
    ({ values } = parseArgs({
      args: argv,
      options: {
        model: { type: 'string' },
        tap: { type: 'string' },
        images: { type: 'string' },
        out: { type: 'string' },
        ids: { type: 'string' },
        batch: { type: 'string', default: '16' },
        weights: { type: 'string' },
        help: { type: 'boolean', default: false },
      },
    }));
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    console.error(usage());
    return 1;
  }
  if (values.help) {
    console.log(usage());
    return 0;
  }
  for (const required of ['model', 'tap', 'images', 'out', 'ids'] as const) {
    if (!values[required]) {
      console.error(`missing --${required}`);
      console.error(usage());
      return 1;
    }
  }
  if (values.tap !== 'output' && values.tap !== 'penultimate') {
    console.error(`--tap must be 'output' or 'penultimate', got '${values.tap}'`);
    return 1;
  }
  try {
    const result = await extract({
      model: values.model!,
      tap: values.tap as TapPoint,
      imagesDir: values.images!,
      outPath: values.out!,
      idsPath: values.ids!,
      batchSize: parseInt(values.batch!, 10),
      weightsDir: values.weights,
      log: (msg) => console.error(msg),
    });
    console.log(
      `wrote ${result.rows} x ${result.cols} embeddings to ${values.out} ` +
        `(${result.skipped.length} skipped)`,
    );
    return 0;
  } catch (err) {
    console.error(`corrembed-extract: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const runDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (runDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
