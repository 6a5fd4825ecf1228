#!/usr/bin/env node
/**
 * featx --in <dir> --out <file.fvec> [--model <id>] [--batch N]
 *
 * Converts a directory of labeled images (one subfolder per canonical class
 * label, plus optionally "cat1") into an FVEC feature-vector file and a
 * JSON manifest naming the model and preprocessing.
 *
 * Exit codes: 0 success, 1 runtime error, 2 usage error.
 */

import { extract } from './extract';
import { SEEDED_CNN } from './model';

const USAGE =
  'usage: featx --in <dir> --out <file.fvec> [--model <id>] [--batch N]\n' +
  `  --model  "${SEEDED_CNN}" (offline default) or a TFJS graph model path/URL\n`;

function parseArgs(argv: string[]): { in: string; out: string; model: string; batch: number } {
  const opts: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith('--') || value === undefined) {
      throw new UsageError(`bad argument: ${flag}`);
    }
    opts[flag.slice(2)] = value;
  }
  const known = new Set(['in', 'out', 'model', 'batch']);
  for (const key of Object.keys(opts)) {
    if (!known.has(key)) {
      throw new UsageError(`unknown option: --${key}`);
    }
  }
  if (!opts.in || !opts.out) {
    throw new UsageError('--in and --out are required');
  }
  const batch = opts.batch === undefined ? 8 : Number.parseInt(opts.batch, 10);
  if (!Number.isInteger(batch) || batch < 1) {
    throw new UsageError(`bad --batch value: ${opts.batch}`);
  }
  return { in: opts.in, out: opts.out, model: opts.model ?? SEEDED_CNN, batch };
}

class UsageError extends Error {}

async function main(): Promise<number> {
  let args;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}`);
    return 2;
  }
  try {
    console.log(
      `# featx\n# config: in=${args.in} out=${args.out} model=${args.model} batch=${args.batch}`,
    );
    const result = await extract({
      inDir: args.in,
      outPath: args.out,
      model: args.model,
      batchSize: args.batch,
    });
    console.log(
      `wrote ${args.out}: ${result.count} vectors, dim ${result.dim}` +
        (result.skipped ? `, ${result.skipped} skipped` : ''),
    );
    console.log(`wrote ${result.manifestPath}`);
    console.log(`per-image extraction time: ${result.perImageMs.toFixed(2)} ms`);
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
}

main().then((code) => {
  process.exitCode = code;
});
