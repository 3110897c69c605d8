// Minimal SMT-LIB 2 front end for the WASM build of Z3.
//
// Reads a complete SMT-LIB 2 script from the file given as the first
// argument, or from stdin when no argument (or "-in", for z3 CLI
// compatibility) is given, evaluates it in a fresh context, and writes
// the solver's replies to stdout.

'use strict';

const fs = require('fs');

function readScript() {
  const args = process.argv.slice(2).filter((a) => !a.startsWith('-'));
  if (args.length > 0) {
    return fs.readFileSync(args[0], 'utf8');
  }
  return fs.readFileSync(0, 'utf8');
}

async function main() {
  const script = readScript();
  const { init } = require('z3-solver');
  const { Z3 } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);
  const out = await Z3.eval_smtlib2_string(ctx, script);
  if (out.length > 0) {
    process.stdout.write(out.endsWith('\n') ? out : out + '\n');
  }
  // Skip context teardown: the WASM worker pool can hang on shutdown,
  // and the process exit reclaims everything anyway.
  process.exit(0);
}

main().catch((err) => {
  process.stderr.write(`(error "${String(err).replace(/"/g, "'")}")\n`);
  process.exit(1);
});
