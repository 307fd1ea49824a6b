#!/usr/bin/env node
// SMT-LIB v2 front end for the WASM build of Z3.
//
// Reads a full SMT-LIB v2 script from stdin (or from the file named by the
// first argument) and prints Z3's output, e.g. "sat" followed by the
// get-value response. Exit code 0 on success, 1 on solver failure.

const fs = require("fs");
const { init } = require("z3-solver");

(async () => {
  const script =
    process.argv.length > 2
      ? fs.readFileSync(process.argv[2], "utf8")
      : fs.readFileSync(0, "utf8");
  const { Z3 } = await init();
  const cfg = Z3.mk_config();
  const ctx = Z3.mk_context(cfg);
  const out = await Z3.eval_smtlib2_string(ctx, script);
  process.stdout.write(out);
  if (!out.endsWith("\n")) process.stdout.write("\n");
  process.exit(0);
})().catch((e) => {
  console.error(String(e && e.message ? e.message : e));
  process.exit(1);
});
