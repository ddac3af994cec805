#!/usr/bin/env node
// One-shot SMT-LIB2 front for the z3 WASM build: reads a complete script on
// stdin, evaluates it, writes the solver's output (sat/unsat + model) to
// stdout.  Used as the fallback solver process when no native SMT solver
// binary is installed.
"use strict";

const chunks = [];
process.stdin.on("data", (c) => chunks.push(c));
process.stdin.on("end", async () => {
  try {
    const { init } = require("z3-solver");
    const { Z3 } = await init();
    const cfg = Z3.mk_config();
    const ctx = Z3.mk_context(cfg);
    const text = Buffer.concat(chunks).toString("utf8");
    const out = await Z3.eval_smtlib2_string(ctx, text);
    process.stdout.write(out);
    process.exit(0);
  } catch (err) {
    process.stderr.write(String((err && err.stack) || err) + "\n");
    process.exit(3);
  }
});
