#!/usr/bin/env node
// Thin CLI around clingo-wasm that mimics the native clingo executable:
// reads ASP programs from file arguments (or stdin), passes remaining
// arguments through, and streams clingo's standard text output.
const fs = require("fs");

function resolveFactory() {
  try {
    return require("clingo-wasm/src/clingo.js");
  } catch (e) {
    // fall back to a node_modules directory next to this script
    return require(require("path").join(__dirname, "node_modules", "clingo-wasm", "src", "clingo.js"));
  }
}

async function main() {
  const args = process.argv.slice(2);
  const opts = [];
  const files = [];
  for (const a of args) {
    if (a.startsWith("-") || /^\d+$/.test(a)) opts.push(a);
    else files.push(a);
  }
  let program;
  if (files.length > 0) {
    program = files.map((f) => fs.readFileSync(f, "utf8")).join("\n");
  } else {
    program = fs.readFileSync(0, "utf8");
  }
  const factory = resolveFactory();
  const mod = await factory({
    print: (l) => process.stdout.write(l + "\n"),
    printErr: (l) => process.stderr.write(l + "\n"),
  });
  const status = mod.ccall("run", "number", ["string", "string"], [program, opts.join(" ")]);
  process.exit(status);
}

main().catch((e) => {
  process.stderr.write(String(e) + "\n");
  process.exit(65);
});
