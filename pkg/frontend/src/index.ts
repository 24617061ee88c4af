/**
 * Bindings for the REG builder and scorer.
 *
 * Nothing is computed here: every call shells out to the installed core CLI
 * and moves JSON text and number arrays across the boundary unchanged, so
 * outputs are byte-identical to direct CLI runs with the same inputs.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { BridgeError, runCli, withTempDir } from "./runner.js";
import type {
  Annotation,
  BridgeOptions,
  BuildRegResult,
  Distribution,
  RegJson,
  ScoreConfig,
  ScoreResult,
} from "./types.js";

export { BridgeError } from "./runner.js";
export type {
  Annotation,
  BridgeOptions,
  BuildRegResult,
  Distribution,
  RegConcept,
  RegEdge,
  RegJson,
  ScoreConfig,
  ScoreResult,
  Token,
} from "./types.js";

const RECORD_ID = "record";

function python(options?: BridgeOptions): string {
  return options?.pythonBin ?? "python3";
}

interface SummaryEntry {
  id: string;
  ok: boolean;
  rule: string | null;
  error: string | null;
}

/**
 * Build the REG for one PENMAN graph plus its syntactic annotation.
 *
 * The result is exactly what the CLI `parse` command writes for the same
 * record. Core-side failures (malformed PENMAN, invalid annotation) are
 * surfaced as BridgeError.
 */
export function bridgeBuildReg(
  penman: string,
  annotation: Annotation,
  options?: BridgeOptions,
): BuildRegResult {
  const record = {
    id: RECORD_ID,
    expression: annotation.tokens.map((t) => t.surface).join(" "),
    tokens: annotation.tokens,
    pos: annotation.pos,
    deps: annotation.deps,
    penman,
  };
  return withTempDir((dir) => {
    const corpusPath = join(dir, "corpus.jsonl");
    writeFileSync(corpusPath, JSON.stringify(record) + "\n", "utf8");
    const outDir = join(dir, "out");
    const run = runCli(python(options), [
      "parse",
      "--corpus",
      corpusPath,
      "--out",
      outDir,
    ]);
    const summaryPath = join(outDir, "summary.json");
    let entry: SummaryEntry | undefined;
    try {
      const summary = JSON.parse(readFileSync(summaryPath, "utf8"));
      entry = (summary.records as SummaryEntry[])[0];
    } catch {
      throw new BridgeError(run.stderr.trim() || "core produced no summary", run.status);
    }
    if (!entry || !entry.ok) {
      throw new BridgeError(entry?.error ?? "record failed", run.status);
    }
    const raw = readFileSync(join(outDir, `${RECORD_ID}.reg.json`), "utf8");
    return { value: JSON.parse(raw) as RegJson, raw, rule: entry.rule ?? "" };
  });
}

function scoreFlags(config?: ScoreConfig): string[] {
  const flags: string[] = [];
  const push = (flag: string, value: number | string | undefined) => {
    if (value !== undefined) {
      flags.push(flag, String(value));
    }
  };
  push("--seed", config?.seed);
  push("--dim", config?.dim);
  push("--num-queries", config?.numQueries);
  push("--frame-queries", config?.frameQueries);
  push("--frames", config?.frames);
  push("--window", config?.window);
  push("--layers", config?.layers);
  push("--embeddings", config?.embeddings);
  return flags;
}

/**
 * Score one REG document; equals the CLI `score` outputs for the same
 * seed/config and record name.
 */
export function bridgeScore(
  reg: RegJson | string,
  config?: ScoreConfig,
  options?: BridgeOptions,
): ScoreResult {
  const name = config?.name ?? RECORD_ID;
  const regText = typeof reg === "string" ? reg : JSON.stringify(reg, null, 2) + "\n";
  return withTempDir((dir) => {
    const regPath = join(dir, `${name}.reg.json`);
    writeFileSync(regPath, regText, "utf8");
    const outDir = join(dir, "out");
    mkdirSync(outDir);
    const run = runCli(python(options), [
      "score",
      "--out",
      outDir,
      ...scoreFlags(config),
      regPath,
    ]);
    if (run.status !== 0) {
      throw new BridgeError(run.stderr.trim() || "scoring failed", run.status);
    }
    const scoresText = readFileSync(join(outDir, `${name}.scores.txt`), "utf8");
    const distJson = readFileSync(join(outDir, `${name}.dist.json`), "utf8");
    const traceJson = readFileSync(join(outDir, `${name}.trace.json`), "utf8");
    const distribution = JSON.parse(distJson) as Distribution;
    const scores = scoresText
      .trimEnd()
      .split("\n")
      .map((line) => line.split(" ").map(Number));
    return {
      distribution,
      referent: distribution.referent,
      scores,
      raw: { scoresText, distJson, traceJson },
    };
  });
}

/** Version string reported by the installed core. */
export function version(options?: BridgeOptions): string {
  const run = runCli(python(options), ["--version"]);
  if (run.status !== 0) {
    throw new BridgeError(run.stderr.trim() || "version query failed", run.status);
  }
  return run.stdout.trim();
}
