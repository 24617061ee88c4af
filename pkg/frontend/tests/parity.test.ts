import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, describe, expect, it } from "vitest";

import {
  Annotation,
  BridgeError,
  RegJson,
  bridgeBuildReg,
  bridgeScore,
  version,
} from "../src/index.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const CORPUS_PATH = join(HERE, "../../src/regreason/data/mini_corpus.jsonl");

interface CorpusRecord {
  id: string;
  tokens: Annotation["tokens"];
  pos: string[];
  deps: Array<[number, number, string]>;
  penman: string;
}

const records: CorpusRecord[] = readFileSync(CORPUS_PATH, "utf8")
  .trim()
  .split("\n")
  .map((line) => JSON.parse(line));

const SCORE_FLAGS = [
  "--dim", "32",
  "--frames", "4",
  "--num-queries", "6",
  "--frame-queries", "5",
  "--window", "2",
  "--layers", "2",
];

function annotationOf(record: CorpusRecord): Annotation {
  return { tokens: record.tokens, pos: record.pos, deps: record.deps };
}

function cli(args: string[]): void {
  const proc = spawnSync("python3", ["-m", "regreason", ...args], { encoding: "utf8" });
  if (proc.status !== 0) {
    throw new Error(`cli failed: ${proc.stderr}`);
  }
}

// One direct CLI run over the full corpus; the bridge results must match
// these files byte for byte.
const workDir = mkdtempSync(join(tmpdir(), "parity-"));
const parseDir = join(workDir, "parsed");
const scoreDir = join(workDir, "scored");
cli(["parse", "--corpus", CORPUS_PATH, "--out", parseDir]);
cli([
  "score",
  "--out", scoreDir,
  ...SCORE_FLAGS,
  ...readdirSync(parseDir)
    .filter((f) => f.endsWith(".reg.json"))
    .map((f) => join(parseDir, f)),
]);

afterAll(() => {
  rmSync(workDir, { recursive: true, force: true });
});

describe("REG building parity", () => {
  it("matches the CLI byte for byte on every corpus record", () => {
    expect(records).toHaveLength(30);
    for (const record of records) {
      const direct = readFileSync(join(parseDir, `${record.id}.reg.json`), "utf8");
      const bridged = bridgeBuildReg(record.penman, annotationOf(record));
      expect(bridged.raw, record.id).toBe(direct);
      expect(bridged.value.root).toBe((JSON.parse(direct) as RegJson).root);
    }
  });

  it("builds a one-node graph", () => {
    const out = bridgeBuildReg("(c~0 / cat)", {
      tokens: [{ index: 0, surface: "cat", lemma: "cat" }],
      pos: ["NN"],
      deps: [],
    });
    expect(out.value.concepts).toHaveLength(1);
    expect(out.value.edges).toHaveLength(0);
    expect(out.rule).toBe("POS-rule");
  });

  it("surfaces malformed PENMAN as an error value", () => {
    expect(() =>
      bridgeBuildReg("(c / cat", {
        tokens: [{ index: 0, surface: "cat", lemma: "cat" }],
        pos: ["NN"],
        deps: [],
      }),
    ).toThrow(BridgeError);
  });
});

describe("scoring parity", () => {
  it("matches the CLI byte for byte on every corpus record", () => {
    for (const record of records) {
      const regRaw = readFileSync(join(parseDir, `${record.id}.reg.json`), "utf8");
      const result = bridgeScore(regRaw, {
        name: record.id,
        dim: 32,
        frames: 4,
        numQueries: 6,
        frameQueries: 5,
        window: 2,
        layers: 2,
      });
      const scores = readFileSync(join(scoreDir, `${record.id}.scores.txt`), "utf8");
      const dist = readFileSync(join(scoreDir, `${record.id}.dist.json`), "utf8");
      const trace = readFileSync(join(scoreDir, `${record.id}.trace.json`), "utf8");
      expect(result.raw.scoresText, record.id).toBe(scores);
      expect(result.raw.distJson, record.id).toBe(dist);
      expect(result.raw.traceJson, record.id).toBe(trace);
      expect(result.referent).toBe(JSON.parse(dist).referent);
    }
  });

  it("is deterministic across repeated calls", () => {
    const regRaw = readFileSync(join(parseDir, "c1c_cat_cage.reg.json"), "utf8");
    const config = { dim: 32, frames: 4, numQueries: 6, frameQueries: 5, window: 2, layers: 2 };
    const a = bridgeScore(regRaw, config);
    const b = bridgeScore(regRaw, config);
    expect(a.raw).toEqual(b.raw);
  });

  it("scores a single-node REG with a distribution over queries", () => {
    const solo = bridgeBuildReg("(c~0 / cat)", {
      tokens: [{ index: 0, surface: "cat", lemma: "cat" }],
      pos: ["NN"],
      deps: [],
    });
    const result = bridgeScore(solo.value, { dim: 32, frames: 4, numQueries: 6, frameQueries: 5, window: 2, layers: 2 });
    expect(result.scores).toHaveLength(1);
    expect(result.distribution.probs).toHaveLength(6);
    const total = result.distribution.probs.reduce((s, p) => s + p, 0);
    expect(total).toBeCloseTo(1.0, 9);
  });

  it("surfaces an invalid REG as an error value", () => {
    const cyclic = {
      root: 0,
      concepts: [
        { label: "a", align: [], depth: 0 },
        { label: "b", align: [], depth: 1 },
      ],
      edges: [
        { src: 0, role: ":x", dst: 1 },
        { src: 1, role: ":y", dst: 0 },
      ],
      schedule: [[0], [1]],
    };
    expect(() => bridgeScore(cyclic as RegJson)).toThrow(BridgeError);
  });
});

describe("version", () => {
  it("reports the core version string", () => {
    expect(version()).toMatch(/\d+\.\d+\.\d+/);
  });
});
