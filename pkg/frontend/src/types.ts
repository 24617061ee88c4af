/** Token of the referring expression; indices are contiguous from 0. */
export interface Token {
  index: number;
  surface: string;
  lemma: string;
}

/** Pre-computed syntactic annotation for one expression. */
export interface Annotation {
  tokens: Token[];
  /** One Penn tag per token. */
  pos: string[];
  /** Dependency triples as [head index, dependent index, relation]. */
  deps: Array<[number, number, string]>;
}

export interface RegConcept {
  label: string;
  align: number[];
  depth: number;
}

export interface RegEdge {
  src: number;
  role: string;
  dst: number;
}

/** The REG document exactly as the core emits it. */
export interface RegJson {
  root: number;
  concepts: RegConcept[];
  edges: RegEdge[];
  schedule: number[][];
}

export interface BuildRegResult {
  /** Parsed REG document. */
  value: RegJson;
  /** Exact file bytes (UTF-8) the core wrote; stable across runs. */
  raw: string;
  /** Which referent-selection rule fired. */
  rule: string;
}

export interface Distribution {
  referent: number;
  probs: number[];
}

export interface ScoreResult {
  /** Referring distribution over temporal queries. */
  distribution: Distribution;
  /** Index of the winning temporal query. */
  referent: number;
  /** Node x query score matrix. */
  scores: number[][];
  /** Raw file bytes, for byte-level parity with direct CLI runs. */
  raw: {
    scoresText: string;
    distJson: string;
    traceJson: string;
  };
}

/** Scoring configuration; mirrors the CLI flags, all optional. */
export interface ScoreConfig {
  seed?: number;
  dim?: number;
  numQueries?: number;
  frameQueries?: number;
  frames?: number;
  window?: number;
  layers?: number;
  embeddings?: string;
  /**
   * Record name used for the output files and the per-record stream seed.
   * Score outputs are byte-identical to a CLI run on `<name>.reg.json`.
   */
  name?: string;
}

export interface BridgeOptions {
  /** Python interpreter that has the core package installed. */
  pythonBin?: string;
}
