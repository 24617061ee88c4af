import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** Error surfaced from the core process, never thrown as a crash. */
export class BridgeError extends Error {
  readonly exitCode: number;

  constructor(message: string, exitCode: number) {
    super(message);
    this.name = "BridgeError";
    this.exitCode = exitCode;
  }
}

export interface RunResult {
  stdout: string;
  stderr: string;
  status: number;
}

export function runCli(pythonBin: string, args: string[]): RunResult {
  const proc = spawnSync(pythonBin, ["-m", "regreason", ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (proc.error) {
    throw new BridgeError(`failed to launch ${pythonBin}: ${proc.error.message}`, -1);
  }
  return { stdout: proc.stdout ?? "", stderr: proc.stderr ?? "", status: proc.status ?? -1 };
}

export function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "regreason-bridge-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
