/**
 * Subprocess plumbing for the native CLI. The executable resolves from, in
 * order: an explicit `command`, the ROBUST3D_BIN environment variable, the
 * `robust3d` console script on PATH, then `python3 -m robust3d`.
 */

import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

export interface RunnerOptions {
  /** Override the executable, e.g. ["python3", "-m", "robust3d"]. */
  command?: string[];
  /** Keep temp directories around for debugging. */
  keepTemp?: boolean;
}

function which(name: string): boolean {
  const dirs = (process.env.PATH ?? "").split(path.delimiter);
  return dirs.some((d) => {
    try {
      fs.accessSync(path.join(d, name), fs.constants.X_OK);
      return true;
    } catch {
      return false;
    }
  });
}

let cachedCommand: string[] | undefined;

export function resolveCommand(opts: RunnerOptions = {}): string[] {
  if (opts.command) return opts.command;
  if (process.env.ROBUST3D_BIN) return process.env.ROBUST3D_BIN.split(" ");
  if (cachedCommand) return cachedCommand;
  cachedCommand = which("robust3d") ? ["robust3d"] : ["python3", "-m", "robust3d"];
  return cachedCommand;
}

export function runCli(args: string[], opts: RunnerOptions = {}): string {
  const [exe, ...prefix] = resolveCommand(opts);
  const result = spawnSync(exe, [...prefix, ...args], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (result.error) {
    throw new Error(`failed to launch ${exe}: ${result.error.message}`);
  }
  if (result.status !== 0) {
    throw new Error(
      `robust3d ${args.join(" ")} exited with ${result.status}:\n${result.stderr || result.stdout}`,
    );
  }
  return result.stdout;
}

export function withTempDir<T>(fn: (dir: string) => T, opts: RunnerOptions = {}): T {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "robust3d-client-"));
  try {
    return fn(dir);
  } finally {
    if (!opts.keepTemp) {
      fs.rmSync(dir, { recursive: true, force: true });
    }
  }
}
