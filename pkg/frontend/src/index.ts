/**
 * Retain-mask computation for preprocessing pipelines, backed by the native
 * pxprune CLI.
 *
 * The buffer is serialized to PPM and streamed over stdin (an explicit copy;
 * no shared memory is involved), the CLI replies with its mask JSON, and the
 * result maps 1:1 onto what the native library reports. The call is pure and
 * fully async, so callers can run many images concurrently.
 */

import { spawn } from "node:child_process";
import { createRequire } from "node:module";

import { encodePpm } from "./ppm.js";

const pkg = createRequire(import.meta.url)("../package.json") as { version: string };

export interface MaskConfig {
  predictor?: "raster" | "serpentine" | "pred2d";
  metric?: "mae" | "max";
  /** Omission threshold in [0, 1]; 0 means exact matching. */
  tau?: number;
  blockSize?: number;
  pad?: "reject" | "edge";
}

export interface MaskResult {
  rows: number;
  cols: number;
  /** Keep/omit decision per grid cell, kept[row][col]. */
  kept: boolean[][];
  /** Original grid coordinates of kept blocks, in scan order. */
  positions: Array<[number, number]>;
  retainedCount: number;
  totalBlocks: number;
  retainRatio: number;
  config: {
    predictor: string;
    metric: string;
    tau: number;
    block_size: number;
    pad: string;
  };
  /** Version reported by the native side; must match version(). */
  nativeVersion: string;
}

export interface RunOptions {
  /** CLI executable; defaults to $PXPRUNE_BIN, then "pxprune" on PATH. */
  binary?: string;
}

/** Semantic version of these bindings. Kept in lockstep with the native library. */
export function version(): string {
  return pkg.version;
}

function resolveBinary(options?: RunOptions): string {
  return options?.binary ?? process.env.PXPRUNE_BIN ?? "pxprune";
}

function runCli(
  args: string[],
  stdin: Uint8Array | undefined,
  options?: RunOptions,
): Promise<string> {
  const binary = resolveBinary(options);
  return new Promise((resolve, reject) => {
    const child = spawn(binary, args, { stdio: ["pipe", "pipe", "pipe"] });
    const out: Buffer[] = [];
    const err: Buffer[] = [];
    child.stdout.on("data", (chunk) => out.push(chunk));
    child.stderr.on("data", (chunk) => err.push(chunk));
    child.on("error", (cause) => reject(new Error(`failed to launch ${binary}: ${cause.message}`)));
    child.on("close", (code) => {
      if (code === 0) {
        resolve(Buffer.concat(out).toString("utf8"));
      } else {
        const message = Buffer.concat(err).toString("utf8").trim() || `exit code ${code}`;
        reject(new Error(`${binary} failed: ${message}`));
      }
    });
    if (stdin !== undefined) {
      child.stdin.end(stdin);
    } else {
      child.stdin.end();
    }
  });
}

/** Version string of the native CLI this process would invoke. */
export async function nativeVersion(options?: RunOptions): Promise<string> {
  return (await runCli(["--version"], undefined, options)).trim();
}

function configArgs(config?: MaskConfig): string[] {
  const args: string[] = [];
  if (config?.predictor !== undefined) args.push("--predictor", config.predictor);
  if (config?.metric !== undefined) args.push("--metric", config.metric);
  if (config?.tau !== undefined) args.push("--tau", String(config.tau));
  if (config?.blockSize !== undefined) args.push("--block-size", String(config.blockSize));
  if (config?.pad !== undefined) args.push("--pad", config.pad);
  return args;
}

/**
 * Compute the keep/omit mask for a raw image buffer.
 *
 * The buffer must be contiguous row-major, channel-interleaved 8-bit samples
 * of exactly width*height*channels bytes; anything else is rejected with an
 * error telling the caller to pass a contiguous copy. Native failures
 * (bad config, non-divisible dimensions under "reject" padding, ...)
 * propagate as errors carrying the native message.
 */
export async function computeRetainMask(
  buffer: Uint8Array,
  width: number,
  height: number,
  channels: number,
  config?: MaskConfig,
  options?: RunOptions,
): Promise<MaskResult> {
  const ppm = encodePpm(buffer, width, height, channels);
  const args = ["mask", "-", "--format", "json", ...configArgs(config)];
  const stdout = await runCli(args, ppm, options);
  const payload = JSON.parse(stdout);
  return {
    rows: payload.grid.rows,
    cols: payload.grid.cols,
    kept: payload.kept,
    positions: payload.positions,
    retainedCount: payload.retained_count,
    totalBlocks: payload.total_blocks,
    retainRatio: payload.retain_ratio,
    config: payload.config,
    nativeVersion: payload.version,
  };
}
