/**
 * End-to-end round trip against a real server: fetch the next review
 * item, flip one pixel in the proposed mask, submit, and verify that
 * the rule base advanced one version and that the stored feedback
 * event holds the submitted mask byte-for-byte.
 */

import { type ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ScefisClient } from "../src/client.js";
import { MaskEditor } from "../src/editor.js";
import {
  base64ToBytes,
  bytesToBase64,
  decodeGrayPng,
  encodeGrayPng,
} from "../src/png.js";

const PORT = 18731;
const BASE = `http://127.0.0.1:${PORT}`;
const STARTUP_TIMEOUT_MS = 90_000;

let server: ChildProcess;
let projectsRoot: string;

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + STARTUP_TIMEOUT_MS;
  while (Date.now() < deadline) {
    try {
      const r = await fetch(`${BASE}/v1/projects/demo`);
      if (r.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 300));
  }
  throw new Error("fixture server did not come up in time");
}

beforeAll(async () => {
  projectsRoot = mkdtempSync(join(tmpdir(), "scefis-ui-"));
  server = spawn(
    "python3",
    [join(__dirname, "..", "scripts", "serve_fixture.py"), projectsRoot, String(PORT)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  server.stderr?.on("data", (d: Buffer) => {
    process.stderr.write(`[fixture] ${d}`);
  });
  await waitForServer();
}, STARTUP_TIMEOUT_MS + 10_000);

afterAll(() => {
  server?.kill();
});

describe("review round trip", () => {
  it("one-pixel edit evolves the rules and stores the exact mask", async () => {
    const client = new ScefisClient(BASE);

    const before = await client.getProject("demo");
    const versionBefore = before.rule_version as number;

    const item = await client.reviewNext("demo");
    expect(item.empty).toBe(false);
    const imageId = item.image_id!;
    const mask = decodeGrayPng(base64ToBytes(item.mask_png_b64!));
    expect(mask.width).toBe(item.width);
    expect(mask.height).toBe(item.height);

    const editor = new MaskEditor(mask.width, mask.height, mask.data);
    editor.togglePixel(0, 0);
    expect(editor.canUndo()).toBe(true);
    const edited = editor.snapshot();
    expect(edited[0]).not.toBe(mask.data[0] > 0 ? 255 : 0);

    const submitted = bytesToBase64(
      encodeGrayPng({ width: mask.width, height: mask.height, data: edited }),
    );
    const result = await client.submitFeedback("demo", imageId, submitted);
    expect(result.image_id).toBe(imageId);
    expect(result.rule_version).toBe(versionBefore + 1);
    expect(result.jaccard).toBeGreaterThan(0);

    const after = await client.getProject("demo");
    expect(after.rule_version).toBe(versionBefore + 1);

    const event = JSON.parse(
      readFileSync(
        join(projectsRoot, "demo", "online", "events", `${imageId}.json`),
        "utf8",
      ),
    ) as { mask_png_b64: string; rule_version: number };
    expect(event.mask_png_b64).toBe(submitted); // byte-identical payload
    expect(event.rule_version).toBe(versionBefore + 1);

    const metrics = await client.metrics("demo");
    expect(metrics.reviewed).toBe(1);
    expect(metrics.rule_trace.length).toBe(1);
  });
});
