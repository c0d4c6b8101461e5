import { describe, expect, it } from "vitest";

import {
  base64ToBytes,
  bytesToBase64,
  decodeGrayPng,
  encodeGrayPng,
} from "../src/png.js";

// 24x31-transposed... actually 31x24: gradient + noise block, written by a
// reference encoder that uses non-trivial scanline filters (Sub/Up/Paeth).
const REFERENCE_PNG_B64 =
  "iVBORw0KGgoAAAANSUhEUgAAAB8AAAAYCAAAAAAnwHldAAAAY0lEQVR4nGNkYMYLmPBL00d+" +
  "8ubna0Owy7MwMzMz3/jmomOvgFWeUZSZmVlT2uDaTn7s8hLMzMyvvvJI3TTBbb/q8i1innjc" +
  "Zz/H8uNcPO6L5VFx341dnlEFuziK+aPyNJMHACD2GbtTpnrmAAAAAElFTkSuQmCC";

describe("grayscale PNG codec", () => {
  it("round-trips random pixels exactly", () => {
    const width = 37;
    const height = 23;
    const data = new Uint8Array(width * height);
    let state = 42;
    for (let i = 0; i < data.length; i++) {
      state = (state * 1103515245 + 12345) & 0x7fffffff;
      data[i] = state & 0xff;
    }
    const decoded = decodeGrayPng(encodeGrayPng({ width, height, data }));
    expect(decoded.width).toBe(width);
    expect(decoded.height).toBe(height);
    expect(decoded.data).toEqual(data);
  });

  it("round-trips a binary 0/255 mask", () => {
    const data = Uint8Array.from([0, 255, 255, 0, 0, 255]);
    const decoded = decodeGrayPng(encodeGrayPng({ width: 3, height: 2, data }));
    expect(Array.from(decoded.data)).toEqual([0, 255, 255, 0, 0, 255]);
  });

  it("decodes a reference encoder's filtered output", () => {
    const img = decodeGrayPng(base64ToBytes(REFERENCE_PNG_B64));
    expect(img.width).toBe(31);
    expect(img.height).toBe(24);
    // checksums computed from the source pixel array
    expect(img.data.reduce((a, b) => a + b, 0)).toBe(61731);
    expect(img.data[7 * 31 + 6]).toBe(146);
  });

  it("rejects non-PNG bytes", () => {
    expect(() => decodeGrayPng(Uint8Array.from([1, 2, 3, 4]))).toThrow(
      /bad signature/,
    );
  });

  it("rejects a mismatched pixel buffer", () => {
    expect(() =>
      encodeGrayPng({ width: 4, height: 4, data: new Uint8Array(3) }),
    ).toThrow(/expected 16/);
  });

  it("base64 helpers invert each other", () => {
    const bytes = Uint8Array.from([0, 1, 254, 255, 128]);
    expect(base64ToBytes(bytesToBase64(bytes))).toEqual(bytes);
  });
});
