/**
 * Minimal 8-bit grayscale PNG codec.
 *
 * The review API ships images and masks as base64 PNGs; this codec is
 * enough to decode what the server sends (colortype 0, bit depth 8, all
 * five scanline filters) and to encode edited masks back. Compression
 * uses node:zlib.
 */

import { deflateSync, inflateSync } from "node:zlib";

export interface GrayImage {
  width: number;
  height: number;
  /** Row-major pixel bytes, length width*height. */
  data: Uint8Array;
}

const SIGNATURE = Uint8Array.from([137, 80, 78, 71, 13, 10, 26, 10]);

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(bytes: Uint8Array): number {
  let c = 0xffffffff;
  for (const b of bytes) {
    c = CRC_TABLE[(c ^ b) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, payload: Uint8Array): Uint8Array {
  const out = new Uint8Array(12 + payload.length);
  const view = new DataView(out.buffer);
  view.setUint32(0, payload.length);
  for (let i = 0; i < 4; i++) {
    out[4 + i] = type.charCodeAt(i);
  }
  out.set(payload, 8);
  view.setUint32(8 + payload.length, crc32(out.subarray(4, 8 + payload.length)));
  return out;
}

export function encodeGrayPng(image: GrayImage): Uint8Array {
  const { width, height, data } = image;
  if (data.length !== width * height) {
    throw new Error(`pixel buffer is ${data.length}, expected ${width * height}`);
  }
  const ihdr = new Uint8Array(13);
  const view = new DataView(ihdr.buffer);
  view.setUint32(0, width);
  view.setUint32(4, height);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 0; // grayscale
  // compression, filter, interlace all 0

  const raw = new Uint8Array(height * (width + 1));
  for (let y = 0; y < height; y++) {
    raw[y * (width + 1)] = 0; // filter: None
    raw.set(data.subarray(y * width, (y + 1) * width), y * (width + 1) + 1);
  }
  const idat = new Uint8Array(deflateSync(raw));

  const parts = [
    SIGNATURE,
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", new Uint8Array(0)),
  ];
  const total = parts.reduce((n, p) => n + p.length, 0);
  const out = new Uint8Array(total);
  let offset = 0;
  for (const p of parts) {
    out.set(p, offset);
    offset += p.length;
  }
  return out;
}

function paeth(a: number, b: number, c: number): number {
  const p = a + b - c;
  const pa = Math.abs(p - a);
  const pb = Math.abs(p - b);
  const pc = Math.abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

export function decodeGrayPng(bytes: Uint8Array): GrayImage {
  for (let i = 0; i < 8; i++) {
    if (bytes[i] !== SIGNATURE[i]) {
      throw new Error("not a PNG: bad signature");
    }
  }
  let width = 0;
  let height = 0;
  const idatParts: Uint8Array[] = [];
  let offset = 8;
  while (offset < bytes.length) {
    const view = new DataView(bytes.buffer, bytes.byteOffset + offset);
    const length = view.getUint32(0);
    const type = String.fromCharCode(
      bytes[offset + 4], bytes[offset + 5], bytes[offset + 6], bytes[offset + 7],
    );
    const payload = bytes.subarray(offset + 8, offset + 8 + length);
    if (type === "IHDR") {
      const h = new DataView(payload.buffer, payload.byteOffset);
      width = h.getUint32(0);
      height = h.getUint32(4);
      if (payload[8] !== 8 || payload[9] !== 0) {
        throw new Error(
          `unsupported PNG: bit depth ${payload[8]}, colortype ${payload[9]}`,
        );
      }
      if (payload[12] !== 0) {
        throw new Error("unsupported PNG: interlaced");
      }
    } else if (type === "IDAT") {
      idatParts.push(payload);
    } else if (type === "IEND") {
      break;
    }
    offset += 12 + length;
  }
  if (!width || !height) {
    throw new Error("not a PNG: missing IHDR");
  }
  const compressed = new Uint8Array(idatParts.reduce((n, p) => n + p.length, 0));
  let at = 0;
  for (const p of idatParts) {
    compressed.set(p, at);
    at += p.length;
  }
  const raw = new Uint8Array(inflateSync(compressed));
  if (raw.length !== height * (width + 1)) {
    throw new Error("corrupt PNG: scanline payload size mismatch");
  }

  const data = new Uint8Array(width * height);
  for (let y = 0; y < height; y++) {
    const filter = raw[y * (width + 1)];
    const line = raw.subarray(y * (width + 1) + 1, (y + 1) * (width + 1));
    for (let x = 0; x < width; x++) {
      const left = x > 0 ? data[y * width + x - 1] : 0;
      const up = y > 0 ? data[(y - 1) * width + x] : 0;
      const upLeft = x > 0 && y > 0 ? data[(y - 1) * width + x - 1] : 0;
      let value: number;
      switch (filter) {
        case 0: value = line[x]; break;
        case 1: value = line[x] + left; break;
        case 2: value = line[x] + up; break;
        case 3: value = line[x] + ((left + up) >> 1); break;
        case 4: value = line[x] + paeth(left, up, upLeft); break;
        default: throw new Error(`corrupt PNG: filter type ${filter}`);
      }
      data[y * width + x] = value & 0xff;
    }
  }
  return { width, height, data };
}

export function base64ToBytes(b64: string): Uint8Array {
  return new Uint8Array(Buffer.from(b64, "base64"));
}

export function bytesToBase64(bytes: Uint8Array): string {
  return Buffer.from(bytes).toString("base64");
}
