/**
 * Raster mask editor for review corrections.
 *
 * Works on a binary mask stored as 0/255 bytes (the PNG pixel values
 * the API uses). Every mutating call pushes an undo snapshot; history
 * is bounded so long review sessions cannot grow without limit.
 */

export const DEFAULT_HISTORY_LIMIT = 50;

export type BrushMode = "paint" | "erase";

export class MaskEditor {
  readonly width: number;
  readonly height: number;
  private data: Uint8Array;
  private undoStack: Uint8Array[] = [];
  private redoStack: Uint8Array[] = [];
  private readonly historyLimit: number;

  constructor(
    width: number,
    height: number,
    initial?: Uint8Array,
    historyLimit = DEFAULT_HISTORY_LIMIT,
  ) {
    if (width <= 0 || height <= 0) {
      throw new Error(`invalid mask size ${width}x${height}`);
    }
    if (historyLimit < 1) {
      throw new Error("history limit must be at least 1");
    }
    this.width = width;
    this.height = height;
    this.historyLimit = historyLimit;
    if (initial) {
      if (initial.length !== width * height) {
        throw new Error(
          `mask buffer is ${initial.length}, expected ${width * height}`,
        );
      }
      this.data = Uint8Array.from(initial, (v) => (v > 0 ? 255 : 0));
    } else {
      this.data = new Uint8Array(width * height);
    }
  }

  /** Current pixels; a copy, so callers cannot bypass the history. */
  snapshot(): Uint8Array {
    return this.data.slice();
  }

  get(x: number, y: number): boolean {
    this.checkBounds(x, y);
    return this.data[y * this.width + x] > 0;
  }

  /** Count of object pixels. */
  area(): number {
    let n = 0;
    for (const v of this.data) {
      if (v > 0) n++;
    }
    return n;
  }

  setPixel(x: number, y: number, on: boolean): void {
    this.checkBounds(x, y);
    this.pushHistory();
    this.data[y * this.width + x] = on ? 255 : 0;
  }

  togglePixel(x: number, y: number): void {
    this.checkBounds(x, y);
    this.pushHistory();
    const i = y * this.width + x;
    this.data[i] = this.data[i] > 0 ? 0 : 255;
  }

  /** Paint or erase a filled disc; coordinates outside the mask clip. */
  brush(cx: number, cy: number, radius: number, mode: BrushMode): void {
    if (radius < 0) {
      throw new Error("brush radius must be >= 0");
    }
    this.pushHistory();
    const value = mode === "paint" ? 255 : 0;
    const r2 = radius * radius;
    const x0 = Math.max(0, Math.floor(cx - radius));
    const x1 = Math.min(this.width - 1, Math.ceil(cx + radius));
    const y0 = Math.max(0, Math.floor(cy - radius));
    const y1 = Math.min(this.height - 1, Math.ceil(cy + radius));
    for (let y = y0; y <= y1; y++) {
      for (let x = x0; x <= x1; x++) {
        if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r2) {
          this.data[y * this.width + x] = value;
        }
      }
    }
  }

  fillAll(on: boolean): void {
    this.pushHistory();
    this.data.fill(on ? 255 : 0);
  }

  invert(): void {
    this.pushHistory();
    for (let i = 0; i < this.data.length; i++) {
      this.data[i] = this.data[i] > 0 ? 0 : 255;
    }
  }

  /** Replace the whole mask (e.g. reload the server proposal). */
  load(pixels: Uint8Array): void {
    if (pixels.length !== this.data.length) {
      throw new Error(
        `mask buffer is ${pixels.length}, expected ${this.data.length}`,
      );
    }
    this.pushHistory();
    this.data = Uint8Array.from(pixels, (v) => (v > 0 ? 255 : 0));
  }

  canUndo(): boolean {
    return this.undoStack.length > 0;
  }

  canRedo(): boolean {
    return this.redoStack.length > 0;
  }

  undo(): boolean {
    const prev = this.undoStack.pop();
    if (!prev) return false;
    this.redoStack.push(this.data);
    this.data = prev;
    return true;
  }

  redo(): boolean {
    const next = this.redoStack.pop();
    if (!next) return false;
    this.undoStack.push(this.data);
    this.data = next;
    return true;
  }

  private pushHistory(): void {
    this.undoStack.push(this.data.slice());
    if (this.undoStack.length > this.historyLimit) {
      this.undoStack.shift();
    }
    this.redoStack = [];
  }

  private checkBounds(x: number, y: number): void {
    if (!Number.isInteger(x) || !Number.isInteger(y)) {
      throw new Error(`pixel coordinates must be integers, got (${x}, ${y})`);
    }
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) {
      throw new Error(
        `(${x}, ${y}) outside mask ${this.width}x${this.height}`,
      );
    }
  }
}
