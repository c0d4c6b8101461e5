/**
 * Chart-series helpers: turn API metrics payloads into the plain
 * {labels, values} / point-list shapes charting libraries consume.
 */

import type { Metrics } from "./client.js";

export interface Point {
  x: number;
  y: number;
}

export interface BarSeries {
  labels: string[];
  values: number[];
}

/** Rule-count trace as 1-based points for a line chart. */
export function ruleTraceSeries(metrics: Metrics): Point[] {
  return metrics.rule_trace.map((count, i) => ({ x: i + 1, y: count }));
}

/** Per-image review scores in queue order. */
export function jaccardSeries(metrics: Metrics, queue: string[]): BarSeries {
  const reviewed = queue.filter((id) => id in metrics.per_image);
  return {
    labels: reviewed,
    values: reviewed.map((id) => metrics.per_image[id].jaccard),
  };
}

/** Review progress as a [done, remaining] pair for a gauge/progress bar. */
export function progress(metrics: Metrics): { done: number; remaining: number } {
  return {
    done: metrics.reviewed,
    remaining: Math.max(0, metrics.queued - metrics.reviewed),
  };
}

/**
 * Method-mean bars from a summaries object ({method: {mean: ...}}),
 * ordered best-first.
 */
export function methodMeans(
  summaries: Record<string, { mean: number }>,
): BarSeries {
  const entries = Object.entries(summaries).sort((a, b) => b[1].mean - a[1].mean);
  return {
    labels: entries.map(([name]) => name),
    values: entries.map(([, s]) => s.mean),
  };
}

/** Running mean of a score series, for smoothing noisy review traces. */
export function runningMean(values: number[]): number[] {
  const out: number[] = [];
  let sum = 0;
  for (let i = 0; i < values.length; i++) {
    sum += values[i];
    out.push(sum / (i + 1));
  }
  return out;
}
