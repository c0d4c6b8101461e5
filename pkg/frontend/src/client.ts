/**
 * Typed client for the scefis /v1 HTTP API.
 *
 * The fetch implementation is injectable so tests can run against a
 * fake and the client works in both browser and node.
 */

export type FetchLike = (
  url: string,
  init?: {
    method?: string;
    headers?: Record<string, string>;
    body?: string | FormData;
  },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export interface ProjectStatus {
  id: string;
  phase: string;
  rule_version: number | null;
  config: Record<string, unknown>;
}

export interface ReviewItem {
  empty: boolean;
  image_id?: string;
  threshold?: number;
  width?: number;
  height?: number;
  image_png_b64?: string;
  mask_png_b64?: string;
}

export interface FeedbackResult {
  image_id: string;
  sequence: number;
  best_threshold: number;
  jaccard: number;
  rule_version: number;
  rule_count: number;
}

export interface RuleBaseDump {
  version: number;
  n_inputs: number;
  rules: {
    centers: number[];
    widths: number[];
    coefficients: number[];
  }[];
}

export interface Metrics {
  rule_trace: number[];
  per_image: Record<string, { jaccard: number; threshold_best: number }>;
  reviewed: number;
  queued: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`API ${status}: ${detail}`);
  }
}

export class ScefisClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch as unknown as FetchLike,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: Parameters<FetchLike>[1] = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const payload = (await response.json()) as Record<string, unknown>;
    if (!response.ok) {
      throw new ApiError(response.status, String(payload["detail"] ?? "unknown"));
    }
    return payload as T;
  }

  createProject(config: Record<string, unknown> = {}) {
    return this.request<{ id: string; phase: string }>(
      "POST", "/v1/projects", { config },
    );
  }

  getProject(id: string) {
    return this.request<ProjectStatus>("GET", `/v1/projects/${id}`);
  }

  configure(id: string) {
    return this.request<{ z: number; widths: Record<string, number> }>(
      "POST", `/v1/projects/${id}/configure`,
    );
  }

  offline(id: string) {
    return this.request<{ images: number }>("POST", `/v1/projects/${id}/offline`);
  }

  train(id: string, trainIds?: string[]) {
    return this.request<{ rules: number; store_rows: number; version: number }>(
      "POST", `/v1/projects/${id}/train`, { train_ids: trainIds ?? null },
    );
  }

  online(id: string, testIds?: string[]) {
    return this.request<{ queue: string[] }>(
      "POST", `/v1/projects/${id}/online`, { test_ids: testIds ?? null },
    );
  }

  reviewNext(id: string) {
    return this.request<ReviewItem>("GET", `/v1/projects/${id}/review/next`);
  }

  submitFeedback(id: string, imageId: string, maskPngB64: string) {
    return this.request<FeedbackResult>(
      "POST",
      `/v1/projects/${id}/review/${imageId}/feedback`,
      { mask_png_b64: maskPngB64 },
    );
  }

  rules(id: string) {
    return this.request<RuleBaseDump>("GET", `/v1/projects/${id}/rules`);
  }

  metrics(id: string) {
    return this.request<Metrics>("GET", `/v1/projects/${id}/metrics`);
  }
}
