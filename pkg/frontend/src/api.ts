/** Thin typed client for the analysis service endpoints. */
import type {
  AnalysisHandle,
  FramesPayload,
  Report,
  RuleSetDoc,
  StreamsPayload,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail?: string,
  ) {
    super(message);
  }
}

const MAX_FRAMES_PER_REQUEST = 600;

export class ServiceClient {
  constructor(readonly baseUrl: string) {}

  private async request<T>(path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method: body === undefined ? "GET" : "POST",
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    let doc: unknown;
    try {
      doc = JSON.parse(text);
    } catch {
      throw new ApiError(response.status, "bad_response", `non-JSON response from ${path}`);
    }
    if (!response.ok) {
      const err = doc as { code?: string; message?: string; detail?: string };
      throw new ApiError(
        response.status,
        err.code ?? "error",
        err.message ?? `request to ${path} failed`,
        err.detail,
      );
    }
    return doc as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("/health");
  }

  listAnalyses(): Promise<{ analyses: AnalysisHandle[] }> {
    return this.request("/analyses");
  }

  createAnalysis(payload: {
    name?: string;
    format?: string;
    content: string;
    params?: Record<string, unknown>;
  }): Promise<AnalysisHandle> {
    return this.request("/analyses", payload);
  }

  getAnalysis(id: string): Promise<AnalysisHandle> {
    return this.request(`/analyses/${id}`);
  }

  async waitForCompletion(id: string, timeoutMs = 30000): Promise<AnalysisHandle> {
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const handle = await this.getAnalysis(id);
      if (handle.status !== "pending") return handle;
      if (Date.now() > deadline) throw new ApiError(0, "timeout", `analysis ${id} timed out`);
      await new Promise((resolve) => setTimeout(resolve, 100));
    }
  }

  /** Fetch all frames, chunked to the server's per-request limit. */
  async getAllFrames(id: string, frameCount: number): Promise<FramesPayload> {
    let combined: FramesPayload | null = null;
    for (let start = 0; start < frameCount; start += MAX_FRAMES_PER_REQUEST) {
      const end = Math.min(start + MAX_FRAMES_PER_REQUEST - 1, frameCount - 1);
      const chunk = await this.request<FramesPayload>(
        `/analyses/${id}/frames?start=${start}&end=${end}`,
      );
      if (combined === null) {
        combined = chunk;
      } else {
        combined.frames.push(...chunk.frames);
        combined.end = chunk.end;
      }
    }
    if (combined === null) throw new ApiError(0, "empty", "analysis has no frames");
    return combined;
  }

  getStreams(id: string, measureIds?: string[]): Promise<StreamsPayload> {
    const query = measureIds?.length ? `?ids=${measureIds.join(",")}` : "";
    return this.request(`/analyses/${id}/streams${query}`);
  }

  getIncidents(id: string): Promise<{ id: string; incidents: Report["incidents"] }> {
    return this.request(`/analyses/${id}/incidents`);
  }

  getReport(id: string): Promise<Report> {
    return this.request(`/analyses/${id}/report`);
  }

  reevaluate(id: string, rules: RuleSetDoc): Promise<AnalysisHandle> {
    return this.request(`/analyses/${id}/reevaluate`, rules);
  }
}
