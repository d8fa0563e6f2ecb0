import type {
  AnomaliesResponseJson,
  ErrorBodyJson,
  MatchResultJson,
  SceneGraphJson,
  SearchResponseJson,
  StatsResponseJson,
} from "./types.js";

/** A failed API call, carrying the service's error kind and parse position. */
export class ApiError extends Error {
  readonly kind: string;
  readonly status: number;
  readonly position?: number;

  constructor(kind: string, message: string, status: number, position?: number) {
    super(message);
    this.kind = kind;
    this.status = status;
    this.position = position;
  }
}

async function toError(response: Response): Promise<ApiError> {
  try {
    const body = (await response.json()) as ErrorBodyJson;
    return new ApiError(body.error, body.message, response.status, body.position);
  } catch {
    return new ApiError("http_error", `HTTP ${response.status}`, response.status);
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async get<T>(path: string, params: Record<string, string>, signal?: AbortSignal): Promise<T> {
    const qs = new URLSearchParams(params).toString();
    const url = `${this.baseUrl}${path}${qs ? "?" + qs : ""}`;
    let response: Response;
    try {
      response = await fetch(url, { signal });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ApiError("network", `cannot reach the service (${String(err)})`, 0);
    }
    if (!response.ok) throw await toError(response);
    return (await response.json()) as T;
  }

  search(q: string, k: number, mode: "ranked" | "strict", signal?: AbortSignal): Promise<SearchResponseJson> {
    return this.get("/api/search", { q, k: String(k), mode }, signal);
  }

  explain(imageId: string, q: string, signal?: AbortSignal): Promise<MatchResultJson> {
    return this.get("/api/explain", { image: imageId, q }, signal);
  }

  imageGraph(imageId: string, signal?: AbortSignal): Promise<SceneGraphJson> {
    return this.get(`/api/images/${encodeURIComponent(imageId)}`, {}, signal);
  }

  /** URL of the raw image file; the <img> itself reports whether it exists. */
  imageFileUrl(imageId: string): string {
    return `${this.baseUrl}/api/images/${encodeURIComponent(imageId)}/file`;
  }

  anomalies(k: number, signal?: AbortSignal): Promise<AnomaliesResponseJson> {
    return this.get("/api/anomalies", { k: String(k) }, signal);
  }

  stats(signal?: AbortSignal): Promise<StatsResponseJson> {
    return this.get("/api/stats", {}, signal);
  }
}
