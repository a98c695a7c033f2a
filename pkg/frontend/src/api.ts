/** Thin client for the serve endpoints; fetch is injectable for tests. */

import { validateMapData, type MapData } from "./types.js";

export interface Recommendation {
  forum: string;
  score: number;
  relation: "neighbor" | "same-community";
}

export interface RecommendResponse {
  forum: string;
  community: number;
  recommendations: Recommendation[];
}

export interface SearchHit {
  id: string;
  label: string;
  community: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
  ) {
    super(`api error ${status}: ${code}`);
  }
}

export type FetchLike = (url: string) => Promise<Response>;

export class AtlasClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly base: string = "",
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((url) => fetch(url));
  }

  private async getJson(path: string): Promise<unknown> {
    const resp = await this.fetchImpl(this.base + path);
    if (!resp.ok) {
      let code = "unknown";
      try {
        const body = (await resp.json()) as { error?: string };
        if (body && typeof body.error === "string") code = body.error;
      } catch {
        // non-JSON error body; keep the generic code
      }
      throw new ApiError(resp.status, code);
    }
    return resp.json();
  }

  async map(): Promise<MapData> {
    return validateMapData(await this.getJson("/api/map"));
  }

  async recommend(forum: string, limit = 10): Promise<RecommendResponse> {
    const q = `forum=${encodeURIComponent(forum)}&limit=${limit}`;
    return (await this.getJson(`/api/recommend?${q}`)) as RecommendResponse;
  }

  async search(prefix: string, limit = 10): Promise<SearchHit[]> {
    const q = `prefix=${encodeURIComponent(prefix)}&limit=${limit}`;
    return (await this.getJson(`/api/search?${q}`)) as SearchHit[];
  }

  async health(): Promise<{ status: string; map_loaded: boolean; nodes: number }> {
    return (await this.getJson("/api/health")) as {
      status: string;
      map_loaded: boolean;
      nodes: number;
    };
  }
}
