/**
 * Typed client for the pimproto HTTP API.
 *
 * Every model fact the UI shows (rectangles, states, edges, traces) comes
 * through here; nothing is derived locally, which is what makes the whole
 * frontend testable against a mocked fetch.
 */

import type {
  AnalysisPayload,
  ApiErrorPayload,
  ConversionReportPayload,
  HotspotPayload,
  ImageRefPayload,
  ProjectPayload,
  ProjectSummary,
  RectPayload,
  ScreenPayload,
  SessionPayload,
  SessionStepPayload,
} from "./types.js";

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly path: string | null;

  constructor(body: ApiErrorPayload) {
    super(body.message);
    this.status = body.status;
    this.code = body.code;
    this.path = body.path;
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly base: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  imageUrl(projectId: string, hash: string): string {
    return `${this.base}/projects/${projectId}/images/${hash}`;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.base}${path}`, init);
    if (!response.ok) {
      throw new ApiError((await response.json()) as ApiErrorPayload);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  listProjects(): Promise<ProjectSummary[]> {
    return this.request("GET", "/projects");
  }

  createProject(name: string): Promise<ProjectPayload> {
    return this.request("POST", "/projects", { name });
  }

  getProject(id: string): Promise<ProjectPayload> {
    return this.request("GET", `/projects/${id}`);
  }

  uploadImage(projectId: string, data: Blob, contentType: string): Promise<ImageRefPayload> {
    return this.fetchImpl(`${this.base}/projects/${projectId}/images`, {
      method: "POST",
      headers: { "Content-Type": contentType },
      body: data,
    }).then(async (response) => {
      if (!response.ok) throw new ApiError((await response.json()) as ApiErrorPayload);
      return (await response.json()) as ImageRefPayload;
    });
  }

  addScreen(projectId: string, name: string, image?: string): Promise<ScreenPayload> {
    return this.request("POST", `/projects/${projectId}/screens`,
      image === undefined ? { name } : { name, image });
  }

  patchScreen(
    projectId: string,
    screenId: string,
    patch: { name?: string; image?: string | null; initial?: boolean },
  ): Promise<ScreenPayload> {
    return this.request("PATCH", `/projects/${projectId}/screens/${screenId}`, patch);
  }

  deleteScreen(projectId: string, screenId: string): Promise<{ affected_hotspots: string[] }> {
    return this.request("DELETE", `/projects/${projectId}/screens/${screenId}`);
  }

  addHotspot(projectId: string, screenId: string, rect: RectPayload, name?: string): Promise<HotspotPayload> {
    return this.request("POST", `/projects/${projectId}/screens/${screenId}/hotspots`,
      name === undefined ? { rect } : { rect, name });
  }

  patchHotspot(
    projectId: string,
    screenId: string,
    hotspotId: string,
    patch: {
      rect?: RectPayload;
      name?: string;
      link_target?: string | null;
      s_behaviours?: string[];
    },
  ): Promise<HotspotPayload> {
    return this.request(
      "PATCH",
      `/projects/${projectId}/screens/${screenId}/hotspots/${hotspotId}`,
      patch,
    );
  }

  deleteHotspot(projectId: string, screenId: string, hotspotId: string): Promise<void> {
    return this.request("DELETE", `/projects/${projectId}/screens/${screenId}/hotspots/${hotspotId}`);
  }

  convert(projectId: string): Promise<ConversionReportPayload> {
    return this.request("POST", `/projects/${projectId}/convert`);
  }

  analysis(projectId: string): Promise<AnalysisPayload> {
    return this.request("GET", `/projects/${projectId}/analysis`);
  }

  startSession(projectId: string): Promise<SessionPayload> {
    return this.request("POST", `/projects/${projectId}/sessions`);
  }

  click(sessionId: string, x: number, y: number): Promise<SessionStepPayload> {
    return this.request("POST", `/sessions/${sessionId}/click`, { x, y });
  }

  step(sessionId: string, behaviour: string): Promise<SessionStepPayload> {
    return this.request("POST", `/sessions/${sessionId}/step`, { behaviour });
  }

  reset(sessionId: string): Promise<SessionStepPayload> {
    return this.request("POST", `/sessions/${sessionId}/reset`);
  }
}
