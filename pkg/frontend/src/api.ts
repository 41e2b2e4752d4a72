import type {
  CreateMapResponse,
  EditCommand,
  EnrichResponse,
  ErrorBody,
  TreeResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/**
 * Thin client over the map service. Mutations on one map are queued so at
 * most one is in flight at a time; reads bypass the queue.
 */
export class ApiClient {
  private queues = new Map<string, Promise<unknown>>();

  constructor(
    private baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let parsed: ErrorBody;
      try {
        parsed = (await response.json()) as ErrorBody;
      } catch {
        parsed = { code: "Unknown", message: response.statusText, detail: "" };
      }
      throw new ApiError(response.status, parsed);
    }
    return (await response.json()) as T;
  }

  private async requestText(path: string): Promise<string> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "GET",
    });
    if (!response.ok) {
      throw new ApiError(response.status, {
        code: "Unknown",
        message: response.statusText,
        detail: "",
      });
    }
    return response.text();
  }

  /** Serialize mutations per map: each waits for the previous to settle. */
  mutate<T>(mapId: string, run: () => Promise<T>): Promise<T> {
    const previous = this.queues.get(mapId) ?? Promise.resolve();
    const next = previous.then(run, run);
    this.queues.set(
      mapId,
      next.catch(() => undefined),
    );
    return next;
  }

  createMap(query: string): Promise<CreateMapResponse> {
    return this.request("POST", "/maps", { query });
  }

  getTree(mapId: string): Promise<TreeResponse> {
    return this.request("GET", `/maps/${mapId}`);
  }

  exportOutline(mapId: string, includeCollapsed = false): Promise<string> {
    const all = includeCollapsed ? "&all=true" : "";
    return this.requestText(`/maps/${mapId}/export?format=outline${all}`);
  }

  applyCommand(mapId: string, command: EditCommand): Promise<TreeResponse> {
    return this.mutate(mapId, () =>
      this.request<TreeResponse>("POST", `/maps/${mapId}/commands`, command),
    );
  }

  undo(mapId: string): Promise<TreeResponse> {
    return this.mutate(mapId, () =>
      this.request<TreeResponse>("POST", `/maps/${mapId}/undo`),
    );
  }

  redo(mapId: string): Promise<TreeResponse> {
    return this.mutate(mapId, () =>
      this.request<TreeResponse>("POST", `/maps/${mapId}/redo`),
    );
  }

  explain(mapId: string, nodeId: string): Promise<EnrichResponse> {
    return this.mutate(mapId, () =>
      this.request<EnrichResponse>(
        "POST",
        `/maps/${mapId}/nodes/${nodeId}/explain`,
      ),
    );
  }

  examples(mapId: string, nodeId: string): Promise<EnrichResponse> {
    return this.mutate(mapId, () =>
      this.request<EnrichResponse>(
        "POST",
        `/maps/${mapId}/nodes/${nodeId}/examples`,
      ),
    );
  }

  explore(
    mapId: string,
    nodeId: string,
    question: string,
  ): Promise<EnrichResponse> {
    return this.mutate(mapId, () =>
      this.request<EnrichResponse>(
        "POST",
        `/maps/${mapId}/nodes/${nodeId}/explore`,
        { question },
      ),
    );
  }
}
