import type {
  MaterialInfo,
  ProcessClassInfo,
  SessionState,
  SolveResponse,
} from "./types.js";

/** Error raised for any non-2xx response, carrying the service envelope. */
export class ApiError extends Error {
  readonly code: string;
  readonly details: Record<string, unknown>;
  readonly status: number;

  constructor(
    code: string,
    message: string,
    details: Record<string, unknown> = {},
    status = 0,
  ) {
    super(message);
    this.name = "ApiError";
    this.code = code;
    this.details = details;
    this.status = status;
  }
}

function asEnvelope(data: unknown): { code?: string; message?: string; details?: Record<string, unknown> } {
  if (typeof data === "object" && data !== null) {
    return data as { code?: string; message?: string; details?: Record<string, unknown> };
  }
  return {};
}

/** Thin typed client for the solver service. One method per endpoint. */
export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.baseUrl + path, {
        method,
        headers: body === undefined ? undefined : { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError("NetworkError", String(err));
    }
    const text = await response.text();
    let data: unknown = null;
    if (text) {
      try {
        data = JSON.parse(text);
      } catch {
        data = null;
      }
    }
    if (!response.ok) {
      const envelope = asEnvelope(data);
      throw new ApiError(
        envelope.code ?? `Http${response.status}`,
        envelope.message ?? response.statusText,
        envelope.details ?? {},
        response.status,
      );
    }
    return data as T;
  }

  processClasses(): Promise<{ process_classes: ProcessClassInfo[] }> {
    return this.request("GET", "/api/process-classes");
  }

  materials(): Promise<{ materials: MaterialInfo[] }> {
    return this.request("GET", "/api/materials");
  }

  createSession(processClass: string): Promise<SessionState> {
    return this.request("POST", "/api/sessions", { process_class: processClass });
  }

  session(sessionId: string): Promise<SessionState> {
    return this.request("GET", `/api/sessions/${encodeURIComponent(sessionId)}`);
  }

  deleteSession(sessionId: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/api/sessions/${encodeURIComponent(sessionId)}`);
  }

  setAttribute(
    sessionId: string,
    instance: string,
    attribute: string,
    value: string,
  ): Promise<SessionState> {
    return this.request("POST", `/api/sessions/${encodeURIComponent(sessionId)}/attributes`, {
      instance,
      attribute,
      value,
    });
  }

  setValue(sessionId: string, name: string, value: number): Promise<SessionState> {
    return this.request("POST", `/api/sessions/${encodeURIComponent(sessionId)}/values`, {
      name,
      value,
    });
  }

  setTargets(sessionId: string, targets: string[]): Promise<SessionState> {
    return this.request("POST", `/api/sessions/${encodeURIComponent(sessionId)}/targets`, {
      targets,
    });
  }

  document(sessionId: string): Promise<{ session_id: string; document: string }> {
    return this.request("GET", `/api/sessions/${encodeURIComponent(sessionId)}/document`);
  }

  solve(sessionId: string, graph?: "json" | "dot"): Promise<SolveResponse> {
    const query = graph ? `?graph=${graph}` : "";
    return this.request("POST", `/api/sessions/${encodeURIComponent(sessionId)}/solve${query}`);
  }
}
