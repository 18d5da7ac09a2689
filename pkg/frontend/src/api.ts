// Typed client for the requisites JSON API. Every call goes through one
// fetch wrapper so tests can observe (and veto) outgoing traffic.

export interface VariableDescription {
  id: string;
  states: string[];
}

export interface NetworkDescription {
  variables: VariableDescription[];
  edges: [string, string][];
  class_variable: string;
}

export type Distribution = Record<string, number>;

export interface PropagationResponse {
  posteriors: Record<string, Distribution>;
  revision: Distribution;
  prediction: string;
}

export interface SessionState {
  id: string;
  mode: "analytic" | "exploratory";
  target: string | null;
  evidence: Record<string, string>;
  project_values: Record<
    string,
    { state: string; statistics: Record<string, number | string>; note: string }
  > | null;
}

export interface BlanketResponse {
  variable: string;
  blanket: string[];
  project_values: Record<string, string>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.code = body.code;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly doFetch: FetchLike;

  constructor(base = "", fetchImpl?: FetchLike) {
    this.base = base.replace(/\/$/, "");
    // bind so the wrapper works detached from globalThis
    this.doFetch = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.doFetch(this.base + path, init);
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { code: "http_error", message: response.statusText };
      }
      throw new ApiError(response.status, body);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  private json(body: unknown, method = "POST"): RequestInit {
    return {
      method,
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    };
  }

  network(): Promise<NetworkDescription> {
    return this.request("/network");
  }

  infer(evidence: Record<string, string>, targets: string[]): Promise<PropagationResponse> {
    return this.request("/infer", this.json({ evidence, targets }));
  }

  markovBlanket(variable: string): Promise<BlanketResponse> {
    return this.request(`/markov-blanket/${encodeURIComponent(variable)}`);
  }

  createSession(mode: "analytic" | "exploratory", target?: string): Promise<SessionState> {
    return this.request("/sessions", this.json({ mode, target: target ?? null }));
  }

  getSession(id: string): Promise<SessionState> {
    return this.request(`/sessions/${id}`);
  }

  deleteSession(id: string): Promise<void> {
    return this.request(`/sessions/${id}`, { method: "DELETE" });
  }

  patchEvidence(
    id: string,
    evidence: Record<string, string | null>,
  ): Promise<SessionState> {
    return this.request(`/sessions/${id}/evidence`, this.json({ evidence }, "PATCH"));
  }

  propagate(id: string): Promise<PropagationResponse> {
    return this.request(`/sessions/${id}/propagate`, { method: "POST" });
  }

  exportEvidenceXml(id: string): Promise<string> {
    return this.doFetch(`${this.base}/sessions/${id}/evidence.xml`).then((r) => {
      if (!r.ok) throw new ApiError(r.status, { code: "http_error", message: r.statusText });
      return r.text();
    });
  }
}
