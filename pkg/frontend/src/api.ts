/**
 * Typed client for the invlearn session API (v1 JSON contract).
 *
 * Every method returns the server document verbatim; no numeric values are
 * recomputed client-side. Errors carry the machine-readable code from the
 * server's `detail` payload.
 */

export interface ThetaBounds {
  active: number[];
  lower: number[] | null;
  upper: number[] | null;
  witness: number[] | null;
}

export interface StepView {
  index: number;
  point: number[];
  loss: number;
  delta_loss: number;
  active_relevant: number[];
  newly_activated: number[];
  theta: number[] | null;
  score?: number;
  newly_activated_names?: string[];
  active_relevant_names?: string[];
  theta_bounds?: ThetaBounds | null;
  nutrients?: Record<string, number>;
  exceeds_tau?: boolean;
}

export interface SessionView {
  id: string;
  steps: StepView[];
  pending: StepView | null;
  face_exhausted: boolean;
  loss_sequence: number[];
  row_names?: string[];
}

export interface CreateSessionResponse {
  id: string;
  step: StepView;
  active: number[];
}

export interface NutrientBoundSpec {
  lower?: number | null;
  upper?: number | null;
  lower_relevant?: boolean;
  upper_relevant?: boolean;
}

export interface DietRegionResponse {
  problem: Record<string, unknown>;
  row_names: string[];
  regimen: string;
  groups: string[];
  nutrients: string[];
  bounds: Record<string, NutrientBoundSpec>;
}

export interface StepRequest {
  omega?: number;
  preferred?: number[];
  tau?: number;
}

export interface CreateSessionRequest {
  problem: Record<string, unknown>;
  row_names?: string[];
  diet_regimen?: string;
}

/** Server-reported failure: HTTP status plus the machine-readable code. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly findings?: unknown;

  constructor(status: number, code: string, message: string, findings?: unknown) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.findings = findings;
  }
}

type FetchLike = typeof fetch;

export class NavigatorClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl: FetchLike = fetch) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const res = await this.fetchImpl(`${this.base}${path}`, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await res.text();
    const doc = text ? JSON.parse(text) : null;
    if (!res.ok) {
      const detail = doc?.detail ?? {};
      throw new ApiError(
        res.status,
        typeof detail.code === "string" ? detail.code : "unknown-error",
        typeof detail.message === "string" ? detail.message : `HTTP ${res.status}`,
        detail.findings,
      );
    }
    return doc as T;
  }

  createSession(req: CreateSessionRequest): Promise<CreateSessionResponse> {
    return this.request("POST", "/v1/sessions", req);
  }

  getSession(id: string): Promise<SessionView> {
    return this.request("GET", `/v1/sessions/${id}`);
  }

  propose(id: string, req: StepRequest = {}): Promise<StepView> {
    return this.request("POST", `/v1/sessions/${id}/propose`, req);
  }

  accept(id: string): Promise<SessionView> {
    return this.request("POST", `/v1/sessions/${id}/accept`);
  }

  rollback(id: string, to: number): Promise<SessionView> {
    return this.request("POST", `/v1/sessions/${id}/rollback`, { to });
  }

  dietRegion(body: { regimen?: string; intake_csv?: string } = {}): Promise<DietRegionResponse> {
    return this.request("POST", "/v1/diet/region", body);
  }
}
