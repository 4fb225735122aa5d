// Typed client for the judgment-service HTTP API. The trial payload type
// deliberately has no source field: the server never sends one before the
// verdict, and the UI must not know it.

export type Verdict = "human_generated" | "computer_generated";

export interface TrialObject {
  object_id: string;
  name: string;
  bbox: [number, number, number]; // (width, depth, height) meters
}

export interface TrialPayload {
  trial_id: string;
  objects: TrialObject[];
  sequence: string[];
  created_at: string;
}

export type NextTrialResponse =
  | { status: "trial"; trial: TrialPayload }
  | { status: "exhausted" };

export interface ResultsRow {
  source: string;
  n: number;
  judged_human: number;
  judged_computer: number;
  judged_human_pct: number | null;
  judged_computer_pct: number | null;
}

export interface PairStats {
  sources: [string, string];
  available: boolean;
  reason?: string;
  counts?: { s1: number; f1: number; s2: number; f2: number };
  boschloo_p?: number;
  cohens_h?: number;
  power?: number | null;
}

export interface ResultsTable {
  rows: Record<string, ResultsRow>;
  total_judgments: number;
  pair?: PairStats;
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw new ApiError(`${init?.method ?? "GET"} ${path} -> ${response.status}`, response.status);
    }
    return (await response.json()) as T;
  }

  async createSession(): Promise<string> {
    const body = await this.request<{ session_id: string }>("/api/sessions", {
      method: "POST",
    });
    return body.session_id;
  }

  nextTrial(sessionId: string): Promise<NextTrialResponse> {
    return this.request<NextTrialResponse>(`/api/sessions/${sessionId}/next-trial`);
  }

  async submitJudgment(sessionId: string, trialId: string, verdict: Verdict): Promise<void> {
    await this.request(`/api/sessions/${sessionId}/judgments`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ trial_id: trialId, verdict }),
    });
  }

  results(pair?: [string, string]): Promise<ResultsTable> {
    const query = pair ? `?pair=${pair[0]},${pair[1]}` : "";
    return this.request<ResultsTable>(`/api/results${query}`);
  }
}
