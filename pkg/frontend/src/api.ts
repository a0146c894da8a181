// Typed client for the judging server's HTTP API.
//
// The server exposes four JSON endpoints plus the grid images:
//   GET  /api/session            session metadata and progress
//   GET  /api/next[?dimension=]  first pending task, or null when done
//   GET  /api/progress           per-dimension progress counts
//   POST /api/verdict            one blind verdict, acknowledged after fsync

export type WireChoice = 'option1' | 'option2' | 'tie';

export interface SessionInfo {
  judge_id: string;
  dimensions: string[];
  total: number;
  done: number;
}

export interface TaskView {
  task_id: string;
  dimension: string;
  sample_id: string;
  grid_url: string;
  instruction: string;
}

export interface NextResponse {
  task: TaskView | null;
  done: number;
  total: number;
}

export interface VerdictAck {
  accepted: boolean;
  task_id: string;
  done: number;
  total: number;
  remaining: number;
}

export interface DimensionProgress {
  total: number;
  done: number;
}

export interface ProgressInfo {
  total: number;
  done: number;
  remaining: number;
  by_dimension: Record<string, DimensionProgress>;
}

/** Error carrying the HTTP status and the server's error message. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class JudgingApi {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly baseUrl = '',
    fetchImpl?: FetchLike
  ) {
    // bind so a bare global fetch keeps its expected receiver
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  session(): Promise<SessionInfo> {
    return this.request<SessionInfo>('/api/session');
  }

  next(dimension?: string): Promise<NextResponse> {
    const query = dimension ? `?dimension=${encodeURIComponent(dimension)}` : '';
    return this.request<NextResponse>(`/api/next${query}`);
  }

  progress(): Promise<ProgressInfo> {
    return this.request<ProgressInfo>('/api/progress');
  }

  verdict(taskId: string, choice: WireChoice): Promise<VerdictAck> {
    return this.request<VerdictAck>('/api/verdict', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ task_id: taskId, winner: choice }),
    });
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorMessage(response));
    }
    return (await response.json()) as T;
  }
}

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { error?: string };
    if (typeof body.error === 'string' && body.error !== '') {
      return body.error;
    }
  } catch {
    // non-JSON error body; fall through to the status line
  }
  return `request failed with status ${response.status}`;
}
