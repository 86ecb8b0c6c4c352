// Typed client for the llgames session service. All game logic lives
// server-side; this layer only moves JSON and surfaces rejections verbatim.

export type Turn = 'client' | 'server' | 'terminated';

export interface HistoryEntry {
  side: string;
  move: string;
}

export interface SessionState {
  turn: Turn;
  legalMoves: string[];
  history: HistoryEntry[];
  terminated: boolean;
  stuckSide: string | null;
}

export interface NewSessionResponse {
  id: string;
  state: SessionState;
}

export interface TreeNode {
  turn: Turn;
  moves: string[];
}

export interface SessionOptions {
  atoms?: Record<string, unknown>;
  bangCap?: number;
  bangMode?: 'consistent' | 'stream';
}

export class ServiceError extends Error {
  constructor(public readonly status: number, detail: string) {
    super(detail);
    this.name = 'ServiceError';
  }
}

/** Called after every response; lets tests count rejections. */
export type ResponseObserver = (status: number, path: string) => void;

export class ArenaApi {
  constructor(
    readonly base: string,
    private readonly observer?: ResponseObserver,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, init);
    this.observer?.(response.status, path);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body.detail === 'string' ? body.detail : response.statusText;
      throw new ServiceError(response.status, detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  startSession(
    formula: string,
    humanSide: 'client' | 'server',
    options: SessionOptions = {},
  ): Promise<NewSessionResponse> {
    return this.post('/session', { formula, humanSide, ...options });
  }

  getSession(id: string): Promise<SessionState> {
    return this.request(`/session/${id}`);
  }

  postMove(id: string, move: string): Promise<SessionState> {
    return this.post(`/session/${id}/move`, { move });
  }

  solve(formula: string, options: SessionOptions = {}): Promise<{ winner: string }> {
    return this.post('/solve', { formula, ...options });
  }

  /** One-level lazy expansion; the path is the rendered moves from the root. */
  treeNode(formula: string, path: string[] = []): Promise<TreeNode> {
    const query = new URLSearchParams({ formula, path: path.join(',') });
    return this.request(`/game/tree?${query}`);
  }
}
