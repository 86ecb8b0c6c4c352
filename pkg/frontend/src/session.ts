// Session controller: one play against the engine, no optimistic updates.
// The view is always the last service response, and submissions are
// serialized so a double-click cannot race the referee.

import {
  ArenaApi,
  SessionOptions,
  SessionState,
  ServiceError,
} from './api.js';

export interface SessionView extends SessionState {
  formula: string;
  side: 'client' | 'server';
}

export class SessionController {
  private state: SessionState;
  private queue: Promise<unknown> = Promise.resolve();

  private constructor(
    private readonly api: ArenaApi,
    readonly id: string,
    readonly formula: string,
    readonly side: 'client' | 'server',
    state: SessionState,
  ) {
    this.state = state;
  }

  static async start(
    api: ArenaApi,
    formula: string,
    side: 'client' | 'server',
    options: SessionOptions = {},
  ): Promise<SessionController> {
    const { id, state } = await api.startSession(formula, side, options);
    return new SessionController(api, id, formula, side, state);
  }

  /** Reattach to a live session, as a page reload does. */
  static async resume(
    api: ArenaApi,
    id: string,
    formula: string,
    side: 'client' | 'server',
  ): Promise<SessionController> {
    const state = await api.getSession(id);
    return new SessionController(api, id, formula, side, state);
  }

  get view(): SessionView {
    return { formula: this.formula, side: this.side, ...this.state };
  }

  /**
   * Submit one of the listed legal moves. Moves the service did not list
   * are rejected here, before any request is made.
   */
  submitMove(move: string): Promise<SessionView> {
    const run = this.queue.then(async () => {
      if (!this.state.legalMoves.includes(move)) {
        throw new ServiceError(0, `move ${move} is not offered`);
      }
      this.state = await this.api.postMove(this.id, move);
      return this.view;
    });
    this.queue = run.catch(() => undefined);
    return run;
  }

  async refresh(): Promise<SessionView> {
    this.state = await this.api.getSession(this.id);
    return this.view;
  }
}
