// Judging session state machine, independent of any DOM.
//
// Drives the loop: fetch next task, show it, submit one verdict,
// repeat until the server reports nothing pending. Exactly one request
// is in flight at a time; a verdict submitted while another is pending
// is dropped rather than queued, so double-clicks and key repeats
// cannot produce duplicate POSTs.

import { ApiError, JudgingApi, TaskView, WireChoice } from './api.js';

export type Phase = 'idle' | 'loading' | 'judging' | 'submitting' | 'complete' | 'error';

export interface SessionState {
  phase: Phase;
  task: TaskView | null;
  done: number;
  total: number;
  error: string | null;
}

export type StateListener = (state: SessionState) => void;

type SessionApi = Pick<JudgingApi, 'next' | 'verdict'>;

export class JudgingSession {
  private listeners: StateListener[] = [];
  private current: SessionState = {
    phase: 'idle',
    task: null,
    done: 0,
    total: 0,
    error: null,
  };

  constructor(
    private readonly api: SessionApi,
    private readonly dimension?: string
  ) {}

  get state(): SessionState {
    return this.current;
  }

  onChange(listener: StateListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter(l => l !== listener);
    };
  }

  /** Load the first pending task. Valid from idle or error. */
  async start(): Promise<void> {
    if (this.current.phase !== 'idle' && this.current.phase !== 'error') {
      return;
    }
    this.set({ phase: 'loading', error: null });
    await this.advance();
  }

  /** Submit a verdict for the task on screen. No-op unless judging. */
  async choose(choice: WireChoice): Promise<void> {
    const task = this.current.task;
    if (this.current.phase !== 'judging' || task === null) {
      return;
    }
    this.set({ phase: 'submitting' });
    try {
      const ack = await this.api.verdict(task.task_id, choice);
      if (ack.remaining === 0) {
        this.set({ phase: 'complete', task: null, done: ack.done, total: ack.total });
        return;
      }
      this.set({ done: ack.done, total: ack.total });
    } catch (err) {
      // a 409 means this task was already judged (for example in a
      // second tab); skip forward instead of surfacing an error
      if (!(err instanceof ApiError && err.status === 409)) {
        this.fail(err);
        return;
      }
    }
    await this.advance();
  }

  /** Re-attempt after a failure. */
  async retry(): Promise<void> {
    if (this.current.phase !== 'error') {
      return;
    }
    await this.start();
  }

  private async advance(): Promise<void> {
    try {
      const response = await this.api.next(this.dimension);
      if (response.task === null) {
        this.set({
          phase: 'complete',
          task: null,
          done: response.done,
          total: response.total,
        });
      } else {
        this.set({
          phase: 'judging',
          task: response.task,
          done: response.done,
          total: response.total,
        });
      }
    } catch (err) {
      this.fail(err);
    }
  }

  private fail(err: unknown): void {
    const message = err instanceof Error ? err.message : String(err);
    this.set({ phase: 'error', error: message });
  }

  private set(patch: Partial<SessionState>): void {
    this.current = { ...this.current, ...patch };
    for (const listener of [...this.listeners]) {
      listener(this.current);
    }
  }
}
