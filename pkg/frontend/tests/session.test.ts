// Unit tests for the session state machine against a scripted API.

import { describe, expect, it } from 'vitest';

import { ApiError, NextResponse, TaskView, VerdictAck, WireChoice } from '../src/api.js';
import { JudgingSession, Phase } from '../src/session.js';

function task(id: string): TaskView {
  return {
    task_id: id,
    dimension: 'local_quality',
    sample_id: 's1',
    grid_url: `/api/grid/${id}.png`,
    instruction: 'pick the better texture',
  };
}

/** Scripted replies; each call shifts the next entry or rejection. */
class FakeApi {
  nextCalls: Array<string | undefined> = [];
  verdictCalls: Array<[string, WireChoice]> = [];
  private nextQueue: Array<NextResponse | Error> = [];
  private verdictQueue: Array<VerdictAck | Error | Promise<VerdictAck>> = [];

  queueNext(reply: NextResponse | Error): void {
    this.nextQueue.push(reply);
  }

  queueVerdict(reply: VerdictAck | Error | Promise<VerdictAck>): void {
    this.verdictQueue.push(reply);
  }

  async next(dimension?: string): Promise<NextResponse> {
    this.nextCalls.push(dimension);
    const reply = this.nextQueue.shift();
    if (reply === undefined) throw new Error('no scripted next reply');
    if (reply instanceof Error) throw reply;
    return reply;
  }

  async verdict(taskId: string, choice: WireChoice): Promise<VerdictAck> {
    this.verdictCalls.push([taskId, choice]);
    const reply = this.verdictQueue.shift();
    if (reply === undefined) throw new Error('no scripted verdict reply');
    if (reply instanceof Error) throw reply;
    return reply;
  }
}

function ack(done: number, total: number): VerdictAck {
  return { accepted: true, task_id: 'x', done, total, remaining: total - done };
}

describe('JudgingSession', () => {
  it('loads the first pending task on start', async () => {
    const api = new FakeApi();
    api.queueNext({ task: task('t1'), done: 0, total: 3 });
    const session = new JudgingSession(api);
    expect(session.state.phase).toBe('idle');
    await session.start();
    expect(session.state.phase).toBe('judging');
    expect(session.state.task?.task_id).toBe('t1');
    expect(session.state.done).toBe(0);
    expect(session.state.total).toBe(3);
  });

  it('passes its dimension filter to the api', async () => {
    const api = new FakeApi();
    api.queueNext({ task: null, done: 0, total: 0 });
    const session = new JudgingSession(api, 'reference_alignment');
    await session.start();
    expect(api.nextCalls).toEqual(['reference_alignment']);
  });

  it('completes immediately when nothing is pending', async () => {
    const api = new FakeApi();
    api.queueNext({ task: null, done: 4, total: 4 });
    const session = new JudgingSession(api);
    await session.start();
    expect(session.state.phase).toBe('complete');
    expect(session.state.done).toBe(4);
  });

  it('submits a verdict and advances to the following task', async () => {
    const api = new FakeApi();
    api.queueNext({ task: task('t1'), done: 0, total: 2 });
    api.queueVerdict(ack(1, 2));
    api.queueNext({ task: task('t2'), done: 1, total: 2 });
    const session = new JudgingSession(api);
    await session.start();
    await session.choose('option1');
    expect(api.verdictCalls).toEqual([['t1', 'option1']]);
    expect(session.state.phase).toBe('judging');
    expect(session.state.task?.task_id).toBe('t2');
    expect(session.state.done).toBe(1);
  });

  it('finishes on the ack that reports nothing remaining', async () => {
    const api = new FakeApi();
    api.queueNext({ task: task('t9'), done: 5, total: 6 });
    api.queueVerdict(ack(6, 6));
    const session = new JudgingSession(api);
    await session.start();
    await session.choose('tie');
    expect(session.state.phase).toBe('complete');
    expect(session.state.task).toBeNull();
    // no follow-up /api/next once the ack said remaining == 0
    expect(api.nextCalls.length).toBe(1);
  });

  it('drops choices made while a submission is in flight', async () => {
    const api = new FakeApi();
    api.queueNext({ task: task('t1'), done: 0, total: 2 });
    let release: (value: VerdictAck) => void = () => {};
    api.queueVerdict(new Promise<VerdictAck>(resolve => (release = resolve)));
    api.queueNext({ task: task('t2'), done: 1, total: 2 });
    const session = new JudgingSession(api);
    await session.start();

    const first = session.choose('option1');
    const second = session.choose('option2'); // double-click: must be dropped
    release(ack(1, 2));
    await Promise.all([first, second]);

    expect(api.verdictCalls).toEqual([['t1', 'option1']]);
    expect(session.state.task?.task_id).toBe('t2');
  });

  it('ignores choices outside the judging phase', async () => {
    const api = new FakeApi();
    api.queueNext({ task: null, done: 1, total: 1 });
    const session = new JudgingSession(api);
    await session.start();
    await session.choose('option1');
    expect(session.state.phase).toBe('complete');
    expect(api.verdictCalls).toEqual([]);
  });

  it('skips ahead when the server reports a duplicate verdict', async () => {
    const api = new FakeApi();
    api.queueNext({ task: task('t1'), done: 0, total: 2 });
    api.queueVerdict(new ApiError(409, 'already judged'));
    api.queueNext({ task: task('t2'), done: 1, total: 2 });
    const session = new JudgingSession(api);
    await session.start();
    await session.choose('option1');
    expect(session.state.phase).toBe('judging');
    expect(session.state.task?.task_id).toBe('t2');
    expect(session.state.error).toBeNull();
  });

  it('enters the error phase on failures and recovers via retry', async () => {
    const api = new FakeApi();
    api.queueNext({ task: task('t1'), done: 0, total: 2 });
    api.queueVerdict(new Error('connection refused'));
    const session = new JudgingSession(api);
    await session.start();
    await session.choose('option2');
    expect(session.state.phase).toBe('error');
    expect(session.state.error).toContain('connection refused');

    // the verdict never landed, so the same task comes back
    api.queueNext({ task: task('t1'), done: 0, total: 2 });
    await session.retry();
    expect(session.state.phase).toBe('judging');
    expect(session.state.task?.task_id).toBe('t1');
    expect(session.state.error).toBeNull();
  });

  it('ignores retry outside the error phase', async () => {
    const api = new FakeApi();
    api.queueNext({ task: task('t1'), done: 0, total: 1 });
    const session = new JudgingSession(api);
    await session.start();
    await session.retry();
    expect(session.state.phase).toBe('judging');
    expect(api.nextCalls.length).toBe(1);
  });

  it('notifies listeners of every transition until unsubscribed', async () => {
    const api = new FakeApi();
    api.queueNext({ task: task('t1'), done: 0, total: 2 });
    api.queueVerdict(ack(1, 2));
    api.queueNext({ task: task('t2'), done: 1, total: 2 });
    const session = new JudgingSession(api);
    const phases: Phase[] = [];
    const unsubscribe = session.onChange(state => phases.push(state.phase));
    await session.start();
    await session.choose('option1');
    expect(phases).toEqual(['loading', 'judging', 'submitting', 'submitting', 'judging']);
    unsubscribe();
    await session.choose('option2');
    expect(phases.length).toBe(5);
  });
});
