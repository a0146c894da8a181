// @vitest-environment happy-dom
//
// DOM tests: the real ui runs against a session whose API is scripted.

import { beforeEach, describe, expect, it } from 'vitest';

import { NextResponse, TaskView, VerdictAck, WireChoice } from '../src/api.js';
import { JudgingSession } from '../src/session.js';
import { mountUi } from '../src/ui.js';

function task(id: string, instruction = 'compare textures'): TaskView {
  return {
    task_id: id,
    dimension: 'local_quality',
    sample_id: 's1',
    grid_url: `/api/grid/${id}.png`,
    instruction,
  };
}

class FakeApi {
  verdictCalls: Array<[string, WireChoice]> = [];
  nextQueue: Array<NextResponse | Error> = [];
  verdictQueue: Array<VerdictAck | Error> = [];

  async next(): Promise<NextResponse> {
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

function $(testId: string): HTMLElement {
  const el = document.querySelector<HTMLElement>(`[data-testid="${testId}"]`);
  if (el === null) throw new Error(`missing ${testId}`);
  return el;
}

const flush = () => new Promise<void>(resolve => setTimeout(resolve, 0));

function pressKey(key: string): KeyboardEvent {
  const event = new KeyboardEvent('keydown', { key, bubbles: true, cancelable: true });
  document.dispatchEvent(event);
  return event;
}

describe('mountUi', () => {
  let root: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = '<main id="app"></main>';
    root = document.getElementById('app') as HTMLElement;
  });

  it('shows a loading status before the first task arrives', () => {
    const session = new JudgingSession(new FakeApi());
    mountUi(root, session);
    expect($('status').textContent).toContain('Loading');
    const button = $('choose-option1') as HTMLButtonElement;
    expect(button.disabled).toBe(true);
  });

  it('renders the current task with instruction, counter and grid', async () => {
    const api = new FakeApi();
    api.nextQueue.push({ task: task('t1', 'judge seam quality'), done: 2, total: 6 });
    const session = new JudgingSession(api);
    mountUi(root, session);
    await session.start();
    expect($('status').textContent).toBe('3 of 6');
    expect($('instruction').textContent).toBe('judge seam quality');
    expect($('grid').getAttribute('src')).toBe('/api/grid/t1.png');
    expect(($('choose-tie') as HTMLButtonElement).disabled).toBe(false);
  });

  it('submits the clicked option and advances', async () => {
    const api = new FakeApi();
    api.nextQueue.push({ task: task('t1'), done: 0, total: 2 });
    api.verdictQueue.push(ack(1, 2));
    api.nextQueue.push({ task: task('t2'), done: 1, total: 2 });
    const session = new JudgingSession(api);
    mountUi(root, session);
    await session.start();
    $('choose-option2').click();
    await flush();
    expect(api.verdictCalls).toEqual([['t1', 'option2']]);
    expect($('grid').getAttribute('src')).toBe('/api/grid/t2.png');
    expect($('status').textContent).toBe('2 of 2');
  });

  it('maps the 1, 2 and space keys onto choices', async () => {
    const api = new FakeApi();
    api.nextQueue.push({ task: task('t1'), done: 0, total: 4 });
    api.verdictQueue.push(ack(1, 4));
    api.nextQueue.push({ task: task('t2'), done: 1, total: 4 });
    api.verdictQueue.push(ack(2, 4));
    api.nextQueue.push({ task: task('t3'), done: 2, total: 4 });
    api.verdictQueue.push(ack(3, 4));
    api.nextQueue.push({ task: task('t4'), done: 3, total: 4 });
    const session = new JudgingSession(api);
    mountUi(root, session);
    await session.start();

    pressKey('1');
    await flush();
    const spaceEvent = pressKey(' ');
    await flush();
    pressKey('2');
    await flush();

    expect(api.verdictCalls).toEqual([
      ['t1', 'option1'],
      ['t2', 'tie'],
      ['t3', 'option2'],
    ]);
    // space must not scroll the page while judging
    expect(spaceEvent.defaultPrevented).toBe(true);
  });

  it('ignores shortcut keys while typing in a form field', async () => {
    const api = new FakeApi();
    api.nextQueue.push({ task: task('t1'), done: 0, total: 1 });
    const session = new JudgingSession(api);
    mountUi(root, session);
    await session.start();

    const input = document.createElement('input');
    document.body.appendChild(input);
    input.dispatchEvent(
      new KeyboardEvent('keydown', { key: '1', bubbles: true, cancelable: true })
    );
    await flush();
    expect(api.verdictCalls).toEqual([]);
  });

  it('ignores keys with a command modifier held', async () => {
    const api = new FakeApi();
    api.nextQueue.push({ task: task('t1'), done: 0, total: 1 });
    const session = new JudgingSession(api);
    mountUi(root, session);
    await session.start();
    document.dispatchEvent(
      new KeyboardEvent('keydown', { key: '1', ctrlKey: true, bubbles: true })
    );
    await flush();
    expect(api.verdictCalls).toEqual([]);
  });

  it('shows the completion message and clears the grid', async () => {
    const api = new FakeApi();
    api.nextQueue.push({ task: task('t1'), done: 5, total: 6 });
    api.verdictQueue.push(ack(6, 6));
    const session = new JudgingSession(api);
    mountUi(root, session);
    await session.start();
    $('choose-option1').click();
    await flush();
    expect($('status').textContent).toBe('All 6 comparisons are judged. Thank you.');
    expect($('grid').getAttribute('src')).toBeNull();
    expect(($('choose-option1') as HTMLButtonElement).disabled).toBe(true);
  });

  it('surfaces failures with a working retry button', async () => {
    const api = new FakeApi();
    api.nextQueue.push(new Error('connection refused'));
    const session = new JudgingSession(api);
    mountUi(root, session);
    await session.start();
    expect(($('error') as HTMLElement).hidden).toBe(false);
    expect($('error-message').textContent).toContain('connection refused');

    api.nextQueue.push({ task: task('t1'), done: 0, total: 2 });
    $('retry').click();
    await flush();
    expect(($('error') as HTMLElement).hidden).toBe(true);
    expect($('status').textContent).toBe('1 of 2');
  });

  it('stops listening to the keyboard after dispose', async () => {
    const api = new FakeApi();
    api.nextQueue.push({ task: task('t1'), done: 0, total: 1 });
    const session = new JudgingSession(api);
    const mounted = mountUi(root, session);
    await session.start();
    mounted.dispose();
    pressKey('1');
    await flush();
    expect(api.verdictCalls).toEqual([]);
  });
});
