// DOM layer: renders the session state into a root element and feeds
// button clicks and keyboard shortcuts back into the state machine.
//
// Shortcuts follow the on-screen hints: 1 picks the left option,
// 2 the right one, space a tie. Keys are ignored while a submission
// is in flight (the machine drops them anyway) and inside form fields.

import { WireChoice } from './api.js';
import { JudgingSession, SessionState } from './session.js';

const KEY_TO_CHOICE: Record<string, WireChoice> = {
  '1': 'option1',
  '2': 'option2',
  ' ': 'tie',
};

export interface MountedUi {
  /** Detach the document-level keyboard listener. */
  dispose(): void;
}

export function mountUi(root: HTMLElement, session: JudgingSession): MountedUi {
  root.innerHTML = `
    <header>
      <h1>Pairwise judging</h1>
      <div data-testid="status" class="status"></div>
    </header>
    <p data-testid="instruction" class="instruction"></p>
    <div class="choices">
      <button data-testid="choose-option1" data-choice="option1">
        <kbd>1</kbd> Option 1
      </button>
      <button data-testid="choose-tie" data-choice="tie">
        <kbd>space</kbd> Tie
      </button>
      <button data-testid="choose-option2" data-choice="option2">
        <kbd>2</kbd> Option 2
      </button>
    </div>
    <div data-testid="error" class="error" hidden>
      <span data-testid="error-message"></span>
      <button data-testid="retry">Retry</button>
    </div>
    <figure class="grid">
      <img data-testid="grid" alt="comparison grid">
    </figure>
  `;

  const get = <T extends HTMLElement>(testId: string): T => {
    const el = root.querySelector<T>(`[data-testid="${testId}"]`);
    if (el === null) {
      throw new Error(`missing ui element ${testId}`);
    }
    return el;
  };

  const status = get<HTMLElement>('status');
  const instruction = get<HTMLElement>('instruction');
  const errorBox = get<HTMLElement>('error');
  const errorMessage = get<HTMLElement>('error-message');
  const grid = get<HTMLImageElement>('grid');
  const buttons = Array.from(
    root.querySelectorAll<HTMLButtonElement>('button[data-choice]')
  );

  for (const button of buttons) {
    button.addEventListener('click', () => {
      void session.choose(button.dataset['choice'] as WireChoice);
    });
  }
  get<HTMLButtonElement>('retry').addEventListener('click', () => {
    void session.retry();
  });

  const onKeydown = (event: KeyboardEvent): void => {
    const target = event.target as HTMLElement | null;
    if (target && ['INPUT', 'TEXTAREA', 'SELECT'].includes(target.tagName)) {
      return;
    }
    if (event.metaKey || event.ctrlKey || event.altKey) {
      return;
    }
    const choice = KEY_TO_CHOICE[event.key];
    if (choice !== undefined) {
      event.preventDefault();
      void session.choose(choice);
    }
  };
  root.ownerDocument.addEventListener('keydown', onKeydown);

  const render = (state: SessionState): void => {
    const judging = state.phase === 'judging';
    for (const button of buttons) {
      button.disabled = !judging;
    }
    errorBox.hidden = state.phase !== 'error';
    errorMessage.textContent = state.error ?? '';

    switch (state.phase) {
      case 'idle':
      case 'loading':
        status.textContent = 'Loading…';
        break;
      case 'judging':
      case 'submitting':
        status.textContent = `${state.done + 1} of ${state.total}`;
        break;
      case 'complete':
        status.textContent = `All ${state.total} comparisons are judged. Thank you.`;
        break;
      case 'error':
        status.textContent = 'Something went wrong.';
        break;
    }

    if (state.task !== null) {
      instruction.textContent = state.task.instruction;
      if (grid.getAttribute('src') !== state.task.grid_url) {
        grid.src = state.task.grid_url;
      }
    } else {
      instruction.textContent = '';
      grid.removeAttribute('src');
    }
  };

  const unsubscribe = session.onChange(render);
  render(session.state);

  return {
    dispose(): void {
      unsubscribe();
      root.ownerDocument.removeEventListener('keydown', onKeydown);
    },
  };
}
