// Entry point: wire the API client, session and DOM together.

import { JudgingApi } from './api.js';
import { JudgingSession } from './session.js';
import { mountUi } from './ui.js';

function boot(): void {
  const root = document.getElementById('app');
  if (root === null) {
    throw new Error('missing #app element');
  }
  const params = new URLSearchParams(window.location.search);
  const dimension = params.get('dimension') ?? undefined;
  const session = new JudgingSession(new JudgingApi(), dimension);
  mountUi(root, session);
  void session.start();
}

if (document.readyState === 'loading') {
  document.addEventListener('DOMContentLoaded', boot);
} else {
  boot();
}
