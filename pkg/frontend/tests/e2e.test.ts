// @vitest-environment happy-dom

// Drives the page against a live service: starts a game from the form,
// plays to termination by clicking the offered buttons, and checks that a
// mid-game reload lands on the same rendered state.

import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { ArenaApi } from '../src/api.js';
import { App } from '../src/ui.js';
import { RunningServer, startServer } from './server.js';

const THREE_BIT = '((a & b) + (c & d)) & ((e & f) + (g & h))';

let server: RunningServer;

beforeAll(async () => {
  server = await startServer(8933);
});

afterAll(async () => {
  await server.stop();
});

class MemoryStorage implements Storage {
  private data = new Map<string, string>();
  get length(): number { return this.data.size; }
  clear(): void { this.data.clear(); }
  getItem(key: string): string | null { return this.data.get(key) ?? null; }
  key(index: number): string | null {
    return [...this.data.keys()][index] ?? null;
  }
  removeItem(key: string): void { this.data.delete(key); }
  setItem(key: string, value: string): void { this.data.set(key, value); }
}

async function waitFor(check: () => boolean, what: string): Promise<void> {
  const deadline = Date.now() + 10000;
  while (!check()) {
    if (Date.now() > deadline) throw new Error(`timed out waiting: ${what}`);
    await new Promise((resolve) => setTimeout(resolve, 15));
  }
}

interface Mounted {
  root: HTMLElement;
  app: App;
  rejected: number[];
  storage: MemoryStorage;
}

function mount(storage = new MemoryStorage()): Mounted {
  const root = document.createElement('div');
  document.body.append(root);
  const rejected: number[] = [];
  const api = new ArenaApi(server.base, (status) => {
    if (status >= 400) rejected.push(status);
  });
  const app = new App(root, api, storage);
  return { root, app, rejected, storage };
}

function setInput(root: HTMLElement, selector: string, value: string): void {
  const input = root.querySelector(selector) as HTMLInputElement;
  input.value = value;
}

function click(root: HTMLElement, selector: string): void {
  (root.querySelector(selector) as HTMLElement).click();
}

function moveButtons(root: HTMLElement): HTMLButtonElement[] {
  return [...root.querySelectorAll('.moves button')] as HTMLButtonElement[];
}

function clickMove(root: HTMLElement, label: string): void {
  const button = moveButtons(root).find((b) => b.textContent === label);
  if (!button) throw new Error(`no move button ${label}`);
  button.click();
}

function historyLines(root: HTMLElement): string[] {
  return [...root.querySelectorAll('.history li')]
    .map((li) => li.textContent ?? '');
}

function banner(root: HTMLElement): string {
  return root.querySelector('.banner')?.textContent ?? '';
}

describe('arena page', () => {
  it('plays the three-bit game to termination by clicking', async () => {
    const { root, rejected } = mount();
    setInput(root, '#formula', THREE_BIT);
    click(root, '#start');
    await waitFor(() => moveButtons(root).length === 2, 'first move offer');
    expect(moveButtons(root).map((b) => b.textContent)).toEqual(['L', 'R']);

    clickMove(root, 'L');
    await waitFor(() => historyLines(root).length === 2, 'engine reply');
    expect(historyLines(root)[0]).toBe('client L');
    expect(historyLines(root)[1].startsWith('server ')).toBe(true);

    await waitFor(() => moveButtons(root).length === 2, 'second move offer');
    clickMove(root, 'R');
    await waitFor(() => banner(root) === 'play terminated', 'final banner');
    expect(historyLines(root).length).toBe(3);
    expect(moveButtons(root).length).toBe(0);
    expect(rejected).toEqual([]);
  });

  it('restores the identical view after a mid-game reload', async () => {
    const first = mount();
    setInput(first.root, '#formula', THREE_BIT);
    click(first.root, '#start');
    await waitFor(() => moveButtons(first.root).length === 2, 'move offer');
    clickMove(first.root, 'L');
    await waitFor(() => historyLines(first.root).length === 2, 'reply');

    const second = mount(first.storage);
    const restored = await second.app.restore();
    expect(restored).toBe(true);
    expect(historyLines(second.root)).toEqual(historyLines(first.root));
    expect(moveButtons(second.root).map((b) => b.textContent))
      .toEqual(moveButtons(first.root).map((b) => b.textContent));
    expect(second.root.querySelector('.header')?.textContent)
      .toBe(first.root.querySelector('.header')?.textContent);
    expect(banner(second.root)).toBe(banner(first.root));
    expect(second.rejected).toEqual([]);
  });

  it('shows the stuck banner when the server has no opening', async () => {
    const { root } = mount();
    setInput(root, '#formula', '0');
    click(root, '#start');
    await waitFor(() => banner(root) === 'server stuck', 'stuck banner');
    expect(moveButtons(root).length).toBe(0);
  });

  it('surfaces a parse error verbatim and recovers', async () => {
    const { root } = mount();
    setInput(root, '#formula', 'a &&');
    click(root, '#start');
    await waitFor(() => (root.querySelector('.error')?.textContent ?? '')
      .length > 0, 'error text');
    setInput(root, '#formula', '1 & 1');
    click(root, '#start');
    await waitFor(() => moveButtons(root).length === 2, 'recovered offer');
    clickMove(root, 'L');
    await waitFor(() => banner(root) === 'play terminated', 'terminated');
    expect(historyLines(root)).toEqual(['client L']);
  });

  it('expands the game tree lazily on click', async () => {
    const { root } = mount();
    setInput(root, '#tree-formula', '(a & b) + 1');
    click(root, '#explore');
    await waitFor(() => root.querySelectorAll('.tree .edge').length === 2,
                  'root edges');
    const edges = [...root.querySelectorAll('.tree .edge')]
      .map((e) => (e.textContent ?? '').trim());
    expect(edges).toEqual(['L', 'R']);
    expect(root.querySelectorAll('.tree button.expand').length).toBe(2);

    (root.querySelector('.tree button.expand') as HTMLElement).click();
    await waitFor(() => root.querySelectorAll('.tree .turn-label').length > 1,
                  'child node');
    const labels = [...root.querySelectorAll('.tree .turn-label')]
      .map((e) => e.textContent);
    expect(labels[0]).toBe('[s]');
    expect(labels).toContain('[c]');
  });
});
