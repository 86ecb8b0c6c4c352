// DOM view/controller. Pure rendering of the last service response: every
// control the user can press was listed by the service, and every press
// round-trips before anything on screen changes.

import { ArenaApi, ServiceError } from './api.js';
import { SessionController } from './session.js';
import { ExplorerNode, TreeExplorer } from './tree.js';

const STORAGE_KEY = 'llgames-arena-session';

interface StoredSession {
  id: string;
  formula: string;
  side: 'client' | 'server';
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class App {
  private session: SessionController | null = null;
  private explorer: TreeExplorer | null = null;
  private busy = false;

  private formulaInput = el('input');
  private sideSelect = el('select');
  private startButton = el('button', 'primary', 'start');
  private errorBox = el('div', 'error');
  private sessionPanel = el('section', 'panel session');
  private headerLine = el('div', 'header');
  private turnLine = el('div', 'turn');
  private movesBox = el('div', 'moves');
  private historyList = el('ol', 'history');
  private banner = el('div', 'banner');
  private treeInput = el('input');
  private exploreButton = el('button', undefined, 'explore');
  private treeBox = el('div', 'tree');

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ArenaApi,
    private readonly storage: Storage = sessionStorage,
  ) {
    this.build();
  }

  private build(): void {
    const setup = el('section', 'panel setup');
    this.formulaInput.placeholder = 'formula, e.g. (a & b) + (c & d)';
    this.formulaInput.id = 'formula';
    for (const side of ['client', 'server']) {
      const option = el('option', undefined, side);
      option.value = side;
      this.sideSelect.append(option);
    }
    this.sideSelect.id = 'side';
    this.startButton.id = 'start';
    this.startButton.addEventListener('click', () => void this.start());
    setup.append(this.formulaInput, this.sideSelect, this.startButton,
                 this.errorBox);

    this.sessionPanel.hidden = true;
    this.sessionPanel.append(this.headerLine, this.turnLine, this.movesBox,
                             this.historyList, this.banner);

    const treePanel = el('section', 'panel explorer');
    this.treeInput.placeholder = 'formula to explore';
    this.treeInput.id = 'tree-formula';
    this.exploreButton.id = 'explore';
    this.exploreButton.addEventListener('click', () => void this.explore());
    treePanel.append(this.treeInput, this.exploreButton, this.treeBox);

    this.root.append(setup, this.sessionPanel, treePanel);
  }

  /** Reattach to the stored session, as after a page reload. */
  async restore(): Promise<boolean> {
    const raw = this.storage.getItem(STORAGE_KEY);
    if (!raw) return false;
    try {
      const stored = JSON.parse(raw) as StoredSession;
      this.session = await SessionController.resume(
        this.api, stored.id, stored.formula, stored.side);
      this.formulaInput.value = stored.formula;
      this.sideSelect.value = stored.side;
      this.renderSession();
      return true;
    } catch {
      this.storage.removeItem(STORAGE_KEY);
      return false;
    }
  }

  private async start(): Promise<void> {
    const formula = this.formulaInput.value.trim();
    const side = this.sideSelect.value as 'client' | 'server';
    if (!formula) return;
    this.errorBox.textContent = '';
    try {
      this.session = await SessionController.start(this.api, formula, side);
    } catch (error) {
      this.showError(error);
      return;
    }
    const stored: StoredSession = { id: this.session.id, formula, side };
    this.storage.setItem(STORAGE_KEY, JSON.stringify(stored));
    this.renderSession();
  }

  private async submit(move: string): Promise<void> {
    if (!this.session || this.busy) return;
    this.busy = true;
    try {
      await this.session.submitMove(move);
    } catch (error) {
      this.showError(error);
    } finally {
      this.busy = false;
    }
    this.renderSession();
  }

  private showError(error: unknown): void {
    this.errorBox.textContent =
      error instanceof ServiceError ? error.message : String(error);
  }

  private renderSession(): void {
    const session = this.session;
    if (!session) return;
    const view = session.view;
    this.sessionPanel.hidden = false;

    this.headerLine.textContent = `${view.formula} — you are ${view.side}`;
    this.turnLine.textContent =
      view.turn === 'terminated' ? '' : `turn: ${view.turn}`
      + (view.turn === view.side ? ' (you)' : '');

    this.movesBox.replaceChildren();
    for (const move of view.legalMoves) {
      const button = el('button', 'move', move);
      button.addEventListener('click', () => void this.submit(move));
      this.movesBox.append(button);
    }

    this.historyList.replaceChildren();
    for (const entry of view.history) {
      this.historyList.append(el('li', undefined,
                                 `${entry.side} ${entry.move}`));
    }

    if (view.terminated) {
      this.banner.textContent = 'play terminated';
    } else if (view.stuckSide) {
      this.banner.textContent = `${view.stuckSide} stuck`;
    } else {
      this.banner.textContent = '';
    }
  }

  private async explore(): Promise<void> {
    const formula = this.treeInput.value.trim();
    if (!formula) return;
    this.errorBox.textContent = '';
    this.explorer = new TreeExplorer(this.api, formula);
    try {
      await this.explorer.expand([]);
    } catch (error) {
      this.explorer = null;
      this.showError(error);
      return;
    }
    this.renderTree();
  }

  private async expandChild(path: string[]): Promise<void> {
    if (!this.explorer) return;
    try {
      await this.explorer.expand(path);
    } catch (error) {
      this.showError(error);
    }
    this.renderTree();
  }

  private renderTree(): void {
    this.treeBox.replaceChildren();
    const root = this.explorer?.root;
    if (root) this.treeBox.append(this.renderNode(root));
  }

  private renderNode(node: ExplorerNode): HTMLElement {
    const container = el('div', 'node');
    container.append(el('span', `turn-label ${node.turn}`,
                        `[${node.turn[0]}]`));
    if (node.moves.length === 0) return container;
    const list = el('ul');
    for (const move of node.moves) {
      const item = el('li');
      item.append(el('span', 'edge', move + ' '));
      const childPath = [...node.path, move];
      const child = this.explorer?.node(childPath);
      if (child) {
        item.append(this.renderNode(child));
      } else {
        const button = el('button', 'expand', 'expand');
        button.addEventListener('click',
                                () => void this.expandChild(childPath));
        item.append(button);
      }
      list.append(item);
    }
    container.append(list);
    return container;
  }
}
