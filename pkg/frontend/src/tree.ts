// Lazy game-tree explorer. Nodes are fetched one at a time by path; the
// client never re-derives game rules, it only renders what the service
// reports for each address.

import { ArenaApi, TreeNode, Turn } from './api.js';

export interface ExplorerNode {
  path: string[];
  turn: Turn;
  /** Edge labels to children, in service order. */
  moves: string[];
}

export class TreeExplorer {
  private nodes = new Map<string, ExplorerNode>();

  constructor(
    private readonly api: ArenaApi,
    readonly formula: string,
  ) {}

  private key(path: string[]): string {
    return path.join(',');
  }

  node(path: string[]): ExplorerNode | undefined {
    return this.nodes.get(this.key(path));
  }

  get root(): ExplorerNode | undefined {
    return this.node([]);
  }

  /** Fetch the node at path (the root when the path is empty). */
  async expand(path: string[] = []): Promise<ExplorerNode> {
    const cached = this.node(path);
    if (cached) return cached;
    const fetched: TreeNode = await this.api.treeNode(this.formula, path);
    const entry: ExplorerNode = { path: [...path], ...fetched };
    this.nodes.set(this.key(path), entry);
    return entry;
  }

  expanded(path: string[]): boolean {
    return this.nodes.has(this.key(path));
  }
}
