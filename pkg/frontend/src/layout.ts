import type { NodeRecord } from "./types.js";

export const COLUMN_WIDTH = 260;
export const ROW_HEIGHT = 64;

export interface ViewNode {
  record: NodeRecord;
  parentId: string | null;
  x: number;
  y: number;
  selected: boolean;
  /** Descendants hidden behind this node's collapsed flag. */
  hiddenDescendants: number;
}

function countDescendants(record: NodeRecord): number {
  let total = 0;
  for (const child of record.children) {
    total += 1 + countDescendants(child);
  }
  return total;
}

/**
 * Deterministic tiered layout: depth picks the column, visible leaves stack
 * top to bottom, every parent sits centered over its visible children.
 * Children of collapsed nodes get no ViewNode at all.
 */
export function layoutTree(root: NodeRecord): Map<string, ViewNode> {
  const nodes = new Map<string, ViewNode>();
  let nextRow = 0;

  const place = (record: NodeRecord, parentId: string | null): number => {
    const x = (record.depth - 1) * COLUMN_WIDTH;
    const visibleChildren = record.collapsed ? [] : record.children;
    let y: number;
    if (visibleChildren.length === 0) {
      y = nextRow * ROW_HEIGHT;
      nextRow += 1;
    } else {
      const ys = visibleChildren.map((child) => place(child, record.id));
      y = (ys[0] + ys[ys.length - 1]) / 2;
    }
    nodes.set(record.id, {
      record,
      parentId,
      x,
      y,
      selected: false,
      hiddenDescendants: record.collapsed ? countDescendants(record) : 0,
    });
    return y;
  };

  place(root, null);
  return nodes;
}
