/** Wire types of the map service (server is the single source of truth). */

export interface NodeRecord {
  id: string;
  text: string;
  depth: number;
  collapsed: boolean;
  color_index: number;
  origin: string;
  children: NodeRecord[];
}

export interface TreeResponse {
  map_id: string;
  revision: number;
  tree: NodeRecord;
}

export interface WarningRecord {
  kind: string;
  location: number | null;
  detail: string;
}

export interface CreateMapResponse extends TreeResponse {
  warnings: WarningRecord[];
}

export interface EnrichResponse {
  map_id: string;
  revision: number;
  attached: NodeRecord[];
  warnings: WarningRecord[];
}

export interface ErrorBody {
  code: string;
  message: string;
  detail: string;
}

export type EditCommand =
  | { type: "add_child"; parent: string; text: string; position?: number }
  | { type: "delete_subtree"; node: string }
  | { type: "edit_text"; node: string; new_text: string }
  | { type: "move_subtree"; node: string; new_parent: string; position?: number }
  | { type: "set_collapsed"; node: string; flag: boolean };

export function isNodeRecord(value: unknown): value is NodeRecord {
  if (typeof value !== "object" || value === null) return false;
  const record = value as Record<string, unknown>;
  return (
    typeof record.id === "string" &&
    typeof record.text === "string" &&
    typeof record.depth === "number" &&
    typeof record.color_index === "number" &&
    Array.isArray(record.children) &&
    record.children.every(isNodeRecord)
  );
}
