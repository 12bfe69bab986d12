// Deterministic layered layout for the scheme diagram. Columns follow the
// fixed unit-kind order of the architecture blocks, so the same scheme
// always lands on the same pixels.

import type { ConnectionDoc, InstanceDoc, MistakeDoc } from "./api.js";

export const KIND_ORDER = [
  "model_dev_env",
  "model_directory",
  "model_base",
  "model_runtime",
  "solver",
  "external_system",
  "data_mgmt_link",
  "knowledge_mgmt_link",
  "dss_user_interface",
] as const;

export const NODE_WIDTH = 172;
export const NODE_HEIGHT = 52;
export const COLUMN_GAP = 64;
export const ROW_GAP = 28;

export interface LayoutNode {
  id: string;
  label: string;
  kind: string;
  x: number;
  y: number;
  ghost: boolean;     // stands in for a missing required kind
  mistaken: boolean;  // highlighted by a validation mistake
}

export interface LayoutEdge {
  from: string;
  to: string;
  label: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
}

export interface SchemeLayout {
  nodes: LayoutNode[];
  edges: LayoutEdge[];
  width: number;
  height: number;
}

function columnOf(kind: string): number {
  const index = (KIND_ORDER as readonly string[]).indexOf(kind);
  return index < 0 ? KIND_ORDER.length : index;
}

/** Kinds flagged missing by MISSING_REQUIRED_UNIT mistakes (subject is `<kind>_count`). */
export function missingKinds(mistakes: MistakeDoc[]): string[] {
  return mistakes
    .filter((m) => m.code === "MISSING_REQUIRED_UNIT" && m.subject.endsWith("_count"))
    .map((m) => m.subject.slice(0, -"_count".length));
}

export function layoutScheme(
  instances: InstanceDoc[],
  connections: ConnectionDoc[],
  mistakes: MistakeDoc[] = [],
): SchemeLayout {
  const mistakenSubjects = new Set(mistakes.map((m) => m.subject));
  const columns = new Map<number, LayoutNode[]>();

  const place = (node: Omit<LayoutNode, "x" | "y">, column: number) => {
    const rows = columns.get(column) ?? [];
    const laid: LayoutNode = {
      ...node,
      x: column * (NODE_WIDTH + COLUMN_GAP) + 16,
      y: rows.length * (NODE_HEIGHT + ROW_GAP) + 16,
    };
    rows.push(laid);
    columns.set(column, rows);
    return laid;
  };

  const byId = new Map<string, LayoutNode>();
  const sorted = [...instances].sort(
    (a, b) => columnOf(a.kind) - columnOf(b.kind) || a.id.localeCompare(b.id),
  );
  for (const inst of sorted) {
    const node = place(
      {
        id: inst.id,
        label: `${inst.id} ${inst.kind}`,
        kind: inst.kind,
        ghost: false,
        mistaken: mistakenSubjects.has(inst.id),
      },
      columnOf(inst.kind),
    );
    byId.set(inst.id, node);
  }

  for (const kind of missingKinds(mistakes)) {
    place(
      {
        id: `missing_${kind}`,
        label: `missing ${kind}`,
        kind,
        ghost: true,
        mistaken: true,
      },
      columnOf(kind),
    );
  }

  const edges: LayoutEdge[] = connections.flatMap((c) => {
    const from = byId.get(c.from);
    const to = byId.get(c.to);
    if (!from || !to) return [];
    return [
      {
        from: c.from,
        to: c.to,
        label: `${c.from_port} -> ${c.to_port}`,
        x1: from.x + NODE_WIDTH / 2,
        y1: from.y + NODE_HEIGHT / 2,
        x2: to.x + NODE_WIDTH / 2,
        y2: to.y + NODE_HEIGHT / 2,
      },
    ];
  });

  const nodes = [...columns.values()].flat();
  const width =
    (Math.max(0, ...nodes.map((n) => columnOf(n.kind))) + 1) *
      (NODE_WIDTH + COLUMN_GAP) +
    16;
  const height =
    Math.max(NODE_HEIGHT, ...nodes.map((n) => n.y + NODE_HEIGHT)) + 16;
  return { nodes, edges, width, height };
}
