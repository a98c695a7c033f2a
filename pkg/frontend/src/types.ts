/** Wire types for the map JSON served at /api/map, plus strict validation. */

export interface MapMeta {
  alpha: number;
  q: number;
  communities: number;
  built_at?: string;
  source?: string;
}

export interface MapNode {
  id: string;
  label: string;
  community: number;
  pagerank: number;
  x: number;
  y: number;
  degree: number;
}

export interface MapEdge {
  source: string;
  target: string;
  weight: number;
}

export interface MapData {
  meta: MapMeta;
  nodes: MapNode[];
  edges: MapEdge[];
}

export class MapSchemaError extends Error {}

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

function requireNumber(v: unknown, where: string): number {
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new MapSchemaError(`${where} must be a finite number`);
  }
  return v;
}

function requireString(v: unknown, where: string): string {
  if (typeof v !== "string" || v.length === 0) {
    throw new MapSchemaError(`${where} must be a non-empty string`);
  }
  return v;
}

/** Validate untrusted map JSON; throws MapSchemaError with the first problem. */
export function validateMapData(value: unknown): MapData {
  if (!isRecord(value)) throw new MapSchemaError("map payload must be an object");
  const { meta, nodes, edges } = value;
  if (!isRecord(meta)) throw new MapSchemaError("meta must be an object");
  if (!Array.isArray(nodes)) throw new MapSchemaError("nodes must be an array");
  if (!Array.isArray(edges)) throw new MapSchemaError("edges must be an array");

  const outMeta: MapMeta = {
    alpha: requireNumber(meta.alpha, "meta.alpha"),
    q: requireNumber(meta.q, "meta.q"),
    communities: requireNumber(meta.communities, "meta.communities"),
  };
  if (typeof meta.built_at === "string") outMeta.built_at = meta.built_at;
  if (typeof meta.source === "string") outMeta.source = meta.source;

  const ids = new Set<string>();
  const outNodes: MapNode[] = nodes.map((raw, i) => {
    if (!isRecord(raw)) throw new MapSchemaError(`nodes[${i}] must be an object`);
    const node: MapNode = {
      id: requireString(raw.id, `nodes[${i}].id`),
      label: requireString(raw.label, `nodes[${i}].label`),
      community: requireNumber(raw.community, `nodes[${i}].community`),
      pagerank: requireNumber(raw.pagerank, `nodes[${i}].pagerank`),
      x: requireNumber(raw.x, `nodes[${i}].x`),
      y: requireNumber(raw.y, `nodes[${i}].y`),
      degree: requireNumber(raw.degree, `nodes[${i}].degree`),
    };
    if (ids.has(node.id)) throw new MapSchemaError(`duplicate node id ${node.id}`);
    ids.add(node.id);
    return node;
  });

  const outEdges: MapEdge[] = edges.map((raw, i) => {
    if (!isRecord(raw)) throw new MapSchemaError(`edges[${i}] must be an object`);
    const edge: MapEdge = {
      source: requireString(raw.source, `edges[${i}].source`),
      target: requireString(raw.target, `edges[${i}].target`),
      weight: requireNumber(raw.weight, `edges[${i}].weight`),
    };
    if (!ids.has(edge.source) || !ids.has(edge.target)) {
      throw new MapSchemaError(`edges[${i}] references a missing node`);
    }
    return edge;
  });

  return { meta: outMeta, nodes: outNodes, edges: outEdges };
}

/** Convenience lookups shared by state, scene, and the shell. */
export class MapIndex {
  readonly byId = new Map<string, MapNode>();
  readonly communities = new Map<number, MapNode[]>();
  readonly maxPagerank: number;

  constructor(readonly data: MapData) {
    let max = 0;
    for (const node of data.nodes) {
      this.byId.set(node.id, node);
      const members = this.communities.get(node.community);
      if (members) members.push(node);
      else this.communities.set(node.community, [node]);
      if (node.pagerank > max) max = node.pagerank;
    }
    this.maxPagerank = max;
  }
}
