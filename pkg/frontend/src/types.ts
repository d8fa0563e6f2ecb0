/** JSON shapes of the HTTP API. Field names mirror the wire format exactly. */

export interface QueryNodeJson {
  node_id: number;
  label: string;
  color?: string;
  shape?: string;
  size_word?: string;
}

export interface QueryEdgeJson {
  from_node: number;
  predicate: string;
  to_node: number;
}

export interface QueryGraphJson {
  raw_text: string;
  nodes: QueryNodeJson[];
  edges: QueryEdgeJson[];
}

export type ConstraintKind = "label" | "color" | "shape" | "size" | "edge";

export interface ConstraintJson {
  kind: ConstraintKind;
  node_id: number;
  description: string;
  detail?: string;
  evidence?: Record<string, unknown>;
}

export interface MatchResultJson {
  image_id: string;
  score: number;
  binding: Record<string, number>;
  satisfied: ConstraintJson[];
  violated: ConstraintJson[];
  mean_salience: number;
}

export interface SearchResponseJson {
  results: MatchResultJson[];
  parsed: QueryGraphJson;
}

export interface SceneObjectJson {
  object_id: number;
  label: string;
  bbox: [number, number, number, number];
  colors: string[];
  confidence: number;
  area: number;
  size_rank: number;
  salience: number;
  depth?: number;
  shape?: string;
}

export interface RelationJson {
  subject_id: number;
  predicate: string;
  object_id: number;
}

export interface SceneGraphJson {
  image_id: string;
  built_at: number;
  objects: SceneObjectJson[];
  relations: RelationJson[];
  image_uri?: string;
}

export interface ScoredTripleJson {
  subject_id: number;
  subject_label: string;
  predicate: string;
  object_id: number;
  object_label: string;
  probability: number;
  surprisal: number;
}

export interface TypicalityReportJson {
  image_id: string;
  uniqueness: number;
  anomalous: boolean;
  triple_surprisals: ScoredTripleJson[];
  anomalous_triples: ScoredTripleJson[];
}

export interface AnomaliesResponseJson {
  reports: TypicalityReportJson[];
}

export interface StatsResponseJson {
  images: number;
  objects: number;
  triples: number;
  terms: number;
  config_warnings: string[];
}

export interface ErrorBodyJson {
  error: string;
  message: string;
  position?: number;
}
