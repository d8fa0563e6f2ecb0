/** Payloads captured verbatim from the live service over its test corpora
 * (two ball/table scenes for search and explain; the seeded synthetic
 * corpus, whose one injected violation is scene-000041, for anomalies).
 * Long surprisal listings are truncated to what the views render.
 */

import type {
  AnomaliesResponseJson,
  ErrorBodyJson,
  MatchResultJson,
  SceneGraphJson,
  SearchResponseJson,
} from "../src/types.js";

export const searchResponse: SearchResponseJson = {
  results: [
    {
      image_id: "fix-red",
      score: 1.0,
      binding: { "0": 0, "1": 1 },
      satisfied: [
        { kind: "label", node_id: 0, description: "ball present", detail: "object 0" },
        { kind: "color", node_id: 0, description: "ball.color=red", detail: "object 0" },
        { kind: "label", node_id: 1, description: "table present", detail: "object 1" },
        { kind: "edge", node_id: 0, description: "ball on table", detail: "objects 0->1" },
      ],
      violated: [],
      mean_salience: 0.6998377248305484,
    },
    {
      image_id: "fix-blue",
      score: 0.5,
      binding: { "0": 0, "1": 1 },
      satisfied: [
        { kind: "label", node_id: 0, description: "ball present", detail: "object 0" },
        { kind: "label", node_id: 1, description: "table present", detail: "object 1" },
        { kind: "edge", node_id: 0, description: "ball on table", detail: "objects 0->1" },
      ],
      violated: [
        { kind: "color", node_id: 0, description: "ball.color=red", detail: "object 0" },
      ],
      mean_salience: 0.6998377248305484,
    },
  ],
  parsed: {
    raw_text: "a red ball on a table",
    nodes: [
      { node_id: 0, label: "ball", color: "red" },
      { node_id: 1, label: "table" },
    ],
    edges: [{ from_node: 0, predicate: "on", to_node: 1 }],
  },
};

export const parseErrorBody: ErrorBodyJson = {
  error: "parse_error",
  message: "expected an object noun phrase after 'on' (position 7)",
  position: 7,
};

export const explainResponse: MatchResultJson = {
  image_id: "fix-blue",
  score: 0.5,
  binding: { "0": 0, "1": 1 },
  satisfied: [
    { kind: "label", node_id: 0, description: "ball present", detail: "object 0" },
    { kind: "label", node_id: 1, description: "table present", detail: "object 1" },
    {
      kind: "edge",
      node_id: 0,
      description: "ball on table",
      detail: "objects 0->1",
      evidence: {
        predicate: "on",
        bottom_edge_subject: 0.5,
        top_edge_object: 0.5,
        edge_gap: 0.0,
        eps_on: 0.05,
        x_overlap_ratio: 1.0,
        holds: true,
      },
    },
  ],
  violated: [
    {
      kind: "color",
      node_id: 0,
      description: "ball.color=red",
      detail: "object 0",
      evidence: { colors: ["blue"] },
    },
  ],
  mean_salience: 0.6998377248305484,
};

export const sceneGraph: SceneGraphJson = {
  image_id: "fix-blue",
  built_at: 0.0,
  objects: [
    {
      object_id: 0,
      label: "ball",
      bbox: [0.45, 0.3, 0.55, 0.5],
      colors: ["blue"],
      confidence: 1.0,
      area: 0.020000000000000007,
      size_rank: 2,
      salience: 0.39967544966109686,
      shape: "round",
    },
    {
      object_id: 1,
      label: "table",
      bbox: [0.3, 0.5, 0.7, 0.8],
      colors: [],
      confidence: 1.0,
      area: 0.12000000000000001,
      size_rank: 1,
      salience: 1.0,
      shape: "rectangular",
    },
  ],
  relations: [
    { subject_id: 0, predicate: "above", object_id: 1 },
    { subject_id: 0, predicate: "on", object_id: 1 },
    { subject_id: 0, predicate: "smaller_than", object_id: 1 },
    { subject_id: 1, predicate: "below", object_id: 0 },
    { subject_id: 1, predicate: "bigger_than", object_id: 0 },
  ],
};

export const anomaliesResponse: AnomaliesResponseJson = {
  reports: [
    {
      image_id: "scene-000041",
      uniqueness: 2.2807834478046023,
      anomalous: true,
      triple_surprisals: [
        {
          subject_id: 2,
          subject_label: "building",
          predicate: "in_front_of",
          object_id: 3,
          object_label: "car",
          probability: 0.0196078431372549,
          surprisal: 5.672425341971495,
        },
      ],
      anomalous_triples: [
        {
          subject_id: 2,
          subject_label: "building",
          predicate: "in_front_of",
          object_id: 3,
          object_label: "car",
          probability: 0.0196078431372549,
          surprisal: 5.672425341971495,
        },
      ],
    },
    {
      image_id: "scene-000000",
      uniqueness: 0.5849625007211563,
      anomalous: false,
      triple_surprisals: [],
      anomalous_triples: [],
    },
    {
      image_id: "scene-000002",
      uniqueness: 0.5849625007211563,
      anomalous: false,
      triple_surprisals: [],
      anomalous_triples: [],
    },
  ],
};
