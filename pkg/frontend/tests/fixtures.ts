/** Shared corpus of valid and invalid drafts. The e2e suite replays these in
 * order against a live service to check validation parity: the client must
 * accept a draft exactly when the server does. */

import { EntityTypeDraft, ScenarioDraft } from "../src/types.js";

export interface EntityTypeCase {
  label: string;
  valid: boolean;
  draft: EntityTypeDraft;
}

export const ENTITY_TYPE_CASES: EntityTypeCase[] = [
  {
    label: "movie schema with three kinds",
    valid: true,
    draft: {
      kind: "item",
      name: "movie",
      attributes: [
        { name: "title", kind: "free_text_english", required: true },
        { name: "genres", kind: "categorical_multi", required: false },
        { name: "release", kind: "date", required: false },
      ],
    },
  },
  {
    label: "user schema",
    valid: true,
    draft: {
      kind: "user",
      name: "viewer",
      attributes: [
        { name: "age", kind: "numeric_integer", required: false },
        { name: "bio", kind: "free_text_german", required: false },
      ],
    },
  },
  {
    label: "duplicate attribute name",
    valid: false,
    draft: {
      kind: "item",
      name: "product",
      attributes: [
        { name: "price", kind: "numeric_real", required: false },
        { name: "price", kind: "numeric_integer", required: false },
      ],
    },
  },
  {
    label: "attribute name with a space",
    valid: false,
    draft: {
      kind: "item",
      name: "gadget",
      attributes: [{ name: "price tag", kind: "numeric_real", required: false }],
    },
  },
  {
    label: "duplicate entity type",
    valid: false,
    draft: {
      kind: "item",
      name: "movie",
      attributes: [{ name: "title", kind: "free_text_english", required: false }],
    },
  },
  {
    label: "empty display name",
    valid: false,
    draft: { kind: "item", name: "--", attributes: [] },
  },
];

export interface ScenarioCase {
  label: string;
  valid: boolean;
  draft: ScenarioDraft;
}

/** Assumes the entity types above plus a declared 'rating' interaction on
 * 'movie' (the e2e suite sets that up before replaying these). */
export const SCENARIO_CASES: ScenarioCase[] = [
  {
    label: "most popular over ratings",
    valid: true,
    draft: {
      scenario_id: "fixture-popular",
      target_entity_type: "movie",
      audience: "both",
      context: "none",
      algorithm: { variant: "most_popular", interaction_subset: ["rating"] },
    },
  },
  {
    label: "content based over the title",
    valid: true,
    draft: {
      scenario_id: "fixture-similar",
      target_entity_type: "movie",
      audience: "both",
      context: "item_id",
      algorithm: { variant: "content_based", cbf_attributes: ["title"] },
    },
  },
  {
    label: "post-filter on genres",
    valid: true,
    draft: {
      scenario_id: "fixture-horror",
      target_entity_type: "movie",
      audience: "both",
      context: "none",
      algorithm: { variant: "most_popular", interaction_subset: ["rating"] },
      post_filters: [{ attribute: "genres", mode: "contains", value: "Horror" }],
    },
  },
  {
    label: "empty interaction subset",
    valid: false,
    draft: {
      scenario_id: "fixture-empty-subset",
      target_entity_type: "movie",
      audience: "both",
      context: "none",
      algorithm: { variant: "most_popular", interaction_subset: [] },
    },
  },
  {
    label: "unknown interaction type",
    valid: false,
    draft: {
      scenario_id: "fixture-bad-subset",
      target_entity_type: "movie",
      audience: "both",
      context: "none",
      algorithm: { variant: "most_popular", interaction_subset: ["click"] },
    },
  },
  {
    label: "content based over a categorical attribute",
    valid: false,
    draft: {
      scenario_id: "fixture-bad-cbf",
      target_entity_type: "movie",
      audience: "both",
      context: "item_id",
      algorithm: { variant: "content_based", cbf_attributes: ["genres"] },
    },
  },
  {
    label: "numeric filter on a categorical attribute",
    valid: false,
    draft: {
      scenario_id: "fixture-bad-filter",
      target_entity_type: "movie",
      audience: "both",
      context: "none",
      algorithm: { variant: "most_popular", interaction_subset: ["rating"] },
      post_filters: [{ attribute: "genres", mode: "numeric_range", min: 1, max: 2 }],
    },
  },
  {
    label: "hybrid with all-zero weights",
    valid: false,
    draft: {
      scenario_id: "fixture-zero-hybrid",
      target_entity_type: "movie",
      audience: "both",
      context: "none",
      algorithm: {
        variant: "hybrid",
        hybrid_components: [
          ["fixture-popular", 0],
          ["fixture-similar", 0],
        ],
      },
    },
  },
  {
    label: "hybrid across item-level domains",
    valid: false,
    draft: {
      scenario_id: "fixture-cross-hybrid",
      target_entity_type: "movie",
      audience: "both",
      context: "none",
      algorithm: {
        variant: "hybrid",
        hybrid_components: [
          ["fixture-popular", 0.5],
          ["fixture-viewers", 0.5], // targets 'viewer', not 'movie'
        ],
      },
    },
  },
  {
    label: "weighted hybrid of CF-style and CBF scenarios",
    valid: true,
    draft: {
      scenario_id: "fixture-hybrid",
      target_entity_type: "movie",
      audience: "both",
      context: "item_id",
      algorithm: {
        variant: "hybrid",
        hybrid_components: [
          ["fixture-popular", 0.7],
          ["fixture-similar", 0.3],
        ],
      },
    },
  },
  {
    label: "duplicate scenario id",
    valid: false,
    draft: {
      scenario_id: "fixture-popular",
      target_entity_type: "movie",
      audience: "both",
      context: "none",
      algorithm: { variant: "most_popular", interaction_subset: ["rating"] },
    },
  },
];
