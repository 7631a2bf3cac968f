/**
 * Client-side draft validation — the same rules the service's registry
 * enforces, applied before any request is sent so mistakes surface inline
 * next to the offending field. The e2e suite checks parity: a draft passes
 * here if and only if the server accepts it.
 */

import {
  ATTRIBUTE_KINDS,
  AttributeKind,
  DomainDocument,
  EntityTypeDraft,
  InteractionTypeDraft,
  PostFilter,
  ScenarioDraft,
} from "./types.js";

export interface Issue {
  field: string;
  message: string;
}

const ATTRIBUTE_NAME_RE = /^[A-Za-z0-9_]{1,64}$/;
const MAX_ATTRIBUTES = 256;
const MAX_DOMAIN_NAME = 128;

/** Same derivation the server uses for ids and endpoint paths. */
export function slugify(name: string): string {
  return name
    .toLowerCase()
    .replace(/[^a-z0-9]+/g, "-")
    .replace(/^-+|-+$/g, "");
}

const CATEGORICAL: AttributeKind[] = ["categorical_single", "categorical_multi"];
const FREE_TEXT: AttributeKind[] = ["free_text_english", "free_text_german"];
const NUMERIC: AttributeKind[] = ["numeric_integer", "numeric_real"];

export function validateDomainName(name: string, existing: string[]): Issue[] {
  const issues: Issue[] = [];
  if (!name || name.length > MAX_DOMAIN_NAME) {
    issues.push({ field: "name", message: `name must be 1..${MAX_DOMAIN_NAME} characters` });
  } else if (!slugify(name)) {
    issues.push({ field: "name", message: "name must contain letters or digits" });
  } else if (existing.includes(name)) {
    issues.push({ field: "name", message: "a domain with this name already exists" });
  }
  return issues;
}

export function validateEntityType(draft: EntityTypeDraft, doc: DomainDocument): Issue[] {
  const issues: Issue[] = [];
  const typeId = slugify(draft.name);
  if (!typeId) {
    issues.push({ field: "name", message: "name must contain letters or digits" });
  } else if (doc.entity_types.some((s) => s.entity_type_id === typeId)) {
    issues.push({ field: "name", message: `entity type '${typeId}' already exists` });
  }
  if (draft.attributes.length > MAX_ATTRIBUTES) {
    issues.push({ field: "attributes", message: `at most ${MAX_ATTRIBUTES} attributes` });
  }
  const seen = new Set<string>();
  draft.attributes.forEach((attr, index) => {
    const field = `attributes[${index}]`;
    if (!ATTRIBUTE_NAME_RE.test(attr.name)) {
      issues.push({ field, message: "attribute name must match [A-Za-z0-9_]{1,64}" });
    } else if (seen.has(attr.name)) {
      issues.push({ field, message: `duplicate attribute '${attr.name}'` });
    }
    seen.add(attr.name);
    if (!ATTRIBUTE_KINDS.includes(attr.kind)) {
      issues.push({ field, message: `unknown attribute kind '${attr.kind}'` });
    }
  });
  return issues;
}

export function validateInteractionType(
  draft: InteractionTypeDraft,
  doc: DomainDocument,
): Issue[] {
  const issues: Issue[] = [];
  if (!draft.name) {
    issues.push({ field: "name", message: "name is required" });
  } else if (doc.interaction_types.some((t) => t.name === draft.name)) {
    issues.push({ field: "name", message: `interaction type '${draft.name}' already exists` });
  }
  if (!doc.entity_types.some((s) => s.entity_type_id === draft.target_entity_type)) {
    issues.push({
      field: "target_entity_type",
      message: `unknown entity type '${draft.target_entity_type}'`,
    });
  }
  if (!(draft.default_weight >= 0)) {
    issues.push({ field: "default_weight", message: "weight must be non-negative" });
  }
  return issues;
}

function validatePostFilters(
  filters: PostFilter[] | undefined,
  targetAttributes: Map<string, AttributeKind>,
  issues: Issue[],
): void {
  (filters ?? []).forEach((filter, index) => {
    const field = `post_filters[${index}]`;
    const kind = targetAttributes.get(filter.attribute);
    if (kind === undefined) {
      issues.push({ field, message: `attribute '${filter.attribute}' not in target schema` });
      return;
    }
    if (filter.mode === "numeric_range") {
      if (!NUMERIC.includes(kind)) {
        issues.push({ field, message: "numeric_range needs a numeric attribute" });
      }
      if (filter.min === undefined || filter.max === undefined) {
        issues.push({ field, message: "numeric_range needs min and max" });
      }
    } else {
      if (!CATEGORICAL.includes(kind)) {
        issues.push({ field, message: `${filter.mode} needs a categorical attribute` });
      }
      if (filter.value === undefined || filter.value === "") {
        issues.push({ field, message: `${filter.mode} needs a value` });
      }
    }
  });
}

export function validateScenario(draft: ScenarioDraft, doc: DomainDocument): Issue[] {
  const issues: Issue[] = [];
  if (!slugify(draft.scenario_id)) {
    issues.push({ field: "scenario_id", message: "scenario id must contain letters or digits" });
  } else if (doc.scenarios.some((s) => s.scenario_id === slugify(draft.scenario_id))) {
    issues.push({ field: "scenario_id", message: "scenario id already exists" });
  }
  const target = doc.entity_types.find((s) => s.entity_type_id === draft.target_entity_type);
  if (!target) {
    issues.push({
      field: "target_entity_type",
      message: `unknown entity type '${draft.target_entity_type}'`,
    });
    return issues;
  }
  const targetAttributes = new Map(target.attributes.map((a) => [a.name, a.kind]));
  validatePostFilters(draft.post_filters, targetAttributes, issues);
  (draft.echo_attributes ?? []).forEach((name) => {
    if (!targetAttributes.has(name)) {
      issues.push({ field: "echo_attributes", message: `attribute '${name}' not in target schema` });
    }
  });

  const algorithm = draft.algorithm;
  const declared = new Set(doc.interaction_types.map((t) => t.name));
  if (["most_popular", "collaborative", "user_for_item"].includes(algorithm.variant)) {
    const subset = algorithm.interaction_subset ?? [];
    if (subset.length === 0) {
      issues.push({
        field: "interaction_subset",
        message: `${algorithm.variant} requires at least one interaction type`,
      });
    }
    for (const name of subset) {
      if (!declared.has(name)) {
        issues.push({ field: "interaction_subset", message: `unknown interaction type '${name}'` });
      }
    }
    for (const [name, weight] of Object.entries(algorithm.interaction_weights ?? {})) {
      if (!declared.has(name)) {
        issues.push({ field: "interaction_weights", message: `unknown interaction type '${name}'` });
      }
      if (!(weight >= 0)) {
        issues.push({ field: "interaction_weights", message: `weight for '${name}' must be >= 0` });
      }
    }
  }
  if (["collaborative", "user_for_item"].includes(algorithm.variant)) {
    const k = algorithm.neighbors_k ?? 50;
    if (!Number.isInteger(k) || k < 1) {
      issues.push({ field: "neighbors_k", message: "neighbors_k must be a positive integer" });
    }
  }
  if (algorithm.variant === "content_based") {
    const attrs = algorithm.cbf_attributes ?? [];
    if (attrs.length === 0) {
      issues.push({ field: "cbf_attributes", message: "select at least one free-text attribute" });
    }
    for (const name of attrs) {
      const kind = targetAttributes.get(name);
      if (kind === undefined) {
        issues.push({ field: "cbf_attributes", message: `attribute '${name}' not in target schema` });
      } else if (!FREE_TEXT.includes(kind)) {
        issues.push({ field: "cbf_attributes", message: `attribute '${name}' is not free text` });
      }
    }
  }
  if (algorithm.variant === "hybrid") {
    const components = algorithm.hybrid_components ?? [];
    if (components.length === 0) {
      issues.push({ field: "hybrid_components", message: "hybrid needs at least one component" });
    } else if (components.every(([, weight]) => weight === 0)) {
      issues.push({ field: "hybrid_components", message: "hybrid weights must not all be zero" });
    }
    for (const [scenarioId, weight] of components) {
      const component = doc.scenarios.find((s) => s.scenario_id === scenarioId);
      if (!component) {
        issues.push({ field: "hybrid_components", message: `unknown scenario '${scenarioId}'` });
      } else {
        if (component.algorithm.variant === "hybrid") {
          issues.push({
            field: "hybrid_components",
            message: `'${scenarioId}' is itself a hybrid`,
          });
        }
        if (component.target_entity_type !== draft.target_entity_type) {
          issues.push({
            field: "hybrid_components",
            message: `'${scenarioId}' recommends '${component.target_entity_type}', not '${draft.target_entity_type}'`,
          });
        }
      }
      if (!(weight >= 0)) {
        issues.push({ field: "hybrid_components", message: `weight for '${scenarioId}' must be >= 0` });
      }
    }
  }
  return issues;
}
