/** Wire types of the service's public HTTP API. */

export const ATTRIBUTE_KINDS = [
  "categorical_single",
  "categorical_multi",
  "free_text_english",
  "free_text_german",
  "numeric_integer",
  "numeric_real",
  "date",
] as const;
export type AttributeKind = (typeof ATTRIBUTE_KINDS)[number];

export const ATTRIBUTE_KIND_LABELS: Record<AttributeKind, string> = {
  categorical_single: "Categorical Text / Single Value",
  categorical_multi: "Categorical Text / Multiple Values",
  free_text_english: "Free Text / English",
  free_text_german: "Free Text / German",
  numeric_integer: "Numeric / Integer",
  numeric_real: "Numeric / Real",
  date: "Date",
};

export type EntityKind = "item" | "user";
export type Explicitness = "explicit" | "implicit";
export type ActorMode = "registered_only" | "anonymous_only" | "both";
export type InteractionTarget = "user_item" | "user_user";
export type Audience = "registered" | "anonymous" | "both";
export type ContextKind = "none" | "item_id" | "user_id";
export type AlgorithmVariant =
  | "most_popular"
  | "content_based"
  | "collaborative"
  | "user_for_item"
  | "hybrid";
export type FilterMode = "contains" | "excludes" | "numeric_range";

export interface AttributeSpec {
  name: string;
  kind: AttributeKind;
  required: boolean;
}

export interface EntityTypeDraft {
  kind: EntityKind;
  name: string;
  attributes: AttributeSpec[];
}

export interface EntitySchema {
  domain_id: string;
  entity_type_id: string;
  entity_kind: EntityKind;
  name: string;
  attributes: AttributeSpec[];
  upload_endpoint: string;
}

export interface InteractionTypeDraft {
  name: string;
  explicitness: Explicitness;
  default_weight: number;
  actor_mode: ActorMode;
  track_timestamp: boolean;
  target: InteractionTarget;
  target_entity_type: string;
}

export interface InteractionTypeConfig extends InteractionTypeDraft {
  domain_id: string;
}

export interface PostFilter {
  attribute: string;
  mode: FilterMode;
  value?: string;
  min?: number;
  max?: number;
}

export interface AlgorithmSpec {
  variant: AlgorithmVariant;
  interaction_subset?: string[];
  interaction_weights?: Record<string, number>;
  cbf_attributes?: string[];
  neighbors_k?: number;
  hybrid_components?: [string, number][];
}

export interface ScenarioDraft {
  scenario_id: string;
  target_entity_type: string;
  audience: Audience;
  context: ContextKind;
  algorithm: AlgorithmSpec;
  post_filters?: PostFilter[];
  echo_attributes?: string[];
}

export interface ScenarioConfig extends ScenarioDraft {
  domain_id: string;
  recommendation_endpoint: string;
  post_filters: PostFilter[];
  echo_attributes: string[];
}

export interface SystemDomain {
  id: string;
  name: string;
  storage_namespace: string;
  created_at: string;
}

export interface DomainDocument {
  domain: SystemDomain;
  entity_types: EntitySchema[];
  interaction_types: InteractionTypeConfig[];
  scenarios: ScenarioConfig[];
}

export interface RecommendationItem {
  id: string;
  score: number;
  attributes?: Record<string, unknown>;
}

export interface RecommendationResponse {
  items: RecommendationItem[];
  scenario_id: string;
  as_of_sequence: number;
  fallback_used: boolean;
  latency_ms: number;
}

export interface RecommendationParams {
  userId?: string;
  sessionId?: string;
  itemId?: string;
  k?: number;
}

export interface InteractionEventBody {
  type: string;
  user_id?: string;
  session_id?: string;
  target_id: string;
  value?: number;
  timestamp?: string;
}

export interface ErrorBody {
  error: string;
  code: string;
  detail: Record<string, unknown>;
}
