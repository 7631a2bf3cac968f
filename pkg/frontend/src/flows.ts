/** The console's three core flows, kept free of DOM concerns so the e2e
 * suite can drive them against a live service exactly as the views do.
 *
 * Each flow validates the draft client-side first (invalid drafts never
 * produce a request), submits through the public API, then re-reads the
 * domain document and confirms the saved object round-trips identically.
 */

import { ConsoleSession } from "./state.js";
import { Issue, slugify, validateEntityType, validateScenario } from "./validation.js";
import {
  DomainDocument,
  EntitySchema,
  EntityTypeDraft,
  InteractionEventBody,
  RecommendationParams,
  RecommendationResponse,
  ScenarioConfig,
  ScenarioDraft,
} from "./types.js";

export class ValidationFailed extends Error {
  constructor(public issues: Issue[]) {
    super(issues.map((issue) => `${issue.field}: ${issue.message}`).join("; "));
  }
}

function deepEqual(a: unknown, b: unknown): boolean {
  return JSON.stringify(a) === JSON.stringify(b);
}

export interface SchemaBuilderResult {
  saved: EntitySchema;
  uploadEndpoint: string;
  roundTripOk: boolean;
}

/** Schema builder: validate inline, save, show the generated upload endpoint. */
export async function schemaBuilderFlow(
  session: ConsoleSession,
  domainId: string,
  draft: EntityTypeDraft,
): Promise<SchemaBuilderResult> {
  const issues = validateEntityType(draft, session.document(domainId));
  if (issues.length > 0) {
    throw new ValidationFailed(issues);
  }
  const saved = await session.api.createEntityType(domainId, draft);
  const doc = await session.refreshDocument(domainId);
  const readback = doc.entity_types.find(
    (schema) => schema.entity_type_id === saved.entity_type_id,
  );
  return {
    saved,
    uploadEndpoint: saved.upload_endpoint,
    roundTripOk: deepEqual(saved, readback),
  };
}

export interface ScenarioComposerResult {
  saved: ScenarioConfig;
  recommendationEndpoint: string;
  roundTripOk: boolean;
}

/** Component choices offered by the hybrid composer: only non-hybrid
 * scenarios recommending the same entity type. Cross-domain combinations
 * are simply not listed, mirroring the server rule. */
export function hybridComponentOptions(
  doc: DomainDocument,
  targetEntityType: string,
): ScenarioConfig[] {
  return doc.scenarios.filter(
    (scenario) =>
      scenario.algorithm.variant !== "hybrid" &&
      scenario.target_entity_type === targetEntityType,
  );
}

export async function scenarioComposerFlow(
  session: ConsoleSession,
  domainId: string,
  draft: ScenarioDraft,
): Promise<ScenarioComposerResult> {
  const issues = validateScenario(draft, session.document(domainId));
  if (issues.length > 0) {
    throw new ValidationFailed(issues);
  }
  const saved = await session.api.createScenario(domainId, draft);
  const doc = await session.refreshDocument(domainId);
  const readback = doc.scenarios.find((s) => s.scenario_id === saved.scenario_id);
  return {
    saved,
    recommendationEndpoint: saved.recommendation_endpoint,
    roundTripOk: deepEqual(saved, readback),
  };
}

export interface TestPanelResult {
  response: RecommendationResponse;
  requestUrl: string;
  rawJson: string;
}

/** Test panel: issue a live recommendation request; the view renders the
 * ranked items, the fallback badge, the raw JSON, and the request URL. */
export async function testPanelFlow(
  session: ConsoleSession,
  domainId: string,
  scenarioId: string,
  params: RecommendationParams,
): Promise<TestPanelResult> {
  const response = await session.api.recommend(domainId, scenarioId, params);
  return {
    response,
    requestUrl: session.api.recommendationUrl(domainId, scenarioId, params),
    rawJson: JSON.stringify(response, null, 2),
  };
}

/** The panel's event form: record an interaction, return the new sequence. */
export async function recordEventFlow(
  session: ConsoleSession,
  domainId: string,
  event: InteractionEventBody,
): Promise<number> {
  const ack = await session.api.recordInteraction(domainId, event);
  return ack.sequence;
}

/** Create a domain and load its (empty) document into the session. */
export async function createDomainFlow(session: ConsoleSession, name: string): Promise<string> {
  if (!name || !slugify(name)) {
    throw new ValidationFailed([{ field: "name", message: "name must contain letters or digits" }]);
  }
  if (session.domains.some((domain) => domain.name === name)) {
    throw new ValidationFailed([{ field: "name", message: "a domain with this name already exists" }]);
  }
  const domain = await session.api.createDomain(name);
  await session.refreshDomains();
  await session.refreshDocument(domain.id);
  return domain.id;
}
