/** Typed client for the service's public HTTP API — the console's only way
 * of talking to the backend. */

import {
  DomainDocument,
  EntitySchema,
  EntityTypeDraft,
  ErrorBody,
  InteractionEventBody,
  InteractionTypeConfig,
  InteractionTypeDraft,
  RecommendationParams,
  RecommendationResponse,
  ScenarioConfig,
  ScenarioDraft,
  SystemDomain,
} from "./types.js";

export class ApiRequestError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public detail: Record<string, unknown> = {},
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    public baseUrl: string,
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let parsed: Partial<ErrorBody> = {};
      try {
        parsed = (await response.json()) as ErrorBody;
      } catch {
        // non-JSON error body; fall through with the status only
      }
      throw new ApiRequestError(
        response.status,
        parsed.code ?? `HTTP${response.status}`,
        parsed.error ?? response.statusText,
        parsed.detail ?? {},
      );
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string; domains: number }> {
    return this.request("GET", "/health");
  }

  listDomains(): Promise<{ domains: SystemDomain[] }> {
    return this.request("GET", "/domains");
  }

  createDomain(name: string): Promise<SystemDomain> {
    return this.request("POST", "/domains", { name });
  }

  getDomain(domainId: string): Promise<DomainDocument> {
    return this.request("GET", `/domains/${encodeURIComponent(domainId)}`);
  }

  createEntityType(domainId: string, draft: EntityTypeDraft): Promise<EntitySchema> {
    return this.request("POST", `/domains/${encodeURIComponent(domainId)}/entity-types`, draft);
  }

  createInteractionType(
    domainId: string,
    draft: InteractionTypeDraft,
  ): Promise<InteractionTypeConfig> {
    return this.request(
      "POST",
      `/domains/${encodeURIComponent(domainId)}/interaction-types`,
      draft,
    );
  }

  createScenario(domainId: string, draft: ScenarioDraft): Promise<ScenarioConfig> {
    return this.request("POST", `/domains/${encodeURIComponent(domainId)}/scenarios`, draft);
  }

  upsertEntity(
    domainId: string,
    entityTypeId: string,
    entityId: string,
    values: Record<string, unknown>,
  ): Promise<{ entity_id: string; sequence: number }> {
    return this.request(
      "PUT",
      `/domains/${encodeURIComponent(domainId)}/catalog/${encodeURIComponent(entityTypeId)}/${encodeURIComponent(entityId)}`,
      { values },
    );
  }

  getEntity(
    domainId: string,
    entityTypeId: string,
    entityId: string,
  ): Promise<{ entity_id: string; entity_type: string; values: Record<string, unknown> }> {
    return this.request(
      "GET",
      `/domains/${encodeURIComponent(domainId)}/catalog/${encodeURIComponent(entityTypeId)}/${encodeURIComponent(entityId)}`,
    );
  }

  recordInteraction(
    domainId: string,
    event: InteractionEventBody,
  ): Promise<{ sequence: number }> {
    return this.request("POST", `/domains/${encodeURIComponent(domainId)}/interactions`, event);
  }

  /** The shareable GET URL for a recommendation request (shown for copy-paste). */
  recommendationUrl(domainId: string, scenarioId: string, params: RecommendationParams): string {
    const query = new URLSearchParams();
    if (params.userId) query.set("userId", params.userId);
    if (params.sessionId) query.set("sessionId", params.sessionId);
    if (params.itemId) query.set("itemId", params.itemId);
    if (params.k !== undefined) query.set("k", String(params.k));
    const suffix = query.toString();
    return (
      `${this.baseUrl}/domains/${encodeURIComponent(domainId)}/scenarios/` +
      `${encodeURIComponent(scenarioId)}/recommendations` +
      (suffix ? `?${suffix}` : "")
    );
  }

  async recommend(
    domainId: string,
    scenarioId: string,
    params: RecommendationParams,
  ): Promise<RecommendationResponse> {
    const url = this.recommendationUrl(domainId, scenarioId, params);
    return this.request("GET", url.slice(this.baseUrl.length));
  }
}
