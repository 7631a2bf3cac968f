/** Console session: service base URL plus a cached registry readback.
 * The service is the single source of truth — every mutation is followed by
 * a fresh readback, and refresh() simply re-fetches. */

import { ApiClient } from "./api.js";
import { DomainDocument, SystemDomain } from "./types.js";

export class ConsoleSession {
  readonly api: ApiClient;
  domains: SystemDomain[] = [];
  documents = new Map<string, DomainDocument>();
  currentDomainId: string | null = null;

  constructor(baseUrl: string, api?: ApiClient) {
    this.api = api ?? new ApiClient(baseUrl);
  }

  async refreshDomains(): Promise<SystemDomain[]> {
    this.domains = (await this.api.listDomains()).domains;
    return this.domains;
  }

  async refreshDocument(domainId: string): Promise<DomainDocument> {
    const doc = await this.api.getDomain(domainId);
    this.documents.set(domainId, doc);
    return doc;
  }

  document(domainId: string): DomainDocument {
    const doc = this.documents.get(domainId);
    if (!doc) {
      throw new Error(`domain ${domainId} not loaded; call refreshDocument first`);
    }
    return doc;
  }

  async selectDomain(domainId: string): Promise<DomainDocument> {
    this.currentDomainId = domainId;
    return this.refreshDocument(domainId);
  }
}
