/** Domains view: list, select, and create system domains. */

import { ApiRequestError } from "../api.js";
import { clear, el, errorBox, issueList, labeled } from "../dom.js";
import { createDomainFlow, ValidationFailed } from "../flows.js";
import { ConsoleSession } from "../state.js";

export function renderDomainsView(
  root: HTMLElement,
  session: ConsoleSession,
  onSelect: (domainId: string) => void,
): void {
  clear(root);
  const list = el("div", { class: "card" }, el("h2", {}, "System domains"));
  if (session.domains.length === 0) {
    list.append(el("p", { class: "muted" }, "No domains yet — create one below."));
  }
  for (const domain of session.domains) {
    const row = el(
      "div",
      { class: "row domain-row" },
      el("strong", {}, domain.name),
      el("code", {}, domain.id),
      el("span", { class: "muted" }, domain.storage_namespace),
      el("button", { onclick: () => onSelect(domain.id) }, "open"),
    );
    list.append(row);
  }
  root.append(list);

  const nameInput = el("input", { placeholder: "e.g. movielens" });
  const feedback = el("div");
  const form = el(
    "form",
    {
      class: "card",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(feedback as HTMLElement);
        createDomainFlow(session, nameInput.value)
          .then((domainId) => onSelect(domainId))
          .catch((error) => {
            if (error instanceof ValidationFailed) {
              feedback.append(issueList(error.issues));
            } else if (error instanceof ApiRequestError) {
              feedback.append(errorBox(error.message, error.code));
            } else {
              feedback.append(errorBox(String(error)));
            }
          });
      },
    },
    el("h2", {}, "Create a system domain"),
    el(
      "p",
      { class: "muted" },
      "Each system domain gets its own storage namespace and worker pool; ",
      "tenants never share data or capacity.",
    ),
    labeled("Display name", nameInput),
    el("button", { type: "submit" }, "Create"),
    feedback,
  );
  root.append(form);
}
