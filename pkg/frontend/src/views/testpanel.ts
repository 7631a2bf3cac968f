/** Test panel: issue live recommendation requests, inspect ranked results
 * (with the fallback badge, raw JSON, and copy-paste URL), and record
 * interaction events to watch rankings move in real time. */

import { ApiRequestError } from "../api.js";
import { clear, el, errorBox, labeled, select } from "../dom.js";
import { recordEventFlow, testPanelFlow } from "../flows.js";
import { ConsoleSession } from "../state.js";

export function renderTestPanelView(root: HTMLElement, session: ConsoleSession): void {
  clear(root);
  const domainId = session.currentDomainId;
  if (!domainId) {
    root.append(el("p", { class: "muted" }, "Open a domain first."));
    return;
  }
  const doc = session.document(domainId);
  if (doc.scenarios.length === 0) {
    root.append(el("p", { class: "muted" }, "Create a scenario first."));
    return;
  }

  const scenarioSelect = select(
    doc.scenarios.map((s) => ({ value: s.scenario_id, label: s.scenario_id })),
  );
  const userId = el("input", { placeholder: "userId" });
  const sessionId = el("input", { placeholder: "sessionId" });
  const itemId = el("input", { placeholder: "itemId (context)" });
  const kInput = el("input", { type: "number", value: "10", min: "1", max: "100" });
  const results = el("div", { class: "results" });

  const runRequest = () => {
    clear(results);
    testPanelFlow(session, domainId, scenarioSelect.value, {
      userId: userId.value || undefined,
      sessionId: sessionId.value || undefined,
      itemId: itemId.value || undefined,
      k: Number(kInput.value) || undefined,
    })
      .then(({ response, requestUrl, rawJson }) => {
        const table = el("table", { class: "ranked" });
        table.append(
          el("tr", {}, el("th", {}, "#"), el("th", {}, "id"), el("th", {}, "score")),
        );
        response.items.forEach((item, index) => {
          table.append(
            el(
              "tr",
              {},
              el("td", {}, String(index + 1)),
              el("td", {}, el("code", {}, item.id)),
              el("td", {}, item.score.toFixed(6)),
            ),
          );
        });
        results.append(
          el(
            "div",
            { class: "row" },
            el(
              "span",
              { class: response.fallback_used ? "badge badge-fallback" : "badge" },
              response.fallback_used ? "fallback: most-popular" : "personalized",
            ),
            el("span", { class: "muted" }, `as of sequence ${response.as_of_sequence}, `,
              `${response.latency_ms.toFixed(1)} ms`),
          ),
          table,
          el("h3", {}, "Request URL"),
          el("code", { class: "request-url" }, requestUrl),
          el("h3", {}, "Raw response"),
          el("pre", { class: "raw-json" }, rawJson),
        );
      })
      .catch((error) => {
        results.append(
          error instanceof ApiRequestError
            ? errorBox(error.message, `${error.status} ${error.code}`)
            : errorBox(String(error)),
        );
      });
  };

  root.append(
    el(
      "form",
      {
        class: "card",
        onsubmit: (event: Event) => {
          event.preventDefault();
          runRequest();
        },
      },
      el("h2", {}, "Request recommendations"),
      labeled("Scenario", scenarioSelect),
      labeled("User id", userId),
      labeled("Session id", sessionId),
      labeled("Context item id", itemId),
      labeled("k", kInput),
      el("button", { type: "submit", class: "run-request" }, "Send request"),
    ),
    results,
  );

  // --- event form: feed interactions and watch rankings move --------------
  if (doc.interaction_types.length > 0) {
    const typeSelect = select(
      doc.interaction_types.map((t) => ({ value: t.name, label: t.name })),
    );
    const actorUser = el("input", { placeholder: "user id (registered)" });
    const actorSession = el("input", { placeholder: "or session token" });
    const targetId = el("input", { placeholder: "target entity id" });
    const valueInput = el("input", { type: "number", placeholder: "value (explicit types)" });
    const eventFeedback = el("div", { class: "feedback" });
    root.append(
      el(
        "form",
        {
          class: "card event-form",
          onsubmit: (event: Event) => {
            event.preventDefault();
            clear(eventFeedback);
            recordEventFlow(session, domainId, {
              type: typeSelect.value,
              user_id: actorUser.value || undefined,
              session_id: actorSession.value || undefined,
              target_id: targetId.value,
              value: valueInput.value === "" ? undefined : Number(valueInput.value),
            })
              .then((sequence) => {
                eventFeedback.append(
                  el("p", { class: "success" }, `recorded at sequence ${sequence}`),
                );
                runRequest(); // freshness: the ranking above updates immediately
              })
              .catch((error) =>
                eventFeedback.append(
                  error instanceof ApiRequestError
                    ? errorBox(error.message, error.code)
                    : errorBox(String(error)),
                ),
              );
          },
        },
        el("h2", {}, "Record an interaction"),
        el(
          "p",
          { class: "muted" },
          "Acknowledged events are visible to the very next request — send one ",
          "and watch the ranking above change.",
        ),
        labeled("Interaction type", typeSelect),
        labeled("User", actorUser),
        labeled("Session", actorSession),
        labeled("Target", targetId),
        labeled("Value", valueInput),
        el("button", { type: "submit" }, "Record event"),
        eventFeedback,
      ),
    );
  }
}
