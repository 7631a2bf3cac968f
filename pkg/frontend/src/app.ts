/** App shell: service connection, domain context, and the four views
 * (Domains, Data Catalog, Scenarios, Test Panel). */

import { clear, el, errorBox } from "./dom.js";
import { ConsoleSession } from "./state.js";
import { renderCatalogView } from "./views/catalog.js";
import { renderDomainsView } from "./views/domains.js";
import { renderScenariosView } from "./views/scenarios.js";
import { renderTestPanelView } from "./views/testpanel.js";

type ViewName = "domains" | "catalog" | "scenarios" | "test-panel";

const VIEWS: { name: ViewName; label: string }[] = [
  { name: "domains", label: "Domains" },
  { name: "catalog", label: "Data Catalog" },
  { name: "scenarios", label: "Scenarios" },
  { name: "test-panel", label: "Test Panel" },
];

export function mountApp(root: HTMLElement, baseUrl: string): void {
  let session = new ConsoleSession(baseUrl);
  let current: ViewName = "domains";

  const content = el("main", { class: "content" });
  const status = el("span", { class: "muted" });
  const domainBadge = el("span", { class: "badge" }, "no domain selected");
  const urlInput = el("input", { value: baseUrl, class: "base-url" });

  const render = () => {
    clear(content);
    try {
      switch (current) {
        case "domains":
          renderDomainsView(content, session, (domainId) => {
            session
              .selectDomain(domainId)
              .then(() => {
                domainBadge.textContent = domainId;
                current = "catalog";
                render();
              })
              .catch((error) => content.append(errorBox(String(error))));
          });
          break;
        case "catalog":
          renderCatalogView(content, session);
          break;
        case "scenarios":
          renderScenariosView(content, session);
          break;
        case "test-panel":
          renderTestPanelView(content, session);
          break;
      }
    } catch (error) {
      content.append(errorBox(String(error)));
    }
  };

  const refreshAndRender = () => {
    const tasks: Promise<unknown>[] = [session.refreshDomains()];
    if (session.currentDomainId) tasks.push(session.refreshDocument(session.currentDomainId));
    Promise.all(tasks)
      .then(() => {
        status.textContent = `connected to ${session.api.baseUrl}`;
        render();
      })
      .catch((error) => {
        status.textContent = "";
        clear(content);
        content.append(errorBox(`cannot reach the service: ${error}`));
      });
  };

  const nav = el("nav", { class: "tabs" });
  for (const view of VIEWS) {
    nav.append(
      el(
        "button",
        {
          class: "tab",
          dataset: { view: view.name },
          onclick: () => {
            current = view.name;
            refreshAndRender();
          },
        },
        view.label,
      ),
    );
  }

  const connect = el(
    "form",
    {
      class: "connect",
      onsubmit: (event: Event) => {
        event.preventDefault();
        session = new ConsoleSession(urlInput.value);
        const selected = session.currentDomainId;
        domainBadge.textContent = selected ?? "no domain selected";
        refreshAndRender();
      },
    },
    urlInput,
    el("button", { type: "submit" }, "connect"),
    status,
  );

  clear(root);
  root.append(
    el("header", {}, el("h1", {}, "uptrendz console"), domainBadge, connect),
    nav,
    content,
  );
  refreshAndRender();
}

declare global {
  interface Window {
    UPTRENDZ_BASE_URL?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(
    document.getElementById("app") as HTMLElement,
    window.UPTRENDZ_BASE_URL ?? "http://127.0.0.1:8000",
  );
}
