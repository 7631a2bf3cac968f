/** Scenario composer: algorithm-specific fields, hybrid weight composition
 * (same-domain components only), post-filters, and audience selection. */

import { ApiRequestError } from "../api.js";
import { clear, el, errorBox, issueList, labeled, select } from "../dom.js";
import { hybridComponentOptions, scenarioComposerFlow, ValidationFailed } from "../flows.js";
import { ConsoleSession } from "../state.js";
import {
  AlgorithmSpec,
  AlgorithmVariant,
  Audience,
  ContextKind,
  FilterMode,
  PostFilter,
  ScenarioDraft,
} from "../types.js";

export function renderScenariosView(root: HTMLElement, session: ConsoleSession): void {
  clear(root);
  const domainId = session.currentDomainId;
  if (!domainId) {
    root.append(el("p", { class: "muted" }, "Open a domain first."));
    return;
  }
  const doc = session.document(domainId);

  const list = el("div", { class: "card" }, el("h2", {}, "Scenarios"));
  if (doc.scenarios.length === 0) list.append(el("p", { class: "muted" }, "None yet."));
  for (const scenario of doc.scenarios) {
    list.append(
      el(
        "div",
        { class: "row" },
        el("strong", {}, scenario.scenario_id),
        el("span", { class: "tag" }, scenario.algorithm.variant),
        el("span", { class: "muted" }, `recommends ${scenario.target_entity_type}`),
        el("code", { class: "rec-endpoint" }, `GET ${scenario.recommendation_endpoint}`),
      ),
    );
  }
  root.append(list);

  if (doc.entity_types.length === 0) {
    root.append(el("p", { class: "muted" }, "Define an entity type before composing scenarios."));
    return;
  }

  // --- composer ----------------------------------------------------------
  const scenarioId = el("input", { placeholder: "e.g. similar-movies" });
  const targetSelect = select(
    doc.entity_types.map((schema) => ({
      value: schema.entity_type_id,
      label: `${schema.entity_type_id} (${schema.entity_kind})`,
    })),
  );
  const audienceSelect = select([
    { value: "registered", label: "registered users" },
    { value: "anonymous", label: "anonymous sessions" },
    { value: "both", label: "registered or anonymous" },
  ], "both");
  const contextSelect = select([
    { value: "none", label: "no context" },
    { value: "item_id", label: "an item id" },
    { value: "user_id", label: "a user id" },
  ]);
  const variantSelect = select([
    { value: "most_popular", label: "Most Popular" },
    { value: "content_based", label: "Content-Based (TF-IDF similarity)" },
    { value: "collaborative", label: "Collaborative Filtering (user kNN)" },
    { value: "user_for_item", label: "User recommender for an item" },
    { value: "hybrid", label: "Weighted hybrid of existing scenarios" },
  ]);
  variantSelect.className = "variant-select";

  const algorithmSection = el("div", { class: "algorithm-section" });
  const feedback = el("div", { class: "feedback" });

  const subsetBoxes: Map<string, { use: HTMLInputElement; weight: HTMLInputElement }> = new Map();
  const cbfBoxes: Map<string, HTMLInputElement> = new Map();
  const componentRows: Map<string, HTMLInputElement> = new Map();
  let neighborsInput = el("input", { type: "number", value: "50", min: "1" });

  const renderAlgorithmSection = () => {
    clear(algorithmSection);
    subsetBoxes.clear();
    cbfBoxes.clear();
    componentRows.clear();
    const variant = variantSelect.value as AlgorithmVariant;
    const target = targetSelect.value;
    if (variant === "most_popular" || variant === "collaborative" || variant === "user_for_item") {
      algorithmSection.append(el("h3", {}, "Interactions to use"));
      if (doc.interaction_types.length === 0) {
        algorithmSection.append(el("p", { class: "muted" }, "No interaction types declared yet."));
      }
      for (const itype of doc.interaction_types) {
        const use = el("input", { type: "checkbox" });
        const weight = el("input", {
          type: "number",
          value: String(itype.default_weight),
          step: "0.1",
          class: "weight-input",
        });
        subsetBoxes.set(itype.name, { use, weight });
        algorithmSection.append(
          el("div", { class: "row" }, el("label", {}, use, ` ${itype.name}`), labeled("weight", weight)),
        );
      }
      if (variant !== "most_popular") {
        neighborsInput = el("input", { type: "number", value: "50", min: "1" });
        algorithmSection.append(labeled("Neighborhood size", neighborsInput));
      }
    } else if (variant === "content_based") {
      algorithmSection.append(el("h3", {}, "Free-text attributes to profile"));
      const schema = doc.entity_types.find((s) => s.entity_type_id === target);
      const textAttrs = (schema?.attributes ?? []).filter((a) =>
        a.kind === "free_text_english" || a.kind === "free_text_german",
      );
      if (textAttrs.length === 0) {
        algorithmSection.append(
          el("p", { class: "muted" }, "The target schema has no free-text attributes."),
        );
      }
      for (const attr of textAttrs) {
        const box = el("input", { type: "checkbox" });
        cbfBoxes.set(attr.name, box);
        algorithmSection.append(el("div", { class: "row" }, el("label", {}, box, ` ${attr.name}`)));
      }
    } else {
      algorithmSection.append(el("h3", {}, "Components and weights"));
      const options = hybridComponentOptions(doc, target);
      if (options.length === 0) {
        algorithmSection.append(
          el(
            "p",
            { class: "muted" },
            `No combinable scenarios recommend '${target}' yet — only scenarios of the `,
            "same item-level domain can be composed.",
          ),
        );
      }
      for (const option of options) {
        const weight = el("input", {
          type: "number",
          value: "0",
          step: "0.1",
          class: "weight-input",
        });
        componentRows.set(option.scenario_id, weight);
        algorithmSection.append(
          el(
            "div",
            { class: "row component-row", dataset: { scenario: option.scenario_id } },
            el("span", {}, `${option.scenario_id} (${option.algorithm.variant})`),
            labeled("weight", weight),
          ),
        );
      }
    }
  };
  variantSelect.onchange = renderAlgorithmSection;
  targetSelect.onchange = renderAlgorithmSection;
  renderAlgorithmSection();

  // post-filters
  const filterRows: { attr: HTMLSelectElement; mode: HTMLSelectElement; value: HTMLInputElement; min: HTMLInputElement; max: HTMLInputElement; node: HTMLElement }[] = [];
  const filterContainer = el("div");
  const addFilterRow = () => {
    const schema = doc.entity_types.find((s) => s.entity_type_id === targetSelect.value);
    const attr = select((schema?.attributes ?? []).map((a) => ({ value: a.name, label: a.name })));
    const mode = select([
      { value: "contains", label: "contains" },
      { value: "excludes", label: "excludes" },
      { value: "numeric_range", label: "numeric range" },
    ]);
    const value = el("input", { placeholder: "value" });
    const min = el("input", { type: "number", placeholder: "min" });
    const max = el("input", { type: "number", placeholder: "max" });
    const row = { attr, mode, value, min, max, node: el("div") };
    row.node = el(
      "div",
      { class: "row filter-row" },
      attr,
      mode,
      value,
      min,
      max,
      el("button", {
        type: "button",
        onclick: () => {
          filterRows.splice(filterRows.indexOf(row), 1);
          row.node.remove();
        },
      }, "remove"),
    );
    filterRows.push(row);
    filterContainer.append(row.node);
  };

  const buildAlgorithm = (): AlgorithmSpec => {
    const variant = variantSelect.value as AlgorithmVariant;
    if (variant === "content_based") {
      return {
        variant,
        cbf_attributes: [...cbfBoxes.entries()].filter(([, box]) => box.checked).map(([name]) => name),
      };
    }
    if (variant === "hybrid") {
      return {
        variant,
        hybrid_components: [...componentRows.entries()]
          .filter(([, weight]) => weight.value !== "")
          .map(([sid, weight]) => [sid, Number(weight.value)] as [string, number]),
      };
    }
    const subset = [...subsetBoxes.entries()].filter(([, c]) => c.use.checked);
    const spec: AlgorithmSpec = {
      variant,
      interaction_subset: subset.map(([name]) => name),
      interaction_weights: Object.fromEntries(
        subset.map(([name, c]) => [name, Number(c.weight.value)]),
      ),
    };
    if (variant !== "most_popular") spec.neighbors_k = Number(neighborsInput.value);
    return spec;
  };

  const buildFilters = (): PostFilter[] =>
    filterRows.map((row) => {
      const mode = row.mode.value as FilterMode;
      return mode === "numeric_range"
        ? {
            attribute: row.attr.value,
            mode,
            min: row.min.value === "" ? undefined : Number(row.min.value),
            max: row.max.value === "" ? undefined : Number(row.max.value),
          }
        : { attribute: row.attr.value, mode, value: row.value.value };
    });

  const composer = el(
    "form",
    {
      class: "card scenario-composer",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(feedback);
        const draft: ScenarioDraft = {
          scenario_id: scenarioId.value,
          target_entity_type: targetSelect.value,
          audience: audienceSelect.value as Audience,
          context: contextSelect.value as ContextKind,
          algorithm: buildAlgorithm(),
          post_filters: buildFilters(),
        };
        scenarioComposerFlow(session, domainId, draft)
          .then((result) => {
            feedback.append(
              el(
                "p",
                { class: "success" },
                "Scenario live at ",
                el("code", { class: "rec-endpoint" }, result.recommendationEndpoint),
              ),
            );
            renderScenariosView(root, session);
          })
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
    el("h2", {}, "Compose a scenario"),
    labeled("Scenario id", scenarioId),
    labeled("What to recommend", targetSelect),
    labeled("For whom", audienceSelect),
    labeled("Given context", contextSelect),
    labeled("Algorithm", variantSelect),
    algorithmSection,
    el("h3", {}, "Post-filters"),
    filterContainer,
    el("button", { type: "button", onclick: addFilterRow }, "add post-filter"),
    el("button", { type: "submit" }, "Create scenario"),
    feedback,
  );
  root.append(composer);
}
