/** Data Catalog view: entity schemas (with the schema builder), interaction
 * types, and a manual entity-upload form. */

import { ApiRequestError } from "../api.js";
import { clear, el, errorBox, issueList, labeled, select } from "../dom.js";
import { schemaBuilderFlow, ValidationFailed } from "../flows.js";
import { ConsoleSession } from "../state.js";
import {
  ATTRIBUTE_KIND_LABELS,
  ATTRIBUTE_KINDS,
  AttributeKind,
  AttributeSpec,
  EntityKind,
  InteractionTypeDraft,
} from "../types.js";
import { validateInteractionType } from "../validation.js";

const KIND_OPTIONS = ATTRIBUTE_KINDS.map((kind) => ({
  value: kind,
  label: ATTRIBUTE_KIND_LABELS[kind],
}));

interface AttributeRow {
  name: HTMLInputElement;
  kind: HTMLSelectElement;
  required: HTMLInputElement;
  node: HTMLElement;
}

function attributeRow(onRemove: (row: AttributeRow) => void): AttributeRow {
  const name = el("input", { placeholder: "attribute name" });
  const kind = select(KIND_OPTIONS);
  kind.className = "attribute-kind";
  const required = el("input", { type: "checkbox" });
  const row: AttributeRow = { name, kind, required, node: el("div") };
  row.node = el(
    "div",
    { class: "row attribute-row" },
    name,
    kind,
    el("label", {}, required, "required"),
    el("button", { type: "button", onclick: () => onRemove(row) }, "remove"),
  );
  return row;
}

function readAttributes(rows: AttributeRow[]): AttributeSpec[] {
  return rows.map((row) => ({
    name: row.name.value,
    kind: row.kind.value as AttributeKind,
    required: row.required.checked,
  }));
}

export function renderCatalogView(root: HTMLElement, session: ConsoleSession): void {
  clear(root);
  const domainId = session.currentDomainId;
  if (!domainId) {
    root.append(el("p", { class: "muted" }, "Open a domain first."));
    return;
  }
  const doc = session.document(domainId);

  const existing = el("div", { class: "card" }, el("h2", {}, "Entity types (item-level domains)"));
  if (doc.entity_types.length === 0) {
    existing.append(el("p", { class: "muted" }, "None yet."));
  }
  for (const schema of doc.entity_types) {
    existing.append(
      el(
        "div",
        { class: "row" },
        el("strong", {}, schema.name),
        el("span", { class: "tag" }, schema.entity_kind),
        el("code", { class: "upload-endpoint" }, `PUT ${schema.upload_endpoint}/{id}`),
        el(
          "span",
          { class: "muted" },
          schema.attributes.map((a) => `${a.name}: ${ATTRIBUTE_KIND_LABELS[a.kind]}`).join(", "),
        ),
      ),
    );
  }
  root.append(existing);

  // --- schema builder ----------------------------------------------------
  const rows: AttributeRow[] = [];
  const rowContainer = el("div");
  const removeRow = (row: AttributeRow) => {
    rows.splice(rows.indexOf(row), 1);
    row.node.remove();
  };
  const addRow = () => {
    const row = attributeRow(removeRow);
    rows.push(row);
    rowContainer.append(row.node);
  };
  addRow();

  const nameInput = el("input", { placeholder: "e.g. movie" });
  const kindSelect = select([
    { value: "item", label: "Item (recommendable)" },
    { value: "user", label: "User" },
  ]);
  const feedback = el("div", { class: "feedback" });
  const builder = el(
    "form",
    {
      class: "card schema-builder",
      onsubmit: (event: Event) => {
        event.preventDefault();
        clear(feedback);
        const draft = {
          kind: kindSelect.value as EntityKind,
          name: nameInput.value,
          attributes: readAttributes(rows),
        };
        schemaBuilderFlow(session, domainId, draft)
          .then((result) => {
            feedback.append(
              el(
                "p",
                { class: "success" },
                "Saved. Upload endpoint: ",
                el("code", { class: "upload-endpoint" }, result.uploadEndpoint),
                result.roundTripOk ? "" : " (readback mismatch!)",
              ),
            );
            renderCatalogView(root, session);
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
    el("h2", {}, "Add an entity type"),
    el(
      "p",
      { class: "muted" },
      "Declaring an entity type generates its data-upload API. Pick from the ",
      "seven supported attribute kinds.",
    ),
    labeled("Name", nameInput),
    labeled("Kind", kindSelect),
    el("h3", {}, "Attributes"),
    rowContainer,
    el("button", { type: "button", class: "add-attribute", onclick: addRow }, "add attribute"),
    el("button", { type: "submit" }, "Save entity type"),
    feedback,
  );
  root.append(builder);

  // --- interaction types ---------------------------------------------------
  const itypes = el("div", { class: "card" }, el("h2", {}, "Interaction types"));
  for (const itype of doc.interaction_types) {
    itypes.append(
      el(
        "div",
        { class: "row" },
        el("strong", {}, itype.name),
        el("span", { class: "tag" }, itype.explicitness),
        el("span", { class: "muted" },
          `weight ${itype.default_weight}, ${itype.actor_mode}, -> ${itype.target_entity_type}`),
      ),
    );
  }
  const itypeName = el("input", { placeholder: "e.g. rating" });
  const explicitness = select([
    { value: "explicit", label: "explicit (carries a value)" },
    { value: "implicit", label: "implicit" },
  ]);
  const weight = el("input", { type: "number", value: "1.0", step: "0.1" });
  const actorMode = select([
    { value: "registered_only", label: "registered users only" },
    { value: "anonymous_only", label: "anonymous sessions only" },
    { value: "both", label: "registered or anonymous" },
  ]);
  const trackTs = el("input", { type: "checkbox", checked: true });
  const target = select([
    { value: "user_item", label: "user - item" },
    { value: "user_user", label: "user - user" },
  ]);
  const targetType = select(
    doc.entity_types.map((schema) => ({
      value: schema.entity_type_id,
      label: schema.entity_type_id,
    })),
  );
  const itypeFeedback = el("div", { class: "feedback" });
  itypes.append(
    el(
      "form",
      {
        onsubmit: (event: Event) => {
          event.preventDefault();
          clear(itypeFeedback);
          const draft: InteractionTypeDraft = {
            name: itypeName.value,
            explicitness: explicitness.value as InteractionTypeDraft["explicitness"],
            default_weight: Number(weight.value),
            actor_mode: actorMode.value as InteractionTypeDraft["actor_mode"],
            track_timestamp: trackTs.checked,
            target: target.value as InteractionTypeDraft["target"],
            target_entity_type: targetType.value,
          };
          const issues = validateInteractionType(draft, doc);
          if (issues.length > 0) {
            itypeFeedback.append(issueList(issues));
            return;
          }
          session.api
            .createInteractionType(domainId, draft)
            .then(() => session.refreshDocument(domainId))
            .then(() => renderCatalogView(root, session))
            .catch((error) =>
              itypeFeedback.append(
                error instanceof ApiRequestError
                  ? errorBox(error.message, error.code)
                  : errorBox(String(error)),
              ),
            );
        },
      },
      el("h3", {}, "Add an interaction type"),
      labeled("Name", itypeName),
      labeled("Explicitness", explicitness),
      labeled("Default weight", weight),
      labeled("Actors", actorMode),
      labeled("Track timestamps", trackTs),
      labeled("Target", target),
      labeled("Target entity type", targetType),
      el("button", { type: "submit" }, "Save interaction type"),
      itypeFeedback,
    ),
  );
  root.append(itypes);

  // --- manual upload ----------------------------------------------------------
  if (doc.entity_types.length > 0) {
    const uploadType = select(
      doc.entity_types.map((schema) => ({
        value: schema.entity_type_id,
        label: schema.entity_type_id,
      })),
    );
    const uploadId = el("input", { placeholder: "entity id" });
    const uploadValues = el("textarea", {
      rows: 4,
      placeholder: '{"title": "Toy Story (1995)", "genres": ["Animation"]}',
    });
    const uploadFeedback = el("div", { class: "feedback" });
    root.append(
      el(
        "form",
        {
          class: "card",
          onsubmit: (event: Event) => {
            event.preventDefault();
            clear(uploadFeedback);
            let values: Record<string, unknown>;
            try {
              values = JSON.parse(uploadValues.value || "{}");
            } catch (error) {
              uploadFeedback.append(errorBox(`values must be JSON: ${error}`));
              return;
            }
            session.api
              .upsertEntity(domainId, uploadType.value, uploadId.value, values)
              .then((ack) =>
                uploadFeedback.append(
                  el("p", { class: "success" }, `stored at sequence ${ack.sequence}`),
                ),
              )
              .catch((error) =>
                uploadFeedback.append(
                  error instanceof ApiRequestError
                    ? errorBox(error.message, error.code)
                    : errorBox(String(error)),
                ),
              );
          },
        },
        el("h2", {}, "Upload an entity"),
        labeled("Entity type", uploadType),
        labeled("Entity id", uploadId),
        labeled("Values (JSON)", uploadValues),
        el("button", { type: "submit" }, "Upload"),
        uploadFeedback,
      ),
    );
  }
}
