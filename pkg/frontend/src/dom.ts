/** Tiny DOM helpers; no framework. */

export type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  props: Partial<HTMLElementTagNameMap[K]> & { class?: string; dataset?: Record<string, string> } = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  const { class: className, dataset, ...rest } = props;
  if (className) node.className = className;
  if (dataset) Object.assign(node.dataset, dataset);
  Object.assign(node, rest);
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child instanceof Node ? child : document.createTextNode(child));
  }
  return node;
}

export function clear(node: HTMLElement): HTMLElement {
  node.replaceChildren();
  return node;
}

export function labeled(text: string, input: HTMLElement): HTMLElement {
  return el("label", { class: "field" }, el("span", {}, text), input);
}

export function select(options: { value: string; label: string }[], value?: string): HTMLSelectElement {
  const node = el("select");
  for (const option of options) {
    node.append(el("option", { value: option.value }, option.label));
  }
  if (value !== undefined) node.value = value;
  return node;
}

export function issueList(issues: { field: string; message: string }[]): HTMLElement {
  const list = el("ul", { class: "issues" });
  for (const issue of issues) {
    list.append(el("li", { dataset: { field: issue.field } }, `${issue.field}: ${issue.message}`));
  }
  return list;
}

export function errorBox(message: string, code?: string): HTMLElement {
  return el(
    "div",
    { class: "error-box" },
    code ? el("strong", {}, `${code}: `) : null,
    message,
  );
}
