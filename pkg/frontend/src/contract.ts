// Names shared with the server renderer. docs/ui-contract.md is the
// source of truth; change it first.

export const EXPAND_SELECTOR = "button.ll-expand";
export const LOAD_MORE_SELECTOR = "button.ll-loadmore";
export const MATH_SELECTOR = ".ll-math";
export const VALUES_LIST_SELECTOR = "ul.ll-values";
export const ERROR_CLASS = "ll-error";

export const VALUES_API = "/api/values";

export interface ApiValue {
  kind: "literal" | "iri" | "bnode";
  text: string;
  is_math: boolean;
  language?: string;
  datatype?: string;
  link?: string;
}

export interface ValuesPage {
  values: ApiValue[];
  offset: number;
  limit: number;
  total: number;
}

export function valuesUrl(
  uri: string,
  property: string,
  direction: string,
  offset: number,
  limit: number,
): string {
  return (
    `${VALUES_API}?uri=${encodeURIComponent(uri)}` +
    `&property=${encodeURIComponent(property)}` +
    `&direction=${encodeURIComponent(direction)}` +
    `&offset=${offset}&limit=${limit}`
  );
}

// Inline failure note right after the control; the control itself stays
// usable as the retry.
export function showError(after: HTMLElement, message: string): void {
  clearError(after);
  const note = document.createElement("span");
  note.className = ERROR_CLASS;
  note.textContent = message;
  after.insertAdjacentElement("afterend", note);
}

export function clearError(after: HTMLElement): void {
  const next = after.nextElementSibling;
  if (next && next.classList.contains(ERROR_CLASS)) {
    next.remove();
  }
}
