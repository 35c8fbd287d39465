// "Load more" over the values API: append the next page to the group's
// list in server order, advance the cursor, drop the control when the
// whole value set is on the page.

import {
  ApiValue,
  VALUES_LIST_SELECTOR,
  ValuesPage,
  clearError,
  showError,
  valuesUrl,
} from "./contract";
import { renderMath } from "./math";

const inflight = new WeakSet<HTMLElement>();

function localName(iri: string): string {
  for (const sep of ["#", "/"]) {
    const at = iri.lastIndexOf(sep);
    if (at !== -1 && at + 1 < iri.length) {
      return iri.slice(at + 1);
    }
  }
  return iri;
}

// Same markup the server uses for first-page values, so appended rows
// are indistinguishable from rendered ones.
export function renderValue(value: ApiValue): HTMLLIElement {
  const li = document.createElement("li");
  if (value.kind === "iri") {
    const a = document.createElement("a");
    a.href = value.link ?? value.text;
    a.textContent = value.text;
    li.appendChild(a);
    return li;
  }
  const span = document.createElement("span");
  span.className = value.kind === "bnode" ? "ll-bnode" : value.is_math ? "ll-math" : "ll-literal";
  span.textContent = value.text;
  li.appendChild(span);
  if (value.kind === "literal" && value.language) {
    const lang = document.createElement("span");
    lang.className = "ll-lang";
    lang.textContent = `@${value.language}`;
    li.append(" ", lang);
  } else if (value.kind === "literal" && value.datatype) {
    const dt = document.createElement("span");
    dt.className = "ll-datatype";
    dt.title = value.datatype;
    dt.textContent = localName(value.datatype);
    li.append(" ", dt);
  }
  return li;
}

interface Cursor {
  uri: string;
  property: string;
  direction: string;
  offset: number;
  limit: number;
  total: number;
}

function readCursor(button: HTMLElement): Cursor | null {
  const { uri, property, direction, offset, limit, total } = button.dataset;
  if (!uri || !property || !direction || !offset || !limit || !total) {
    return null;
  }
  return {
    uri,
    property,
    direction,
    offset: Number(offset),
    limit: Number(limit),
    total: Number(total),
  };
}

export async function onLoadMore(button: HTMLElement): Promise<void> {
  if (inflight.has(button)) {
    return;
  }
  const cursor = readCursor(button);
  const list = button.parentElement?.querySelector(VALUES_LIST_SELECTOR);
  if (!cursor || !list) {
    return;
  }
  inflight.add(button);
  button.setAttribute("disabled", "disabled");
  clearError(button);
  try {
    const resp = await fetch(
      valuesUrl(cursor.uri, cursor.property, cursor.direction, cursor.offset, cursor.limit),
    );
    if (!resp.ok) {
      throw new Error(`${resp.status}`);
    }
    const page = (await resp.json()) as ValuesPage;
    for (const value of page.values) {
      list.appendChild(renderValue(value));
    }
    void renderMath(list);
    const next = cursor.offset + page.values.length;
    button.dataset.offset = String(next);
    button.dataset.total = String(page.total);
    if (next >= page.total) {
      button.remove();
    }
  } catch {
    // cursor untouched: the same click retries the same page
    showError(button, "could not load more values");
  } finally {
    inflight.delete(button);
    button.removeAttribute("disabled");
  }
}
