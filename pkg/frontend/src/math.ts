// Client-side typesetting of server-marked math literals. The marker
// element's text is the raw source, possibly prose with embedded
// delimited segments; only the segments are typeset.

import { MATH_SELECTOR } from "./contract";

interface MathEngine {
  renderToString(tex: string, opts: { displayMode: boolean; throwOnError: boolean }): string;
}

const DELIMITERS = [
  { open: "$", close: "$", display: false },
  { open: "\\(", close: "\\)", display: false },
  { open: "\\[", close: "\\]", display: true },
];

export type Segment =
  | { math: false; text: string }
  | { math: true; raw: string; body: string; display: boolean };

// Mirrors the server's marking rule: a pair counts only when balanced
// and non-empty, so "price is $5" and "$$" stay plain text.
export function splitMath(text: string): Segment[] {
  const out: Segment[] = [];
  let plain = "";
  let i = 0;
  while (i < text.length) {
    let consumed = false;
    for (const d of DELIMITERS) {
      if (!text.startsWith(d.open, i)) continue;
      const close = text.indexOf(d.close, i + d.open.length);
      if (close === -1) continue;
      if (close === i + d.open.length) {
        // empty pair: both delimiters read as plain text
        plain += text.slice(i, close + d.close.length);
      } else {
        if (plain) {
          out.push({ math: false, text: plain });
          plain = "";
        }
        out.push({
          math: true,
          raw: text.slice(i, close + d.close.length),
          body: text.slice(i + d.open.length, close),
          display: d.display,
        });
      }
      i = close + d.close.length;
      consumed = true;
      break;
    }
    if (!consumed) {
      plain += text[i];
      i += 1;
    }
  }
  if (plain) {
    out.push({ math: false, text: plain });
  }
  return out;
}

let enginePromise: Promise<MathEngine | null> | null = null;

function loadEngine(): Promise<MathEngine | null> {
  if (!enginePromise) {
    enginePromise = import("katex")
      .then((mod) => ((mod as { default?: MathEngine }).default ?? mod) as MathEngine)
      .catch(() => null);
  }
  return enginePromise;
}

function typeset(element: HTMLElement, engine: MathEngine): void {
  const source = element.textContent ?? "";
  const segments = splitMath(source);
  if (!segments.some((s) => s.math)) {
    element.dataset.typeset = "skipped";
    return;
  }
  const nodes: Node[] = [];
  try {
    for (const seg of segments) {
      if (!seg.math) {
        nodes.push(document.createTextNode(seg.text));
        continue;
      }
      const holder = document.createElement("span");
      holder.innerHTML = engine.renderToString(seg.body, {
        displayMode: seg.display,
        throwOnError: true,
      });
      nodes.push(holder.firstElementChild ?? holder);
    }
  } catch {
    // bad notation: raw source stays visible, other elements unaffected
    element.dataset.typeset = "failed";
    return;
  }
  element.replaceChildren(...nodes);
  element.dataset.typeset = "true";
}

export async function renderMath(scope: ParentNode): Promise<void> {
  const targets = Array.from(
    scope.querySelectorAll<HTMLElement>(`${MATH_SELECTOR}:not([data-typeset])`),
  );
  if (scope instanceof HTMLElement && scope.matches(`${MATH_SELECTOR}:not([data-typeset])`)) {
    targets.unshift(scope);
  }
  if (targets.length === 0) {
    return; // nothing to do: the engine is never even loaded
  }
  const engine = await loadEngine();
  if (!engine) {
    return; // enhancement only: raw source is already readable
  }
  for (const el of targets) {
    typeset(el, engine);
  }
}
