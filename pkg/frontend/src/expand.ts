// In-place expansion of nested resources: fetch the fragment the server
// pointed at, insert it next to the value, toggle from cache afterwards.
// No iframes, ever.

import { clearError, showError } from "./contract";
import { renderMath } from "./math";

type ExpandState = "collapsed" | "loading" | "expanded" | "failed";

interface Entry {
  state: ExpandState;
  // kept across collapse so re-expanding never refetches
  cache: HTMLElement | null;
  reason?: string;
}

const entries = new WeakMap<HTMLElement, Entry>();

export function expandState(button: HTMLElement): ExpandState {
  return entries.get(button)?.state ?? "collapsed";
}

function settle(button: HTMLElement, entry: Entry): void {
  entries.set(button, entry);
  button.setAttribute("aria-expanded", entry.state === "expanded" ? "true" : "false");
}

export async function onExpand(button: HTMLElement): Promise<void> {
  const entry = entries.get(button) ?? { state: "collapsed", cache: null };
  if (entry.state === "loading") {
    return; // one request per element at a time
  }
  if (entry.state === "expanded" && entry.cache) {
    entry.cache.remove();
    settle(button, { state: "collapsed", cache: entry.cache });
    return;
  }
  clearError(button);
  if (entry.cache) {
    button.insertAdjacentElement("afterend", entry.cache);
    settle(button, { state: "expanded", cache: entry.cache });
    return;
  }
  const url = button.dataset.expandUrl;
  if (!url) {
    return;
  }
  settle(button, { state: "loading", cache: null });
  let fragment: HTMLElement | null = null;
  let reason = "";
  try {
    const resp = await fetch(url);
    if (!resp.ok) {
      reason = `request failed (${resp.status})`;
    } else {
      const holder = document.createElement("template");
      holder.innerHTML = (await resp.text()).trim();
      fragment = holder.content.firstElementChild as HTMLElement | null;
      if (!fragment) {
        reason = "empty response";
      }
    }
  } catch {
    reason = "network error";
  }
  if (!fragment) {
    settle(button, { state: "failed", cache: null, reason });
    showError(button, `could not expand: ${reason}`);
    return;
  }
  button.insertAdjacentElement("afterend", fragment);
  settle(button, { state: "expanded", cache: fragment });
  void renderMath(fragment);
}
