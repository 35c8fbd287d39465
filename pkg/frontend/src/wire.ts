// One delegated listener per behavior: inserted fragments and appended
// values come alive without re-wiring.

import { EXPAND_SELECTOR, LOAD_MORE_SELECTOR } from "./contract";
import { onExpand } from "./expand";
import { onLoadMore } from "./loadmore";
import { renderMath } from "./math";

export function wireDocument(doc: Document): void {
  doc.addEventListener("click", (event) => {
    const target = event.target;
    if (!(target instanceof Element)) {
      return;
    }
    const expand = target.closest<HTMLElement>(EXPAND_SELECTOR);
    if (expand) {
      event.preventDefault();
      void onExpand(expand);
      return;
    }
    const more = target.closest<HTMLElement>(LOAD_MORE_SELECTOR);
    if (more) {
      event.preventDefault();
      void onLoadMore(more);
    }
  });
  void renderMath(doc);
}
