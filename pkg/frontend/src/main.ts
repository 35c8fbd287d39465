import { wireDocument } from "./wire";

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", () => wireDocument(document));
} else {
  wireDocument(document);
}
