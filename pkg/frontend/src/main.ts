import { createApp } from "./app.js";

// Same-origin by default; override with ?api=http://host:port when the
// static files are served separately from the ranking service.
const baseUrl = new URLSearchParams(window.location.search).get("api") ?? "";

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const app = createApp(root, baseUrl);
  void app.loadKeys();
});
