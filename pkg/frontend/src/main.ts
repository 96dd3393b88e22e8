// Browser entry point. The API base URL comes from ?api=... or defaults to
// the local dev server.

import { BoardApi } from "./api.js";
import { createApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "http://127.0.0.1:8000";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

createApp(root, new BoardApi(baseUrl)).catch((error) => {
  root.textContent = `failed to start: ${error}`;
});
