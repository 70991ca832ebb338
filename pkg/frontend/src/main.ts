import { AnimatorApi } from "./api.js";
import { AnimatorApp } from "./app.js";

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("service") ?? "http://127.0.0.1:8765";
  const api = new AnimatorApi(base);

  const root = document.getElementById("app");
  const toasts = document.getElementById("toasts");
  if (!root || !toasts) throw new Error("missing #app / #toasts mount points");

  const specs = await api.listSpecs();
  const wanted = params.get("spec");
  const spec = wanted && specs.includes(wanted) ? wanted : specs[0];
  if (!spec) {
    root.textContent = "the animation service hosts no specifications";
    return;
  }
  const app = new AnimatorApp(api, root, toasts);
  await app.start(spec);
}

boot().catch((err) => {
  const root = document.getElementById("app");
  if (root) root.textContent = `failed to start: ${err}`;
});
