import { ApiClient } from "./api.js";
import { App, renderView } from "./wizard.js";
import type { SessionStore } from "./wizard.js";

const SESSION_KEY = "thermosolve.session";

function browserStore(): SessionStore {
  return {
    load: () => window.localStorage.getItem(SESSION_KEY),
    save: (id: string) => window.localStorage.setItem(SESSION_KEY, id),
    clear: () => window.localStorage.removeItem(SESSION_KEY),
  };
}

/** ?api=... beats a page-level global; default is same origin. */
function resolveBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  if (fromQuery) return fromQuery.replace(/\/$/, "");
  const fromGlobal = (globalThis as { THERMOSOLVE_API?: string }).THERMOSOLVE_API;
  if (fromGlobal) return fromGlobal.replace(/\/$/, "");
  return "";
}

function fieldValue(root: HTMLElement, name: string): string {
  const input = root.querySelector<HTMLInputElement>(`input[data-field="${CSS.escape(name)}"]`);
  return input ? input.value : "";
}

async function dispatch(app: App, root: HTMLElement, el: HTMLElement): Promise<boolean> {
  const action = el.dataset.action;
  switch (action) {
    case "pick-class":
      await app.chooseClass(el.dataset.name ?? "");
      return true;
    case "answer":
      await app.answer(el.dataset.option ?? "");
      return true;
    case "set-value": {
      const name = el.dataset.name ?? "";
      await app.enterValue(name, fieldValue(root, name));
      return true;
    }
    case "toggle-target":
      await app.toggleTarget(el.dataset.name ?? "");
      return true;
    case "solve":
      await app.solve();
      return true;
    case "edit":
      app.edit();
      return true;
    case "reset":
      await app.reset();
      return true;
    default:
      return false;
  }
}

function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const api = new ApiClient(resolveBaseUrl());
  const app = new App(api, browserStore());

  const redraw = () => {
    root.innerHTML = renderView(app.view());
  };

  root.addEventListener("click", (event) => {
    const el = (event.target as HTMLElement | null)?.closest<HTMLElement>("[data-action]");
    if (!el || el.dataset.action === "toggle-target") return;
    void dispatch(app, root, el).then((handled) => {
      if (handled) redraw();
    });
  });

  // checkboxes fire change, not click-on-button
  root.addEventListener("change", (event) => {
    const el = event.target as HTMLElement | null;
    if (!el || el.dataset.action !== "toggle-target") return;
    void dispatch(app, root, el).then(() => redraw());
  });

  // submitting a value with the enter key
  root.addEventListener("keydown", (event) => {
    if (event.key !== "Enter") return;
    const el = event.target as HTMLInputElement | null;
    if (!el || el.dataset.field === undefined) return;
    event.preventDefault();
    void app.enterValue(el.dataset.field, el.value).then(redraw);
  });

  void app.boot().then(redraw, (err) => {
    root.innerHTML = `<p class="error-banner">Failed to reach the solver service: ${String(err)}</p>`;
  });
}

start();
