/** Entry point: resolve the evaluator id and mount the app. */

import { AnnotationApi } from "./api.js";
import { App } from "./app.js";

/** Evaluator id from ?evaluator=..., or null when absent/blank. */
export function parseEvaluatorId(search: string): string | null {
  const id = new URLSearchParams(search).get("evaluator");
  if (id === null || id.trim() === "") {
    return null;
  }
  return id.trim();
}

function renderIdPrompt(root: HTMLElement): void {
  root.innerHTML = "";
  const form = document.createElement("form");
  form.className = "id-prompt";
  const label = document.createElement("label");
  label.textContent = "Enter your evaluator id to begin: ";
  const input = document.createElement("input");
  input.name = "evaluator";
  input.required = true;
  const go = document.createElement("button");
  go.textContent = "Start";
  label.append(input);
  form.append(label, go);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const id = input.value.trim();
    if (id !== "") {
      location.search = `?evaluator=${encodeURIComponent(id)}`;
    }
  });
  root.append(form);
}

function bootstrap(): void {
  const root = document.getElementById("app");
  if (root === null) {
    return;
  }
  const evaluatorId = parseEvaluatorId(location.search);
  if (evaluatorId === null) {
    renderIdPrompt(root);
    return;
  }
  const app = new App({ api: new AnnotationApi(), evaluatorId });
  void app.mount(root);
}

if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  bootstrap();
}
