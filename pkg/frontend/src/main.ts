import { ApiClient, ApiError } from "./api.js";
import { MapView } from "./view.js";

/** Boot the client against a running map service. */
export function boot(root: HTMLElement, serverUrl: string): MapView {
  const client = new ApiClient(serverUrl);
  const view = new MapView(root, client);

  const form = document.createElement("form");
  form.classList.add("query-form");
  const input = document.createElement("input");
  input.placeholder = "Enter a topic to map";
  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Generate";
  form.append(input, submit);
  root.prepend(form);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const query = input.value.trim();
    if (!query) return;
    submit.disabled = true;
    client
      .createMap(query)
      .then((created) => view.openMap(created.map_id, created.tree))
      .catch((error) => {
        view.toast(
          error instanceof ApiError ? error.body.message : "Request failed.",
        );
      })
      .finally(() => {
        submit.disabled = false;
      });
  });

  return view;
}

declare global {
  interface Window {
    nodemindBoot: typeof boot;
  }
}

if (typeof window !== "undefined") {
  window.nodemindBoot = boot;
}
