// Bootstrap: one analytic session per tab (restored across reloads via
// the URL hash), plus an exploratory workspace created on demand.

import { ApiClient } from "./api.js";
import { renderAnalytic, renderExploratory } from "./render.js";
import { AnalyticStore, ExploratoryStore } from "./store.js";

function sessionFromHash(): string | undefined {
  const match = /analytic=([0-9a-f]+)/.exec(location.hash);
  return match ? match[1] : undefined;
}

async function start(): Promise<void> {
  const client = new ApiClient("");
  const network = await client.network();

  const analytic = new AnalyticStore(client, network);
  await analytic.init(sessionFromHash());
  location.hash = `analytic=${analytic.sessionId}`;

  const exploratory = new ExploratoryStore(client, network);
  const targets = network.variables.map((v) => v.id);

  const analyticRoot = document.getElementById("analytic-view")!;
  const exploratoryRoot = document.getElementById("exploratory-view")!;

  const drawAnalytic = (): void =>
    renderAnalytic(analyticRoot, analytic, drawAnalytic);
  const drawExploratory = (): void =>
    renderExploratory(
      exploratoryRoot,
      exploratory,
      targets,
      (target) => {
        void exploratory.setTarget(target).then(drawExploratory);
      },
      drawExploratory,
    );

  drawAnalytic();
  drawExploratory();

  for (const tab of Array.from(document.querySelectorAll<HTMLElement>(".tab"))) {
    tab.addEventListener("click", () => {
      document
        .querySelectorAll(".tab")
        .forEach((other) => other.classList.remove("active"));
      tab.classList.add("active");
      const mode = tab.dataset.mode;
      analyticRoot.hidden = mode !== "analytic";
      exploratoryRoot.hidden = mode !== "exploratory";
    });
  }
}

void start().catch((error) => {
  const banner = document.createElement("div");
  banner.className = "error-banner";
  banner.textContent = `failed to reach the inference service: ${String(error)}`;
  document.body.prepend(banner);
});
