// Thin DOM layer: renders store state, wires events back into the store.
// No business logic here; everything visible is a projection of a store.

import { Distribution } from "./api.js";
import {
  AnalyticStore,
  BarDatum,
  ExploratoryStore,
  VariableRow,
  bars,
  predictionBadge,
} from "./store.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderBars(distribution: Distribution | null): HTMLElement {
  const wrap = el("div", "bars");
  if (!distribution) {
    wrap.appendChild(el("span", "bars-empty", "—"));
    return wrap;
  }
  for (const bar of bars(distribution)) {
    const rowEl = el("div", "bar-row");
    rowEl.appendChild(el("span", "bar-state", bar.state));
    const track = el("div", "bar-track");
    const fill = el("div", "bar-fill");
    fill.style.width = `${(bar.probability * 100).toFixed(1)}%`;
    track.appendChild(fill);
    rowEl.appendChild(track);
    rowEl.appendChild(el("span", "bar-label", bar.label));
    wrap.appendChild(rowEl);
  }
  return wrap;
}

function evidenceSelector(
  row: VariableRow,
  onChange: (state: string | null) => void,
): HTMLSelectElement {
  const select = el("select", "evidence-select");
  const blank = el("option", undefined, "(none)");
  blank.value = "";
  select.appendChild(blank);
  for (const state of row.states) {
    const option = el("option", undefined, state);
    option.value = state;
    select.appendChild(option);
  }
  select.value = row.evidence ?? "";
  select.addEventListener("change", () => {
    onChange(select.value === "" ? null : select.value);
  });
  return select;
}

function errorBanner(store: AnalyticStore | ExploratoryStore): HTMLElement | null {
  if (!store.lastError) return null;
  const banner = el("div", "error-banner");
  banner.appendChild(el("strong", undefined, store.lastError.code));
  banner.appendChild(el("span", undefined, ` ${store.lastError.message}`));
  return banner;
}

function variableTable(
  store: AnalyticStore | ExploratoryStore,
  rerender: () => void,
  highlight: string,
): HTMLElement {
  const table = el("table", "variables");
  const head = el("tr");
  for (const title of ["Variable", "Project value", "Evidence", "Posterior"]) {
    head.appendChild(el("th", undefined, title));
  }
  table.appendChild(head);
  const errorRows = new Set(store.lastError?.rows ?? []);
  for (const row of store.rows) {
    const tr = el("tr", row.id === highlight ? "highlight" : undefined);
    if (errorRows.has(row.id)) tr.classList.add("error-row");
    tr.appendChild(el("td", "var-name", row.id));
    tr.appendChild(el("td", "project-value", row.projectValue ?? "—"));
    const evidenceCell = el("td");
    evidenceCell.appendChild(
      evidenceSelector(row, (state) => {
        void store.setEvidence(row.id, state).then(rerender);
      }),
    );
    tr.appendChild(evidenceCell);
    const posteriorCell = el("td");
    posteriorCell.appendChild(renderBars(row.posterior));
    tr.appendChild(posteriorCell);
    table.appendChild(tr);
  }
  return table;
}

function revisionPanel(store: AnalyticStore | ExploratoryStore): HTMLElement {
  const panel = el("div", "revision-panel");
  panel.appendChild(el("h3", undefined, "degree_of_revision"));
  panel.appendChild(renderBars(store.revision));
  const badgeText = predictionBadge(store.prediction);
  if (badgeText) {
    const badge = el("span", `badge badge-${badgeText.toLowerCase()}`, badgeText);
    panel.appendChild(badge);
  }
  return panel;
}

export function renderAnalytic(
  root: HTMLElement,
  store: AnalyticStore,
  rerender: () => void,
): void {
  root.replaceChildren();
  const banner = errorBanner(store);
  if (banner) root.appendChild(banner);
  root.appendChild(variableTable(store, rerender, store.network.class_variable));

  const actions = el("div", "actions");
  const propagate = el("button", "propagate", "Propagate to the network");
  propagate.addEventListener("click", () => {
    void store.propagate().then(rerender);
  });
  actions.appendChild(propagate);
  const clear = el("button", "clear", "Clear evidence");
  clear.addEventListener("click", () => {
    void store.clearAllEvidence().then(rerender);
  });
  actions.appendChild(clear);
  root.appendChild(actions);
  root.appendChild(revisionPanel(store));
}

export function renderExploratory(
  root: HTMLElement,
  store: ExploratoryStore,
  targets: string[],
  onTarget: (target: string) => void,
  rerender: () => void,
): void {
  root.replaceChildren();
  const picker = el("div", "target-picker");
  picker.appendChild(el("label", undefined, "Target variable: "));
  const select = el("select", "target-select");
  const blank = el("option", undefined, "(choose)");
  blank.value = "";
  select.appendChild(blank);
  for (const target of targets) {
    const option = el("option", undefined, target);
    option.value = target;
    select.appendChild(option);
  }
  select.value = store.target ?? "";
  select.addEventListener("change", () => {
    if (select.value !== "") onTarget(select.value);
  });
  picker.appendChild(select);
  root.appendChild(picker);

  if (!store.target) {
    root.appendChild(el("p", "hint", "Pick a target to see its relevant variables."));
    return;
  }

  const banner = errorBanner(store);
  if (banner) root.appendChild(banner);

  const targetPanel = el("div", "target-panel");
  targetPanel.appendChild(el("h3", undefined, store.target));
  targetPanel.appendChild(renderBars(store.targetPosterior));
  root.appendChild(targetPanel);

  root.appendChild(el("h4", undefined, "Relevant variables"));
  root.appendChild(variableTable(store, rerender, ""));

  const actions = el("div", "actions");
  const propagate = el("button", "propagate", "Propagate to the network");
  propagate.addEventListener("click", () => {
    void store.propagate().then(rerender);
  });
  actions.appendChild(propagate);
  root.appendChild(actions);
  root.appendChild(revisionPanel(store));
}
