// HTML-string renderers. Pure functions of API responses plus local UI
// state, so snapshot tests cover them without a DOM.

import type { FormState, Validity } from "./form.js";
import { attributeChoices, operatorEnabled } from "./form.js";
import type {
  ApiError,
  ItemsetCard,
  OperatorName,
  SessionView,
  StepRecord,
  Suggestion,
} from "./types.js";
import { NEEDS_ATTRIBUTE, OPERATORS } from "./types.js";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function descriptionChips(card: ItemsetCard): string {
  const entries = Object.entries(card.description);
  if (entries.length === 0) {
    return `<span class="chip chip-root">all items</span>`;
  }
  return entries
    .map(([attr, label]) => `<span class="chip">${esc(attr)} ${esc(label)}</span>`)
    .join("");
}

function uniformityGauge(card: ItemsetCard): string {
  const level = Math.max(0, Math.min(1, Math.log1p(card.uniformity) / Math.log1p(100)));
  return (
    `<span class="gauge" title="uniformity ${card.uniformity.toFixed(3)}">` +
    `<span class="gauge-fill" style="width:${(level * 100).toFixed(0)}%"></span></span>`
  );
}

export function renderCard(card: ItemsetCard, selected: boolean): string {
  return (
    `<article class="card${selected ? " selected" : ""}${card.is_root ? " root" : ""}" ` +
    `data-itemset="${card.id}">` +
    `<header>#${card.id} · ${card.size} items</header>` +
    `<div class="chips">${descriptionChips(card)}</div>` +
    uniformityGauge(card) +
    `</article>`
  );
}

export function renderSummary(view: SessionView, form: FormState): string {
  const cards = view.current.map((c) => renderCard(c, c.id === form.itemset)).join("");
  return `<section class="summary" data-count="${view.current.length}">${cards}</section>`;
}

export function renderStatus(view: SessionView): string {
  const [alpha, beta, gamma] = view.weights;
  return (
    `<section class="status">` +
    `<span>step ${view.step_index}/${view.t - 1}</span>` +
    `<span>seen ${view.seen}</span>` +
    `<span>mode ${view.mode}</span>` +
    `<span class="weights">α ${alpha.toFixed(2)} β ${beta.toFixed(2)} γ ${gamma.toFixed(2)}</span>` +
    `<span>utility ${view.breakdown.utility.toFixed(3)}</span>` +
    (view.done ? `<span class="done">complete</span>` : "") +
    `</section>`
  );
}

export function renderOperatorPanel(view: SessionView, form: FormState, validity: Validity): string {
  const card = view.current.find((c) => c.id === form.itemset);
  const panelDisabled = view.done;
  const buttons = OPERATORS.map((op) => {
    const enabled = !panelDisabled && card !== undefined && operatorEnabled(card, op);
    const active = form.operator === op;
    return (
      `<button class="op${active ? " active" : ""}" data-op="${op}" ` +
      `${enabled ? "" : "disabled "}>${op}</button>`
    );
  }).join("");

  let attributeControl = "";
  if (form.operator && NEEDS_ATTRIBUTE[form.operator] && card) {
    const choices = attributeChoices(card, form.operator as OperatorName);
    const options = choices
      .map(
        (a) =>
          `<option value="${esc(a)}"${a === form.attribute ? " selected" : ""}>${esc(a)}</option>`,
      )
      .join("");
    attributeControl =
      `<select class="attribute" data-control="attribute"${panelDisabled ? " disabled" : ""}>` +
      `<option value="">attribute…</option>${options}</select>`;
  }

  const inlineError =
    form.error !== null
      ? `<span class="inline-error" data-anchor="${form.error.control}">${esc(form.error.message)}</span>`
      : "";
  const submit =
    `<button class="submit" data-control="submit"` +
    `${validity.canSubmit && !panelDisabled ? "" : " disabled"}>apply</button>` +
    (validity.reason && !panelDisabled ? `<span class="hint">${esc(validity.reason)}</span>` : "");

  return (
    `<section class="operator-panel${panelDisabled ? " disabled" : ""}">` +
    `<div class="ops">${buttons}</div>` +
    `<div class="attr">${attributeControl}${inlineError}</div>` +
    `<div class="submit-row">${submit}</div>` +
    `</section>`
  );
}

export function renderSuggestions(suggestions: Suggestion[]): string {
  if (suggestions.length === 0) {
    return `<section class="suggestions empty">no suggestions match the current constraints</section>`;
  }
  const rows = suggestions
    .map(
      (s, i) =>
        `<li class="suggestion" data-index="${i}" data-itemset="${s.action.itemset}" ` +
        `data-op="${s.action.operator}" data-attr="${s.action.attribute ?? ""}">` +
        `<span class="score">${s.score.toFixed(3)}</span>` +
        `#${s.action.itemset} ${s.action.operator}` +
        (s.action.attribute ? ` on ${esc(s.action.attribute)}` : "") +
        `</li>`,
    )
    .join("");
  return `<section class="suggestions"><ol>${rows}</ol></section>`;
}

export interface TimelineItem {
  step: number;
  operator: string | null;
  attribute: string | null;
  resultSize: number;
  utility: number;
}

export function timelineItemFrom(record: StepRecord): TimelineItem {
  return {
    step: record.step,
    operator: record.action?.operator ?? null,
    attribute: record.action?.attribute ?? null,
    resultSize: record.result.length,
    utility: record.utility,
  };
}

export function renderTimeline(items: TimelineItem[], complete: boolean): string {
  const rows = items
    .map(
      (it) =>
        `<li class="step" data-step="${it.step}">` +
        `<span class="op">${it.operator ?? "bootstrap"}</span>` +
        (it.attribute ? `<span class="attr">${esc(it.attribute)}</span>` : "") +
        `<span class="size">${it.resultSize} itemsets</span>` +
        `<span class="utility">${it.utility.toFixed(3)}</span>` +
        `</li>`,
    )
    .join("");
  return (
    `<section class="timeline${complete ? " complete" : ""}" data-length="${items.length}">` +
    `<ol>${rows}</ol></section>`
  );
}

export function renderBanner(error: ApiError | null): string {
  if (!error) return "";
  return (
    `<aside class="banner" role="alert" data-code="${esc(error.error)}">` +
    `<strong>${esc(error.error)}</strong> ${esc(error.detail)}` +
    `<button class="dismiss" data-control="dismiss">×</button></aside>`
  );
}

export function renderReplayControls(playing: boolean, position: number, total: number): string {
  return (
    `<section class="replay">` +
    `<button data-control="${playing ? "pause" : "resume"}">${playing ? "pause" : "resume"}</button>` +
    `<span class="progress">${position}/${total}</span>` +
    `</section>`
  );
}
