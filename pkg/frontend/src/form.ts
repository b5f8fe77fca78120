// Action-form state: which card, operator and attribute are selected, and
// whether the combination is submittable. Validity mirrors the API's hints;
// nothing is recomputed from data.

import type { ActionJson, ItemsetCard, OperatorName, SessionView } from "./types.js";
import { NEEDS_ATTRIBUTE } from "./types.js";

export interface FormState {
  itemset: number | null;
  operator: OperatorName | null;
  attribute: string | null;
  // inline error from the last rejected submission, anchored to a control
  error: { message: string; control: "itemset" | "operator" | "attribute" } | null;
}

export function emptyForm(): FormState {
  return { itemset: null, operator: null, attribute: null, error: null };
}

export function selectCard(form: FormState, card: ItemsetCard): FormState {
  return { ...form, itemset: card.id, error: null };
}

export function selectOperator(form: FormState, operator: OperatorName): FormState {
  return {
    ...form,
    operator,
    attribute: NEEDS_ATTRIBUTE[operator] ? form.attribute : null,
    error: null,
  };
}

export function selectAttribute(form: FormState, attribute: string | null): FormState {
  return { ...form, attribute, error: null };
}

export function prefill(form: FormState, action: ActionJson): FormState {
  return {
    itemset: action.itemset,
    operator: action.operator,
    attribute: action.attribute,
    error: null,
  };
}

export function cardFor(view: SessionView, form: FormState): ItemsetCard | undefined {
  return view.current.find((c) => c.id === form.itemset);
}

export function attributeChoices(card: ItemsetCard, operator: OperatorName): string[] {
  if (operator === "by-facet") return card.valid_operators["by-facet"];
  if (operator === "by-neighbors") return card.valid_operators["by-neighbors"];
  return [];
}

export function operatorEnabled(card: ItemsetCard, operator: OperatorName): boolean {
  const hints = card.valid_operators;
  if (operator === "by-facet") return hints["by-facet"].length > 0;
  if (operator === "by-neighbors") return hints["by-neighbors"].length > 0;
  if (operator === "by-superset") return hints["by-superset"];
  return hints["by-distrib"];
}

export interface Validity {
  canSubmit: boolean;
  reason: string | null;
}

// Structural completeness only: operator hints grey out buttons at render
// time, but a submission that slips through a stale view is adjudicated by
// the server, whose precondition message then lands inline.
export function formValidity(view: SessionView, form: FormState): Validity {
  if (view.done) return { canSubmit: false, reason: "pipeline complete" };
  if (form.itemset === null) return { canSubmit: false, reason: "pick an itemset" };
  if (!cardFor(view, form)) return { canSubmit: false, reason: "selection is stale" };
  if (!form.operator) return { canSubmit: false, reason: "pick an operator" };
  if (NEEDS_ATTRIBUTE[form.operator] && !form.attribute) {
    return { canSubmit: false, reason: "pick an attribute" };
  }
  return { canSubmit: true, reason: null };
}

export function toAction(form: FormState): ActionJson {
  if (form.itemset === null || form.operator === null) {
    throw new Error("form is incomplete");
  }
  return {
    itemset: form.itemset,
    operator: form.operator,
    attribute: form.attribute,
  };
}
