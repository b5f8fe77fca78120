// Response shapes of the session API. The UI derives all of its state from
// these; it never computes metrics on its own.

export type OperatorName = "by-facet" | "by-superset" | "by-distrib" | "by-neighbors";

export const OPERATORS: OperatorName[] = [
  "by-facet",
  "by-superset",
  "by-distrib",
  "by-neighbors",
];

export const NEEDS_ATTRIBUTE: Record<OperatorName, boolean> = {
  "by-facet": true,
  "by-superset": false,
  "by-distrib": false,
  "by-neighbors": true,
};

export interface ActionJson {
  itemset: number;
  operator: OperatorName;
  attribute: string | null;
}

export interface ValidOperators {
  "by-facet": string[];
  "by-superset": boolean;
  "by-distrib": boolean;
  "by-neighbors": string[];
}

export interface ItemsetCard {
  id: number;
  description: Record<string, string>;
  bins: Record<string, number>;
  size: number;
  uniformity: number;
  vector: number[];
  is_root: boolean;
  valid_operators: ValidOperators;
}

export interface Breakdown {
  raw: { uniformity: number; diversity: number; novelty: number };
  scaled: { uniformity: number; diversity: number; novelty: number };
  utility: number;
  weights: { alpha: number; beta: number; gamma: number };
}

export interface SessionView {
  id: string;
  dataset: string;
  mode: "manual" | "partial" | "full";
  strategy: string;
  k: number;
  t: number;
  step_index: number;
  seen: number;
  done: boolean;
  truncated: boolean;
  weights: number[];
  current: ItemsetCard[];
  breakdown: Breakdown;
  cumulated_utility: number;
  bootstrap?: { result: number[] } & Breakdown;
  pipeline?: PipelineView;
}

export interface StepRecord extends Breakdown {
  step: number;
  action: ActionJson | null;
  result: number[];
  seen: number;
  cum_utility: number;
}

export interface PipelineView {
  t: number;
  step_index: number;
  truncated: boolean;
  steps: StepRecord[];
}

export interface StepResponse extends SessionView {
  step: { action: ActionJson; result: number[]; wall_ms: number } & Breakdown;
}

export interface Suggestion {
  action: ActionJson;
  score: number;
}

export interface ApiError {
  error: string;
  detail: string;
  field?: string;
}

export interface DatasetInfo {
  id: string;
  rows: number;
  attributes: string[];
  itemsets: number;
  bin_count: number;
  min_support: number;
  has_checkpoint: boolean;
}
