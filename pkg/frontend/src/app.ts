// Session controller: holds the UI state, talks to the Api client and
// renders HTML strings. DOM wiring lives in main.ts so tests can drive the
// controller directly against recorded responses.

import { Api, ApiFailure } from "./api.js";
import { componentChart, cumulatedChart } from "./charts.js";
import type { FormState } from "./form.js";
import {
  emptyForm,
  formValidity,
  prefill,
  selectAttribute,
  selectCard,
  selectOperator,
  toAction,
} from "./form.js";
import type { TimelineItem } from "./render.js";
import {
  renderBanner,
  renderOperatorPanel,
  renderReplayControls,
  renderStatus,
  renderSuggestions,
  renderSummary,
  renderTimeline,
  timelineItemFrom,
} from "./render.js";
import type {
  ApiError,
  OperatorName,
  SessionView,
  StepRecord,
  Suggestion,
} from "./types.js";

export interface ReplayState {
  records: StepRecord[];
  position: number; // timeline entries consumed
  playing: boolean;
}

export class SessionController {
  readonly api: Api;
  view: SessionView | null = null;
  form: FormState = emptyForm();
  banner: ApiError | null = null;
  suggestions: Suggestion[] = [];
  timeline: TimelineItem[] = [];
  replay: ReplayState | null = null;

  constructor(api: Api) {
    this.api = api;
  }

  // -- session lifecycle ---------------------------------------------------

  async create(body: Record<string, unknown>): Promise<void> {
    this.view = await this.guarded(() => this.api.createSession(body));
    this.form = emptyForm();
    this.timeline = [];
    if (this.view?.pipeline) {
      // Full guidance: the server already executed the pipeline; the client
      // replays it step by step.
      this.replay = { records: this.view.pipeline.steps, position: 0, playing: false };
    } else if (this.view) {
      this.timeline = [
        {
          step: 0,
          operator: null,
          attribute: null,
          resultSize: this.view.current.length,
          utility: this.view.breakdown.utility,
        },
      ];
    }
  }

  async refresh(): Promise<void> {
    if (!this.view) return;
    const latest = await this.guarded(() => this.api.getSession(this.view!.id));
    if (latest) {
      this.view = latest;
      this.form = emptyForm();
    }
  }

  // -- manual / partial actions ---------------------------------------------

  pickCard(id: number): void {
    const card = this.view?.current.find((c) => c.id === id);
    if (card) this.form = selectCard(this.form, card);
  }

  pickOperator(op: OperatorName): void {
    this.form = selectOperator(this.form, op);
  }

  pickAttribute(attribute: string | null): void {
    this.form = selectAttribute(this.form, attribute);
  }

  applySuggestion(index: number): void {
    const suggestion = this.suggestions[index];
    if (suggestion) this.form = prefill(this.form, suggestion.action);
  }

  async submit(): Promise<boolean> {
    if (!this.view) return false;
    const validity = formValidity(this.view, this.form);
    if (!validity.canSubmit) return false;
    try {
      const resp = await this.api.postStep(this.view.id, this.view.step_index, toAction(this.form));
      this.view = resp;
      this.timeline.push({
        step: resp.step_index,
        operator: resp.step.action.operator,
        attribute: resp.step.action.attribute,
        resultSize: resp.step.result.length,
        utility: resp.step.utility,
      });
      this.form = emptyForm();
      this.banner = null;
      return true;
    } catch (err) {
      if (err instanceof ApiFailure) {
        if (err.body.error === "invalid_action") {
          // anchor the API's precondition message on the offending control
          const control =
            this.form.operator && this.form.attribute !== null ? "attribute" : "operator";
          this.form = { ...this.form, error: { message: err.body.detail, control } };
        } else if (err.status === 409) {
          this.banner = err.body;
          await this.refresh();
        } else {
          this.banner = err.body;
        }
        return false;
      }
      throw err;
    }
  }

  async loadSuggestions(
    constraints: { operator?: string; itemset?: number; attribute?: string } = {},
    n = 5,
  ): Promise<void> {
    if (!this.view) return;
    const got = await this.guarded(() =>
      this.api.getSuggestions(this.view!.id, constraints, n),
    );
    this.suggestions = got ? got.suggestions : [];
  }

  // -- full-guidance replay --------------------------------------------------

  startReplay(): void {
    if (this.replay) this.replay.playing = true;
  }

  pauseReplay(): void {
    if (this.replay) this.replay.playing = false;
  }

  get replayComplete(): boolean {
    return this.replay !== null && this.replay.position >= this.replay.records.length;
  }

  /** Advance the replay by one displayed summary; no requests are made. */
  replayTick(): boolean {
    if (!this.replay || !this.replay.playing || this.replayComplete) return false;
    const record = this.replay.records[this.replay.position];
    this.timeline.push(timelineItemFrom(record));
    this.replay.position += 1;
    if (this.replayComplete) this.replay.playing = false;
    return true;
  }

  /** Run the whole remaining replay (used when no pacing is wanted). */
  replayAll(): void {
    this.startReplay();
    while (this.replayTick()) {
      /* advance to completion */
    }
  }

  dismissBanner(): void {
    this.banner = null;
  }

  // -- rendering --------------------------------------------------------------

  render(): string {
    if (!this.view) return `<main class="empty">no session</main>`;
    const validity = formValidity(this.view, this.form);
    const parts = [
      renderBanner(this.banner),
      renderStatus(this.view),
      renderSummary(this.view, this.form),
      renderOperatorPanel(this.view, this.form, validity),
      renderSuggestions(this.suggestions),
      renderTimeline(this.timeline, this.view.done || this.replayComplete),
    ];
    if (this.replay) {
      parts.push(
        renderReplayControls(this.replay.playing, this.replay.position, this.replay.records.length),
      );
      const consumed = this.replay.records.slice(0, this.replay.position);
      parts.push(componentChart(consumed), cumulatedChart(consumed));
    }
    return `<main class="session">${parts.join("")}</main>`;
  }

  private async guarded<T>(call: () => Promise<T>): Promise<T | null> {
    try {
      return await call();
    } catch (err) {
      if (err instanceof ApiFailure) {
        this.banner = err.body;
        return null;
      }
      throw err;
    }
  }
}
