// Pure-string SVG line charts, fed solely by pipeline records so snapshots
// do not need a DOM or canvas.

import type { StepRecord } from "./types.js";

export interface Series {
  label: string;
  values: number[];
  color: string;
}

const W = 560;
const H = 180;
const PAD = 28;

function path(values: number[], lo: number, hi: number): string {
  const span = hi - lo || 1;
  const n = Math.max(values.length - 1, 1);
  return values
    .map((v, i) => {
      const x = PAD + ((W - 2 * PAD) * i) / n;
      const y = H - PAD - ((H - 2 * PAD) * (v - lo)) / span;
      return `${i === 0 ? "M" : "L"}${x.toFixed(1)},${y.toFixed(1)}`;
    })
    .join(" ");
}

export function lineChart(title: string, series: Series[]): string {
  const all = series.flatMap((s) => s.values);
  if (all.length === 0) return `<svg class="chart" data-title="${title}"></svg>`;
  const lo = Math.min(...all, 0);
  const hi = Math.max(...all);
  const lines = series
    .map(
      (s) =>
        `<path fill="none" stroke="${s.color}" stroke-width="1.5" ` +
        `data-series="${s.label}" d="${path(s.values, lo, hi)}"/>`,
    )
    .join("");
  const legend = series
    .map(
      (s, i) =>
        `<text x="${PAD + i * 130}" y="14" fill="${s.color}" font-size="11">${s.label}</text>`,
    )
    .join("");
  return (
    `<svg class="chart" viewBox="0 0 ${W} ${H}" data-title="${title}">` +
    `<text x="${W / 2}" y="${H - 6}" text-anchor="middle" font-size="11">${title}</text>` +
    legend +
    lines +
    `</svg>`
  );
}

export function componentChart(steps: StepRecord[]): string {
  return lineChart("utility components per step", [
    { label: "uniformity", values: steps.map((s) => s.scaled.uniformity), color: "#4363d8" },
    { label: "diversity", values: steps.map((s) => s.scaled.diversity), color: "#3cb44b" },
    { label: "novelty", values: steps.map((s) => s.scaled.novelty), color: "#e6194b" },
  ]);
}

export function cumulatedChart(steps: StepRecord[], relevance?: number[]): string {
  // cum_utility arrives precomputed: the UI never derives metric values.
  const series: Series[] = [
    { label: "cumulated utility", values: steps.map((s) => s.cum_utility), color: "#911eb4" },
  ];
  if (relevance && relevance.length === steps.length) {
    series.push({ label: "cumulated relevance", values: relevance, color: "#f58231" });
  }
  return lineChart("cumulated signals", series);
}
