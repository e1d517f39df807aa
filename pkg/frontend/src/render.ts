/**
 * Pure HTML rendering of the session view-model.
 *
 * Rendering is string-in, string-out so it is trivially snapshot-testable:
 * the same state always produces byte-identical markup. Numbers are
 * serialized with String(), which round-trips doubles exactly, so badge
 * text carries the server-reported values verbatim.
 */

import {
  Controls,
  DeltaBadge,
  NutrientSeries,
  SessionState,
  controls,
  deltaBadges,
  lossSequence,
  nutrientSeries,
} from "./store.js";

function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderBadge(b: DeltaBadge): string {
  const cls = b.pending ? "badge pending" : "badge";
  const names = b.activatedNames.map(esc).join(", ");
  return (
    `<li class="${cls}" data-step="${b.index}" data-delta="${String(b.value)}">` +
    `step ${b.index}: &Delta;D = ${String(b.value)}` +
    (names ? ` <span class="activated">[${names}]</span>` : "") +
    `</li>`
  );
}

function renderSeries(s: NutrientSeries): string {
  const band =
    s.lower !== null || s.upper !== null
      ? `<span class="band">bounds [${s.lower ?? "&minus;&infin;"}, ${s.upper ?? "&infin;"}]</span>`
      : "";
  const points = s.values.map((v) => String(v)).join(" ");
  return (
    `<li class="series" data-nutrient="${esc(s.nutrient)}">` +
    `<span class="name">${esc(s.nutrient)}</span> ` +
    `<span class="values">${points}</span> ${band}</li>`
  );
}

function renderControls(c: Controls): string {
  const btn = (id: string, label: string, enabled: boolean) =>
    `<button id="${id}"${enabled ? "" : " disabled"}>${label}</button>`;
  const note = c.proposeDisabledReason
    ? `<span class="note">${esc(c.proposeDisabledReason)}</span>`
    : "";
  return (
    `<div class="controls">` +
    btn("propose", "Propose", c.proposeEnabled) +
    btn("accept", "Accept", c.acceptEnabled) +
    btn("undo", "Undo", c.undoEnabled) +
    note +
    `</div>`
  );
}

export function renderSession(state: SessionState): string {
  if (state.sessionId === null) {
    return `<section class="session empty">no session</section>`;
  }
  const losses = lossSequence(state)
    .map((l) => String(l))
    .join(" &le; ");
  const badges = deltaBadges(state).map(renderBadge).join("");
  const series = nutrientSeries(state).map(renderSeries).join("");
  const err = state.error
    ? `<p class="error" data-code="${esc(state.error.code)}">${esc(state.error.message)}</p>`
    : "";
  return (
    `<section class="session" data-id="${esc(state.sessionId)}">` +
    `<p class="losses">D: ${losses}</p>` +
    `<ul class="badges">${badges}</ul>` +
    (series ? `<ul class="nutrients">${series}</ul>` : "") +
    renderControls(controls(state)) +
    err +
    `</section>`
  );
}
