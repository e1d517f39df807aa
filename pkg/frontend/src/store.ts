/**
 * Session view-model: a pure projection of server responses.
 *
 * No solver math happens here. Every number shown in the UI (losses,
 * marginal-cost badges, nutrient values, bound bands) is carried through
 * unchanged from the JSON documents the server returned, so identical
 * request sequences render identical views.
 */

import type {
  CreateSessionResponse,
  NutrientBoundSpec,
  SessionView,
  StepView,
} from "./api.js";

export interface DeltaBadge {
  /** Step index the badge belongs to (pending uses the proposed index). */
  index: number;
  /** Exact server-reported marginal cost; never recomputed. */
  value: number;
  pending: boolean;
  activatedNames: string[];
}

export interface NutrientSeries {
  nutrient: string;
  /** One value per accepted step, in step order. */
  values: number[];
  lower: number | null;
  upper: number | null;
}

export interface SessionState {
  sessionId: string | null;
  steps: StepView[];
  pending: StepView | null;
  faceExhausted: boolean;
  rowNames: string[] | null;
  bounds: Record<string, NutrientBoundSpec> | null;
  /** True while a request is in flight; buttons render disabled. */
  busy: boolean;
  error: { code: string; message: string } | null;
}

export const initialState: SessionState = {
  sessionId: null,
  steps: [],
  pending: null,
  faceExhausted: false,
  rowNames: null,
  bounds: null,
  busy: false,
  error: null,
};

export function applyCreate(
  state: SessionState,
  res: CreateSessionResponse,
  rowNames?: string[],
  bounds?: Record<string, NutrientBoundSpec>,
): SessionState {
  return {
    ...state,
    sessionId: res.id,
    steps: [res.step],
    pending: null,
    faceExhausted: false,
    rowNames: rowNames ?? state.rowNames,
    bounds: bounds ?? state.bounds,
    busy: false,
    error: null,
  };
}

export function applyPropose(state: SessionState, step: StepView): SessionState {
  return { ...state, pending: step, busy: false, error: null };
}

/** Accept and rollback both return the full session document. */
export function applySession(state: SessionState, view: SessionView): SessionState {
  return {
    ...state,
    sessionId: view.id,
    steps: view.steps,
    pending: view.pending,
    faceExhausted: view.face_exhausted,
    rowNames: view.row_names ?? state.rowNames,
    busy: false,
    error: null,
  };
}

export function applyError(
  state: SessionState,
  code: string,
  message: string,
): SessionState {
  return { ...state, busy: false, error: { code, message } };
}

export function applyBusy(state: SessionState): SessionState {
  return { ...state, busy: true, error: null };
}

function namesFor(step: StepView, rowNames: string[] | null): string[] {
  if (step.newly_activated_names) return step.newly_activated_names;
  if (rowNames) return step.newly_activated.map((i) => rowNames[i] ?? String(i));
  return step.newly_activated.map(String);
}

/** Marginal-cost badges for accepted steps past step 0, plus the pending one. */
export function deltaBadges(state: SessionState): DeltaBadge[] {
  const badges: DeltaBadge[] = state.steps
    .filter((s) => s.index > 0)
    .map((s) => ({
      index: s.index,
      value: s.delta_loss,
      pending: false,
      activatedNames: namesFor(s, state.rowNames),
    }));
  if (state.pending) {
    badges.push({
      index: state.pending.index,
      value: state.pending.delta_loss,
      pending: true,
      activatedNames: namesFor(state.pending, state.rowNames),
    });
  }
  return badges;
}

/** Per-nutrient value trajectory with its bound band, for charting. */
export function nutrientSeries(state: SessionState): NutrientSeries[] {
  const withProfiles = state.steps.filter((s) => s.nutrients !== undefined);
  if (withProfiles.length === 0) return [];
  const first = withProfiles[0]!.nutrients!;
  return Object.keys(first).map((nutrient) => {
    const spec = state.bounds?.[nutrient] ?? {};
    return {
      nutrient,
      values: withProfiles.map((s) => s.nutrients![nutrient] ?? NaN),
      lower: spec.lower ?? null,
      upper: spec.upper ?? null,
    };
  });
}

/** Accepted losses must never decrease; the server enforces this, the UI
 * only reads it back for display. */
export function lossSequence(state: SessionState): number[] {
  return state.steps.map((s) => s.loss);
}

export interface Controls {
  proposeEnabled: boolean;
  acceptEnabled: boolean;
  undoEnabled: boolean;
  /** Human-readable reason when propose is disabled. */
  proposeDisabledReason: string | null;
}

export function controls(state: SessionState): Controls {
  const live = state.sessionId !== null && !state.busy;
  let reason: string | null = null;
  if (!live) reason = state.busy ? "request in flight" : "no session";
  else if (state.faceExhausted) reason = "every relevant constraint that can bind is active";
  return {
    proposeEnabled: live && !state.faceExhausted,
    acceptEnabled: live && state.pending !== null,
    undoEnabled: live && state.steps.length > 1,
    proposeDisabledReason: reason,
  };
}
