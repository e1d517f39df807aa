import { describe, expect, it } from "vitest";

import type { SessionView, StepView } from "../src/api.js";
import {
  applyCreate,
  applyError,
  applyPropose,
  applySession,
  controls,
  deltaBadges,
  initialState,
  lossSequence,
  nutrientSeries,
} from "../src/store.js";
import { renderSession } from "../src/render.js";
import { validateServings, intakeCsv } from "../src/main.js";

function step(index: number, extra: Partial<StepView> = {}): StepView {
  return {
    index,
    point: [0, 0.6],
    loss: 0.36 + 0.16 * index,
    delta_loss: index === 0 ? 0 : 0.16,
    active_relevant: [0],
    newly_activated: index === 0 ? [0] : [index],
    theta: null,
    ...extra,
  };
}

describe("state projections", () => {
  it("create seeds a one-step trace with no pending step", () => {
    const s = applyCreate(initialState, { id: "s-1", step: step(0), active: [0] });
    expect(s.sessionId).toBe("s-1");
    expect(s.steps).toHaveLength(1);
    expect(s.pending).toBeNull();
    expect(deltaBadges(s)).toEqual([]);
  });

  it("badges carry server delta_loss values exactly, pending flagged", () => {
    // A value with no short decimal form must survive untouched.
    const exact = 0.1 + 0.2;
    let s = applyCreate(initialState, { id: "s-1", step: step(0), active: [0] });
    s = applyPropose(s, step(1, { delta_loss: exact }));
    const badges = deltaBadges(s);
    expect(badges).toHaveLength(1);
    expect(badges[0]!.value).toBe(exact);
    expect(badges[0]!.pending).toBe(true);
    expect(renderSession(s)).toContain(`data-delta="${String(exact)}"`);
  });

  it("accept response replaces the whole trace; loss order is read back", () => {
    const view: SessionView = {
      id: "s-1",
      steps: [step(0), step(1)],
      pending: null,
      face_exhausted: false,
      loss_sequence: [0.36, 0.52],
    };
    const s = applySession(
      applyCreate(initialState, { id: "s-1", step: step(0), active: [0] }),
      view,
    );
    expect(lossSequence(s)).toEqual([0.36, 0.52]);
    expect(deltaBadges(s)).toHaveLength(1);
    expect(deltaBadges(s)[0]!.pending).toBe(false);
  });

  it("row names resolve activated indices for badge labels", () => {
    let s = applyCreate(
      initialState,
      { id: "s-1", step: step(0), active: [0] },
      ["sodium_mg:upper", "protein_g:lower", "x"],
    );
    s = applyPropose(s, step(1, { newly_activated: [1] }));
    expect(deltaBadges(s)[0]!.activatedNames).toEqual(["protein_g:lower"]);
  });

  it("nutrient series pair step profiles with regimen bound bands", () => {
    let s = applyCreate(
      initialState,
      {
        id: "s-1",
        step: step(0, { nutrients: { sodium_mg: 3100, protein_g: 40 } }),
        active: [0],
      },
      undefined,
      { sodium_mg: { upper: 2300 }, protein_g: { lower: 18, upper: null } },
    );
    s = applySession(s, {
      id: "s-1",
      steps: [
        step(0, { nutrients: { sodium_mg: 3100, protein_g: 40 } }),
        step(1, { nutrients: { sodium_mg: 2300, protein_g: 42 } }),
      ],
      pending: null,
      face_exhausted: false,
      loss_sequence: [0.36, 0.52],
    });
    const series = nutrientSeries(s);
    expect(series).toEqual([
      { nutrient: "sodium_mg", values: [3100, 2300], lower: null, upper: 2300 },
      { nutrient: "protein_g", values: [40, 42], lower: 18, upper: null },
    ]);
  });

  it("controls disable propose when the face is exhausted, with a reason", () => {
    let s = applyCreate(initialState, { id: "s-1", step: step(0), active: [0] });
    s = applySession(s, {
      id: "s-1",
      steps: [step(0)],
      pending: null,
      face_exhausted: true,
      loss_sequence: [0.36],
    });
    const c = controls(s);
    expect(c.proposeEnabled).toBe(false);
    expect(c.proposeDisabledReason).toMatch(/active/);
    expect(renderSession(s)).toContain('<button id="propose" disabled>');
  });

  it("errors render inline and clear on the next successful response", () => {
    let s = applyCreate(initialState, { id: "s-1", step: step(0), active: [0] });
    s = applyError(s, "face-exhausted", "no feasible augmentation remains");
    expect(renderSession(s)).toContain('data-code="face-exhausted"');
    s = applyPropose(s, step(1));
    expect(s.error).toBeNull();
  });

  it("rendering is a pure function of state", () => {
    let s = applyCreate(initialState, { id: "s-1", step: step(0), active: [0] });
    s = applyPropose(s, step(1));
    expect(renderSession(s)).toBe(renderSession({ ...s }));
  });
});

describe("intake form validation", () => {
  it("rejects negative and non-numeric servings before any request", () => {
    expect(validateServings([1, -0.5])).toMatch(/nonnegative/);
    expect(validateServings([1, NaN])).toMatch(/numbers/);
    expect(validateServings([0, 2.5])).toBeNull();
  });

  it("builds a one-row CSV in group order", () => {
    expect(intakeCsv(["grains", "dairy"], [3, 1.5])).toBe("grains,dairy\n3,1.5");
  });
});
