/**
 * Browser wiring: intake form -> session -> step controls.
 *
 * All state lives in one SessionState value; every server response is fed
 * through the pure projections in store.ts and re-rendered wholesale.
 * Requests are serialized per session: controls render disabled while a
 * request is in flight.
 */

import { ApiError, NavigatorClient } from "./api.js";
import {
  SessionState,
  applyBusy,
  applyCreate,
  applyError,
  applyPropose,
  applySession,
  initialState,
} from "./store.js";
import { renderSession } from "./render.js";

const DEFAULT_REGIMEN = "dash-women-51";

interface AppOptions {
  baseUrl?: string;
  root?: HTMLElement;
}

export function intakeCsv(groups: string[], servings: number[]): string {
  return `${groups.join(",")}\n${servings.join(",")}`;
}

export function validateServings(servings: number[]): string | null {
  if (servings.some((v) => !Number.isFinite(v))) return "servings must be numbers";
  if (servings.some((v) => v < 0)) return "servings must be nonnegative";
  return null;
}

export function startApp(opts: AppOptions = {}): void {
  const base =
    opts.baseUrl ??
    new URLSearchParams(location.search).get("api") ??
    "http://127.0.0.1:8000";
  const client = new NavigatorClient(base);
  const root = opts.root ?? document.getElementById("app")!;
  let state: SessionState = initialState;
  let groups: string[] = [];
  let omega = 1.0;
  const preferred = new Set<number>();

  const set = (next: SessionState) => {
    state = next;
    root.innerHTML = renderSession(state);
    wireControls();
  };

  const fail = (exc: unknown) => {
    if (exc instanceof ApiError) set(applyError(state, exc.code, exc.message));
    else set(applyError(state, "network-error", String(exc)));
  };

  async function submitIntake(servings: number[], regimen: string): Promise<void> {
    const inlineError = validateServings(servings);
    if (inlineError) {
      set(applyError(state, "invalid-intake", inlineError));
      return;
    }
    set(applyBusy(state));
    try {
      const name = regimen || DEFAULT_REGIMEN;
      const region = await client.dietRegion({
        regimen: name,
        intake_csv: intakeCsv(groups, servings),
      });
      const created = await client.createSession({
        problem: region.problem,
        row_names: region.row_names,
        diet_regimen: region.regimen,
      });
      set(applyCreate(state, created, region.row_names, region.bounds));
    } catch (exc) {
      fail(exc);
    }
  }

  async function propose(): Promise<void> {
    if (state.sessionId === null) return;
    set(applyBusy(state));
    try {
      const step = await client.propose(state.sessionId, {
        omega,
        preferred: preferred.size ? [...preferred] : undefined,
      });
      set(applyPropose(state, step));
    } catch (exc) {
      fail(exc);
    }
  }

  async function accept(): Promise<void> {
    if (state.sessionId === null) return;
    set(applyBusy(state));
    try {
      set(applySession(state, await client.accept(state.sessionId)));
    } catch (exc) {
      fail(exc);
    }
  }

  async function undo(): Promise<void> {
    if (state.sessionId === null || state.steps.length < 2) return;
    set(applyBusy(state));
    try {
      set(applySession(state, await client.rollback(state.sessionId, state.steps.length - 2)));
    } catch (exc) {
      fail(exc);
    }
  }

  function wireControls(): void {
    document.getElementById("propose")?.addEventListener("click", propose);
    document.getElementById("accept")?.addEventListener("click", accept);
    document.getElementById("undo")?.addEventListener("click", undo);
  }

  async function buildIntakeForm(): Promise<void> {
    const region = await client.dietRegion({});
    groups = region.groups;
    const form = document.getElementById("intake-form");
    if (!form) return;
    form.innerHTML =
      groups
        .map(
          (g) =>
            `<label>${g} <input type="number" min="0" step="0.5" value="0" data-group="${g}"></label>`,
        )
        .join("") +
      `<label>regimen <input type="text" id="regimen" value="${region.regimen}"></label>` +
      `<label>&omega; <input type="range" id="omega" min="0" max="1" step="0.05" value="1"></label>` +
      `<button id="start">Start session</button>`;
    document.getElementById("omega")?.addEventListener("input", (e) => {
      omega = Number((e.target as HTMLInputElement).value);
    });
    document.getElementById("start")?.addEventListener("click", () => {
      const servings = groups.map((g) => {
        const el = form.querySelector<HTMLInputElement>(`input[data-group="${g}"]`);
        return Number(el?.value ?? "0");
      });
      const regimen =
        (document.getElementById("regimen") as HTMLInputElement | null)?.value ?? "";
      void submitIntake(servings, regimen);
    });
  }

  set(initialState);
  void buildIntakeForm().catch(fail);
}
