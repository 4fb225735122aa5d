// Session flow controller: fetch a trial, replay its packing order, collect
// the person/computer verdict, repeat until the pool is exhausted. All
// state is derived from the server; a failed request shows a retry prompt
// and leaves the replay position untouched.

import { ApiClient, type TrialPayload, type Verdict } from "./api.js";
import { renderDashboard } from "./dashboard.js";
import {
  isComplete,
  newReplay,
  step,
  verdictEnabled,
  type ReplayState,
} from "./replay.js";
import { renderPickedList, renderScene, updateHighlights } from "./trialView.js";

export type Phase =
  | "init"
  | "replaying"
  | "submitting"
  | "error"
  | "exhausted"
  | "dashboard";

export interface AppOptions {
  /** Auto-play step interval; null disables the auto button. */
  autoAdvanceMs?: number | null;
  /** Statistics pair requested for the dashboard. */
  pair?: [string, string];
}

export class App {
  phase: Phase = "init";
  replay: ReplayState | null = null;
  trial: TrialPayload | null = null;
  trialsCompleted = 0;
  lastError: string | null = null;

  private sessionId: string | null = null;
  private pendingVerdict: Verdict | null = null;
  private pendingAction: "load" | "submit" | null = null;
  private autoTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly doc: Document,
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly options: AppOptions = {},
  ) {}

  async start(): Promise<void> {
    try {
      this.sessionId = await this.api.createSession();
    } catch (err) {
      this.fail("load", err);
      return;
    }
    await this.loadNextTrial();
  }

  async loadNextTrial(): Promise<void> {
    if (!this.sessionId) throw new Error("start() first");
    this.stopAuto();
    try {
      const response = await this.api.nextTrial(this.sessionId);
      if (response.status === "exhausted") {
        this.phase = "exhausted";
        this.trial = null;
        this.replay = null;
      } else {
        this.trial = response.trial;
        this.replay = newReplay(response.trial.sequence);
        this.phase = "replaying";
      }
      this.lastError = null;
      this.pendingAction = null;
    } catch (err) {
      this.fail("load", err);
      return;
    }
    this.render();
  }

  stepReplay(): void {
    if (this.phase !== "replaying" || !this.replay) return;
    this.replay = step(this.replay);
    if (isComplete(this.replay)) this.stopAuto();
    this.render();
  }

  revealAll(): void {
    if (!this.replay) return;
    while (!isComplete(this.replay)) this.replay = step(this.replay);
    this.stopAuto();
    this.render();
  }

  toggleAuto(): void {
    if (this.autoTimer) {
      this.stopAuto();
      return;
    }
    const interval = this.options.autoAdvanceMs ?? 700;
    this.autoTimer = setInterval(() => this.stepReplay(), interval);
  }

  private stopAuto(): void {
    if (this.autoTimer) {
      clearInterval(this.autoTimer);
      this.autoTimer = null;
    }
  }

  async submitVerdict(verdict: Verdict): Promise<void> {
    if (!this.sessionId || !this.trial || !this.replay) return;
    if (!verdictEnabled(this.replay)) return; // gated until fully shown
    this.phase = "submitting";
    this.pendingVerdict = verdict;
    this.render();
    try {
      await this.api.submitJudgment(this.sessionId, this.trial.trial_id, verdict);
    } catch (err) {
      this.fail("submit", err);
      return;
    }
    this.trialsCompleted += 1;
    this.pendingVerdict = null;
    await this.loadNextTrial();
  }

  /** Re-run the failed request; the replay position is untouched. */
  async retry(): Promise<void> {
    const action = this.pendingAction;
    this.pendingAction = null;
    if (action === "submit" && this.pendingVerdict) {
      this.phase = "replaying";
      await this.submitVerdict(this.pendingVerdict);
    } else {
      await this.loadNextTrial();
    }
  }

  async showDashboard(): Promise<void> {
    this.stopAuto();
    try {
      const results = await this.api.results(this.options.pair ?? ["beam_3", "beam_n"]);
      this.phase = "dashboard";
      this.render(results);
    } catch (err) {
      this.fail("load", err);
    }
  }

  private fail(action: "load" | "submit", err: unknown): void {
    this.phase = "error";
    this.pendingAction = action;
    this.lastError = err instanceof Error ? err.message : String(err);
    this.render();
  }

  // -- rendering -----------------------------------------------------------

  private render(results?: Parameters<typeof renderDashboard>[1]): void {
    const doc = this.doc;
    this.root.textContent = "";
    switch (this.phase) {
      case "replaying":
      case "submitting":
        this.root.appendChild(this.renderTrial());
        break;
      case "error": {
        const box = doc.createElement("section");
        box.className = "error-screen";
        const message = doc.createElement("p");
        message.className = "status-line";
        message.textContent = `Request failed (${this.lastError ?? "network error"}).`;
        const retry = doc.createElement("button");
        retry.id = "retry-btn";
        retry.textContent = "Retry";
        retry.addEventListener("click", () => void this.retry());
        box.append(message, retry);
        // keep the replay visible so no progress is lost
        if (this.trial && this.replay) box.appendChild(this.renderTrial());
        this.root.appendChild(box);
        break;
      }
      case "exhausted": {
        const end = doc.createElement("section");
        end.className = "end-screen";
        const message = doc.createElement("p");
        message.textContent = `All done - you rated ${this.trialsCompleted} sequences. Thank you!`;
        const dash = doc.createElement("button");
        dash.id = "to-dashboard-btn";
        dash.textContent = "See results";
        dash.addEventListener("click", () => void this.showDashboard());
        end.append(message, dash);
        this.root.appendChild(end);
        break;
      }
      case "dashboard":
        if (results) this.root.appendChild(renderDashboard(doc, results));
        break;
      default:
        break;
    }
  }

  private renderTrial(): HTMLElement {
    const doc = this.doc;
    const trial = this.trial;
    const replay = this.replay;
    if (!trial || !replay) throw new Error("no active trial");

    const section = doc.createElement("section");
    section.className = "trial";

    const progress = doc.createElement("p");
    progress.className = "trial-progress";
    progress.textContent =
      `Sequence ${this.trialsCompleted + 1} - ` +
      `${replay.shown}/${replay.sequence.length} objects shown`;
    section.appendChild(progress);

    const scene = renderScene(doc, trial);
    updateHighlights(scene, replay);
    section.appendChild(scene);
    section.appendChild(renderPickedList(doc, trial, replay));

    const controls = doc.createElement("div");
    controls.className = "controls";
    const stepBtn = doc.createElement("button");
    stepBtn.id = "step-btn";
    stepBtn.textContent = "Next object";
    stepBtn.disabled = isComplete(replay) || this.phase !== "replaying";
    stepBtn.addEventListener("click", () => this.stepReplay());
    controls.appendChild(stepBtn);
    if (this.options.autoAdvanceMs !== null) {
      const autoBtn = doc.createElement("button");
      autoBtn.id = "auto-btn";
      autoBtn.textContent = this.autoTimer ? "Pause" : "Auto-play";
      autoBtn.disabled = isComplete(replay) || this.phase !== "replaying";
      autoBtn.addEventListener("click", () => {
        this.toggleAuto();
        this.render();
      });
      controls.appendChild(autoBtn);
    }
    section.appendChild(controls);

    const verdict = doc.createElement("div");
    verdict.className = "verdict";
    const question = doc.createElement("p");
    question.textContent = "Who packed this box?";
    verdict.appendChild(question);
    const enabled = verdictEnabled(replay) && this.phase === "replaying";
    for (const [id, label, value] of [
      ["verdict-human", "A person", "human_generated"],
      ["verdict-computer", "A computer", "computer_generated"],
    ] as const) {
      const button = doc.createElement("button");
      button.id = id;
      button.textContent = label;
      button.disabled = !enabled;
      button.addEventListener("click", () => void this.submitVerdict(value));
      verdict.appendChild(button);
    }
    section.appendChild(verdict);
    return section;
  }
}
