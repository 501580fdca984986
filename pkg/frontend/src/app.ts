/**
 * Evaluator session flow: load the assigned task list, play each clip,
 * collect a verdict plus perceived fake regions, and submit.
 *
 * State changes go through public methods (setVerdict, markRegion,
 * submitCurrent, ...) so the flow is drivable without pointer events;
 * the DOM layer renders from state and delegates to those methods.
 * Drafts persist locally per clip, and submissions that fail on the
 * network are queued and retried, so a reload never loses work.
 */

import { ApiError, isRetryable, type SessionApi } from "./api.js";
import {
  addRegion,
  formatSeconds,
  removeRegion,
  toPairs,
  validateDraft,
  type DraftRegion,
} from "./regions.js";
import {
  DraftStore,
  RetryQueue,
  defaultStore,
  type KeyValueStore,
  type StoredDraft,
} from "./storage.js";
import {
  RegionDrag,
  drawTimeline,
  peaksFromAudio,
  timeAtX,
  type TimelineGeometry,
} from "./timeline.js";
import type { SessionPayload, SubmitRequest, TaskPayload, Verdict } from "./types.js";

const TIMELINE_HEIGHT = 96;
const WAVEFORM_BUCKETS = 400;

export interface AppOptions {
  api: SessionApi;
  evaluatorId: string;
  store?: KeyValueStore;
}

interface TaskState {
  task: TaskPayload;
  submitted: boolean;
}

export class App {
  readonly api: SessionApi;
  readonly evaluatorId: string;
  private readonly drafts: DraftStore;
  private readonly queue: RetryQueue;

  private root: HTMLElement | null = null;
  private session: SessionPayload | null = null;
  private tasks: TaskState[] = [];
  private currentIndex = 0;
  private verdict: Verdict | "undecided" = "undecided";
  private regions: DraftRegion[] = [];
  private position = 0;
  private message = "";
  private peaks: Float32Array | null = null;
  private readonly drag = new RegionDrag();

  constructor(options: AppOptions) {
    this.api = options.api;
    this.evaluatorId = options.evaluatorId;
    const store = options.store ?? defaultStore();
    this.drafts = new DraftStore(store, options.evaluatorId);
    this.queue = new RetryQueue(store, options.evaluatorId);
  }

  // ----- state accessors (also used by tests) -----

  get currentTask(): TaskPayload | null {
    return this.tasks[this.currentIndex]?.task ?? null;
  }

  get currentVerdict(): Verdict | "undecided" {
    return this.verdict;
  }

  get currentRegions(): DraftRegion[] {
    return [...this.regions];
  }

  get completedCount(): number {
    return this.tasks.filter((t) => t.submitted).length;
  }

  get statusMessage(): string {
    return this.message;
  }

  // ----- session flow -----

  async mount(root: HTMLElement): Promise<void> {
    this.root = root;
    root.textContent = "Loading session…";
    try {
      this.session = await this.api.loadSession(this.evaluatorId);
    } catch (error) {
      this.renderError(error);
      return;
    }
    this.tasks = this.session.tasks.map((task) => ({ task, submitted: task.submitted }));
    this.selectTask(this.firstOpenIndex());
    await this.flushQueue();
    this.render();
  }

  private firstOpenIndex(): number {
    const open = this.tasks.findIndex((t) => !t.submitted);
    return open === -1 ? Math.max(this.tasks.length - 1, 0) : open;
  }

  selectTask(index: number): void {
    if (index < 0 || index >= this.tasks.length) {
      return;
    }
    this.currentIndex = index;
    this.message = "";
    this.peaks = null;
    const task = this.tasks[index]!.task;
    const draft = this.drafts.load(task.clip_id);
    this.verdict = draft?.verdict ?? "undecided";
    this.regions = draft?.regions ?? [];
    this.position = draft?.position ?? 0;
    this.render();
    void this.loadPeaks(task);
  }

  setVerdict(verdict: Verdict): void {
    this.verdict = verdict;
    this.message = "";
    this.saveDraft();
    this.render();
  }

  /** Add one drag's region (raw seconds; snapping happens here). */
  markRegion(onset: number, offset: number): void {
    const task = this.currentTask;
    if (task === null) {
      return;
    }
    this.regions = addRegion(this.regions, onset, offset, task.duration);
    this.saveDraft();
    this.render();
  }

  deleteRegion(index: number): void {
    this.regions = removeRegion(this.regions, index);
    this.saveDraft();
    this.render();
  }

  rememberPosition(position: number): void {
    this.position = position;
    this.saveDraft();
  }

  private saveDraft(): void {
    const task = this.currentTask;
    if (task === null) {
      return;
    }
    const draft: StoredDraft = {
      clip_id: task.clip_id,
      verdict: this.verdict,
      regions: this.regions,
      position: this.position,
    };
    this.drafts.save(draft);
  }

  /**
   * Validate and submit the current draft. Retryable failures are
   * queued and the task optimistically locked; validation failures
   * (client- or server-side) keep the task open and show the reason.
   */
  async submitCurrent(): Promise<boolean> {
    const state = this.tasks[this.currentIndex];
    if (state === undefined) {
      return false;
    }
    const blocked = validateDraft(this.verdict, this.regions);
    if (blocked !== null) {
      this.message = blocked;
      this.render();
      return false;
    }
    const request: SubmitRequest = {
      clip_id: state.task.clip_id,
      label: this.verdict as Verdict,
      regions: this.verdict === "fake" ? toPairs(this.regions) : [],
    };
    try {
      await this.api.submit(this.evaluatorId, request);
    } catch (error) {
      if (isRetryable(error)) {
        this.queue.push(request);
        state.submitted = true;
        // Set the banner after advancing: selecting a task clears it.
        this.advance();
        this.message = "Saved offline — will retry when the connection returns.";
        this.render();
        return true;
      }
      this.message = error instanceof ApiError ? error.message : String(error);
      this.render();
      return false;
    }
    state.submitted = true;
    this.drafts.clear(state.task.clip_id);
    this.message = "";
    await this.flushQueue();
    this.advance();
    return true;
  }

  /** Re-send queued offline submissions; clears drafts on success. */
  async flushQueue(): Promise<number> {
    return this.queue.flush(async (request) => {
      await this.api.submit(this.evaluatorId, request);
      this.drafts.clear(request.clip_id);
    });
  }

  private advance(): void {
    const next = this.tasks.findIndex((t) => !t.submitted);
    if (next === -1) {
      this.currentIndex = this.tasks.length - 1;
      this.render();
    } else {
      this.selectTask(next);
    }
  }

  private async loadPeaks(task: TaskPayload): Promise<void> {
    try {
      const res = await fetch(this.api.audioUrl(task));
      if (!res.ok) {
        return;
      }
      this.peaks = await peaksFromAudio(await res.arrayBuffer(), WAVEFORM_BUCKETS);
    } catch {
      this.peaks = null;
    }
    if (this.currentTask === task) {
      this.render();
    }
  }

  // ----- rendering -----

  private renderError(error: unknown): void {
    if (this.root === null) {
      return;
    }
    const detail =
      error instanceof ApiError ? error.message : "The service is unreachable.";
    this.root.innerHTML = "";
    const panel = el("div", "error-screen");
    panel.setAttribute("data-testid", "error-screen");
    panel.append(
      el("h2", "", "Cannot load session"),
      el("p", "", detail),
      el("p", "", "Check the evaluator id in the address bar and reload."),
    );
    this.root.append(panel);
  }

  private render(): void {
    if (this.root === null || this.session === null) {
      return;
    }
    this.root.innerHTML = "";
    this.root.append(this.renderHeader(), this.renderTaskList(), this.renderPanel());
  }

  private renderHeader(): HTMLElement {
    const header = el("header", "app-header");
    header.append(
      el("h1", "", "Listening test"),
      el(
        "p",
        "progress",
        `Evaluator ${this.evaluatorId} — ${this.completedCount} of ${this.tasks.length} clips done`,
      ),
    );
    const progress = header.querySelector("p")!;
    progress.setAttribute("data-testid", "progress");
    return header;
  }

  private renderTaskList(): HTMLElement {
    const list = el("ol", "task-list");
    list.setAttribute("data-testid", "task-list");
    this.tasks.forEach((state, index) => {
      const item = el("li", state.submitted ? "task done" : "task");
      if (index === this.currentIndex) {
        item.className += " active";
      }
      const button = el("button", "", `Clip ${index + 1}`) as HTMLButtonElement;
      button.addEventListener("click", () => this.selectTask(index));
      item.append(button, el("span", "state", state.submitted ? "✓" : ""));
      list.append(item);
    });
    return list;
  }

  private renderPanel(): HTMLElement {
    const panel = el("section", "task-panel");
    const state = this.tasks[this.currentIndex];
    if (state === undefined) {
      panel.append(el("p", "", "No tasks assigned."));
      return panel;
    }
    const { task } = state;

    panel.append(el("h2", "caption", `“${task.caption}”`));
    panel.append(
      el("p", "hint", `Clip length ${formatSeconds(task.duration)}. Listen, then decide.`),
    );

    const audio = document.createElement("audio");
    audio.controls = true;
    audio.src = this.api.audioUrl(task);
    audio.currentTime = this.position;
    audio.addEventListener("timeupdate", () => this.rememberPosition(audio.currentTime));
    panel.append(audio);

    panel.append(this.renderTimeline(task));
    panel.append(this.renderVerdicts(state));
    panel.append(this.renderRegions(state));

    if (this.message !== "") {
      const note = el("p", "message", this.message);
      note.setAttribute("data-testid", "message");
      panel.append(note);
    }

    const submit = el("button", "submit", state.submitted ? "Submitted" : "Submit") as HTMLButtonElement;
    submit.setAttribute("data-testid", "submit");
    submit.disabled = state.submitted;
    submit.addEventListener("click", () => void this.submitCurrent());
    panel.append(submit);
    return panel;
  }

  private renderTimeline(task: TaskPayload): HTMLElement {
    const wrap = el("div", "timeline");
    const canvas = document.createElement("canvas");
    const geometry: TimelineGeometry = { width: 800, duration: task.duration };
    canvas.width = geometry.width;
    canvas.height = TIMELINE_HEIGHT;
    canvas.setAttribute("data-testid", "timeline");

    const paint = () =>
      drawTimeline(canvas, geometry, {
        peaks: this.peaks,
        regions: this.regions,
        preview: this.drag.preview(),
        position: this.position,
      });

    canvas.addEventListener("pointerdown", (event) => {
      canvas.setPointerCapture?.(event.pointerId);
      this.drag.begin(timeAtX(geometry, event.offsetX));
      paint();
    });
    canvas.addEventListener("pointermove", (event) => {
      if (this.drag.active) {
        this.drag.update(timeAtX(geometry, event.offsetX));
        paint();
      }
    });
    canvas.addEventListener("pointerup", () => {
      const region = this.drag.end(task.duration);
      if (region !== null) {
        this.markRegion(region.onset, region.offset);
      }
    });
    canvas.addEventListener("pointercancel", () => this.drag.cancel());

    paint();
    wrap.append(canvas, el("p", "hint", "Drag across the timeline to mark a fake region."));
    return wrap;
  }

  private renderVerdicts(state: TaskState): HTMLElement {
    const row = el("div", "verdicts");
    for (const verdict of ["genuine", "fake"] as const) {
      const button = el(
        "button",
        this.verdict === verdict ? "verdict selected" : "verdict",
        verdict,
      ) as HTMLButtonElement;
      button.setAttribute("data-testid", `verdict-${verdict}`);
      button.disabled = state.submitted;
      button.addEventListener("click", () => this.setVerdict(verdict));
      row.append(button);
    }
    return row;
  }

  private renderRegions(state: TaskState): HTMLElement {
    const wrap = el("div", "regions");
    const list = el("ul", "region-list");
    list.setAttribute("data-testid", "region-list");
    this.regions.forEach((region, index) => {
      const item = el(
        "li",
        "region",
        `${formatSeconds(region.onset)} – ${formatSeconds(region.offset)} `,
      );
      const remove = el("button", "remove", "remove") as HTMLButtonElement;
      remove.disabled = state.submitted;
      remove.addEventListener("click", () => this.deleteRegion(index));
      item.append(remove);
      list.append(item);
    });
    wrap.append(list);
    return wrap;
  }
}

function el(tag: string, className = "", text = ""): HTMLElement {
  const node = document.createElement(tag);
  if (className !== "") {
    node.className = className;
  }
  if (text !== "") {
    node.textContent = text;
  }
  return node;
}
