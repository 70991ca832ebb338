import { AnimatorApi } from "./api.js";
import type { EnabledEvent, Snapshot } from "./types.js";
import { renderSnapshot, renderToast, type ViewHandlers } from "./view.js";

const TOAST_MS = 4000;

/** Session controller: holds the latest snapshot, re-renders after every
 * server round-trip, and never updates optimistically. */
export class AnimatorApp {
  snapshot: Snapshot | null = null;
  private sessionId = "";

  constructor(
    readonly api: AnimatorApi,
    readonly root: HTMLElement,
    readonly toastHost: HTMLElement,
  ) {}

  async start(specName: string): Promise<void> {
    const created = await this.api.createSession(specName);
    this.sessionId = created.sessionId;
    this.apply(created.snapshot);
  }

  apply(snapshot: Snapshot): void {
    this.snapshot = snapshot;
    this.root.replaceChildren(renderSnapshot(snapshot, this.handlers()));
  }

  private handlers(): ViewHandlers {
    return {
      onEvent: (event, choiceIndex) => void this.fireEvent(event, choiceIndex),
      onUndoTo: (prefixLength) => void this.undoTo(prefixLength),
      onUndo: () => void this.undoOnce(),
      onReset: () => void this.resetSession(),
    };
  }

  async fireEvent(event: EnabledEvent, choiceIndex: number): Promise<void> {
    const result = await this.api.step(
      this.sessionId,
      { label: event.label, args: event.args },
      choiceIndex,
    );
    if (result.ok) {
      this.apply(result.snapshot);
    } else {
      this.showToast(result.reason);
    }
  }

  /** Click-to-undo to a trace prefix, implemented as repeated undo. */
  async undoTo(prefixLength: number): Promise<void> {
    let current = this.snapshot;
    while (current && current.trace.length > prefixLength) {
      current = await this.api.undo(this.sessionId);
      this.apply(current);
    }
  }

  async undoOnce(): Promise<void> {
    this.apply(await this.api.undo(this.sessionId));
  }

  async resetSession(): Promise<void> {
    this.apply(await this.api.reset(this.sessionId));
  }

  showToast(reason: string): void {
    const toast = renderToast(reason);
    this.toastHost.appendChild(toast);
    setTimeout(() => toast.remove(), TOAST_MS);
  }
}
