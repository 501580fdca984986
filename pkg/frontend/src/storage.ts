/**
 * Local persistence: per-clip drafts and a retry queue for submissions
 * that failed on the network. Both survive a tab reload via
 * localStorage; a Map-backed store stands in where localStorage is
 * unavailable (tests, non-browser runs).
 */

import type { DraftRegion } from "./regions.js";
import type { SubmitRequest, Verdict } from "./types.js";

export interface KeyValueStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
  removeItem(key: string): void;
}

export class MemoryStore implements KeyValueStore {
  private map = new Map<string, string>();

  getItem(key: string): string | null {
    return this.map.get(key) ?? null;
  }

  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }

  removeItem(key: string): void {
    this.map.delete(key);
  }
}

export function defaultStore(): KeyValueStore {
  if (typeof localStorage !== "undefined") {
    return localStorage;
  }
  return new MemoryStore();
}

export interface StoredDraft {
  clip_id: string;
  verdict: Verdict | "undecided";
  regions: DraftRegion[];
  /** Last playback position in seconds, restored on reload. */
  position: number;
}

export class DraftStore {
  constructor(
    private readonly store: KeyValueStore,
    private readonly evaluatorId: string,
  ) {}

  private key(clipId: string): string {
    return `fakebench:draft:${this.evaluatorId}:${clipId}`;
  }

  save(draft: StoredDraft): void {
    this.store.setItem(this.key(draft.clip_id), JSON.stringify(draft));
  }

  load(clipId: string): StoredDraft | null {
    const raw = this.store.getItem(this.key(clipId));
    if (raw === null) {
      return null;
    }
    try {
      return JSON.parse(raw) as StoredDraft;
    } catch {
      return null;
    }
  }

  clear(clipId: string): void {
    this.store.removeItem(this.key(clipId));
  }
}

/**
 * Submissions that could not reach the server, in submission order.
 * Pushing a second entry for the same clip replaces the first (the
 * server resolves duplicates latest-wins, so the queue does too).
 */
export class RetryQueue {
  private readonly key: string;

  constructor(
    private readonly store: KeyValueStore,
    evaluatorId: string,
  ) {
    this.key = `fakebench:queue:${evaluatorId}`;
  }

  pending(): SubmitRequest[] {
    const raw = this.store.getItem(this.key);
    if (raw === null) {
      return [];
    }
    try {
      return JSON.parse(raw) as SubmitRequest[];
    } catch {
      return [];
    }
  }

  private write(entries: SubmitRequest[]): void {
    if (entries.length === 0) {
      this.store.removeItem(this.key);
    } else {
      this.store.setItem(this.key, JSON.stringify(entries));
    }
  }

  push(request: SubmitRequest): void {
    const entries = this.pending().filter((e) => e.clip_id !== request.clip_id);
    entries.push(request);
    this.write(entries);
  }

  /**
   * Send queued submissions in order; stops at the first failure so
   * order is preserved. Returns how many were flushed. The queue is
   * rewritten after every success, so a crash mid-flush loses nothing.
   */
  async flush(submit: (request: SubmitRequest) => Promise<unknown>): Promise<number> {
    let flushed = 0;
    let entries = this.pending();
    while (entries.length > 0) {
      const head = entries[0]!;
      try {
        await submit(head);
      } catch {
        break;
      }
      entries = entries.slice(1);
      this.write(entries);
      flushed += 1;
    }
    return flushed;
  }
}
