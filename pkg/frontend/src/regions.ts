/**
 * Draft region arithmetic: snapping to the metric grid and merging.
 *
 * Region handles snap to a 20 ms grid so every submitted boundary is an
 * exact multiple of the evaluation's fine segment resolution, and
 * overlapping drafts merge so the submitted list always satisfies the
 * server's non-overlap validation.
 */

import type { RegionPair, Verdict } from "./types.js";

/** Snap grid in seconds; equals the fine metric resolution (20 ms). */
export const SNAP_GRID = 0.02;

export interface DraftRegion {
  onset: number;
  offset: number;
}

/** Nearest grid point; k * SNAP_GRID exactly, so grid values round-trip. */
export function snapTime(t: number): number {
  return Math.round(t / SNAP_GRID) * SNAP_GRID;
}

/** Largest grid point that does not exceed the clip duration. */
export function snapFloor(duration: number): number {
  return Math.floor((duration + 1e-9) / SNAP_GRID) * SNAP_GRID;
}

/**
 * Snap a raw drag onto the grid inside [0, duration]. Returns null when
 * the snapped region collapses (a degenerate sub-grid drag).
 */
export function snapRegion(
  onset: number,
  offset: number,
  duration: number,
): DraftRegion | null {
  const lo = Math.min(onset, offset);
  const hi = Math.max(onset, offset);
  const maxOffset = snapFloor(duration);
  const snappedOnset = Math.min(Math.max(snapTime(lo), 0), maxOffset);
  const snappedOffset = Math.min(Math.max(snapTime(hi), 0), maxOffset);
  if (snappedOffset <= snappedOnset) {
    return null;
  }
  return { onset: snappedOnset, offset: snappedOffset };
}

/** Merge overlapping or touching regions; result is sorted and disjoint. */
export function mergeRegions(regions: DraftRegion[]): DraftRegion[] {
  const sorted = [...regions].sort((a, b) => a.onset - b.onset);
  const merged: DraftRegion[] = [];
  for (const region of sorted) {
    const last = merged[merged.length - 1];
    if (last !== undefined && region.onset <= last.offset) {
      last.offset = Math.max(last.offset, region.offset);
    } else {
      merged.push({ ...region });
    }
  }
  return merged;
}

/** Snap a new drag and fold it into the existing draft list. */
export function addRegion(
  regions: DraftRegion[],
  onset: number,
  offset: number,
  duration: number,
): DraftRegion[] {
  const snapped = snapRegion(onset, offset, duration);
  if (snapped === null) {
    return regions;
  }
  return mergeRegions([...regions, snapped]);
}

export function removeRegion(regions: DraftRegion[], index: number): DraftRegion[] {
  return regions.filter((_, i) => i !== index);
}

/** Wire format for submission. */
export function toPairs(regions: DraftRegion[]): RegionPair[] {
  return regions.map((r) => [r.onset, r.offset]);
}

/**
 * Client mirror of the server's submit validation. Returns a message to
 * show the evaluator, or null when the draft is submittable.
 */
export function validateDraft(
  verdict: Verdict | "undecided",
  regions: DraftRegion[],
): string | null {
  if (verdict === "undecided") {
    return "Choose genuine or fake before submitting.";
  }
  if (verdict === "genuine" && regions.length > 0) {
    return "A genuine verdict cannot carry fake regions; clear them first.";
  }
  return null;
}

export function formatSeconds(t: number): string {
  return `${t.toFixed(2)} s`;
}
