/**
 * Timeline geometry and the drag gesture that creates regions.
 *
 * The math (pixel/second mapping, drag tracking, waveform peak
 * reduction) is kept free of DOM types so it can be tested headlessly;
 * rendering is a thin canvas layer on top.
 */

import { snapRegion, type DraftRegion } from "./regions.js";

export interface TimelineGeometry {
  /** Drawable width in CSS pixels. */
  width: number;
  /** Clip duration in seconds. */
  duration: number;
}

export function timeAtX(geometry: TimelineGeometry, x: number): number {
  const clamped = Math.min(Math.max(x, 0), geometry.width);
  return (clamped / geometry.width) * geometry.duration;
}

export function xAtTime(geometry: TimelineGeometry, t: number): number {
  return (t / geometry.duration) * geometry.width;
}

/**
 * One press-drag-release gesture. Feed it pointer times; `end` yields
 * the snapped region, or null for a degenerate (sub-grid) drag.
 */
export class RegionDrag {
  private anchor: number | null = null;
  private latest = 0;

  get active(): boolean {
    return this.anchor !== null;
  }

  begin(t: number): void {
    this.anchor = t;
    this.latest = t;
  }

  update(t: number): void {
    if (this.anchor !== null) {
      this.latest = t;
    }
  }

  /** Unsnapped live preview while dragging, for rendering. */
  preview(): DraftRegion | null {
    if (this.anchor === null) {
      return null;
    }
    return {
      onset: Math.min(this.anchor, this.latest),
      offset: Math.max(this.anchor, this.latest),
    };
  }

  end(duration: number): DraftRegion | null {
    if (this.anchor === null) {
      return null;
    }
    const region = snapRegion(this.anchor, this.latest, duration);
    this.anchor = null;
    return region;
  }

  cancel(): void {
    this.anchor = null;
  }
}

/** Max absolute amplitude per bucket, for a simple bar waveform. */
export function computePeaks(samples: Float32Array, buckets: number): Float32Array {
  const peaks = new Float32Array(buckets);
  if (samples.length === 0 || buckets === 0) {
    return peaks;
  }
  const perBucket = samples.length / buckets;
  for (let b = 0; b < buckets; b++) {
    const start = Math.floor(b * perBucket);
    const end = Math.min(Math.max(Math.floor((b + 1) * perBucket), start + 1), samples.length);
    let peak = 0;
    for (let i = start; i < end; i++) {
      const magnitude = Math.abs(samples[i]!);
      if (magnitude > peak) {
        peak = magnitude;
      }
    }
    peaks[b] = peak;
  }
  return peaks;
}

export interface TimelinePaint {
  peaks: Float32Array | null;
  regions: DraftRegion[];
  preview: DraftRegion | null;
  /** Playback position in seconds, or null to hide the cursor. */
  position: number | null;
}

/** Draw waveform bars, region overlays and the playback cursor. */
export function drawTimeline(
  canvas: HTMLCanvasElement,
  geometry: TimelineGeometry,
  paint: TimelinePaint,
): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    return;
  }
  const { width } = geometry;
  const height = canvas.height;
  ctx.clearRect(0, 0, width, height);

  ctx.fillStyle = "#e8ecf1";
  ctx.fillRect(0, 0, width, height);

  if (paint.peaks !== null) {
    ctx.fillStyle = "#4a6b8a";
    const mid = height / 2;
    const barWidth = width / paint.peaks.length;
    for (let i = 0; i < paint.peaks.length; i++) {
      const bar = Math.max(paint.peaks[i]! * mid, 1);
      ctx.fillRect(i * barWidth, mid - bar, Math.max(barWidth - 1, 1), bar * 2);
    }
  }

  ctx.fillStyle = "rgba(214, 69, 65, 0.35)";
  for (const region of paint.regions) {
    const x0 = xAtTime(geometry, region.onset);
    const x1 = xAtTime(geometry, region.offset);
    ctx.fillRect(x0, 0, Math.max(x1 - x0, 1), height);
  }

  if (paint.preview !== null) {
    ctx.fillStyle = "rgba(214, 69, 65, 0.18)";
    const x0 = xAtTime(geometry, paint.preview.onset);
    const x1 = xAtTime(geometry, paint.preview.offset);
    ctx.fillRect(x0, 0, Math.max(x1 - x0, 1), height);
  }

  if (paint.position !== null) {
    ctx.fillStyle = "#1a1a1a";
    ctx.fillRect(xAtTime(geometry, paint.position) - 1, 0, 2, height);
  }
}

/** Decode a WAV response into peaks; null when decoding is unavailable. */
export async function peaksFromAudio(
  data: ArrayBuffer,
  buckets: number,
): Promise<Float32Array | null> {
  if (typeof AudioContext === "undefined") {
    return null;
  }
  const context = new AudioContext();
  try {
    const decoded = await context.decodeAudioData(data);
    return computePeaks(decoded.getChannelData(0), buckets);
  } catch {
    return null;
  } finally {
    void context.close();
  }
}
