/**
 * Node-side fixture builders for the end-to-end test: PCM16 WAV files
 * and JSONL manifests in the exact shapes the Python service consumes.
 *
 * All region boundaries are constructed as k * 0.02 with integer k, so
 * they are exact grid points: the UI's snapping must pass them through
 * unchanged, and the server must score an echo of them as a perfect
 * match.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

export const SAMPLE_RATE = 16000;

export interface FixtureClip {
  clip_id: string;
  caption: string;
  duration: number;
  audio_path: string;
  label: "genuine" | "fake";
  fake_regions: [number, number][];
}

/** Exact grid point: k steps of 20 ms. */
export function grid(k: number): number {
  return k * 0.02;
}

export function writeWav(path: string, samples: Float32Array, sampleRate: number): void {
  const n = samples.length;
  const buffer = Buffer.alloc(44 + 2 * n);
  buffer.write("RIFF", 0, "ascii");
  buffer.writeUInt32LE(36 + 2 * n, 4);
  buffer.write("WAVE", 8, "ascii");
  buffer.write("fmt ", 12, "ascii");
  buffer.writeUInt32LE(16, 16);
  buffer.writeUInt16LE(1, 20); // PCM
  buffer.writeUInt16LE(1, 22); // mono
  buffer.writeUInt32LE(sampleRate, 24);
  buffer.writeUInt32LE(sampleRate * 2, 28);
  buffer.writeUInt16LE(2, 32);
  buffer.writeUInt16LE(16, 34);
  buffer.write("data", 36, "ascii");
  buffer.writeUInt32LE(2 * n, 40);
  for (let i = 0; i < n; i++) {
    const clamped = Math.max(-1, Math.min(1, samples[i]!));
    const scaled = Math.max(-32768, Math.min(32767, Math.round(clamped * 32768)));
    buffer.writeInt16LE(scaled, 44 + 2 * i);
  }
  writeFileSync(path, buffer);
}

function tone(duration: number, freq: number): Float32Array {
  const n = Math.round(duration * SAMPLE_RATE);
  const samples = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    samples[i] = 0.4 * Math.sin((2 * Math.PI * freq * i) / SAMPLE_RATE);
  }
  return samples;
}

/**
 * Write one test set: `<dir>/<name>.jsonl` plus `<dir>/audio/*.wav`.
 * Fake clips carry one or two grid-aligned regions inside 3 s clips.
 */
export function buildSet(
  dir: string,
  name: string,
  nFake: number,
  nGenuine: number,
): FixtureClip[] {
  mkdirSync(join(dir, "audio"), { recursive: true });
  const clips: FixtureClip[] = [];
  const duration = 3.0;
  for (let i = 0; i < nFake + nGenuine; i++) {
    const clipId = `${name}-${String(i).padStart(2, "0")}`;
    const isFake = i < nFake;
    const regions: [number, number][] = [];
    if (isFake) {
      const k0 = 10 + 5 * (i % 8);
      regions.push([grid(k0), grid(k0 + 40)]);
      if (i % 3 === 0) {
        regions.push([grid(k0 + 50), grid(k0 + 65)]);
      }
    }
    const audioPath = `audio/${clipId}.wav`;
    writeWav(join(dir, audioPath), tone(duration, 180 + 23 * i), SAMPLE_RATE);
    clips.push({
      clip_id: clipId,
      caption: `a sustained hum, ${name} take ${i}`,
      duration,
      audio_path: audioPath,
      label: isFake ? "fake" : "genuine",
      fake_regions: regions,
    });
  }
  const manifest = clips.map((clip) => JSON.stringify(clip)).join("\n") + "\n";
  writeFileSync(join(dir, `${name}.jsonl`), manifest);
  return clips;
}

/** Every distinct object key in a JSON payload, at any depth. */
export function collectKeys(value: unknown, keys = new Set<string>()): Set<string> {
  if (Array.isArray(value)) {
    for (const item of value) {
      collectKeys(item, keys);
    }
  } else if (value !== null && typeof value === "object") {
    for (const [key, item] of Object.entries(value as Record<string, unknown>)) {
      keys.add(key);
      collectKeys(item, keys);
    }
  }
  return keys;
}
