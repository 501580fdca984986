import { describe, expect, it } from "vitest";

import {
  SNAP_GRID,
  addRegion,
  mergeRegions,
  removeRegion,
  snapFloor,
  snapRegion,
  snapTime,
  toPairs,
  validateDraft,
} from "../src/regions.js";

describe("snapTime", () => {
  it("snaps to the nearest 20 ms grid point", () => {
    expect(snapTime(1.003)).toBeCloseTo(1.0, 12);
    expect(snapTime(1.011)).toBeCloseTo(1.02, 12);
    expect(snapTime(0.009)).toBe(0.0);
  });

  it("is the identity on grid points, bit for bit", () => {
    for (let k = 0; k <= 500; k++) {
      const value = k * SNAP_GRID;
      expect(snapTime(value)).toBe(value);
    }
  });

  it("produces exact multiples of the grid", () => {
    for (const t of [0.0107, 1.2345, 2.9999, 0.5551]) {
      const snapped = snapTime(t);
      expect(snapped).toBe(Math.round(snapped / SNAP_GRID) * SNAP_GRID);
    }
  });
});

describe("snapRegion", () => {
  it("snaps both ends and orders them", () => {
    const region = snapRegion(3.001, 0.999, 5.0);
    expect(region).toEqual({ onset: 1.0, offset: 3.0 });
  });

  it("returns null for a degenerate sub-grid drag", () => {
    expect(snapRegion(1.001, 1.004, 5.0)).toBeNull();
  });

  it("clamps to the clip and never exceeds the duration", () => {
    const region = snapRegion(-0.5, 99.0, 3.17);
    expect(region).not.toBeNull();
    expect(region!.onset).toBe(0.0);
    expect(region!.offset).toBeLessThanOrEqual(3.17);
    expect(region!.offset).toBe(snapFloor(3.17));
  });

  it("keeps a whole-clip drag on a grid-length clip exact", () => {
    expect(snapRegion(0, 3.0, 3.0)).toEqual({ onset: 0.0, offset: 3.0 });
  });
});

describe("mergeRegions", () => {
  it("merges two overlapping drags into one region", () => {
    const merged = mergeRegions([
      { onset: 1.0, offset: 2.0 },
      { onset: 1.5, offset: 3.0 },
    ]);
    expect(merged).toEqual([{ onset: 1.0, offset: 3.0 }]);
  });

  it("merges touching regions and keeps disjoint ones apart", () => {
    const merged = mergeRegions([
      { onset: 2.0, offset: 2.5 },
      { onset: 0.2, offset: 1.0 },
      { onset: 1.0, offset: 1.4 },
    ]);
    expect(merged).toEqual([
      { onset: 0.2, offset: 1.4 },
      { onset: 2.0, offset: 2.5 },
    ]);
  });

  it("leaves the input untouched", () => {
    const input = [
      { onset: 1.0, offset: 2.0 },
      { onset: 0.0, offset: 0.5 },
    ];
    mergeRegions(input);
    expect(input[0]).toEqual({ onset: 1.0, offset: 2.0 });
  });

  it("result is always sorted and strictly disjoint", () => {
    let seed = 42;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    for (let trial = 0; trial < 200; trial++) {
      const raw = Array.from({ length: 1 + (trial % 6) }, () => {
        const a = rand() * 10;
        const b = a + rand() * 3;
        return { onset: a, offset: b };
      });
      const merged = mergeRegions(raw);
      for (let i = 1; i < merged.length; i++) {
        expect(merged[i]!.onset).toBeGreaterThan(merged[i - 1]!.offset);
      }
    }
  });
});

describe("addRegion", () => {
  it("snaps the new drag before folding it in", () => {
    const regions = addRegion([], 1.004, 2.996, 10.0);
    expect(regions).toEqual([{ onset: 1.0, offset: 3.0 }]);
  });

  it("ignores degenerate drags", () => {
    const existing = [{ onset: 1.0, offset: 2.0 }];
    expect(addRegion(existing, 5.0, 5.001, 10.0)).toEqual(existing);
  });

  it("merges with existing overlapping drafts", () => {
    const first = addRegion([], 1.0, 2.0, 10.0);
    const both = addRegion(first, 1.5, 2.5, 10.0);
    expect(both).toEqual([{ onset: 1.0, offset: 2.5 }]);
  });
});

describe("removeRegion and toPairs", () => {
  it("removes by index and converts to wire pairs", () => {
    const regions = [
      { onset: 0.2, offset: 0.4 },
      { onset: 1.0, offset: 2.0 },
    ];
    expect(removeRegion(regions, 0)).toEqual([{ onset: 1.0, offset: 2.0 }]);
    expect(toPairs(regions)).toEqual([
      [0.2, 0.4],
      [1.0, 2.0],
    ]);
  });
});

describe("validateDraft", () => {
  it("blocks undecided verdicts", () => {
    expect(validateDraft("undecided", [])).toMatch(/choose/i);
  });

  it("blocks genuine verdicts carrying regions", () => {
    const message = validateDraft("genuine", [{ onset: 1.0, offset: 2.0 }]);
    expect(message).toMatch(/genuine/i);
  });

  it("accepts genuine without regions and fake with or without", () => {
    expect(validateDraft("genuine", [])).toBeNull();
    expect(validateDraft("fake", [])).toBeNull();
    expect(validateDraft("fake", [{ onset: 0.0, offset: 0.02 }])).toBeNull();
  });
});
