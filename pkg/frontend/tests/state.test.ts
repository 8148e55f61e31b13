import { describe, expect, it } from "vitest";

import { explainedRatio, toggledSet } from "../src/state.js";

const alphabet = ["a", "b", "c", "x"];

describe("toggledSet", () => {
  it("adds and removes activities", () => {
    expect(toggledSet(alphabet, [], "x")).toEqual(["x"]);
    expect(toggledSet(alphabet, ["x"], "x")).toEqual([]);
    expect(toggledSet(alphabet, ["x"], "a")).toEqual(["a", "x"]);
  });

  it("returns null when fewer than two activities would remain", () => {
    expect(toggledSet(alphabet, ["a", "x"], "b")).toBeNull();
    // Re-enabling is always allowed.
    expect(toggledSet(alphabet, ["a", "x"], "a")).toEqual(["x"]);
  });

  it("two-activity logs accept no disabling at all", () => {
    expect(toggledSet(["a", "b"], [], "a")).toBeNull();
  });
});

describe("explainedRatio", () => {
  it("is the enabled share of the alphabet", () => {
    expect(explainedRatio(alphabet, [])).toBe(1.0);
    expect(explainedRatio(alphabet, ["x"])).toBe(0.75);
    expect(explainedRatio([], [])).toBe(0);
  });
});
