import { describe, expect, it } from "vitest";

import { GameStore, formatClock } from "../src/store.js";
import { makeState } from "./helpers.js";

function storeAt(start: number): { store: GameStore; setNow: (t: number) => void } {
  let t = start;
  const store = new GameStore(() => t);
  return { store, setNow: (v) => (t = v) };
}

describe("GameStore", () => {
  it("mirrors the authoritative frame verbatim", () => {
    const { store } = storeAt(0);
    store.applyState(makeState({ score: 450, lives: 3 }));
    expect(store.state?.score).toBe(450);
    expect(store.state?.lives).toBe(3);
    expect(store.displayClock()).toBe(600);
  });

  it("interpolates the clock between server frames", () => {
    const { store, setNow } = storeAt(100);
    store.applyState(makeState({ clock_remaining: 600 }));
    setNow(100.9);
    expect(store.displayClock()).toBeCloseTo(599.1, 5);
  });

  it("keeps display drift under 1.5 s across 1 Hz updates", () => {
    const { store, setNow } = storeAt(0);
    store.applyState(makeState({ clock_remaining: 600 }));
    // server truth: clock = 600 - elapsed; frames arrive every second
    for (let second = 1; second <= 30; second += 1) {
      // just before the frame lands (worst case: one full interval stale)
      setNow(second - 0.001);
      const truth = 600 - (second - 0.001);
      expect(Math.abs(store.displayClock() - truth)).toBeLessThan(1.5);
      setNow(second);
      store.applyFrame({
        type: "clock",
        clock_remaining: 600 - second,
        phase: "awaiting_decision",
        bonus_remaining: null,
      });
      expect(Math.abs(store.displayClock() - (600 - second))).toBeLessThan(1.5);
    }
  });

  it("snaps to each clock frame and keeps phase", () => {
    const { store, setNow } = storeAt(0);
    store.applyState(makeState());
    setNow(5);
    store.applyFrame({
      type: "clock",
      clock_remaining: 594.8,
      phase: "awaiting_decision",
      bonus_remaining: null,
    });
    expect(store.displayClock()).toBeCloseTo(594.8, 5);
    expect(store.state?.phase).toBe("awaiting_decision");
  });

  it("freezes the clock outside play phases", () => {
    const { store, setNow } = storeAt(0);
    store.applyState(makeState({ phase: "level_complete", clock_remaining: 123 }));
    setNow(50);
    expect(store.displayClock()).toBe(123);
  });

  it("never shows a negative clock", () => {
    const { store, setNow } = storeAt(0);
    store.applyState(makeState({ clock_remaining: 1 }));
    setNow(10);
    expect(store.displayClock()).toBe(0);
  });

  it("counts the bonus window down alongside the clock", () => {
    const { store, setNow } = storeAt(0);
    store.applyState(
      makeState({
        active_worm: {
          id: "w2",
          kind: "url",
          text: "x",
          bonus: true,
          bonus_remaining: 30,
        },
      }),
    );
    setNow(4);
    expect(store.displayBonus()).toBeCloseTo(26, 5);
    const plain = makeState();
    store.applyState(plain);
    expect(store.displayBonus()).toBeNull();
  });

  it("notifies listeners on every frame", () => {
    const { store } = storeAt(0);
    let calls = 0;
    store.onChange(() => (calls += 1));
    store.applyState(makeState());
    store.applyFrame({
      type: "clock",
      clock_remaining: 1,
      phase: "awaiting_decision",
      bonus_remaining: null,
    });
    expect(calls).toBe(2);
  });
});

describe("formatClock", () => {
  it("renders minutes and seconds", () => {
    expect(formatClock(600)).toBe("10:00");
    expect(formatClock(59.4)).toBe("0:59");
    expect(formatClock(0)).toBe("0:00");
    expect(formatClock(-3)).toBe("0:00");
  });
});
