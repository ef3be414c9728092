import { describe, expect, it } from "vitest";

import { SWIPE_THRESHOLD_PX, SwipeRecognizer } from "../src/swipe.js";
import { mouse } from "./helpers.js";

function setup() {
  const element = document.createElement("div");
  document.body.appendChild(element);
  const calls: string[] = [];
  new SwipeRecognizer(element, {
    onSwipeLeft: () => calls.push("left"),
    onSwipeRight: () => calls.push("right"),
  });
  return { element, calls };
}

describe("SwipeRecognizer", () => {
  it("recognizes a left swipe as avoid", () => {
    const { element, calls } = setup();
    element.dispatchEvent(mouse("pointerdown", 300));
    element.dispatchEvent(mouse("pointerup", 300 - SWIPE_THRESHOLD_PX - 5));
    expect(calls).toEqual(["left"]);
  });

  it("recognizes a right swipe as eat", () => {
    const { element, calls } = setup();
    element.dispatchEvent(mouse("pointerdown", 100));
    element.dispatchEvent(mouse("pointerup", 100 + SWIPE_THRESHOLD_PX + 20));
    expect(calls).toEqual(["right"]);
  });

  it("ignores sub-threshold drags", () => {
    const { element, calls } = setup();
    element.dispatchEvent(mouse("pointerdown", 100));
    element.dispatchEvent(mouse("pointerup", 100 + SWIPE_THRESHOLD_PX - 1));
    element.dispatchEvent(mouse("pointerdown", 100));
    element.dispatchEvent(mouse("pointerup", 101 - SWIPE_THRESHOLD_PX));
    expect(calls).toEqual([]);
  });

  it("works with plain mouse events too", () => {
    const { element, calls } = setup();
    element.dispatchEvent(mouse("mousedown", 200));
    element.dispatchEvent(mouse("mouseup", 80));
    expect(calls).toEqual(["left"]);
  });

  it("tracks the card visually while dragging", () => {
    const { element } = setup();
    element.dispatchEvent(mouse("pointerdown", 100));
    element.dispatchEvent(mouse("pointermove", 130));
    expect(element.style.transform).toContain("translateX(30px)");
    element.dispatchEvent(mouse("pointerup", 130));
    expect(element.style.transform).toBe("");
  });
});
