import { describe, expect, it } from "vitest";

import { FEEDBACK_PRESENTATION, PondScene } from "../src/scene.js";
import { ALL_OUTCOMES } from "../src/types.js";
import { makeFeedback } from "./helpers.js";

function freshScene() {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  return new PondScene(root, {
    onEat() {},
    onAvoid() {},
    onAskShifu() {},
    onIdentify() {},
    onBeginLevel() {},
    onAdvanceLevel() {},
    onRetryLevel() {},
    onToggleJourney() {},
  });
}

describe("feedback rendering", () => {
  it("covers every outcome variant with a distinct in-scene element", () => {
    const scene = freshScene();
    const seenClasses = new Set<string>();
    for (const outcome of ALL_OUTCOMES) {
      const bubble = scene.renderFeedback(makeFeedback(outcome));
      expect(bubble.dataset.outcome).toBe(outcome);
      expect(bubble.closest("#scene"), `${outcome} must render inside the scene`).not.toBeNull();
      const marker = FEEDBACK_PRESENTATION[outcome].className;
      expect(bubble.classList.contains(marker)).toBe(true);
      seenClasses.add(marker);
    }
    expect(seenClasses.size).toBe(ALL_OUTCOMES.length); // distinct per variant
  });

  it("presentation table is exhaustive over the outcome union", () => {
    expect(Object.keys(FEEDBACK_PRESENTATION).sort()).toEqual([...ALL_OUTCOMES].sort());
  });

  it("speech bubbles are anchored to Shifu's layer, no dialogs or navigation", () => {
    const scene = freshScene();
    const before = window.location.href;
    scene.renderFeedback(
      makeFeedback("wrong_eat", {
        advice: ["look closely: the '1' is standing in for 'l'"],
        lives_delta: -1,
      }),
    );
    const bubble = document.querySelector(".bubble")!;
    expect(bubble.parentElement?.className).toBe("bubble-layer");
    expect(bubble.textContent).toContain("standing in for");
    expect(document.querySelector("dialog")).toBeNull();
    expect(window.location.href).toBe(before);
  });

  it("shows point, life, and medal deltas", () => {
    const scene = freshScene();
    const bubble = scene.renderFeedback(
      makeFeedback("correct_avoid", { points_delta: 100, medal_awarded: true }),
    );
    expect(bubble.textContent).toContain("+100 pts");
    expect(bubble.textContent).toContain("medal");
  });

  it("keeps only a few bubbles on screen", () => {
    const scene = freshScene();
    for (let i = 0; i < 6; i += 1) {
      scene.renderFeedback(makeFeedback("correct_eat"));
    }
    expect(document.querySelectorAll(".bubble").length).toBeLessThanOrEqual(3);
  });

  it("distinguishes right and wrong quiz answers", () => {
    const scene = freshScene();
    const right = scene.renderFeedback(
      makeFeedback("quiz_result", { quiz_correct: true, points_delta: 50 }),
    );
    expect(right.textContent).toContain("exactly right");
    const wrong = scene.renderFeedback(makeFeedback("quiz_result", { quiz_correct: false }));
    expect(wrong.textContent).toContain("not quite");
  });
});
