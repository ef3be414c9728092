import { beforeEach, describe, expect, it } from "vitest";

import { PondScene, johnnySize, type SceneHandlers } from "../src/scene.js";
import { GameStore } from "../src/store.js";
import { makeState, makeWorm, mouse } from "./helpers.js";

function setup() {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  const calls: string[] = [];
  const handlers: SceneHandlers = {
    onEat: () => calls.push("eat"),
    onAvoid: () => calls.push("avoid"),
    onAskShifu: () => calls.push("ask_shifu"),
    onIdentify: (c) => calls.push(`identify:${c}`),
    onBeginLevel: () => calls.push("begin_level"),
    onAdvanceLevel: () => calls.push("advance_level"),
    onRetryLevel: () => calls.push("retry_level"),
    onToggleJourney: () => calls.push("journey"),
  };
  const scene = new PondScene(root, handlers);
  const store = new GameStore(() => 0);
  store.onChange(() => scene.update(store));
  return { root, scene, store, calls };
}

describe("PondScene", () => {
  it("renders the HUD verbatim from the authoritative state", () => {
    const { store } = setup();
    store.applyState(makeState({ score: 350, lives: 4, clock_remaining: 540 }));
    expect(document.getElementById("hud-score")?.textContent).toBe("350 pts");
    expect(document.getElementById("hud-lives")?.textContent).toBe("♥♥♥♥♡");
    expect(document.getElementById("hud-clock")?.textContent).toBe("9:00");
    expect(document.getElementById("hud-progress")?.textContent).toBe("worm 0/10");
  });

  it("escapes worm content instead of executing it", () => {
    const { store } = setup();
    const hostile =
      'From: Google <x@evil.example>\n\n<a href="https://bit.ly/x">CLICK</a><script>window.hacked = true;</script>';
    store.applyState(
      makeState({ active_worm: makeWorm({ kind: "email", text: hostile }) }),
    );
    const card = document.getElementById("worm-card")!;
    expect(card.querySelector("a")).toBeNull();
    expect(card.querySelector("script")).toBeNull();
    expect(card.querySelector(".worm-text")?.textContent).toContain("<a href=");
    expect((window as unknown as { hacked?: boolean }).hacked).toBeUndefined();
  });

  it("tints bonus worms and shows a countdown", () => {
    const { store } = setup();
    store.applyState(
      makeState({ active_worm: makeWorm({ bonus: true, bonus_remaining: 30 }) }),
    );
    const card = document.getElementById("worm-card")!;
    expect(card.classList.contains("bonus")).toBe(true);
    expect(card.querySelector(".bonus-countdown")).not.toBeNull();
  });

  it("swiping the card triggers avoid and eat", () => {
    const { store, calls } = setup();
    store.applyState(makeState());
    const card = document.getElementById("worm-card")!;
    card.dispatchEvent(mouse("pointerdown", 300));
    card.dispatchEvent(mouse("pointerup", 100));
    store.applyState(makeState({ active_worm: makeWorm({ id: "w0002" }) }));
    const card2 = document.getElementById("worm-card")!;
    card2.dispatchEvent(mouse("pointerdown", 100));
    card2.dispatchEvent(mouse("pointerup", 300));
    expect(calls).toEqual(["avoid", "eat"]);
  });

  it("buttons mirror the swipe actions", () => {
    const { calls } = setup();
    document.getElementById("btn-avoid")!.click();
    document.getElementById("btn-eat")!.click();
    document.getElementById("btn-shifu")!.click();
    expect(calls).toEqual(["avoid", "eat", "ask_shifu"]);
  });

  it("level intro panel starts the level from inside the scene", () => {
    const { store, calls } = setup();
    store.applyState(makeState({ phase: "level_intro", active_worm: null }));
    const begin = document.getElementById("btn-begin")!;
    expect(begin.closest("#scene")).not.toBeNull();
    begin.click();
    expect(calls).toEqual(["begin_level"]);
  });

  it("quiz renders six in-scene options and reports the chosen concept", () => {
    const { store, calls } = setup();
    store.applyState(
      makeState({
        phase: "awaiting_concept_id",
        quiz: {
          options: [
            { concept: "malicious_url", description: "a" },
            { concept: "lookalike_domain", description: "b" },
            { concept: "suspicious_subject", description: "c" },
            { concept: "display_name_spoof", description: "d" },
            { concept: "reply_to_spoof", description: "e" },
            { concept: "html_body", description: "f" },
          ],
        },
      }),
    );
    const options = document.querySelectorAll<HTMLButtonElement>(".quiz-option");
    expect(options.length).toBe(6);
    options[1]!.click();
    expect(calls).toEqual(["identify:lookalike_domain"]);
    expect(document.getElementById("quiz-panel")!.closest("#scene")).not.toBeNull();
  });

  it("johnny grows monotonically with the level", () => {
    for (let level = 1; level < 8; level += 1) {
      expect(johnnySize(level + 1)).toBeGreaterThan(johnnySize(level));
    }
    const { store } = setup();
    store.applyState(makeState({ level: 3 }));
    expect(document.getElementById("johnny")!.style.width).toBe(`${johnnySize(3)}px`);
  });

  it("shake marks the scene for the rejection animation", () => {
    const { scene } = setup();
    scene.shake();
    expect(document.getElementById("scene")!.classList.contains("shake")).toBe(true);
  });

  it("terminal phases render in-scene panels, never dialogs", () => {
    const { store } = setup();
    for (const phase of ["level_complete", "level_failed", "game_won", "game_over"] as const) {
      store.applyState(makeState({ phase, active_worm: null }));
      expect(document.querySelector(".panel")).not.toBeNull();
      expect(document.querySelector("dialog")).toBeNull();
    }
  });
});
