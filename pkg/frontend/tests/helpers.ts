import type { FeedbackView, OutcomeName, StateView, WormView } from "../src/types.js";

export function makeWorm(overrides: Partial<WormView> = {}): WormView {
  return {
    id: "w0001",
    kind: "url",
    text: "www.paypa1.com",
    bonus: false,
    bonus_remaining: null,
    ...overrides,
  };
}

export function makeState(overrides: Partial<StateView> = {}): StateView {
  return {
    session_id: "s1",
    player_id: "tester",
    level: 1,
    levels_total: 5,
    phase: "awaiting_decision",
    score: 0,
    lives: 5,
    clock_remaining: 600,
    worms_presented: 1,
    worms_resolved: 0,
    worm_count: 10,
    medals: [],
    active_worm: makeWorm(),
    quiz: null,
    last_feedback: null,
    ...overrides,
  };
}

export function makeFeedback(
  outcome: OutcomeName,
  overrides: Partial<FeedbackView> = {},
): FeedbackView {
  return {
    outcome,
    advice: [],
    points_delta: 0,
    lives_delta: 0,
    medal_awarded: false,
    quiz_correct: null,
    ...overrides,
  };
}

export function mouse(type: string, clientX: number): MouseEvent {
  return new MouseEvent(type, { clientX, bubbles: true });
}
