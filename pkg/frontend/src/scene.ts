/** The pond: one continuous scene that hosts the whole game.
 *
 * Every piece of communication lives inside the scenery: worm cards drift in
 * the water, Shifu speaks through anchored bubbles, level transitions are
 * in-scene panels. No dialogs, no navigation. Email/HTML content renders as
 * escaped source text only; it is never parsed into live markup.
 */

import { beatForLevel } from "./data/narrative.js";
import type { GameStore } from "./store.js";
import { formatClock } from "./store.js";
import { SwipeRecognizer } from "./swipe.js";
import type { FeedbackView, OutcomeName, StateView } from "./types.js";

export interface SceneHandlers {
  onEat(): void;
  onAvoid(): void;
  onAskShifu(): void;
  onIdentify(concept: string): void;
  onBeginLevel(): void;
  onAdvanceLevel(): void;
  onRetryLevel(): void;
  onToggleJourney(): void;
}

/** Johnny's on-screen size; strictly monotone in level. */
export function johnnySize(level: number): number {
  return 36 + level * 14;
}

interface OutcomePresentation {
  className: string;
  emote: string;
  title: string;
}

export const FEEDBACK_PRESENTATION: Record<OutcomeName, OutcomePresentation> = {
  correct_eat: { className: "fb-correct-eat", emote: "😋", title: "Tasty and safe!" },
  correct_avoid: { className: "fb-correct-avoid", emote: "🛡️", title: "Well dodged!" },
  wrong_eat: { className: "fb-wrong-eat", emote: "🤢", title: "Ouch, that one was bad" },
  wrong_avoid: { className: "fb-wrong-avoid", emote: "😮", title: "That one was safe" },
  shifu_advice: { className: "fb-shifu", emote: "🧓", title: "Shifu says" },
  quiz_result: { className: "fb-quiz", emote: "🎓", title: "Quiz" },
  bonus_expired: { className: "fb-bonus-expired", emote: "⌛", title: "Bonus window closed" },
};

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class PondScene {
  private readonly doc: Document;
  readonly rootEl: HTMLElement;
  private readonly hud: {
    level: HTMLElement;
    score: HTMLElement;
    lives: HTMLElement;
    clock: HTMLElement;
    progress: HTMLElement;
    medals: HTMLElement;
  };
  private readonly johnny: HTMLElement;
  private readonly shifu: HTMLElement;
  private readonly bubbleLayer: HTMLElement;
  private readonly wormSlot: HTMLElement;
  private readonly panelLayer: HTMLElement;
  private readonly journeyPanel: HTMLElement;
  private renderedWormId: string | null = null;
  private renderedPhase: string | null = null;

  constructor(
    root: HTMLElement,
    private readonly handlers: SceneHandlers,
  ) {
    this.doc = root.ownerDocument;
    const doc = this.doc;

    this.rootEl = el(doc, "div", "pond");
    this.rootEl.id = "scene";
    root.appendChild(this.rootEl);

    const hudBar = el(doc, "div", "hud");
    this.hud = {
      level: el(doc, "span", "hud-level"),
      score: el(doc, "span", "hud-score"),
      lives: el(doc, "span", "hud-lives"),
      clock: el(doc, "span", "hud-clock"),
      progress: el(doc, "span", "hud-progress"),
      medals: el(doc, "span", "hud-medals"),
    };
    this.hud.level.id = "hud-level";
    this.hud.score.id = "hud-score";
    this.hud.lives.id = "hud-lives";
    this.hud.clock.id = "hud-clock";
    this.hud.progress.id = "hud-progress";
    this.hud.medals.id = "hud-medals";
    for (const node of Object.values(this.hud)) hudBar.appendChild(node);
    this.rootEl.appendChild(hudBar);

    const water = el(doc, "div", "water");
    this.johnny = el(doc, "div", "johnny", "🐟");
    this.johnny.id = "johnny";
    this.shifu = el(doc, "div", "shifu", "🐡");
    this.shifu.id = "shifu";
    this.bubbleLayer = el(doc, "div", "bubble-layer");
    this.wormSlot = el(doc, "div", "worm-slot");
    this.panelLayer = el(doc, "div", "panel-layer");
    water.append(this.johnny, this.shifu, this.bubbleLayer, this.wormSlot, this.panelLayer);
    this.rootEl.appendChild(water);

    const controls = el(doc, "div", "controls");
    const avoidBtn = el(doc, "button", "btn-avoid", "⬅ avoid");
    avoidBtn.id = "btn-avoid";
    avoidBtn.addEventListener("click", () => this.handlers.onAvoid());
    const shifuBtn = el(doc, "button", "btn-shifu", "ask Shifu (−60 s)");
    shifuBtn.id = "btn-shifu";
    shifuBtn.addEventListener("click", () => this.handlers.onAskShifu());
    const eatBtn = el(doc, "button", "btn-eat", "eat ➡");
    eatBtn.id = "btn-eat";
    eatBtn.addEventListener("click", () => this.handlers.onEat());
    const journeyBtn = el(doc, "button", "btn-journey", "journey");
    journeyBtn.id = "btn-journey";
    journeyBtn.addEventListener("click", () => this.handlers.onToggleJourney());
    controls.append(avoidBtn, shifuBtn, eatBtn, journeyBtn);
    this.rootEl.appendChild(controls);

    this.journeyPanel = el(doc, "div", "journey");
    this.journeyPanel.id = "journey";
    this.journeyPanel.hidden = true;
    this.rootEl.appendChild(this.journeyPanel);
  }

  get journeyContainer(): HTMLElement {
    return this.journeyPanel;
  }

  toggleJourney(): void {
    this.journeyPanel.hidden = !this.journeyPanel.hidden;
  }

  /** Full re-render from the authoritative state. */
  update(store: GameStore): void {
    const state = store.state;
    if (!state) return;
    this.renderHud(state, store);
    this.johnny.style.width = `${johnnySize(state.level)}px`;
    this.johnny.style.fontSize = `${johnnySize(state.level)}px`;
    this.renderWorm(state, store);
    this.renderPanels(state);
    this.renderedPhase = state.phase;
  }

  /** Cheap per-animation-frame refresh of the countdowns. */
  updateClocks(store: GameStore): void {
    this.hud.clock.textContent = formatClock(store.displayClock());
    const bonus = store.displayBonus();
    const counter = this.wormSlot.querySelector(".bonus-countdown");
    if (counter && bonus !== null) {
      counter.textContent = `⏳ ${Math.ceil(bonus)}s`;
    }
  }

  private renderHud(state: StateView, store: GameStore): void {
    this.hud.level.textContent = `level ${state.level}/${state.levels_total}`;
    this.hud.score.textContent = `${state.score} pts`;
    this.hud.lives.textContent = "♥".repeat(state.lives) + "♡".repeat(5 - state.lives);
    this.hud.clock.textContent = formatClock(store.displayClock());
    this.hud.progress.textContent = `worm ${state.worms_resolved}/${state.worm_count}`;
    this.hud.medals.textContent = state.medals.length ? `🏅×${state.medals.length}` : "";
  }

  private renderWorm(state: StateView, store: GameStore): void {
    const worm = state.active_worm;
    if (!worm || state.phase !== "awaiting_decision") {
      if (state.phase !== "awaiting_decision") {
        this.wormSlot.replaceChildren();
        this.renderedWormId = null;
      }
      return;
    }
    if (worm.id === this.renderedWormId) return;
    this.renderedWormId = worm.id;

    const card = el(this.doc, "div", "worm-card");
    card.id = "worm-card";
    card.dataset.kind = worm.kind;
    card.dataset.wormId = worm.id;
    if (worm.bonus) {
      card.classList.add("bonus");
      card.appendChild(el(this.doc, "div", "bonus-countdown", "⏳"));
    }
    const wiggle = el(this.doc, "div", "worm-emote", "🪱");
    // escaped source only: textContent guarantees markup is never executed
    const text = el(this.doc, "pre", "worm-text");
    text.textContent = worm.text;
    card.append(wiggle, text);
    new SwipeRecognizer(card, {
      onSwipeLeft: () => this.handlers.onAvoid(),
      onSwipeRight: () => this.handlers.onEat(),
    });
    this.wormSlot.replaceChildren(card);
    this.updateClocks(store);
  }

  private renderPanels(state: StateView): void {
    this.panelLayer.replaceChildren();
    switch (state.phase) {
      case "level_intro": {
        const beat = beatForLevel(state.level);
        const panel = el(this.doc, "div", "panel panel-intro");
        panel.appendChild(el(this.doc, "h2", "panel-title", beat.title));
        panel.appendChild(el(this.doc, "p", "panel-text", beat.intro));
        const dive = el(this.doc, "button", "btn-begin", "dive in");
        dive.id = "btn-begin";
        dive.addEventListener("click", () => this.handlers.onBeginLevel());
        panel.appendChild(dive);
        this.panelLayer.appendChild(panel);
        break;
      }
      case "awaiting_concept_id": {
        const panel = el(this.doc, "div", "panel panel-quiz");
        panel.id = "quiz-panel";
        panel.appendChild(
          el(this.doc, "p", "panel-text", "Shifu: well avoided! What gave it away?"),
        );
        for (const option of state.quiz?.options ?? []) {
          const button = el(this.doc, "button", "quiz-option", option.description);
          button.dataset.concept = option.concept;
          button.title = option.concept;
          button.addEventListener("click", () => this.handlers.onIdentify(option.concept));
          panel.appendChild(button);
        }
        this.panelLayer.appendChild(panel);
        break;
      }
      case "level_complete": {
        const beat = beatForLevel(state.level);
        const panel = el(this.doc, "div", "panel panel-complete");
        panel.appendChild(el(this.doc, "h2", "panel-title", "Level cleared!"));
        panel.appendChild(el(this.doc, "p", "panel-text", beat.shifuMilestone));
        const next = el(this.doc, "button", "btn-advance", "swim deeper");
        next.id = "btn-advance";
        next.addEventListener("click", () => this.handlers.onAdvanceLevel());
        panel.appendChild(next);
        this.panelLayer.appendChild(panel);
        break;
      }
      case "level_failed": {
        const panel = el(this.doc, "div", "panel panel-failed");
        panel.appendChild(el(this.doc, "h2", "panel-title", "The clock ran out"));
        panel.appendChild(
          el(this.doc, "p", "panel-text", "The pond resets; the lesson stays."),
        );
        const retry = el(this.doc, "button", "btn-retry", "try this level again");
        retry.id = "btn-retry";
        retry.addEventListener("click", () => this.handlers.onRetryLevel());
        panel.appendChild(retry);
        this.panelLayer.appendChild(panel);
        break;
      }
      case "game_won": {
        const panel = el(this.doc, "div", "panel panel-won");
        panel.appendChild(el(this.doc, "h2", "panel-title", "As big as Shifu!"));
        panel.appendChild(
          el(
            this.doc,
            "p",
            "panel-text",
            "Johnny has grown as knowledgeable as his mentor. The pond is safe with you.",
          ),
        );
        this.panelLayer.appendChild(panel);
        break;
      }
      case "game_over": {
        const panel = el(this.doc, "div", "panel panel-over");
        panel.appendChild(el(this.doc, "h2", "panel-title", "Out of lives"));
        panel.appendChild(
          el(this.doc, "p", "panel-text", "Every master was once a snack. Start a new swim!"),
        );
        this.panelLayer.appendChild(panel);
        break;
      }
      default:
        break;
    }
  }

  /** Speech bubble anchored to Shifu; one per feedback, newest on top. */
  renderFeedback(feedback: FeedbackView): HTMLElement {
    const look = FEEDBACK_PRESENTATION[feedback.outcome];
    const bubble = el(this.doc, "div", `bubble ${look.className}`);
    bubble.dataset.outcome = feedback.outcome;
    const deltas: string[] = [];
    if (feedback.points_delta) deltas.push(`+${feedback.points_delta} pts`);
    if (feedback.lives_delta) deltas.push(`${feedback.lives_delta} life`);
    if (feedback.medal_awarded) deltas.push("🏅 medal!");
    if (feedback.outcome === "quiz_result") {
      deltas.push(feedback.quiz_correct ? "exactly right" : "not quite");
    }
    bubble.appendChild(
      el(this.doc, "div", "bubble-title", `${look.emote} ${look.title}`),
    );
    if (deltas.length) {
      bubble.appendChild(el(this.doc, "div", "bubble-deltas", deltas.join(" · ")));
    }
    for (const line of feedback.advice) {
      bubble.appendChild(el(this.doc, "p", "bubble-advice", line));
    }
    this.bubbleLayer.prepend(bubble);
    while (this.bubbleLayer.children.length > 3) {
      this.bubbleLayer.lastElementChild?.remove();
    }
    return bubble;
  }

  /** Gentle in-scene wiggle when the server rejects an action (409). */
  shake(): void {
    this.rootEl.classList.remove("shake");
    void this.rootEl.offsetWidth; // restart the CSS animation
    this.rootEl.classList.add("shake");
  }
}
