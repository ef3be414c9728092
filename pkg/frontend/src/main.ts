/** Application controller: wires the API, the store, and the pond scene.
 * User inputs funnel through a single in-order action queue; the server is
 * the only authority on score, lives, and clocks. */

import { ApiError, GameApi, type ApiOptions, type StreamHandle } from "./api.js";
import { renderJourney } from "./journey.js";
import { PondScene } from "./scene.js";
import { GameStore } from "./store.js";
import type { ActionName } from "./types.js";

export interface AppOptions extends ApiOptions {
  player: string;
  level?: number;
  seed?: number;
  /** injectable time source for the clock display (seconds) */
  now?: () => number;
  /** how often the HUD countdown refreshes, ms */
  clockTickMs?: number;
}

export class App {
  readonly api: GameApi;
  readonly store: GameStore;
  readonly scene: PondScene;
  sessionId: string | null = null;
  private stream: StreamHandle | null = null;
  private queue: Promise<void> = Promise.resolve();
  private ticker: ReturnType<typeof setInterval> | null = null;

  constructor(
    readonly root: HTMLElement,
    private readonly options: AppOptions,
  ) {
    this.api = new GameApi(options);
    this.store = new GameStore(options.now);
    this.scene = new PondScene(root, {
      onEat: () => this.enqueue("eat"),
      onAvoid: () => this.enqueue("avoid"),
      onAskShifu: () => this.enqueue("ask_shifu"),
      onIdentify: (concept) => this.enqueue("identify_concept", concept),
      onBeginLevel: () => this.enqueue("begin_level"),
      onAdvanceLevel: () => this.enqueue("advance_level"),
      onRetryLevel: () => this.enqueue("retry_level"),
      onToggleJourney: () => void this.toggleJourney(),
    });
    this.store.onChange(() => this.scene.update(this.store));
  }

  async start(): Promise<void> {
    const view = await this.api.createSession(
      this.options.player,
      this.options.level ?? 1,
      this.options.seed,
    );
    this.sessionId = view.session_id;
    this.store.applyState(view);
    this.stream = this.api.stream(view.session_id, (frame) => {
      this.store.applyFrame(frame);
      if (frame.type === "clock") this.scene.updateClocks(this.store);
    });
    this.ticker = setInterval(
      () => this.scene.updateClocks(this.store),
      this.options.clockTickMs ?? 250,
    );
  }

  stop(): void {
    this.stream?.close();
    if (this.ticker !== null) clearInterval(this.ticker);
  }

  /** Send one action; inputs queue so they reach the server in order. */
  enqueue(action: ActionName, concept?: string): Promise<void> {
    const run = async () => {
      if (!this.sessionId) return;
      try {
        const result = await this.api.act(this.sessionId, action, concept);
        this.store.applyState(result.state);
        if (result.feedback) this.scene.renderFeedback(result.feedback);
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          this.scene.shake(); // illegal right now; stay in the scene
          return;
        }
        throw err;
      }
    };
    this.queue = this.queue.then(run);
    return this.queue;
  }

  async toggleJourney(): Promise<void> {
    const panel = this.scene.journeyContainer;
    if (panel.hidden) {
      const progress = await this.api.getProgress(this.options.player);
      renderJourney(panel, progress);
    }
    this.scene.toggleJourney();
  }
}

export async function boot(root: HTMLElement, options: AppOptions): Promise<App> {
  const app = new App(root, options);
  await app.start();
  return app;
}

/** Name-entry screen used by the static page; calls boot() on submit. */
export function mountStartScreen(root: HTMLElement, baseUrl: string): void {
  const doc = root.ownerDocument;
  const panel = doc.createElement("div");
  panel.className = "start-screen";
  const title = doc.createElement("h1");
  title.textContent = "Phish Phinder";
  const blurb = doc.createElement("p");
  blurb.textContent =
    "Help Johnny eat the good worms and dodge the phishing lures. Swipe right to eat, left to avoid.";
  const input = doc.createElement("input");
  input.placeholder = "your name";
  input.id = "player-name";
  const button = doc.createElement("button");
  button.textContent = "into the pond";
  button.id = "btn-start";
  button.addEventListener("click", () => {
    const player = input.value.trim() || "johnny";
    panel.remove();
    void boot(root, { baseUrl, player });
  });
  panel.append(title, blurb, input, button);
  root.appendChild(panel);
}
