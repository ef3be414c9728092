/** Client-side session state: the last authoritative server frame plus a
 * local interpolation of the two countdown clocks.
 *
 * HUD values (score, lives, level) are always taken verbatim from the last
 * server frame. Only the clock display moves between 1 Hz server updates,
 * and it snaps back to the authoritative value on every frame, bounding
 * drift by one update interval plus latency (< 1.5 s).
 */

import type { Frame, StateView } from "./types.js";

export type Listener = (store: GameStore) => void;

export class GameStore {
  state: StateView | null = null;

  private clockValue = 0;
  private clockAt = 0;
  private clockRunning = false;
  private bonusValue: number | null = null;
  private listeners: Listener[] = [];

  constructor(private readonly now: () => number = () => Date.now() / 1000) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this);
  }

  applyState(view: StateView): void {
    this.state = view;
    this.clockValue = view.clock_remaining;
    this.clockAt = this.now();
    this.clockRunning =
      view.phase === "awaiting_decision" || view.phase === "awaiting_concept_id";
    this.bonusValue = view.active_worm?.bonus_remaining ?? null;
    this.emit();
  }

  applyFrame(frame: Frame): void {
    if (frame.type === "state") {
      this.applyState(frame.state);
      return;
    }
    this.clockValue = frame.clock_remaining;
    this.clockAt = this.now();
    this.clockRunning =
      frame.phase === "awaiting_decision" || frame.phase === "awaiting_concept_id";
    this.bonusValue = frame.bonus_remaining;
    if (this.state) this.state.phase = frame.phase;
    this.emit();
  }

  /** Seconds left on the level clock as the HUD should show them now. */
  displayClock(): number {
    if (!this.clockRunning) return Math.max(this.clockValue, 0);
    const elapsed = this.now() - this.clockAt;
    return Math.max(this.clockValue - elapsed, 0);
  }

  /** Seconds left in the bonus window, if the active worm has one. */
  displayBonus(): number | null {
    if (this.bonusValue === null) return null;
    if (!this.clockRunning) return Math.max(this.bonusValue, 0);
    const elapsed = this.now() - this.clockAt;
    return Math.max(this.bonusValue - elapsed, 0);
  }
}

export function formatClock(seconds: number): string {
  const total = Math.max(Math.floor(seconds), 0);
  const minutes = Math.floor(total / 60);
  const rest = total % 60;
  return `${minutes}:${String(rest).padStart(2, "0")}`;
}
