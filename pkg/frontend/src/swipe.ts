/** Horizontal swipe recognition for the worm card.
 *
 * Left swipe = avoid, right swipe = eat, matching the original touch
 * interaction; buttons elsewhere in the scene offer the same actions for
 * keyboard/mouse players. Listens to both pointer and mouse events so it
 * works on every input stack.
 */

export interface SwipeHandlers {
  onSwipeLeft(): void;
  onSwipeRight(): void;
}

export const SWIPE_THRESHOLD_PX = 60;

interface PointLike {
  clientX?: number;
}

export class SwipeRecognizer {
  private startX: number | null = null;

  constructor(
    private readonly element: HTMLElement,
    private readonly handlers: SwipeHandlers,
  ) {
    const down = (ev: Event) => this.begin(ev as PointLike);
    const move = (ev: Event) => this.track(ev as PointLike);
    const up = (ev: Event) => this.finish(ev as PointLike);
    for (const type of ["pointerdown", "mousedown", "touchstart"]) {
      element.addEventListener(type, down);
    }
    for (const type of ["pointermove", "mousemove"]) {
      element.addEventListener(type, move);
    }
    for (const type of ["pointerup", "mouseup", "touchend"]) {
      element.addEventListener(type, up);
    }
  }

  private coord(ev: PointLike): number | null {
    if (typeof ev.clientX === "number") return ev.clientX;
    const touches = (ev as { changedTouches?: Array<{ clientX: number }> }).changedTouches;
    if (touches && touches.length > 0) return touches[0]!.clientX;
    return null;
  }

  private begin(ev: PointLike): void {
    this.startX = this.coord(ev);
    this.element.classList.add("dragging");
  }

  private track(ev: PointLike): void {
    if (this.startX === null) return;
    const x = this.coord(ev);
    if (x === null) return;
    const dx = x - this.startX;
    this.element.style.transform = `translateX(${dx}px) rotate(${dx / 20}deg)`;
  }

  private finish(ev: PointLike): void {
    if (this.startX === null) return;
    const x = this.coord(ev);
    const dx = x === null ? 0 : x - this.startX;
    this.startX = null;
    this.element.classList.remove("dragging");
    this.element.style.transform = "";
    if (dx <= -SWIPE_THRESHOLD_PX) {
      this.handlers.onSwipeLeft();
    } else if (dx >= SWIPE_THRESHOLD_PX) {
      this.handlers.onSwipeRight();
    }
  }
}
