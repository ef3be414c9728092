/** Johnny's journey: progress across levels, per-concept accuracy, medals,
 * and the log of past advice, framed relative to what is still ahead. */

import { johnnySize } from "./scene.js";
import type { ProgressView } from "./types.js";

const CONCEPT_LABELS: Record<string, string> = {
  malicious_url: "malicious addresses",
  lookalike_domain: "look-alike domains",
  suspicious_subject: "pushy subject lines",
  display_name_spoof: "name-tag tricks",
  reply_to_spoof: "reply detours",
  html_body: "hidden markup",
};

export function renderJourney(container: HTMLElement, progress: ProgressView): void {
  const doc = container.ownerDocument;
  container.replaceChildren();

  const heading = doc.createElement("h2");
  heading.textContent = `Johnny's journey — ${progress.levels_completed} of ${progress.levels_total} waters explored`;
  container.appendChild(heading);

  const map = doc.createElement("div");
  map.className = "journey-map";
  for (let level = 1; level <= progress.levels_total; level += 1) {
    const stop = doc.createElement("div");
    stop.className = "journey-stop";
    stop.dataset.level = String(level);
    const fish = doc.createElement("span");
    fish.className = "journey-fish";
    fish.textContent = "🐟";
    fish.style.fontSize = `${johnnySize(level) / 2}px`;
    const done = level <= progress.levels_completed;
    stop.classList.add(done ? "done" : "ahead");
    stop.append(fish, doc.createTextNode(done ? ` level ${level} ✓` : ` level ${level}`));
    map.appendChild(stop);
  }
  container.appendChild(map);

  const position = doc.createElement("p");
  position.className = "journey-position";
  position.textContent = `journey position: ${Math.round(progress.journey_position * 100)}% · ${progress.levels_remaining} level(s) to go · ${progress.total_score} pts`;
  container.appendChild(position);

  const medals = doc.createElement("p");
  medals.className = "journey-medals";
  medals.textContent = progress.medals.length
    ? `medals: ${"🏅".repeat(Math.min(progress.medals.length, 20))} (${progress.medals.length})`
    : "medals: none yet — watch for glowing worms";
  container.appendChild(medals);

  const stats = doc.createElement("ul");
  stats.className = "journey-concepts";
  const entries = Object.entries(progress.per_concept);
  if (entries.length === 0) {
    const item = doc.createElement("li");
    item.textContent = "no concepts trained yet";
    stats.appendChild(item);
  }
  for (const [concept, s] of entries) {
    const item = doc.createElement("li");
    item.dataset.concept = concept;
    const label = CONCEPT_LABELS[concept] ?? concept;
    const accuracy =
      s.accuracy === null ? "not yet seen" : `${Math.round(s.accuracy * 100)}% right`;
    item.textContent = `${label}: ${accuracy} (${s.correct_classifications}/${s.seen}, ${s.correct_identifications} named)`;
    stats.appendChild(item);
  }
  container.appendChild(stats);

  const logHeading = doc.createElement("h3");
  logHeading.textContent = "training log";
  container.appendChild(logHeading);
  const log = doc.createElement("ol");
  log.className = "journey-log";
  for (const entry of progress.training_log.slice(-30).reverse()) {
    const item = doc.createElement("li");
    const advice = entry.advice.length ? ` — “${entry.advice[0]}”` : "";
    item.textContent = `[${entry.outcome}] ${entry.worm_kind}: ${entry.worm_summary}${advice}`;
    log.appendChild(item);
  }
  container.appendChild(log);
}
