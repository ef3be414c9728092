/** Wire formats of the game service's /v1 interface. */

export type PhaseName =
  | "level_intro"
  | "awaiting_decision"
  | "awaiting_concept_id"
  | "feedback"
  | "level_complete"
  | "level_failed"
  | "game_won"
  | "game_over";

export type OutcomeName =
  | "correct_eat"
  | "correct_avoid"
  | "wrong_eat"
  | "wrong_avoid"
  | "shifu_advice"
  | "quiz_result"
  | "bonus_expired";

export const ALL_OUTCOMES: OutcomeName[] = [
  "correct_eat",
  "correct_avoid",
  "wrong_eat",
  "wrong_avoid",
  "shifu_advice",
  "quiz_result",
  "bonus_expired",
];

export interface WormView {
  id: string;
  kind: "url" | "email";
  text: string;
  bonus: boolean;
  bonus_remaining: number | null;
}

export interface QuizOption {
  concept: string;
  description: string;
}

export interface FindingView {
  concept: string;
  field: string;
  byte_start: number;
  byte_end: number;
  detail: string;
}

export interface FeedbackView {
  outcome: OutcomeName;
  advice: string[];
  points_delta: number;
  lives_delta: number;
  medal_awarded: boolean;
  quiz_correct: boolean | null;
  findings?: FindingView[];
}

export interface MedalView {
  level: number;
  worm_id: string;
}

export interface StateView {
  session_id: string;
  player_id: string;
  level: number;
  levels_total: number;
  phase: PhaseName;
  score: number;
  lives: number;
  clock_remaining: number;
  worms_presented: number;
  worms_resolved: number;
  worm_count: number;
  medals: MedalView[];
  active_worm: WormView | null;
  quiz: { options: QuizOption[] } | null;
  last_feedback: FeedbackView | null;
}

export interface ClockFrame {
  type: "clock";
  clock_remaining: number;
  phase: PhaseName;
  bonus_remaining: number | null;
}

export interface StateFrame {
  type: "state";
  state: StateView;
}

export type Frame = ClockFrame | StateFrame;

export interface ActionResult {
  feedback: FeedbackView | null;
  state: StateView;
}

export type ActionName =
  | "begin_level"
  | "eat"
  | "avoid"
  | "ask_shifu"
  | "identify_concept"
  | "advance_level"
  | "retry_level";

export interface ConceptStatsView {
  seen: number;
  correct_classifications: number;
  correct_identifications: number;
  accuracy: number | null;
}

export interface TrainingLogEntryView {
  at: number;
  worm_id: string;
  worm_kind: string;
  worm_summary: string;
  action: string;
  outcome: string;
  advice: string[];
}

export interface ProgressView {
  player_id: string;
  levels_total: number;
  levels_completed: number;
  levels_remaining: number;
  journey_position: number;
  total_score: number;
  medals: MedalView[];
  per_concept: Record<string, ConceptStatsView>;
  training_log: TrainingLogEntryView[];
}
