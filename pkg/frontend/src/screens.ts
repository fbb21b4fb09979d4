// Phase/role -> screen routing. The client never infers state; it only
// chooses which screen renders the latest snapshot.

import type { Phase } from "./protocol.js";
import type { Role } from "./view.js";

export type ScreenId =
  | "lobby"
  | "board"
  | "reader"
  | "guesser"
  | "waiting"
  | "discussion"
  | "second-vote"
  | "summary"
  | "power"
  | "game-over"
  | "resync";

/**
 * Which screen a player sees. `hasVoted` / `hasPassed` refine the phases in
 * which a player who already acted drops back to a waiting/board view.
 */
export function screenFor(
  phase: Phase | null,
  role: Role,
  options: { hasVoted?: boolean; hasPassed?: boolean } = {},
): ScreenId {
  if (phase === null) return "lobby";
  switch (phase) {
    case "lobby":
      return "lobby";
    case "task_draw":
      return "board";
    case "reader_composing":
      return role === "reader" ? "reader" : "waiting";
    case "guessing":
      if (role === "reader") return "waiting";
      return options.hasVoted ? "waiting" : "guesser";
    case "first_tally":
      return "board";
    case "discussion":
      return "discussion";
    case "second_vote":
      return options.hasVoted ? "waiting" : "second-vote";
    case "scoring":
      return "summary";
    case "power_window":
      return role === "reader" ? "power" : "summary";
    case "roll_and_move":
      return "board";
    case "game_over":
      return "game-over";
    default:
      return "resync";
  }
}
