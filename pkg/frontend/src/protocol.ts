// Wire protocol v1: frame envelope, codes, and the payload shapes the
// client consumes. Kept in sync with docs/protocol.md on the server side.

export const PROTOCOL_VERSION = 1;

export type MessageCode =
  | "join_zone"
  | "room_assigned"
  | "begin_game"
  | "state_sync"
  | "task_drawn"
  | "redraw"
  | "se_submit"
  | "guess"
  | "vote1_result"
  | "discuss_msg"
  | "discuss_pass"
  | "vote2"
  | "score_result"
  | "play_power"
  | "skip_power"
  | "roll_result"
  | "event_applied"
  | "game_over"
  | "chat"
  | "error"
  | "ping"
  | "pong";

export interface Frame {
  v: number;
  seq: number;
  code: MessageCode;
  payload: Record<string, unknown>;
}

export type Strategy =
  | "comprehension_monitoring"
  | "paraphrasing"
  | "prediction"
  | "elaboration"
  | "bridging";

export const STRATEGIES: Strategy[] = [
  "comprehension_monitoring",
  "paraphrasing",
  "prediction",
  "elaboration",
  "bridging",
];

export const STRATEGY_LABELS: Record<Strategy, string> = {
  comprehension_monitoring: "Comprehension Monitoring",
  paraphrasing: "Paraphrasing",
  prediction: "Prediction",
  elaboration: "Elaboration",
  bridging: "Bridging",
};

export interface Argument {
  strategy: Strategy;
  reason: string;
  span: [number, number] | null;
}

export interface Assignment {
  strategy: Strategy;
  point_value: number;
  strategy_redraws_used: number;
  point_redraws_used: number;
}

export interface Member {
  player_id: string;
  name: string;
  connected: boolean;
}

export interface RoomAssigned {
  room_id: number;
  zone: string;
  player_id: string;
  resume_token: string | null;
  members: Member[];
  started: boolean;
}

export interface GameStatic {
  game_id: string;
  players: string[];
  board_length: number;
  point_win_threshold: number;
  discussion_message_cap: number;
  discussion_time_limit: number;
  max_redraws: number;
  reasons: Record<Strategy, string[]>;
}

export interface PlayerView {
  player_id: string;
  name: string;
  score: number;
  token: number;
  frozen_turns: number;
  connected: boolean;
  power_card_count: number;
  power_cards: string[] | null;
  discussion_messages_used: number;
  passed_discussion: boolean;
  has_first_vote: boolean;
  has_second_vote: boolean;
}

export type Phase =
  | "lobby"
  | "task_draw"
  | "reader_composing"
  | "guessing"
  | "first_tally"
  | "discussion"
  | "second_vote"
  | "scoring"
  | "power_window"
  | "roll_and_move"
  | "game_over";

export interface StateSync {
  game_id: string;
  room_id: number;
  event_seq: number;
  phase: Phase;
  turn: number;
  you: string;
  reader: string;
  players: PlayerView[];
  text: {
    text_id: string;
    title: string;
    sentences: string[];
    reveal_upto: number;
    target_index: number | null;
  } | null;
  assignment: Assignment | null;
  self_explanation: string | null;
  first_votes: Record<string, Argument | null> | null;
  second_votes: Record<string, Argument[] | null> | null;
  discussion: { transcript: { player: string; text: string }[]; cap: number } | null;
  pending: string[];
  chat_enabled: boolean;
  board_length: number;
  winner: string | null;
  win_reason: string | null;
  state_hash: string;
}

export function encodeFrame(code: MessageCode, payload: Record<string, unknown>, seq: number): string {
  const frame: Frame = { v: PROTOCOL_VERSION, seq, code, payload };
  return JSON.stringify(frame);
}

export class FrameError extends Error {
  constructor(public reason: string, message: string) {
    super(message);
  }
}

const CODES = new Set<string>([
  "join_zone", "room_assigned", "begin_game", "state_sync", "task_drawn",
  "redraw", "se_submit", "guess", "vote1_result", "discuss_msg",
  "discuss_pass", "vote2", "score_result", "play_power", "skip_power",
  "roll_result", "event_applied", "game_over", "chat", "error", "ping", "pong",
]);

export function decodeFrame(raw: string): Frame {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    throw new FrameError("malformed", "frame is not JSON");
  }
  if (typeof data !== "object" || data === null || Array.isArray(data)) {
    throw new FrameError("malformed", "frame must be an object");
  }
  const frame = data as Record<string, unknown>;
  if (frame.v !== PROTOCOL_VERSION) {
    throw new FrameError("version_mismatch", `unsupported protocol version ${frame.v}`);
  }
  if (typeof frame.seq !== "number" || frame.seq < 0) {
    throw new FrameError("malformed", "bad seq");
  }
  if (typeof frame.code !== "string" || !CODES.has(frame.code)) {
    throw new FrameError("unknown_code", `unknown code ${frame.code}`);
  }
  if (typeof frame.payload !== "object" || frame.payload === null) {
    throw new FrameError("malformed", "payload must be an object");
  }
  return {
    v: frame.v,
    seq: frame.seq,
    code: frame.code as MessageCode,
    payload: frame.payload as Record<string, unknown>,
  };
}
