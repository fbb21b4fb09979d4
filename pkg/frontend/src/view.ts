// Client-side state: a read-only projection of what the server sent.
// Every mutation happens by applying a received frame in seq order; the
// client never computes scores or advances phases on its own.

import type {
  Argument,
  Frame,
  GameStatic,
  RoomAssigned,
  StateSync,
  Strategy,
} from "./protocol.js";

export type Role = "reader" | "guesser" | "lobby";

export interface ChatEntry {
  from: string;
  text: string;
  kind: "chat" | "discussion" | "system";
  private?: boolean;
}

export interface RollInfo {
  player: string;
  dice: number[];
  total: number;
  eventCard: string | null;
  powerDrawn: string | null;
}

export class ClientView {
  you: string | null = null;
  room: RoomAssigned | null = null;
  statics: GameStatic | null = null;
  sync: StateSync | null = null;
  chat: ChatEntry[] = [];
  lastError: { code: string; message: string } | null = null;
  lastRoll: RollInfo | null = null;
  lastResult: Record<string, unknown> | null = null;
  resyncNeeded = false;
  private lastServerSeq = 0;

  role(): Role {
    if (!this.sync || this.sync.phase === "game_over") return this.sync ? this.roleInGame() : "lobby";
    return this.roleInGame();
  }

  private roleInGame(): Role {
    if (!this.sync || !this.you) return "lobby";
    return this.sync.reader === this.you ? "reader" : "guesser";
  }

  me() {
    if (!this.sync || !this.you) return null;
    return this.sync.players.find((p) => p.player_id === this.you) ?? null;
  }

  nameOf(pid: string): string {
    const fromGame = this.sync?.players.find((p) => p.player_id === pid);
    if (fromGame) return fromGame.name;
    const member = this.room?.members.find((m) => m.player_id === pid);
    return member ? member.name : pid;
  }

  reasonsFor(strategy: Strategy): string[] {
    return this.statics?.reasons[strategy] ?? ["other"];
  }

  myFirstVoteRecorded(): boolean {
    const me = this.me();
    return me ? me.has_first_vote : false;
  }

  mySecondVoteRecorded(): boolean {
    const me = this.me();
    return me ? me.has_second_vote : false;
  }

  iHavePassedDiscussion(): boolean {
    const me = this.me();
    return me ? me.passed_discussion : false;
  }

  /** Applies one server frame; returns true when the UI should re-render. */
  applyFrame(frame: Frame): boolean {
    if (frame.seq <= this.lastServerSeq) {
      return false; // stale or duplicated delivery
    }
    this.lastServerSeq = frame.seq;
    switch (frame.code) {
      case "room_assigned": {
        const payload = frame.payload as unknown as RoomAssigned;
        this.room = payload;
        this.you = payload.player_id;
        return true;
      }
      case "begin_game": {
        this.statics = frame.payload as unknown as GameStatic;
        this.lastResult = null;
        this.lastRoll = null;
        return true;
      }
      case "state_sync": {
        const sync = frame.payload as unknown as StateSync;
        if (this.sync && sync.game_id === this.sync.game_id && sync.event_seq < this.sync.event_seq) {
          return false; // out-of-date snapshot
        }
        this.sync = sync;
        this.you = sync.you;
        return true;
      }
      case "chat": {
        this.chat.push({
          from: String(frame.payload.from_player ?? "?"),
          text: String(frame.payload.text ?? ""),
          kind: "chat",
          private: frame.payload.to != null,
        });
        return true;
      }
      case "discuss_msg": {
        this.chat.push({
          from: String(frame.payload.player ?? "?"),
          text: String(frame.payload.text ?? ""),
          kind: "discussion",
        });
        return true;
      }
      case "roll_result": {
        this.lastRoll = {
          player: String(frame.payload.player),
          dice: (frame.payload.dice as number[]) ?? [],
          total: Number(frame.payload.total ?? 0),
          eventCard: null,
          powerDrawn: null,
        };
        return true;
      }
      case "event_applied": {
        if (this.lastRoll && this.lastRoll.player === frame.payload.player) {
          this.lastRoll.eventCard = (frame.payload.card as string) ?? null;
          this.lastRoll.powerDrawn = (frame.payload.power_drawn as string) ?? null;
        }
        return true;
      }
      case "vote1_result":
      case "score_result": {
        this.lastResult = { code: frame.code, ...frame.payload };
        return true;
      }
      case "error": {
        this.lastError = {
          code: String(frame.payload.code ?? "error"),
          message: String(frame.payload.message ?? ""),
        };
        return true;
      }
      case "game_over":
        return true; // final state_sync carries the details
      case "task_drawn":
      case "redraw":
      case "se_submit":
      case "guess":
      case "discuss_pass":
      case "vote2":
      case "play_power":
      case "skip_power":
      case "pong":
        return false; // state_sync follows; nothing client-local to track
      default:
        // A code this client does not understand: ask for a resync rather
        // than guess at state.
        this.resyncNeeded = true;
        return true;
    }
  }

  revealedArguments(): Record<string, Argument | null> | null {
    return this.sync?.first_votes ?? null;
  }
}
