// DOM rendering: one function per screen, all driven from the ClientView.
// Rendering is a pure projection of the latest server snapshot plus the
// player's local pending input (SE draft, argument builder, chat draft).

import { CascadingMenuBlock, MultiVoteBuilder } from "./cmb.js";
import { renderHighlighted, selectionSpan } from "./highlight.js";
import type { Argument, MessageCode, Strategy } from "./protocol.js";
import { STRATEGIES, STRATEGY_LABELS } from "./protocol.js";
import { screenFor, type ScreenId } from "./screens.js";
import type { ClientView } from "./view.js";

export interface UiState {
  seDraft: string;
  chatDraft: string;
  cmb: CascadingMenuBlock | null;
  multiVote: MultiVoteBuilder | null;
  send: (code: MessageCode, payload: Record<string, unknown>) => void;
}

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export function currentScreen(view: ClientView): ScreenId {
  if (!view.room) return "lobby";
  if (!view.sync) return "lobby";
  if (view.resyncNeeded) return "resync";
  const phase = view.sync.phase;
  const role = view.role();
  return screenFor(phase, role, {
    hasVoted: phase === "second_vote" ? view.mySecondVoteRecorded() : view.myFirstVoteRecorded(),
    hasPassed: view.iHavePassedDiscussion(),
  });
}

export function render(root: HTMLElement, view: ClientView, ui: UiState): void {
  const screen = currentScreen(view);
  root.innerHTML = "";
  root.appendChild(header(view));
  const layout = el("div", "layout");
  const main = el("main", "screen");
  main.dataset.screen = screen;
  main.appendChild(renderScreen(screen, view, ui));
  layout.appendChild(main);
  const side = el("aside", "side");
  if (view.sync) side.appendChild(boardPanel(view));
  side.appendChild(chatPanel(view, ui));
  layout.appendChild(side);
  root.appendChild(layout);
  if (view.lastError) {
    const err = el("div", "error-bar");
    err.textContent = `${view.lastError.code}: ${view.lastError.message}`;
    root.appendChild(err);
  }
}

function el(tag: string, className?: string, html?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (html !== undefined) node.innerHTML = html;
  return node;
}

function header(view: ClientView): HTMLElement {
  const sync = view.sync;
  const bits: string[] = ["<strong>MiBoard</strong>"];
  if (view.room) bits.push(`room ${view.room.room_id}`);
  if (sync) {
    bits.push(`turn ${sync.turn}`, `phase ${sync.phase.replace(/_/g, " ")}`);
    bits.push(`you: ${esc(view.nameOf(sync.you))} (${view.role()})`);
  }
  return el("header", "topbar", bits.join(" · "));
}

function renderScreen(screen: ScreenId, view: ClientView, ui: UiState): HTMLElement {
  switch (screen) {
    case "lobby":
      return lobbyScreen(view, ui);
    case "reader":
      return readerScreen(view, ui);
    case "guesser":
      return guesserScreen(view, ui, false);
    case "second-vote":
      return secondVoteScreen(view, ui);
    case "discussion":
      return discussionScreen(view, ui);
    case "summary":
      return summaryScreen(view);
    case "power":
      return powerScreen(view, ui);
    case "waiting":
      return waitingScreen(view);
    case "game-over":
      return gameOverScreen(view, ui);
    case "board":
      return waitingScreen(view);
    case "resync":
      return el("section", "notice", "Out of sync with the server; requesting a fresh snapshot…");
  }
}

function lobbyScreen(view: ClientView, ui: UiState): HTMLElement {
  const section = el("section");
  section.appendChild(el("h2", undefined, "Lobby"));
  if (!view.room) {
    section.appendChild(el("p", undefined, "Connecting…"));
    return section;
  }
  const members = view.room.members
    .map((m) => `<li>${esc(m.name)} ${m.connected ? "" : "(disconnected)"}</li>`)
    .join("");
  section.appendChild(el("ul", "members", members));
  const count = view.room.members.length;
  if (count >= 3) {
    const button = el("button", "primary", "Start game") as HTMLButtonElement;
    button.addEventListener("click", () => ui.send("begin_game", {}));
    section.appendChild(button);
  } else {
    section.appendChild(el("p", undefined, `Waiting for players (${count}/3 minimum)…`));
  }
  return section;
}

function textPanel(view: ClientView): HTMLElement {
  const sync = view.sync!;
  const panel = el("section", "text-panel");
  if (!sync.text) return panel;
  panel.appendChild(el("h3", undefined, esc(sync.text.title)));
  const body = sync.text.sentences
    .map((s, i) => {
      const n = i + 1;
      const cls = n === sync.text!.target_index ? "sentence target" : "sentence";
      return `<span class="${cls}">${esc(s)}</span>`;
    })
    .join(" ");
  panel.appendChild(el("p", "text-body", body));
  return panel;
}

function readerScreen(view: ClientView, ui: UiState): HTMLElement {
  const sync = view.sync!;
  const section = el("section");
  section.appendChild(el("h2", undefined, "Your turn: self-explain the highlighted sentence"));
  section.appendChild(textPanel(view));
  const a = sync.assignment;
  if (a) {
    const max = view.statics?.max_redraws ?? 1;
    const card = el(
      "div",
      "task-card",
      `Use <strong>${STRATEGY_LABELS[a.strategy]}</strong> for <strong>${a.point_value}</strong> points`,
    );
    const redrawStrategy = el("button", undefined, "New strategy") as HTMLButtonElement;
    redrawStrategy.disabled = a.strategy_redraws_used >= max;
    redrawStrategy.addEventListener("click", () => ui.send("redraw", { kind: "strategy" }));
    const redrawPoints = el("button", undefined, "New point value") as HTMLButtonElement;
    redrawPoints.disabled = a.point_redraws_used >= max;
    redrawPoints.addEventListener("click", () => ui.send("redraw", { kind: "points" }));
    card.appendChild(redrawStrategy);
    card.appendChild(redrawPoints);
    section.appendChild(card);
  }
  const textarea = el("textarea", "se-input") as HTMLTextAreaElement;
  textarea.placeholder = "Type your self-explanation…";
  textarea.value = ui.seDraft;
  textarea.addEventListener("input", () => {
    ui.seDraft = textarea.value;
  });
  section.appendChild(textarea);
  const submit = el("button", "primary", "Submit self-explanation") as HTMLButtonElement;
  submit.addEventListener("click", () => {
    const text = textarea.value.trim();
    if (text) {
      ui.send("se_submit", { text });
      ui.seDraft = "";
    }
  });
  section.appendChild(submit);
  return section;
}

function cmbPanel(view: ClientView, ui: UiState, block: CascadingMenuBlock, onReady: () => void): HTMLElement {
  const sync = view.sync!;
  const se = sync.self_explanation ?? "";
  const panel = el("div", "cmb");
  const seBox = el("blockquote", "se-display");
  seBox.innerHTML = renderHighlighted(se, block.span);
  panel.appendChild(seBox);

  const strategies = el("div", "cmb-stage strategies");
  strategies.appendChild(el("h4", undefined, "1. Which strategy is most prominent?"));
  for (const strategy of STRATEGIES) {
    const button = el("button", block.strategy === strategy ? "choice selected" : "choice", STRATEGY_LABELS[strategy]) as HTMLButtonElement;
    button.addEventListener("click", () => {
      block.selectStrategy(strategy);
      onReady();
    });
    strategies.appendChild(button);
  }
  panel.appendChild(strategies);

  if (block.strategy !== null) {
    const reasons = el("div", "cmb-stage reasons");
    reasons.appendChild(el("h4", undefined, "2. Why?"));
    for (const reason of block.reasons()) {
      const button = el("button", block.reason === reason ? "choice selected" : "choice", esc(reason.replace(/_/g, " "))) as HTMLButtonElement;
      button.addEventListener("click", () => {
        block.selectReason(reason);
        onReady();
      });
      reasons.appendChild(button);
    }
    panel.appendChild(reasons);
  }

  if (block.stage() === "highlight" || (block.reason !== null && block.reason !== "other")) {
    const hint = el("div", "cmb-stage highlight");
    hint.appendChild(el("h4", undefined, "3. Highlight where the strategy shows"));
    const capture = el("button", undefined, "Use current selection") as HTMLButtonElement;
    capture.addEventListener("click", () => {
      const span = selectionSpan(seBox as HTMLElement, window.getSelection());
      if (span) {
        block.setSpan(span[0], span[1]);
        onReady();
      }
    });
    hint.appendChild(capture);
    panel.appendChild(hint);
  }
  return panel;
}

function guesserScreen(view: ClientView, ui: UiState, _multi: boolean): HTMLElement {
  const section = el("section");
  section.appendChild(el("h2", undefined, "Identify the reader's strategy"));
  section.appendChild(textPanel(view));
  if (!ui.cmb) {
    ui.cmb = new CascadingMenuBlock((s: Strategy) => view.reasonsFor(s));
  }
  const block = ui.cmb;
  const rerender = () => {
    const parent = section.parentElement;
    if (parent) {
      const replacement = guesserScreen(view, ui, _multi);
      parent.replaceChild(replacement, section);
    }
  };
  section.appendChild(cmbPanel(view, ui, block, rerender));
  const submit = el("button", "primary", "Submit guess") as HTMLButtonElement;
  submit.disabled = block.stage() !== "ready";
  submit.addEventListener("click", () => {
    const argument = block.build();
    if (argument) {
      ui.send("guess", { argument });
      ui.cmb = null;
    }
  });
  section.appendChild(submit);
  if (block.stage() !== "ready") {
    section.appendChild(el("p", "hint", "Complete every step above to enable submission."));
  }
  return section;
}

function secondVoteScreen(view: ClientView, ui: UiState): HTMLElement {
  const sync = view.sync!;
  const section = el("section");
  section.appendChild(el("h2", undefined, "Second vote: select every strategy you saw"));
  section.appendChild(textPanel(view));
  if (!ui.multiVote) {
    ui.multiVote = new MultiVoteBuilder((s: Strategy) => view.reasonsFor(s));
  }
  const builder = ui.multiVote;
  const chosen = builder.selected();
  const picks = el(
    "p",
    "picks",
    chosen.length
      ? `Selected: ${chosen.map((s) => STRATEGY_LABELS[s]).join(", ")}`
      : "No strategies selected yet.",
  );
  section.appendChild(picks);
  const rerender = () => {
    const parent = section.parentElement;
    if (parent) parent.replaceChild(secondVoteScreen(view, ui), section);
  };
  if (builder.current) {
    section.appendChild(cmbPanel(view, ui, builder.current, rerender));
    const commit = el("button", undefined, "Add this strategy") as HTMLButtonElement;
    commit.disabled = builder.current.stage() !== "ready";
    commit.addEventListener("click", () => {
      builder.commitCurrent();
      rerender();
    });
    section.appendChild(commit);
  } else {
    const addRow = el("div", "add-strategy");
    for (const strategy of STRATEGIES) {
      if (chosen.includes(strategy)) continue;
      const button = el("button", "choice", `+ ${STRATEGY_LABELS[strategy]}`) as HTMLButtonElement;
      button.addEventListener("click", () => {
        builder.startStrategy(strategy);
        rerender();
      });
      addRow.appendChild(button);
    }
    section.appendChild(addRow);
  }
  const isReader = view.role() === "reader";
  if (isReader && sync.assignment) {
    section.appendChild(
      el("p", "hint", `As the reader you must include ${STRATEGY_LABELS[sync.assignment.strategy]}.`),
    );
  }
  const submit = el("button", "primary", "Submit votes") as HTMLButtonElement;
  submit.disabled = chosen.length === 0;
  submit.addEventListener("click", () => {
    const args: Argument[] = builder.buildAll();
    if (args.length) {
      ui.send("vote2", { arguments: args });
      ui.multiVote = null;
    }
  });
  section.appendChild(submit);
  return section;
}

function discussionScreen(view: ClientView, ui: UiState): HTMLElement {
  const sync = view.sync!;
  const section = el("section");
  section.appendChild(el("h2", undefined, "Discussion"));
  section.appendChild(
    el(
      "div",
      "rules-banner",
      "Votes disagreed. Argue your case in chat: up to " +
        `${sync.discussion?.cap ?? 3} contributions each, or pass to forfeit the rest.`,
    ),
  );
  const transcript = el("ul", "transcript");
  for (const entry of sync.discussion?.transcript ?? []) {
    transcript.appendChild(el("li", undefined, `<strong>${esc(view.nameOf(entry.player))}</strong>: ${esc(entry.text)}`));
  }
  section.appendChild(transcript);
  const me = view.me();
  const used = me?.discussion_messages_used ?? 0;
  const cap = sync.discussion?.cap ?? 3;
  if (!view.iHavePassedDiscussion() && used < cap) {
    const row = el("div", "compose");
    const input = el("input") as HTMLInputElement;
    input.placeholder = `Contribution ${used + 1} of ${cap}…`;
    const send = el("button", "primary", "Send") as HTMLButtonElement;
    send.addEventListener("click", () => {
      const text = input.value.trim();
      if (text) {
        ui.send("discuss_msg", { text });
        input.value = "";
      }
    });
    row.appendChild(input);
    row.appendChild(send);
    section.appendChild(row);
    // The pass button disappears once used.
    const pass = el("button", "pass", "Pass") as HTMLButtonElement;
    pass.addEventListener("click", () => ui.send("discuss_pass", {}));
    section.appendChild(pass);
  } else {
    section.appendChild(el("p", "hint", "You have no contributions left; waiting for the others."));
  }
  return section;
}

function summaryScreen(view: ClientView): HTMLElement {
  const sync = view.sync!;
  const section = el("section");
  section.appendChild(el("h2", undefined, "Round summary"));
  if (sync.assignment) {
    section.appendChild(
      el(
        "p",
        undefined,
        `Task: ${STRATEGY_LABELS[sync.assignment.strategy]} for ${sync.assignment.point_value} points`,
      ),
    );
  }
  const votes = el("ul", "votes");
  const first = sync.first_votes ?? {};
  for (const [pid, argument] of Object.entries(first)) {
    const what = argument
      ? `${STRATEGY_LABELS[argument.strategy]} (${esc(argument.reason.replace(/_/g, " "))})`
      : "no vote";
    votes.appendChild(el("li", undefined, `<strong>${esc(view.nameOf(pid))}</strong>: ${what}`));
  }
  section.appendChild(votes);
  if (view.lastResult && view.lastResult.code === "score_result") {
    const accepted = (view.lastResult.accepted as string[]) ?? [];
    section.appendChild(
      el("p", undefined, `Accepted after discussion: ${accepted.length ? accepted.join(", ") : "nothing"}`),
    );
  }
  const deltas = (view.lastResult?.deltas ?? null) as Record<string, number> | null;
  if (deltas) {
    const list = el("ul", "deltas");
    for (const [pid, delta] of Object.entries(deltas)) {
      list.appendChild(el("li", undefined, `${esc(view.nameOf(pid))}: +${delta}`));
    }
    section.appendChild(list);
  }
  return section;
}

function powerScreen(view: ClientView, ui: UiState): HTMLElement {
  const section = el("section");
  section.appendChild(summaryScreen(view));
  section.appendChild(el("h2", undefined, "Power cards"));
  const cards = view.me()?.power_cards ?? [];
  if (cards.length === 0) {
    section.appendChild(el("p", undefined, "No power cards in hand."));
  }
  for (const card of cards) {
    if (card === "freeze") {
      for (const p of view.sync!.players) {
        if (p.player_id === view.you) continue;
        const button = el("button", "choice", `Freeze ${esc(p.name)}`) as HTMLButtonElement;
        button.addEventListener("click", () => ui.send("play_power", { card, target: p.player_id }));
        section.appendChild(button);
      }
    } else {
      const button = el("button", "choice", `Play ${esc(card.replace(/_/g, " "))}`) as HTMLButtonElement;
      button.addEventListener("click", () => ui.send("play_power", { card }));
      section.appendChild(button);
    }
  }
  const skip = el("button", "primary", "Roll the die") as HTMLButtonElement;
  skip.addEventListener("click", () => ui.send("skip_power", {}));
  section.appendChild(skip);
  return section;
}

function waitingScreen(view: ClientView): HTMLElement {
  const sync = view.sync!;
  const section = el("section");
  section.appendChild(el("h2", undefined, "Waiting"));
  section.appendChild(textPanel(view));
  const who = sync.pending.map((pid) => esc(view.nameOf(pid))).join(", ");
  section.appendChild(el("p", undefined, who ? `Waiting on: ${who}` : "The server is advancing the game…"));
  if (sync.self_explanation) {
    section.appendChild(el("blockquote", "se-display", esc(sync.self_explanation)));
  }
  if (view.lastRoll) {
    const r = view.lastRoll;
    const bits = [`${esc(view.nameOf(r.player))} rolled ${r.dice.join(" + ")} = ${r.total}`];
    if (r.eventCard) bits.push(`event: ${esc(r.eventCard.replace(/_/g, " "))}`);
    if (r.powerDrawn) bits.push(`drew a power card`);
    section.appendChild(el("p", "roll", bits.join(" · ")));
  }
  return section;
}

function gameOverScreen(view: ClientView, ui: UiState): HTMLElement {
  const sync = view.sync!;
  const section = el("section");
  section.appendChild(el("h2", undefined, "Game over"));
  if (sync.winner) {
    section.appendChild(
      el("p", undefined, `<strong>${esc(view.nameOf(sync.winner))}</strong> wins (${esc(sync.win_reason ?? "")}).`),
    );
  } else {
    section.appendChild(el("p", undefined, `Game ended: ${esc(sync.win_reason ?? "aborted")}.`));
  }
  const standings = [...sync.players].sort((a, b) => b.score - a.score);
  const list = el("ol", "standings");
  for (const p of standings) {
    list.appendChild(el("li", undefined, `${esc(p.name)} — ${p.score} points, square ${p.token}`));
  }
  section.appendChild(list);
  const again = el("button", "primary", "Play again") as HTMLButtonElement;
  again.addEventListener("click", () => ui.send("begin_game", {}));
  section.appendChild(again);
  return section;
}

function boardPanel(view: ClientView): HTMLElement {
  const sync = view.sync!;
  const panel = el("div", "board-panel");
  panel.appendChild(el("h3", undefined, "Board"));
  const track = el("div", "track");
  const byToken = new Map<number, string[]>();
  for (const p of sync.players) {
    const list = byToken.get(p.token) ?? [];
    list.push(p.name.slice(0, 2));
    byToken.set(p.token, list);
  }
  for (let i = 0; i < sync.board_length; i += 1) {
    const cls = i === sync.board_length - 1 ? "square finish" : "square";
    const names = byToken.get(i);
    track.appendChild(el("span", cls, names ? names.map(esc).join("") : ""));
  }
  panel.appendChild(track);
  const scores = el("ul", "scores");
  for (const p of sync.players) {
    const flags = [
      p.player_id === sync.reader ? "reader" : "",
      p.connected ? "" : "offline",
      p.frozen_turns > 0 ? `frozen x${p.frozen_turns}` : "",
    ]
      .filter(Boolean)
      .join(", ");
    scores.appendChild(
      el(
        "li",
        undefined,
        `${esc(p.name)}: ${p.score} pts, square ${p.token}` +
          `${p.power_card_count ? `, ${p.power_card_count} card(s)` : ""}` +
          (flags ? ` <em>(${flags})</em>` : ""),
      ),
    );
  }
  panel.appendChild(scores);
  return panel;
}

function chatPanel(view: ClientView, ui: UiState): HTMLElement {
  const panel = el("div", "chat-panel");
  panel.appendChild(el("h3", undefined, "Chat"));
  const log = el("ul", "chat-log");
  for (const entry of view.chat.slice(-50)) {
    const cls = entry.kind === "discussion" ? "discussion" : entry.private ? "private" : "";
    log.appendChild(
      el("li", cls, `<strong>${esc(view.nameOf(entry.from))}</strong>: ${esc(entry.text)}`),
    );
  }
  panel.appendChild(log);
  const enabled = view.sync ? view.sync.chat_enabled : true;
  const row = el("div", "compose");
  const input = el("input") as HTMLInputElement;
  input.placeholder = enabled ? "Say something…" : "Chat is closed right now";
  input.disabled = !enabled;
  input.value = ui.chatDraft;
  input.addEventListener("input", () => {
    ui.chatDraft = input.value;
  });
  const send = el("button", undefined, "Send") as HTMLButtonElement;
  send.disabled = !enabled;
  send.addEventListener("click", () => {
    const text = input.value.trim();
    if (!text) return;
    // During discussion the chat box feeds capped contributions.
    if (view.sync?.phase === "discussion" && !view.iHavePassedDiscussion()) {
      ui.send("discuss_msg", { text });
    } else {
      ui.send("chat", { text });
    }
    ui.chatDraft = "";
    input.value = "";
  });
  row.appendChild(input);
  row.appendChild(send);
  panel.appendChild(row);
  return panel;
}
