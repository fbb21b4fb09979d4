// Entry point: connect, join, and re-render on every server frame.

import { Connection, serverUrl } from "./net.js";
import { render, type UiState } from "./render.js";
import { ClientView } from "./view.js";

function start(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");

  const view = new ClientView();
  const connection = new Connection(serverUrl(window.location));
  const ui: UiState = {
    seDraft: "",
    chatDraft: "",
    cmb: null,
    multiVote: null,
    send: (code, payload) => connection.send(code, payload),
  };

  const storedToken = sessionStorage.getItem("miboard-resume");

  connection.onFrame = (frame) => {
    if (view.applyFrame(frame)) {
      if (frame.code === "room_assigned") {
        const token = (frame.payload as { resume_token?: string }).resume_token;
        if (token) sessionStorage.setItem("miboard-resume", token);
      }
      render(root, view, ui);
    }
  };
  connection.onClose = () => {
    const bar = document.createElement("div");
    bar.className = "error-bar";
    bar.textContent = "Connection lost — reload to reconnect.";
    root.appendChild(bar);
  };

  connection.connect();
  connection.onOpen(() => {
    const name = new URLSearchParams(window.location.search).get("name") ?? undefined;
    const payload: Record<string, unknown> = { zone: "main" };
    if (name) payload.name = name;
    if (storedToken) payload.resume = storedToken;
    connection.send("join_zone", payload);
  });

  render(root, view, ui);
}

start();
