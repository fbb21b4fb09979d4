// @vitest-environment jsdom
import { describe, expect, it } from "vitest";
import { renderHighlighted, selectionSpan } from "../src/highlight.js";

function selectChars(container: HTMLElement, start: number, end: number): Selection {
  // Walk text nodes to place the range at absolute character offsets.
  const walker = document.createTreeWalker(container, NodeFilter.SHOW_TEXT);
  let node = walker.nextNode();
  let consumed = 0;
  const range = document.createRange();
  let startSet = false;
  while (node) {
    const length = node.textContent?.length ?? 0;
    if (!startSet && start <= consumed + length) {
      range.setStart(node, start - consumed);
      startSet = true;
    }
    if (startSet && end <= consumed + length) {
      range.setEnd(node, end - consumed);
      break;
    }
    consumed += length;
    node = walker.nextNode();
  }
  const selection = window.getSelection()!;
  selection.removeAllRanges();
  selection.addRange(range);
  return selection;
}

describe("selectionSpan", () => {
  it("maps a selection to character offsets", () => {
    const box = document.createElement("div");
    box.textContent = "The rain returns to the sea.";
    document.body.appendChild(box);
    const selection = selectChars(box, 4, 8);
    expect(selectionSpan(box, selection)).toEqual([4, 8]);
  });

  it("spans across multiple text nodes", () => {
    const box = document.createElement("div");
    box.appendChild(document.createTextNode("The rain "));
    box.appendChild(document.createTextNode("returns to the sea."));
    document.body.appendChild(box);
    const selection = selectChars(box, 4, 16);
    expect(selectionSpan(box, selection)).toEqual([4, 16]);
  });

  it("returns null for collapsed or outside selections", () => {
    const box = document.createElement("div");
    box.textContent = "Inside text.";
    const other = document.createElement("div");
    other.textContent = "Elsewhere.";
    document.body.append(box, other);
    expect(selectionSpan(box, null)).toBeNull();
    const selection = selectChars(other, 0, 4);
    expect(selectionSpan(box, selection)).toBeNull();
  });
});

describe("renderHighlighted", () => {
  it("wraps the span in a mark and escapes html", () => {
    const html = renderHighlighted("a <b> c d", [2, 5]);
    expect(html).toBe("a <mark>&lt;b&gt;</mark> c d");
  });

  it("ignores invalid spans", () => {
    expect(renderHighlighted("abc", [2, 2])).toBe("abc");
    expect(renderHighlighted("abc", [0, 99])).toBe("abc");
    expect(renderHighlighted("abc", null)).toBe("abc");
  });
});
