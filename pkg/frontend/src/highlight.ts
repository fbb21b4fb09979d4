// Character-offset capture for text selections inside the SE element.
// The SE is rendered as plain text (optionally split across child text
// nodes), so a selection maps to [start, end) offsets into the full string.

export function selectionSpan(container: HTMLElement, selection: Selection | null): [number, number] | null {
  if (!selection || selection.rangeCount === 0 || selection.isCollapsed) {
    return null;
  }
  const range = selection.getRangeAt(0);
  if (!container.contains(range.startContainer) || !container.contains(range.endContainer)) {
    return null;
  }
  const start = offsetWithin(container, range.startContainer, range.startOffset);
  const end = offsetWithin(container, range.endContainer, range.endOffset);
  if (start === null || end === null || start >= end) {
    return null;
  }
  return [start, end];
}

function offsetWithin(container: HTMLElement, node: Node, offset: number): number | null {
  let total = 0;
  const walker = document.createTreeWalker(container, NodeFilter.SHOW_TEXT);
  let current = walker.nextNode();
  while (current) {
    if (current === node) {
      return total + offset;
    }
    total += current.textContent?.length ?? 0;
    current = walker.nextNode();
  }
  // Element-node boundaries (e.g. triple-click selections) resolve to the
  // cumulative length of the text before the offset-th child.
  if (node === container || container.contains(node)) {
    let acc = 0;
    for (let i = 0; i < Math.min(offset, node.childNodes.length); i += 1) {
      acc += node.childNodes[i].textContent?.length ?? 0;
    }
    return acc;
  }
  return null;
}

/** Wraps the highlighted span in <mark> for display; returns sanitized HTML. */
export function renderHighlighted(text: string, span: [number, number] | null): string {
  const escape = (s: string) =>
    s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
  if (span === null) {
    return escape(text);
  }
  const [start, end] = span;
  if (start < 0 || end > text.length || start >= end) {
    return escape(text);
  }
  return `${escape(text.slice(0, start))}<mark>${escape(text.slice(start, end))}</mark>${escape(text.slice(end))}`;
}
