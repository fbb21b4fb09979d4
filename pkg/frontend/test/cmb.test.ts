import { describe, expect, it } from "vitest";
import { CascadingMenuBlock, MultiVoteBuilder } from "../src/cmb.js";
import type { Strategy } from "../src/protocol.js";

const REASONS: Record<string, string[]> = {
  bridging: ["linked_to_a_specific_sentence", "linked_to_a_global_theme", "other"],
  elaboration: ["linked_to_prior_knowledge", "other"],
};
const reasonsFor = (s: Strategy) => REASONS[s] ?? ["other"];

describe("cascading menu block", () => {
  it("cascades strategy -> reason -> highlight", () => {
    const block = new CascadingMenuBlock(reasonsFor);
    expect(block.stage()).toBe("strategy");
    expect(block.build()).toBeNull();
    block.selectStrategy("bridging");
    expect(block.stage()).toBe("reason");
    expect(block.reasons()).toEqual(REASONS.bridging);
    block.selectReason("linked_to_a_global_theme");
    expect(block.stage()).toBe("highlight");
    expect(block.build()).toBeNull();
    block.setSpan(4, 17);
    expect(block.stage()).toBe("ready");
    expect(block.build()).toEqual({
      strategy: "bridging",
      reason: "linked_to_a_global_theme",
      span: [4, 17],
    });
  });

  it("reason 'other' waives the highlight stage", () => {
    const block = new CascadingMenuBlock(reasonsFor);
    block.selectStrategy("elaboration");
    block.selectReason("other");
    expect(block.stage()).toBe("ready");
    expect(block.build()).toEqual({ strategy: "elaboration", reason: "other", span: null });
  });

  it("changing strategy resets the cascade", () => {
    const block = new CascadingMenuBlock(reasonsFor);
    block.selectStrategy("bridging");
    block.selectReason("linked_to_a_global_theme");
    block.setSpan(0, 5);
    block.selectStrategy("elaboration");
    expect(block.stage()).toBe("reason");
    expect(block.span).toBeNull();
  });

  it("rejects reasons that do not belong to the strategy", () => {
    const block = new CascadingMenuBlock(reasonsFor);
    block.selectStrategy("elaboration");
    block.selectReason("linked_to_a_global_theme"); // bridging-only
    expect(block.reason).toBeNull();
  });

  it("rejects empty spans", () => {
    const block = new CascadingMenuBlock(reasonsFor);
    block.selectStrategy("bridging");
    block.selectReason("linked_to_a_specific_sentence");
    block.setSpan(7, 7);
    expect(block.stage()).toBe("highlight");
  });
});

describe("multi-vote builder", () => {
  it("collects one argument per strategy", () => {
    const builder = new MultiVoteBuilder(reasonsFor);
    const first = builder.startStrategy("bridging");
    first.selectReason("other");
    expect(builder.commitCurrent()).toBe(true);
    const second = builder.startStrategy("elaboration");
    second.selectReason("other");
    expect(builder.commitCurrent()).toBe(true);
    expect(builder.selected()).toEqual(["bridging", "elaboration"]);
    expect(builder.buildAll()).toHaveLength(2);
  });

  it("refuses to commit an incomplete cascade", () => {
    const builder = new MultiVoteBuilder(reasonsFor);
    builder.startStrategy("bridging");
    expect(builder.commitCurrent()).toBe(false);
    expect(builder.selected()).toEqual([]);
  });

  it("re-selecting a strategy replaces its argument", () => {
    const builder = new MultiVoteBuilder(reasonsFor);
    const a = builder.startStrategy("bridging");
    a.selectReason("other");
    builder.commitCurrent();
    const b = builder.startStrategy("bridging");
    b.selectReason("linked_to_a_global_theme");
    b.setSpan(0, 3);
    builder.commitCurrent();
    expect(builder.buildAll()).toEqual([
      { strategy: "bridging", reason: "linked_to_a_global_theme", span: [0, 3] },
    ]);
  });
});
