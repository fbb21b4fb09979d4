// Cascading menu block: strategy -> reason -> highlighted span.
// Each completed stage reveals the next; submission unlocks only when every
// required stage is done ("other" waives the highlight).

import type { Argument, Strategy } from "./protocol.js";

export type CmbStage = "strategy" | "reason" | "highlight" | "ready";

export class CascadingMenuBlock {
  strategy: Strategy | null = null;
  reason: string | null = null;
  span: [number, number] | null = null;

  constructor(private reasonsFor: (strategy: Strategy) => string[]) {}

  stage(): CmbStage {
    if (this.strategy === null) return "strategy";
    if (this.reason === null) return "reason";
    if (this.reason !== "other" && this.span === null) return "highlight";
    return "ready";
  }

  selectStrategy(strategy: Strategy): void {
    if (this.strategy !== strategy) {
      this.strategy = strategy;
      this.reason = null; // reasons cascade from the strategy
      this.span = null;
    }
  }

  selectReason(reason: string): void {
    if (this.strategy === null) return;
    if (!this.reasonsFor(this.strategy).includes(reason)) return;
    this.reason = reason;
    if (reason === "other") {
      this.span = null;
    }
  }

  setSpan(start: number, end: number): void {
    if (this.stage() === "highlight" || this.span !== null) {
      if (start < end) this.span = [start, end];
    }
  }

  reasons(): string[] {
    return this.strategy === null ? [] : this.reasonsFor(this.strategy);
  }

  /** The built argument, or null while stages remain. */
  build(): Argument | null {
    if (this.stage() !== "ready" || this.strategy === null || this.reason === null) {
      return null;
    }
    return { strategy: this.strategy, reason: this.reason, span: this.span };
  }

  reset(): void {
    this.strategy = null;
    this.reason = null;
    this.span = null;
  }
}

/**
 * Multi-select wrapper for the second voting round: one argument per
 * selected strategy, each built through its own cascade.
 */
export class MultiVoteBuilder {
  private args = new Map<Strategy, Argument>();

  constructor(private reasonsFor: (strategy: Strategy) => string[]) {}

  current: CascadingMenuBlock | null = null;

  startStrategy(strategy: Strategy): CascadingMenuBlock {
    const block = new CascadingMenuBlock(this.reasonsFor);
    block.selectStrategy(strategy);
    this.current = block;
    return block;
  }

  commitCurrent(): boolean {
    const arg = this.current?.build() ?? null;
    if (arg === null) return false;
    this.args.set(arg.strategy, arg);
    this.current = null;
    return true;
  }

  remove(strategy: Strategy): void {
    this.args.delete(strategy);
  }

  selected(): Strategy[] {
    return [...this.args.keys()];
  }

  buildAll(): Argument[] {
    return [...this.args.values()];
  }

  reset(): void {
    this.args.clear();
    this.current = null;
  }
}
