/** Trailing debounce where only the latest scheduled call survives a burst. */

export type Scheduler = (fn: () => void, ms: number) => unknown;
export type Canceller = (handle: unknown) => void;

export class Debouncer {
  private handle: unknown = null;
  private pendingFn: (() => void) | null = null;

  constructor(
    private readonly delayMs: number,
    private readonly schedule: Scheduler = (fn, ms) => setTimeout(fn, ms),
    private readonly cancel: Canceller = (h) => clearTimeout(h as number),
  ) {}

  run(fn: () => void): void {
    if (this.handle !== null) {
      this.cancel(this.handle);
    }
    this.pendingFn = fn;
    this.handle = this.schedule(() => this.fire(), this.delayMs);
  }

  /** Execute a pending call immediately instead of waiting out the delay. */
  flush(): void {
    if (this.handle !== null) {
      this.cancel(this.handle);
      this.fire();
    }
  }

  get pending(): boolean {
    return this.handle !== null;
  }

  private fire(): void {
    this.handle = null;
    const fn = this.pendingFn;
    this.pendingFn = null;
    fn?.();
  }
}
