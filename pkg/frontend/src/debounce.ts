/** Debounced single-flight request scheduler.
 *
 * At most one recomputation request is in flight; while it runs, newer
 * requests collapse into the latest one.  Stale responses are dropped, so an
 * acknowledged response always reflects the newest acknowledged input.
 */

export interface Scheduler {
  setTimeout(fn: () => void, ms: number): unknown;
  clearTimeout(handle: unknown): void;
}

export class DebouncedRequester<A, R> {
  private pendingArg: A | undefined;
  private timer: unknown;
  private inFlight = false;
  private seq = 0;
  private applied = 0;
  sent: A[] = []; // request log, newest last (visible for tests)

  constructor(
    private run: (arg: A) => Promise<R>,
    private apply: (result: R, arg: A) => void,
    private delayMs = 80,
    private scheduler: Scheduler = globalThis as unknown as Scheduler,
    private onError: (err: unknown) => void = () => undefined,
  ) {}

  request(arg: A): void {
    this.pendingArg = arg;
    if (this.timer !== undefined) {
      this.scheduler.clearTimeout(this.timer);
    }
    this.timer = this.scheduler.setTimeout(() => {
      this.timer = undefined;
      this.flush();
    }, this.delayMs);
  }

  private flush(): void {
    if (this.inFlight || this.pendingArg === undefined) {
      return;
    }
    const arg = this.pendingArg;
    this.pendingArg = undefined;
    const ticket = ++this.seq;
    this.inFlight = true;
    this.sent.push(arg);
    this.run(arg)
      .then((result) => {
        if (ticket > this.applied) {
          this.applied = ticket;
          this.apply(result, arg);
        }
      })
      .catch((err) => this.onError(err))
      .finally(() => {
        this.inFlight = false;
        // a newer argument may have arrived while the request ran
        if (this.pendingArg !== undefined && this.timer === undefined) {
          this.flush();
        }
      });
  }

  get busy(): boolean {
    return this.inFlight;
  }
}
