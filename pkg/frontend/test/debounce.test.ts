import { describe, expect, it } from 'vitest';

import { DebouncedRequester, type Scheduler } from '../src/debounce.js';

/** Deterministic manual scheduler. */
class FakeClock implements Scheduler {
  private queue: Array<{ at: number; fn: () => void; id: number }> = [];
  private now = 0;
  private nextId = 1;

  setTimeout(fn: () => void, ms: number): unknown {
    const id = this.nextId++;
    this.queue.push({ at: this.now + ms, fn, id });
    return id;
  }

  clearTimeout(handle: unknown): void {
    this.queue = this.queue.filter((e) => e.id !== handle);
  }

  async advance(ms: number): Promise<void> {
    this.now += ms;
    const due = this.queue.filter((e) => e.at <= this.now).sort((a, b) => a.at - b.at);
    this.queue = this.queue.filter((e) => e.at > this.now);
    for (const entry of due) {
      entry.fn();
    }
    // drain the whole then/catch/finally chain
    for (let k = 0; k < 10; k++) {
      await Promise.resolve();
    }
  }
}

function deferredRunner<R>() {
  const resolvers: Array<(value: R) => void> = [];
  const run = () =>
    new Promise<R>((resolve) => {
      resolvers.push(resolve);
    });
  return { run, resolvers };
}

describe('DebouncedRequester', () => {
  it('collapses a burst into one request', async () => {
    const clock = new FakeClock();
    const applied: number[] = [];
    const requester = new DebouncedRequester<number, number>(
      async (v) => v * 10,
      (r) => applied.push(r),
      50,
      clock,
    );
    requester.request(1);
    requester.request(2);
    requester.request(3);
    await clock.advance(49);
    expect(requester.sent).toEqual([]);
    await clock.advance(2);
    await clock.advance(0);
    expect(requester.sent).toEqual([3]);
    expect(applied).toEqual([30]);
  });

  it('keeps at most one request in flight and sends the newest afterwards', async () => {
    const clock = new FakeClock();
    const { run, resolvers } = deferredRunner<string>();
    const applied: string[] = [];
    const requester = new DebouncedRequester<number, string>(
      (v) => run().then((r) => `${r}:${v}`) as Promise<string>,
      (r) => applied.push(r),
      10,
      clock,
    );
    requester.request(1);
    await clock.advance(11);
    expect(requester.busy).toBe(true);
    // new inputs while the first request runs
    requester.request(2);
    requester.request(3);
    await clock.advance(11);
    expect(requester.sent).toEqual([1]); // still only one in flight
    resolvers[0]('a');
    await clock.advance(0);
    expect(requester.sent).toEqual([1, 3]);
    resolvers[1]('b');
    await clock.advance(0);
    expect(applied).toEqual(['a:1', 'b:3']);
  });

  it('produces a monotone request sequence under continuous drag', async () => {
    const clock = new FakeClock();
    const applied: number[] = [];
    const requester = new DebouncedRequester<number, number>(
      async (v) => v,
      (r) => applied.push(r),
      5,
      clock,
    );
    for (let k = 0; k < 30; k++) {
      requester.request(k);
      await clock.advance(3); // faster than the debounce interval
    }
    await clock.advance(10);
    await clock.advance(10);
    const sent = requester.sent;
    for (let i = 1; i < sent.length; i++) {
      expect(sent[i]).toBeGreaterThan(sent[i - 1]);
    }
    expect(sent[sent.length - 1]).toBe(29);
    expect(applied[applied.length - 1]).toBe(29);
  });

  it('drops stale responses', async () => {
    const clock = new FakeClock();
    const { run, resolvers } = deferredRunner<number>();
    const applied: number[] = [];
    const requester = new DebouncedRequester<number, number>(
      () => run(),
      (r) => applied.push(r),
      1,
      clock,
    );
    requester.request(1);
    await clock.advance(2);
    requester.request(2);
    await clock.advance(2);
    // second request is queued, first still pending; resolve first then second
    resolvers[0](10);
    await clock.advance(0);
    resolvers[1](20);
    await clock.advance(0);
    expect(applied).toEqual([10, 20]); // in order, no stale overwrite
  });
});
