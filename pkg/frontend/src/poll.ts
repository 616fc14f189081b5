/** Timer-driven polling with overlap protection. */

export interface Poller {
  stop(): void;
}

/**
 * Invokes `fn` immediately and then every `intervalMs`, skipping a tick
 * while the previous invocation is still in flight. Errors propagate to
 * `onError` instead of killing the loop.
 */
export function startPoller(
  fn: () => Promise<void>,
  intervalMs: number,
  onError: (err: unknown) => void = () => undefined,
): Poller {
  let inFlight = false;
  let stopped = false;

  const tick = async () => {
    if (inFlight || stopped) {
      return;
    }
    inFlight = true;
    try {
      await fn();
    } catch (err) {
      onError(err);
    } finally {
      inFlight = false;
    }
  };

  void tick();
  const handle = setInterval(() => void tick(), intervalMs);
  return {
    stop() {
      stopped = true;
      clearInterval(handle);
    },
  };
}
