/** Newest-wins request sequencing: one in-flight call per view.
 *
 * Starting a run aborts the previous one and stamps a ticket; a run whose
 * ticket is stale by the time it resolves is discarded, so the view only
 * ever reflects the last completed response.
 */
export class LatestWins {
  private ticket = 0;
  private controller: AbortController | null = null;

  /** Resolves with the task's value, or null if a newer run superseded it. */
  async run<T>(task: (signal: AbortSignal) => Promise<T>): Promise<T | null> {
    this.controller?.abort();
    this.controller = new AbortController();
    const mine = ++this.ticket;
    let value: T;
    try {
      value = await task(this.controller.signal);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return null;
      if (mine !== this.ticket) return null; // a stale failure is nobody's news
      throw err;
    }
    return mine === this.ticket ? value : null;
  }
}
