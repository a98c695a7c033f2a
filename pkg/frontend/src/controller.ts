/** Recommendation panel state machine.
 *
 * Selecting a node fires a recommend request; at most one response is live
 * per selection (latest wins, stale responses dropped). A failed request
 * shows a retryable error without losing the selection.
 */

import type { AtlasClient, Recommendation } from "./api.js";

export type PanelState =
  | { kind: "idle" }
  | { kind: "loading"; forum: string }
  | { kind: "ready"; forum: string; recommendations: Recommendation[] }
  | { kind: "error"; forum: string; message: string };

export class SelectionController {
  private seq = 0;
  private _panel: PanelState = { kind: "idle" };

  constructor(
    private readonly client: AtlasClient,
    private readonly onChange: (panel: PanelState) => void = () => {},
    private readonly limit = 10,
  ) {}

  get panel(): PanelState {
    return this._panel;
  }

  private emit(panel: PanelState): void {
    this._panel = panel;
    this.onChange(panel);
  }

  /** Select a forum (or clear with null); resolves when this request's
   * outcome has been applied or superseded. */
  async select(forum: string | null): Promise<void> {
    const ticket = ++this.seq;
    if (forum === null) {
      this.emit({ kind: "idle" });
      return;
    }
    this.emit({ kind: "loading", forum });
    try {
      const response = await this.client.recommend(forum, this.limit);
      if (ticket !== this.seq) return; // superseded by a newer selection
      this.emit({ kind: "ready", forum, recommendations: response.recommendations });
    } catch (err) {
      if (ticket !== this.seq) return;
      const message = err instanceof Error ? err.message : String(err);
      this.emit({ kind: "error", forum, message });
    }
  }

  /** Re-issue the request after an error. */
  async retry(): Promise<void> {
    if (this._panel.kind === "error" || this._panel.kind === "ready") {
      await this.select(this._panel.forum);
    }
  }
}
