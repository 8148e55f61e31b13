/** Controller wiring the API client to the view state.
 *
 * Toggle flow: clicks update a local desired set immediately, a 300 ms
 * trailing debounce collapses bursts, then one PUT /toggles is acknowledged
 * before one POST /discover runs.  At most one discovery per session is in
 * flight; a newer one supersedes the response of an older one.  Sorting and
 * render-mode switches are pure view changes and never call the server.
 */
import { ApiClient } from "./api.js";
import { Debouncer, type Canceller, type Scheduler } from "./debounce.js";
import { buildRows, sortRows, topNames, type SortColumn } from "./table.js";
import { initialState, toggledSet, type ViewState } from "./state.js";

export const DEBOUNCE_MS = 300;

export interface AppOptions {
  schedule?: Scheduler;
  cancel?: Canceller;
  debounceMs?: number;
}

export class App {
  state: ViewState = initialState();
  onChange: (state: ViewState) => void = () => {};

  private readonly debouncer: Debouncer;
  private discoveryEpoch = 0;

  constructor(private readonly api: ApiClient, options: AppOptions = {}) {
    this.debouncer = new Debouncer(
      options.debounceMs ?? DEBOUNCE_MS,
      options.schedule,
      options.cancel,
    );
  }

  private emit(): void {
    this.onChange(this.state);
  }

  async upload(content: string | Blob, contentType: string): Promise<void> {
    const doc = await this.api.uploadLog(content, contentType);
    this.state = {
      ...initialState(),
      sessionId: doc.session_id,
      alphabet: [...doc.alphabet],
      method: this.state.method,
      laplace: this.state.laplace,
    };
    this.emit();
    await this.refreshRanking();
    await this.runDiscovery();
  }

  async selectMethod(method: string, laplace: boolean): Promise<void> {
    this.state = { ...this.state, method, laplace };
    this.emit();
    await this.refreshRanking();
  }

  sortBy(column: SortColumn): void {
    this.state = {
      ...this.state,
      sortColumn: column,
      rows: sortRows(this.state.rows, column),
    };
    this.emit();
  }

  setRenderMode(mode: "tree" | "dfg"): void {
    if (mode !== this.state.renderMode) {
      this.state = { ...this.state, renderMode: mode };
      this.emit();
    }
  }

  /** Toggle one activity; blocked (with an inline message) when it would
   * leave fewer than two activities enabled. */
  toggleActivity(name: string): void {
    const desired = toggledSet(this.state.alphabet, this.state.desiredDisabled, name);
    if (desired === null) {
      this.state = {
        ...this.state,
        blockedMessage: `cannot disable ${name}: at least 2 activities must stay enabled`,
      };
      this.emit();
      return;
    }
    this.applyDesired(desired);
  }

  /** Disable the first n rows of the current sort order (slider stand-in). */
  disableTopN(n: number): void {
    const names = topNames(this.state.rows, n);
    if (this.state.alphabet.length - names.length < 2) {
      this.state = {
        ...this.state,
        blockedMessage: `cannot disable top ${n}: at least 2 activities must stay enabled`,
      };
      this.emit();
      return;
    }
    this.applyDesired([...names].sort());
  }

  private applyDesired(desired: string[]): void {
    this.state = {
      ...this.state,
      desiredDisabled: desired,
      blockedMessage: null,
      rows: this.state.rows.map((row) => ({
        ...row,
        enabled: !desired.includes(row.name),
      })),
    };
    this.emit();
    this.debouncer.run(() => void this.syncToggles());
  }

  /** Force a pending debounced sync to run now (teardown and tests). */
  flushToggles(): void {
    this.debouncer.flush();
  }

  private async refreshRanking(): Promise<void> {
    if (!this.state.sessionId) {
      return;
    }
    try {
      const ranking = await this.api.ranking(
        this.state.sessionId,
        this.state.method,
        this.state.laplace,
      );
      const rows = buildRows(ranking, new Set(this.state.desiredDisabled));
      this.state = {
        ...this.state,
        rows: sortRows(rows, this.state.sortColumn),
        error: null,
      };
    } catch (error) {
      this.state = { ...this.state, error: String(error) };
    }
    this.emit();
  }

  private async syncToggles(): Promise<void> {
    if (!this.state.sessionId) {
      return;
    }
    try {
      const ack = await this.api.setToggles(this.state.sessionId, this.state.desiredDisabled);
      this.state = { ...this.state, disabled: ack.disabled, error: null };
      this.emit();
    } catch (error) {
      this.state = { ...this.state, error: String(error) };
      this.emit();
      return;
    }
    await this.runDiscovery();
  }

  private async runDiscovery(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (!sessionId) {
      return;
    }
    const epoch = ++this.discoveryEpoch;
    this.state = { ...this.state, discoveryPending: true };
    this.emit();
    try {
      const model = await this.api.discover(sessionId);
      if (epoch !== this.discoveryEpoch) {
        return; // superseded by a newer request
      }
      this.state = { ...this.state, model, discoveryPending: false, error: null };
    } catch (error) {
      if (epoch !== this.discoveryEpoch) {
        return;
      }
      // Keep the previous model on failure; the error panel explains.
      this.state = { ...this.state, discoveryPending: false, error: String(error) };
    }
    this.emit();
  }
}
