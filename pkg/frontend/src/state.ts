/** View state and the pure transition helpers behind the toggle workflow. */
import type { DiscoverResponse } from "./api.js";
import type { ActivityRow, SortColumn } from "./table.js";

export const MIN_ENABLED = 2;

export interface ViewState {
  sessionId: string | null;
  alphabet: string[];
  method: string;
  laplace: boolean;
  sortColumn: SortColumn;
  renderMode: "tree" | "dfg";
  rows: ActivityRow[];
  /** Server-acknowledged disabled set (only updated after a PUT succeeds). */
  disabled: string[];
  /** Local target while toggles are being debounced. */
  desiredDisabled: string[];
  model: DiscoverResponse | null;
  discoveryPending: boolean;
  error: string | null;
  blockedMessage: string | null;
}

export function initialState(): ViewState {
  return {
    sessionId: null,
    alphabet: [],
    method: "direct-entropy",
    laplace: false,
    sortColumn: "entropy",
    renderMode: "tree",
    rows: [],
    disabled: [],
    desiredDisabled: [],
    model: null,
    discoveryPending: false,
    error: null,
    blockedMessage: null,
  };
}

/** The disabled set after toggling one activity, or null when the toggle
 * must be blocked because fewer than MIN_ENABLED activities would remain. */
export function toggledSet(
  alphabet: readonly string[],
  current: readonly string[],
  activity: string,
): string[] | null {
  const next = new Set(current);
  if (next.has(activity)) {
    next.delete(activity);
  } else {
    next.add(activity);
    if (alphabet.length - next.size < MIN_ENABLED) {
      return null;
    }
  }
  return [...next].sort();
}

export function explainedRatio(alphabet: readonly string[], disabled: readonly string[]): number {
  if (alphabet.length === 0) {
    return 0;
  }
  return (alphabet.length - disabled.length) / alphabet.length;
}
