/** Pure table logic: building activity rows from a ranking and sorting them.
 * Sorting is a view transform only; it never touches the server. */
import type { RankingResponse } from "./api.js";

export interface ActivityRow {
  name: string;
  frequency: number;
  entropy: number;
  removalRank: number;
  retained: boolean;
  enabled: boolean;
}

export type SortColumn = "entropy" | "frequency" | "rank" | "name";

export function buildRows(ranking: RankingResponse, disabled: ReadonlySet<string>): ActivityRow[] {
  return ranking.rows.map((row) => ({
    name: row.activity,
    frequency: row.frequency,
    entropy: row.criterion,
    removalRank: row.rank,
    retained: row.retained,
    enabled: !disabled.has(row.activity),
  }));
}

/** Stable sort; chaotic candidates end up on top for the default column. */
export function sortRows(rows: readonly ActivityRow[], column: SortColumn): ActivityRow[] {
  const indexed = rows.map((row, index) => ({ row, index }));
  const compare = (a: ActivityRow, b: ActivityRow): number => {
    switch (column) {
      case "entropy":
        return b.entropy - a.entropy;
      case "frequency":
        return b.frequency - a.frequency;
      case "rank":
        return a.removalRank - b.removalRank;
      case "name":
        return a.name < b.name ? -1 : a.name > b.name ? 1 : 0;
    }
  };
  indexed.sort((a, b) => compare(a.row, b.row) || a.index - b.index);
  return indexed.map((entry) => entry.row);
}

/** Names of the first n rows under the current sort (the disable-top-N action). */
export function topNames(rows: readonly ActivityRow[], n: number): string[] {
  return rows.slice(0, Math.max(0, n)).map((row) => row.name);
}
