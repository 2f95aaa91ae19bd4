/** Side-by-side diff rows with changed-line highlighting.
 *
 * Alignment comes from a longest-common-subsequence over lines, the same
 * notion the service uses for its before-side change ranges, so highlighted
 * before-lines agree with the ranges it reports. */

import { DiffFile } from "./schema.js";

export type RowKind = "same" | "removed" | "added" | "changed";

export interface DiffRow {
  kind: RowKind;
  beforeNumber: number | null;
  beforeText: string | null;
  afterNumber: number | null;
  afterText: string | null;
}

function splitLines(text: string): string[] {
  if (text === "") return [];
  const lines = text.split("\n");
  if (lines[lines.length - 1] === "") lines.pop();
  return lines;
}

/** Classic LCS table over lines; fine at review-sized inputs. */
function lcsAlign(before: string[], after: string[]): Array<[number | null, number | null]> {
  const n = before.length;
  const m = after.length;
  const table: number[][] = Array.from({ length: n + 1 }, () => new Array(m + 1).fill(0));
  for (let i = n - 1; i >= 0; i--) {
    for (let j = m - 1; j >= 0; j--) {
      table[i][j] =
        before[i] === after[j]
          ? table[i + 1][j + 1] + 1
          : Math.max(table[i + 1][j], table[i][j + 1]);
    }
  }
  const pairs: Array<[number | null, number | null]> = [];
  let i = 0;
  let j = 0;
  while (i < n && j < m) {
    if (before[i] === after[j]) {
      pairs.push([i, j]);
      i++;
      j++;
    } else if (table[i + 1][j] >= table[i][j + 1]) {
      pairs.push([i, null]);
      i++;
    } else {
      pairs.push([null, j]);
      j++;
    }
  }
  while (i < n) pairs.push([i++, null]);
  while (j < m) pairs.push([null, j++]);
  return pairs;
}

export function diffRows(file: DiffFile): DiffRow[] {
  const before = splitLines(file.before ?? "");
  const after = splitLines(file.after ?? "");
  const rows: DiffRow[] = [];
  const pairs = lcsAlign(before, after);

  // Pair up adjacent removal/addition runs as "changed" rows.
  let k = 0;
  while (k < pairs.length) {
    const [bi, ai] = pairs[k];
    if (bi !== null && ai !== null) {
      rows.push({
        kind: "same",
        beforeNumber: bi + 1,
        beforeText: before[bi],
        afterNumber: ai + 1,
        afterText: after[ai],
      });
      k++;
      continue;
    }
    const removals: number[] = [];
    const additions: number[] = [];
    while (k < pairs.length && pairs[k][1] === null) {
      removals.push(pairs[k][0] as number);
      k++;
    }
    while (k < pairs.length && pairs[k][0] === null) {
      additions.push(pairs[k][1] as number);
      k++;
    }
    const paired = Math.min(removals.length, additions.length);
    for (let p = 0; p < paired; p++) {
      rows.push({
        kind: "changed",
        beforeNumber: removals[p] + 1,
        beforeText: before[removals[p]],
        afterNumber: additions[p] + 1,
        afterText: after[additions[p]],
      });
    }
    for (let p = paired; p < removals.length; p++) {
      rows.push({
        kind: "removed",
        beforeNumber: removals[p] + 1,
        beforeText: before[removals[p]],
        afterNumber: null,
        afterText: null,
      });
    }
    for (let p = paired; p < additions.length; p++) {
      rows.push({
        kind: "added",
        beforeNumber: null,
        beforeText: null,
        afterNumber: additions[p] + 1,
        afterText: after[additions[p]],
      });
    }
  }
  return rows;
}

/** Before-side line numbers the rows mark as touched (changed or removed). */
export function touchedBeforeLines(rows: DiffRow[]): number[] {
  return rows
    .filter((row) => row.kind === "changed" || row.kind === "removed")
    .map((row) => row.beforeNumber as number);
}
