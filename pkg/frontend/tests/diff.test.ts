import { describe, expect, it } from "vitest";

import { diffRows, touchedBeforeLines } from "../src/diff.js";
import { DiffFile } from "../src/schema.js";

function file(before: string | null, after: string | null, ranges: Array<[number, number]> = []): DiffFile {
  return { path: "x.py", before, after, changed_line_ranges_before: ranges };
}

describe("diffRows", () => {
  it("marks identical files as all-same rows", () => {
    const rows = diffRows(file("a\nb\n", "a\nb\n"));
    expect(rows.map((row) => row.kind)).toEqual(["same", "same"]);
  });

  it("pairs a one-line edit as a changed row", () => {
    const rows = diffRows(
      file(
        "x = random_circuit(num, depth)\n",
        "x = random_circuit(num, depth, seed=4200)\n",
      ),
    );
    expect(rows).toHaveLength(1);
    expect(rows[0].kind).toBe("changed");
    expect(rows[0].beforeNumber).toBe(1);
    expect(rows[0].afterNumber).toBe(1);
  });

  it("keeps surrounding context aligned", () => {
    const rows = diffRows(file("a\nold\nz\n", "a\nnew\nz\n"));
    expect(rows.map((row) => row.kind)).toEqual(["same", "changed", "same"]);
    expect(rows[2].beforeNumber).toBe(3);
    expect(rows[2].afterNumber).toBe(3);
  });

  it("renders pure insertions as added rows", () => {
    const rows = diffRows(file("a\nb\n", "a\nmiddle\nb\n"));
    expect(rows.map((row) => row.kind)).toEqual(["same", "added", "same"]);
    expect(rows[1].beforeText).toBeNull();
    expect(rows[1].afterText).toBe("middle");
  });

  it("renders deletions as removed rows", () => {
    const rows = diffRows(file("a\ngone\nb\n", "a\nb\n"));
    expect(rows.map((row) => row.kind)).toEqual(["same", "removed", "same"]);
  });

  it("handles added files with no before side", () => {
    const rows = diffRows(file(null, "fresh\n"));
    expect(rows).toHaveLength(1);
    expect(rows[0].kind).toBe("added");
  });

  it("agrees with the service's before-side change ranges", () => {
    const before = "a\nchanged-line\nb\n";
    const after = "a\nreplacement\nb\n";
    const rows = diffRows(file(before, after, [[2, 2]]));
    expect(touchedBeforeLines(rows)).toEqual([2]);
  });
});
