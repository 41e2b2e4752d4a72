import { describe, expect, it } from "vitest";

import { COLUMN_WIDTH, layoutTree } from "../src/layout.js";
import { rec, sampleTree } from "./stub.js";

describe("layoutTree", () => {
  it("maps depth to columns", () => {
    const positions = layoutTree(sampleTree());
    expect(positions.get("n1")!.x).toBe(0);
    expect(positions.get("n2")!.x).toBe(COLUMN_WIDTH);
    expect(positions.get("n3")!.x).toBe(2 * COLUMN_WIDTH);
  });

  it("stacks leaves on distinct rows", () => {
    const positions = layoutTree(sampleTree());
    const leafYs = ["n3", "n4", "n6", "n7", "n9"].map(
      (id) => positions.get(id)!.y,
    );
    expect(new Set(leafYs).size).toBe(leafYs.length);
  });

  it("centers parents over their children", () => {
    const positions = layoutTree(sampleTree());
    const parent = positions.get("n2")!;
    const childYs = [positions.get("n3")!.y, positions.get("n4")!.y];
    expect(parent.y).toBe((childYs[0] + childYs[1]) / 2);
  });

  it("is deterministic", () => {
    const a = layoutTree(sampleTree());
    const b = layoutTree(sampleTree());
    for (const [id, view] of a) {
      expect(b.get(id)!.x).toBe(view.x);
      expect(b.get(id)!.y).toBe(view.y);
    }
  });

  it("hides descendants of collapsed nodes and counts them", () => {
    const tree = sampleTree();
    tree.children[0].collapsed = true; // n2 with two children
    const positions = layoutTree(tree);
    expect(positions.has("n2")).toBe(true);
    expect(positions.has("n3")).toBe(false);
    expect(positions.has("n4")).toBe(false);
    expect(positions.get("n2")!.hiddenDescendants).toBe(2);
  });

  it("lays out a single node at the origin", () => {
    const positions = layoutTree(rec("n1", "lone", 1, 0));
    expect(positions.get("n1")).toMatchObject({ x: 0, y: 0 });
  });
});
