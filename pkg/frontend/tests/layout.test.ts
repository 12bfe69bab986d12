import { describe, expect, it } from "vitest";

import type { MistakeDoc, SchemeDoc } from "../src/api.js";
import { KIND_ORDER, layoutScheme, missingKinds } from "../src/layout.js";

import goldenScheme from "./fixtures/golden_scheme.json" with { type: "json" };

const scheme = goldenScheme as SchemeDoc;

describe("scheme layout", () => {
  it("lays out every instance and connection", () => {
    const layout = layoutScheme(scheme.instances, scheme.connections);
    expect(layout.nodes).toHaveLength(scheme.instances.length);
    expect(layout.edges).toHaveLength(scheme.connections.length);
  });

  it("is deterministic across calls and input order", () => {
    const a = layoutScheme(scheme.instances, scheme.connections);
    const reversed = [...scheme.instances].reverse();
    const b = layoutScheme(reversed, scheme.connections);
    const key = (nodes: typeof a.nodes) =>
      nodes.map((n) => `${n.id}@${n.x},${n.y}`).sort();
    expect(key(b.nodes)).toEqual(key(a.nodes));
  });

  it("columns follow the fixed kind order", () => {
    const layout = layoutScheme(scheme.instances, scheme.connections);
    const xs = new Map(layout.nodes.map((n) => [n.kind, n.x]));
    const present = KIND_ORDER.filter((k) => xs.has(k));
    for (let i = 1; i < present.length; i++) {
      expect(xs.get(present[i])!).toBeGreaterThan(xs.get(present[i - 1])!);
    }
  });

  it("node labels carry instance id and unit kind", () => {
    const layout = layoutScheme(scheme.instances, scheme.connections);
    const base = layout.nodes.find((n) => n.kind === "model_base");
    expect(base?.label).toMatch(/^u\d+ model_base$/);
  });

  it("adds a ghost placeholder for a missing required kind", () => {
    const mistakes: MistakeDoc[] = [
      {
        code: "MISSING_REQUIRED_UNIT",
        subject: "model_directory_count",
        source_frame: "mbms_prototype",
        message: "the scheme needs at least one model_directory unit",
      },
    ];
    expect(missingKinds(mistakes)).toEqual(["model_directory"]);
    const without = scheme.instances.filter((i) => i.kind !== "model_directory");
    const layout = layoutScheme(without, [], mistakes);
    const ghost = layout.nodes.find((n) => n.ghost);
    expect(ghost).toBeDefined();
    expect(ghost?.kind).toBe("model_directory");
    expect(ghost?.mistaken).toBe(true);
  });
});
