// Contract tests against recorded API responses: the console state and the
// rendered views must be traceable to response documents field by field.

import { describe, expect, it, vi, afterEach } from "vitest";

import type { OutcomeDoc, ValidationDoc } from "../src/api.js";
import { DesignApi } from "../src/api.js";
import { DesignConsole } from "../src/console.js";
import { renderLog, renderScheme } from "../src/render.js";

import goldenFlow from "./fixtures/golden_flow.json" with { type: "json" };
import goldenValidation from "./fixtures/golden_validation.json" with { type: "json" };
import stalledOutcome from "./fixtures/stalled_outcome.json" with { type: "json" };
import catalogUnits from "./fixtures/catalog_units.json" with { type: "json" };

interface RecordedStep {
  statement: string;
  outcome: OutcomeDoc;
}

const flow = goldenFlow as RecordedStep[];

function jsonResponse(doc: unknown): Response {
  return new Response(JSON.stringify(doc), {
    status: 200,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

function playbackFetch() {
  const queue: unknown[] = [];
  const fetchMock = vi.fn(async (input: RequestInfo | URL) => {
    const url = String(input);
    if (url.endsWith("/sessions")) {
      return new Response(
        JSON.stringify({ session: "fixture-session", status: { status: "awaiting_requirement" } }),
        { status: 201 },
      );
    }
    if (queue.length === 0) throw new Error(`unexpected request ${url}`);
    return jsonResponse(queue.shift());
  });
  vi.stubGlobal("fetch", fetchMock);
  return { queue, fetchMock };
}

describe("console against the recorded golden flow", () => {
  it("replays every statement and ends halted with the recorded scheme", async () => {
    const { queue } = playbackFetch();
    const console_ = new DesignConsole(new DesignApi("http://fixture"));
    await console_.start();
    for (const step of flow) {
      queue.push(step.outcome);
      queue.push(goldenValidation);
      await console_.submitStatementText(step.statement);
    }
    expect(console_.halted).toBe(true);
    expect(console_.state.log.map((row) => row.status.status)).toEqual(
      flow.map((step) => step.outcome.status.status),
    );
    const last = flow[flow.length - 1].outcome;
    expect(console_.state.scheme).toEqual(last.scheme);

    // Rendered node count equals the recorded payload's instance count.
    const svg = renderScheme(console_.state.scheme, console_.state.validation ?? undefined);
    const nodes = svg.match(/<g class="node/g) ?? [];
    expect(nodes).toHaveLength(last.scheme.instances.length);
    expect(nodes).toHaveLength(9);
    const edges = svg.match(/<g class="edge"/g) ?? [];
    expect(edges).toHaveLength(last.scheme.connections.length);
  });

  it("renders log rows only from recorded statuses and firings", async () => {
    const { queue } = playbackFetch();
    const console_ = new DesignConsole(new DesignApi("http://fixture"));
    await console_.start();
    const step = flow[0];
    queue.push(step.outcome);
    queue.push(goldenValidation);
    await console_.submitStatementText(step.statement);
    const html = renderLog(console_.state.log);
    for (const firing of step.outcome.firings) {
      expect(html).toContain(firing.rule);
    }
    expect(html).toContain(step.statement);
  });
});

describe("console against the recorded stalled flow", () => {
  it("flags the stalled requirement for the rule-editor prompt", async () => {
    const { queue } = playbackFetch();
    const console_ = new DesignConsole(new DesignApi("http://fixture"));
    await console_.start();
    const stalled = stalledOutcome as OutcomeDoc;
    queue.push(stalled);
    queue.push(goldenValidation);
    await console_.submitStatementText("require method genetic_algorithm");
    expect(console_.stalled).toBe(true);
    expect(console_.state.stalledRequirement).toBe(stalled.status.requirement);
  });
});

describe("catalog fixture", () => {
  it("feeds the rule editor's unit picker", () => {
    const ids = (catalogUnits as { units: { id: string }[] }).units.map((u) => u.id);
    expect(ids).toContain("unit_genetic_solver");
    expect(ids).toContain("unit_simplex_solver");
  });
});

describe("service failure degrades to a readable error", () => {
  it("records a banner instead of rendering a blank screen", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        throw new Error("connection refused");
      }),
    );
    const console_ = new DesignConsole(new DesignApi("http://down"));
    await console_.start();
    expect(console_.state.banner).toBeTruthy();
    expect(console_.state.banner).toContain("connection refused");
  });

  it("keeps API error codes visible in the statement log", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async (input: RequestInfo | URL) => {
        const url = String(input);
        if (url.endsWith("/sessions")) {
          return new Response(
            JSON.stringify({ session: "s", status: { status: "awaiting_requirement" } }),
            { status: 201 },
          );
        }
        return new Response(
          JSON.stringify({ error: "parse_error", detail: "expected statement", line: 1 }),
          { status: 400 },
        );
      }),
    );
    const console_ = new DesignConsole(new DesignApi("http://fixture"));
    await console_.start();
    await console_.submitStatementText("require banana");
    const row = console_.state.log[0];
    expect(row.error).toContain("parse_error");
  });
});

describe("recorded validation document", () => {
  it("is a passing report with no mistakes", () => {
    const doc = goldenValidation as ValidationDoc;
    expect(doc.passed).toBe(true);
    expect(doc.mistakes).toEqual([]);
  });
});
