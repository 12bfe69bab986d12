import { describe, expect, it } from "vitest";

import type { SchemeDoc, ValidationDoc } from "../src/api.js";
import {
  renderErrorBanner,
  renderLog,
  renderMissingRulePrompt,
  renderScheme,
  renderValidation,
  renderWizard,
  statusLabel,
} from "../src/render.js";

import goldenScheme from "./fixtures/golden_scheme.json" with { type: "json" };
import goldenValidation from "./fixtures/golden_validation.json" with { type: "json" };
import emptyValidation from "./fixtures/empty_validation.json" with { type: "json" };

const scheme = goldenScheme as SchemeDoc;
const validation = goldenValidation as ValidationDoc;

function count(haystack: string, needle: RegExp): number {
  return (haystack.match(needle) ?? []).length;
}

describe("scheme rendering", () => {
  it("shows a placeholder for a fresh session", () => {
    expect(renderScheme({ instances: [], connections: [] })).toContain(
      "no units yet",
    );
  });

  it("draws one node per instance and one edge per connection", () => {
    const svg = renderScheme(scheme, validation);
    expect(count(svg, /<g class="node/g)).toBe(scheme.instances.length);
    expect(count(svg, /<g class="edge"/g)).toBe(scheme.connections.length);
  });

  it("labels edges with the port pair", () => {
    const svg = renderScheme(scheme, validation);
    expect(svg).toContain("solver_port -&gt; solve_api");
  });

  it("marks missing required units as ghost mistake nodes", () => {
    const broken = emptyValidation as ValidationDoc;
    const svg = renderScheme({ instances: [], connections: [] }, broken);
    expect(count(svg, /class="node [^"]*ghost[^"]*mistake/g)).toBe(
      broken.mistakes.filter((m) => m.code === "MISSING_REQUIRED_UNIT").length,
    );
  });
});

describe("validation rendering", () => {
  it("reports a passing golden run", () => {
    const html = renderValidation(validation);
    expect(html).toContain("scheme passes validation");
  });

  it("lists mistakes with code, subject and source frame", () => {
    const html = renderValidation(emptyValidation as ValidationDoc);
    expect(html).toContain("MISSING_REQUIRED_UNIT");
    expect(html).toContain("model_base_count");
    expect(html).toContain("mbms_prototype");
  });
});

describe("log and status rendering", () => {
  it("labels missing-rule statuses with the requirement id", () => {
    expect(statusLabel({ status: "missing_rule", requirement: "r2" })).toBe(
      "missing rule for r2",
    );
  });

  it("renders a row per statement with fired rules", () => {
    const html = renderLog([
      {
        statement: "goal lp_dss",
        status: { status: "awaiting_requirement" },
        firings: ["bootstrap_core"],
      },
      {
        statement: "done",
        status: { status: "halted" },
        firings: ["finish_design"],
      },
    ]);
    expect(count(html, /<li class="log-row/g)).toBe(2);
    expect(html).toContain("bootstrap_core");
    expect(html).toContain("status-halted");
  });

  it("escapes statement text", () => {
    const html = renderLog([
      {
        statement: 'integrate external cae "<Mat&Lab>"',
        status: { status: "awaiting_requirement" },
        firings: [],
      },
    ]);
    expect(html).toContain("&lt;Mat&amp;Lab&gt;");
    expect(html).not.toContain("<Mat&Lab>");
  });
});

describe("wizard and prompts", () => {
  it("offers every statement kind", () => {
    const html = renderWizard("goal", false);
    expect(count(html, /<option value="/g)).toBeGreaterThanOrEqual(7);
    expect(html).toContain('data-field="expert"');
  });

  it("disables submission when the session is not awaiting", () => {
    expect(renderWizard("goal", true)).toContain("disabled");
  });

  it("renders the missing-rule prompt and error banner", () => {
    expect(renderMissingRulePrompt("r2")).toContain("r2");
    expect(renderErrorBanner("service down")).toContain("service down");
  });
});
