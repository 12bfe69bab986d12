// HTML and SVG string renderers. Pure functions of API documents, so the
// whole display layer is testable without a browser.

import type {
  OutcomeDoc,
  SchemeDoc,
  StatusDoc,
  ValidationDoc,
} from "./api.js";
import { layoutScheme, NODE_HEIGHT, NODE_WIDTH } from "./layout.js";
import { fieldsFor, STATEMENT_KINDS, type StatementKind } from "./statements.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function statusLabel(status: StatusDoc): string {
  if (status.status === "missing_rule") {
    return `missing rule for ${status.requirement}`;
  }
  if (status.status === "failed") {
    return `failed: ${status.error?.["error"] ?? "engine error"}`;
  }
  return status.status;
}

export interface LogRow {
  statement: string;
  status: StatusDoc;
  firings: string[];
  error?: string;
}

export function renderLog(rows: LogRow[]): string {
  const items = rows
    .map((row) => {
      const firings = row.firings.length
        ? `<span class="firings">fired ${row.firings.map(escapeHtml).join(", ")}</span>`
        : `<span class="firings none">no rules fired</span>`;
      const error = row.error
        ? `<div class="error">${escapeHtml(row.error)}</div>`
        : "";
      return (
        `<li class="log-row status-${escapeHtml(row.status.status)}">` +
        `<code>${escapeHtml(row.statement)}</code>` +
        `<span class="status">${escapeHtml(statusLabel(row.status))}</span>` +
        `${firings}${error}</li>`
      );
    })
    .join("");
  return `<ol class="statement-log">${items}</ol>`;
}

export function renderWizard(kind: StatementKind, disabled: boolean): string {
  const options = STATEMENT_KINDS.map(
    (k) =>
      `<option value="${k}"${k === kind ? " selected" : ""}>${k}</option>`,
  ).join("");
  const fields = fieldsFor(kind)
    .map((spec) => {
      if (spec.kind === "choice") {
        const choices = (spec.choices ?? [])
          .map((c) => `<option value="${c}">${c}</option>`)
          .join("");
        return (
          `<label>${spec.label}` +
          `<select name="${String(spec.field)}" data-field="${String(spec.field)}">${choices}</select></label>`
        );
      }
      return (
        `<label>${spec.label}` +
        `<input name="${String(spec.field)}" data-field="${String(spec.field)}" data-kind="${spec.kind}"></label>`
      );
    })
    .join("");
  return (
    `<form class="wizard"${disabled ? " data-disabled" : ""}>` +
    `<select name="kind" data-field="kind">${options}</select>` +
    fields +
    `<button type="submit"${disabled ? " disabled" : ""}>submit</button>` +
    `<details class="expert"><summary>statement text</summary>` +
    `<input name="expert" data-field="expert" placeholder="require solver linear_programming">` +
    `</details></form>`
  );
}

export function renderScheme(scheme: SchemeDoc, validation?: ValidationDoc): string {
  if (scheme.instances.length === 0 && !(validation && validation.mistakes.length)) {
    return `<div class="scheme-empty">no units yet</div>`;
  }
  const layout = layoutScheme(
    scheme.instances,
    scheme.connections,
    validation?.mistakes ?? [],
  );
  const edges = layout.edges
    .map(
      (e) =>
        `<g class="edge"><line x1="${e.x1}" y1="${e.y1}" x2="${e.x2}" y2="${e.y2}"></line>` +
        `<text x="${(e.x1 + e.x2) / 2}" y="${(e.y1 + e.y2) / 2 - 4}">${escapeHtml(e.label)}</text></g>`,
    )
    .join("");
  const nodes = layout.nodes
    .map((n) => {
      const classes = ["node", `kind-${n.kind}`];
      if (n.ghost) classes.push("ghost");
      if (n.mistaken) classes.push("mistake");
      return (
        `<g class="${classes.join(" ")}" data-node="${escapeHtml(n.id)}">` +
        `<rect x="${n.x}" y="${n.y}" width="${NODE_WIDTH}" height="${NODE_HEIGHT}" rx="6"></rect>` +
        `<text x="${n.x + NODE_WIDTH / 2}" y="${n.y + NODE_HEIGHT / 2 + 4}">${escapeHtml(n.label)}</text></g>`
      );
    })
    .join("");
  return (
    `<svg class="scheme" viewBox="0 0 ${layout.width} ${layout.height}" ` +
    `width="${layout.width}" height="${layout.height}">${edges}${nodes}</svg>`
  );
}

export function renderValidation(validation: ValidationDoc): string {
  const mistakes = validation.mistakes
    .map(
      (m) =>
        `<li class="mistake"><code>${escapeHtml(m.code)}</code> ` +
        `${escapeHtml(m.subject)} (${escapeHtml(m.source_frame)}): ${escapeHtml(m.message)}</li>`,
    )
    .join("");
  const recommendations = validation.recommendations
    .map(
      (r) =>
        `<li class="recommendation">${escapeHtml(r.source_frame)}: ` +
        `${escapeHtml(r.message)}</li>`,
    )
    .join("");
  const headline = validation.passed
    ? `<span class="passed">scheme passes validation</span>`
    : `<span class="failed">${validation.mistakes.length} mistake(s)</span>`;
  return (
    `<div class="validation">${headline}` +
    `<ul class="mistakes">${mistakes}</ul>` +
    `<ul class="recommendations">${recommendations}</ul></div>`
  );
}

export function renderErrorBanner(message: string): string {
  return `<div class="banner error">${escapeHtml(message)}</div>`;
}

export function renderMissingRulePrompt(requirement: string): string {
  return (
    `<div class="missing-rule-prompt">No rule can process requirement ` +
    `<code>${escapeHtml(requirement)}</code>. Add one below and retry.</div>`
  );
}

export function renderOutcomeSummary(outcome: OutcomeDoc): string {
  const fired = outcome.firings.map((f) => f.rule);
  return renderLog([
    {
      statement: outcome.requirement ?? "(requirement)",
      status: outcome.status,
      firings: fired,
    },
  ]);
}
