// Rule editor: a structured form that builds a production-rule document,
// posts it, posts the unit links, and (from a missing-rule prompt)
// triggers the session retry. Server validation errors map back onto the
// offending form field.

import { ApiError, DesignApi, type OutcomeDoc, type RuleDoc } from "./api.js";

export interface ConditionRow {
  entity: string;     // ?var or symbol
  attribute: string;  // symbol
  value: string;      // ?var, symbol, number or "quoted text"
  negated: boolean;
}

export interface ActionRow {
  op: "assert" | "instantiate" | "connect" | "set_param" | "halt";
  entity?: string;
  attribute?: string;
  value?: string;
  unit?: string;
  as?: string;
  from?: string;
  fromPort?: string;
  to?: string;
  toPort?: string;
  instance?: string;
  slot?: string;
}

export interface RuleForm {
  id: string;
  salience: number;
  doc: string;
  conditions: ConditionRow[];
  actions: ActionRow[];
  linkedUnits: string[];
}

const IDENT = /^[a-z][a-z0-9_]*$/;

export function parseTerm(raw: string): unknown {
  const text = raw.trim();
  if (text.startsWith("?")) {
    const name = text.slice(1);
    if (!IDENT.test(name)) throw new Error(`bad variable name: ${text}`);
    return { var: name };
  }
  if (/^[+-]?[0-9]+$/.test(text)) return Number.parseInt(text, 10);
  if (/^[+-]?[0-9]+\.[0-9]+$/.test(text)) return Number.parseFloat(text);
  if (text === "true") return true;
  if (text === "false") return false;
  if (text.startsWith('"') && text.endsWith('"') && text.length >= 2) {
    return text.slice(1, -1);
  }
  if (IDENT.test(text)) return { symbol: text };
  throw new Error(`cannot read term: ${raw}`);
}

function symbolOf(raw: string | undefined, label: string): string {
  const text = (raw ?? "").trim();
  if (!IDENT.test(text)) throw new Error(`${label} must be an identifier`);
  return text;
}

function actionDoc(row: ActionRow): Record<string, unknown> {
  switch (row.op) {
    case "assert":
      return {
        op: "assert",
        entity: parseTerm(row.entity ?? ""),
        attribute: parseTerm(row.attribute ?? ""),
        value: parseTerm(row.value ?? ""),
      };
    case "instantiate":
      return {
        op: "instantiate",
        unit: symbolOf(row.unit, "unit id"),
        as: symbolOf(row.as?.replace(/^\?/, ""), "instance variable"),
      };
    case "connect":
      return {
        op: "connect",
        from: parseTerm(row.from ?? ""),
        from_port: symbolOf(row.fromPort, "from port"),
        to: parseTerm(row.to ?? ""),
        to_port: symbolOf(row.toPort, "to port"),
      };
    case "set_param":
      return {
        op: "set_param",
        instance: parseTerm(row.instance ?? ""),
        slot: symbolOf(row.slot, "slot"),
        value: parseTerm(row.value ?? ""),
      };
    case "halt":
      return { op: "halt" };
  }
}

export function buildRuleDoc(form: RuleForm): RuleDoc {
  if (!IDENT.test(form.id)) throw new Error("rule id must be an identifier");
  if (!Number.isInteger(form.salience)) throw new Error("salience must be an integer");
  return {
    id: form.id,
    salience: form.salience,
    conditions: form.conditions.map((c) => ({
      entity: parseTerm(c.entity),
      attribute: parseTerm(c.attribute),
      value: parseTerm(c.value),
      negated: c.negated,
    })),
    actions: form.actions.map(actionDoc),
    linked_units: [...form.linkedUnits].sort(),
    doc: form.doc,
  };
}

export interface FieldError {
  field: string;
  message: string;
}

/** Map a server rejection onto the form field that caused it. */
export function fieldErrorFor(error: ApiError): FieldError {
  switch (error.code) {
    case "duplicate_rule_id":
      return { field: "id", message: error.detail };
    case "unbound_action_variable":
      return {
        field: "actions",
        message: `variable ?${error.body["variable"]} is not bound by any condition`,
      };
    case "malformed_rule":
      return { field: "conditions", message: error.detail };
    case "unknown_unit":
      return { field: "linkedUnits", message: error.detail };
    default:
      return { field: "form", message: error.detail };
  }
}

export interface RuleSubmission {
  version: number;
  outcome?: OutcomeDoc;
}

/**
 * Post the rule, then its unit links (skipped when empty), then retry the
 * stalled session when one is given.
 */
export async function submitRule(
  api: DesignApi,
  form: RuleForm,
  retrySessionId?: string,
): Promise<RuleSubmission> {
  const doc = buildRuleDoc(form);
  let { version } = await api.addRule(doc);
  if (form.linkedUnits.length > 0) {
    version = (await api.linkRule(doc.id, doc.linked_units)).version;
  }
  if (retrySessionId !== undefined) {
    const outcome = await api.retry(retrySessionId);
    return { version, outcome };
  }
  return { version };
}

export function renderRuleEditor(unitIds: string[], fieldError?: FieldError): string {
  const options = unitIds
    .map((u) => `<option value="${u}">${u}</option>`)
    .join("");
  const errorFor = (field: string) =>
    fieldError && fieldError.field === field
      ? `<span class="field-error" data-field-error="${field}">${fieldError.message}</span>`
      : "";
  return (
    `<form class="rule-editor">` +
    `<label>rule id<input name="id" data-field="id">${errorFor("id")}</label>` +
    `<label>salience<input name="salience" type="number" value="40"></label>` +
    `<fieldset class="conditions" data-field="conditions"><legend>conditions</legend>${errorFor("conditions")}</fieldset>` +
    `<fieldset class="actions" data-field="actions"><legend>actions</legend>${errorFor("actions")}</fieldset>` +
    `<label>linked units<select multiple name="linkedUnits" data-field="linkedUnits">${options}</select>${errorFor("linkedUnits")}</label>` +
    `<button type="submit">add rule and retry</button>` +
    `${errorFor("form")}</form>`
  );
}
