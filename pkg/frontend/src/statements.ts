// Wizard form model: maps form controls to statement text. The grammar
// constrains the operand fields, and the expert text box bypasses the
// wizard with the same POST body.

export const CATEGORIES = ["strategic", "tactical", "operational", "analytical"] as const;
export const EXTERNAL_KINDS = ["cae", "solver"] as const;

export const STATEMENT_KINDS = [
  "goal",
  "require model",
  "require method",
  "require solver",
  "integrate external",
  "param",
  "done",
] as const;

export type StatementKind = (typeof STATEMENT_KINDS)[number];

export interface WizardForm {
  kind: StatementKind;
  name?: string;       // goal name, model name, method, capability
  category?: string;   // require model only
  externalKind?: string;
  product?: string;    // integrate external only
  target?: string;     // param only
  slot?: string;
  value?: string;
}

const IDENT = /^[a-z][a-z0-9_]*$/;

export interface FieldSpec {
  field: keyof WizardForm;
  label: string;
  kind: "ident" | "choice" | "text";
  choices?: readonly string[];
}

// Which operand fields each statement kind needs, in input order.
export function fieldsFor(kind: StatementKind): FieldSpec[] {
  switch (kind) {
    case "goal":
      return [{ field: "name", label: "goal name", kind: "ident" }];
    case "require model":
      return [
        { field: "category", label: "model category", kind: "choice", choices: CATEGORIES },
        { field: "name", label: "model name", kind: "ident" },
      ];
    case "require method":
      return [{ field: "name", label: "method name", kind: "ident" }];
    case "require solver":
      return [{ field: "name", label: "solver capability", kind: "ident" }];
    case "integrate external":
      return [
        { field: "externalKind", label: "product kind", kind: "choice", choices: EXTERNAL_KINDS },
        { field: "product", label: "product name", kind: "text" },
      ];
    case "param":
      return [
        { field: "target", label: "target unit kind", kind: "ident" },
        { field: "slot", label: "slot name", kind: "ident" },
        { field: "value", label: "value", kind: "text" },
      ];
    case "done":
      return [];
  }
}

function quote(text: string): string {
  return '"' + text.replace(/\\/g, "\\\\").replace(/"/g, '\\"') + '"';
}

function requireIdent(value: string | undefined, label: string): string {
  if (!value || !IDENT.test(value)) {
    throw new Error(`${label} must be a lowercase identifier`);
  }
  return value;
}

function renderParamValue(raw: string): string {
  if (/^[+-]?[0-9]+(\.[0-9]+)?$/.test(raw)) return raw;
  if (IDENT.test(raw)) return raw;
  return quote(raw);
}

/** Build the statement text a wizard form submits. */
export function buildStatement(form: WizardForm): string {
  switch (form.kind) {
    case "goal":
      return `goal ${requireIdent(form.name, "goal name")}`;
    case "require model": {
      const category = form.category ?? "";
      if (!CATEGORIES.includes(category as (typeof CATEGORIES)[number])) {
        throw new Error("model category must be one of " + CATEGORIES.join(", "));
      }
      return `require model ${category} ${requireIdent(form.name, "model name")}`;
    }
    case "require method":
      return `require method ${requireIdent(form.name, "method name")}`;
    case "require solver":
      return `require solver ${requireIdent(form.name, "solver capability")}`;
    case "integrate external": {
      const kind = form.externalKind ?? "";
      if (!EXTERNAL_KINDS.includes(kind as (typeof EXTERNAL_KINDS)[number])) {
        throw new Error("product kind must be cae or solver");
      }
      if (!form.product) throw new Error("product name is required");
      return `integrate external ${kind} ${quote(form.product)}`;
    }
    case "param": {
      const target = requireIdent(form.target, "target unit kind");
      const slot = requireIdent(form.slot, "slot name");
      if (form.value === undefined || form.value === "") {
        throw new Error("value is required");
      }
      return `param ${target}.${slot} = ${renderParamValue(form.value)}`;
    }
    case "done":
      return "done";
  }
}
