import { describe, expect, it } from "vitest";

import { buildStatement, fieldsFor } from "../src/statements.js";

describe("wizard statement building", () => {
  it("maps the solver picker to the statement body", () => {
    expect(
      buildStatement({ kind: "require solver", name: "linear_programming" }),
    ).toBe("require solver linear_programming");
  });

  it("builds goal statements", () => {
    expect(buildStatement({ kind: "goal", name: "lp_dss" })).toBe("goal lp_dss");
  });

  it("builds model requirements with a category choice", () => {
    expect(
      buildStatement({
        kind: "require model",
        category: "operational",
        name: "production_plan",
      }),
    ).toBe("require model operational production_plan");
  });

  it("quotes external product names", () => {
    expect(
      buildStatement({
        kind: "integrate external",
        externalKind: "solver",
        product: "LINDO API",
      }),
    ).toBe('integrate external solver "LINDO API"');
  });

  it("escapes quotes and backslashes in products", () => {
    expect(
      buildStatement({
        kind: "integrate external",
        externalKind: "cae",
        product: 'Mat"Lab\\',
      }),
    ).toBe('integrate external cae "Mat\\"Lab\\\\"');
  });

  it("renders param values by lexical shape", () => {
    expect(
      buildStatement({ kind: "param", target: "model_runtime", slot: "max_threads", value: "8" }),
    ).toBe("param model_runtime.max_threads = 8");
    expect(
      buildStatement({ kind: "param", target: "solver", slot: "tolerance", value: "0.001" }),
    ).toBe("param solver.tolerance = 0.001");
    expect(
      buildStatement({ kind: "param", target: "dss_user_interface", slot: "access_mode", value: "local" }),
    ).toBe("param dss_user_interface.access_mode = local");
    expect(
      buildStatement({ kind: "param", target: "model_base", slot: "label", value: "main store" }),
    ).toBe('param model_base.label = "main store"');
  });

  it("builds done with no operands", () => {
    expect(buildStatement({ kind: "done" })).toBe("done");
    expect(fieldsFor("done")).toEqual([]);
  });

  it("rejects operands the grammar rejects", () => {
    expect(() => buildStatement({ kind: "goal", name: "Not_Ident" })).toThrow(
      /identifier/,
    );
    expect(() =>
      buildStatement({ kind: "require model", category: "swift", name: "x" }),
    ).toThrow(/category/);
    expect(() =>
      buildStatement({ kind: "integrate external", externalKind: "solver" }),
    ).toThrow(/product/);
  });

  it("exposes grammar-constrained field specs for the form", () => {
    const fields = fieldsFor("require model");
    expect(fields[0].kind).toBe("choice");
    expect(fields[0].choices).toContain("operational");
    expect(fields[1].kind).toBe("ident");
  });
});
