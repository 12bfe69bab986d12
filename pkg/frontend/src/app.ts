// Browser glue: binds the controller to the page. All rendering goes
// through the pure renderers; this file only moves strings into the DOM
// and events back out.

import { DesignApi } from "./api.js";
import { DesignConsole } from "./console.js";
import {
  renderErrorBanner,
  renderLog,
  renderMissingRulePrompt,
  renderScheme,
  renderValidation,
  renderWizard,
} from "./render.js";
import { fieldErrorFor, renderRuleEditor, submitRule, type RuleForm } from "./ruleEditor.js";
import { ApiError } from "./api.js";
import type { StatementKind } from "./statements.js";

const api = new DesignApi("");
const consoleCtl = new DesignConsole(api);
let wizardKind: StatementKind = "goal";
let unitIds: string[] = [];

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function redraw(): void {
  const state = consoleCtl.state;
  el("banner").innerHTML = state.banner ? renderErrorBanner(state.banner) : "";
  el("log").innerHTML = renderLog(state.log);
  el("scheme").innerHTML = renderScheme(state.scheme, state.validation ?? undefined);
  el("validation").innerHTML = state.validation
    ? renderValidation(state.validation)
    : "";
  if (consoleCtl.stalled && state.stalledRequirement) {
    el("wizard").innerHTML =
      renderMissingRulePrompt(state.stalledRequirement) + renderRuleEditor(unitIds);
    bindRuleEditor();
  } else {
    el("wizard").innerHTML = renderWizard(wizardKind, !consoleCtl.awaiting);
    bindWizard();
  }
  (el("download") as HTMLButtonElement).disabled = !consoleCtl.halted;
}

function bindWizard(): void {
  const form = document.querySelector<HTMLFormElement>("form.wizard");
  if (!form) return;
  const kindSelect = form.querySelector<HTMLSelectElement>('[data-field="kind"]');
  kindSelect?.addEventListener("change", () => {
    wizardKind = kindSelect.value as StatementKind;
    redraw();
  });
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const expert = String(data.get("expert") ?? "").trim();
    const run = async () => {
      if (expert) {
        await consoleCtl.submitStatementText(expert);
      } else {
        await consoleCtl.submitWizard({
          kind: wizardKind,
          name: String(data.get("name") ?? "") || undefined,
          category: String(data.get("category") ?? "") || undefined,
          externalKind: String(data.get("externalKind") ?? "") || undefined,
          product: String(data.get("product") ?? "") || undefined,
          target: String(data.get("target") ?? "") || undefined,
          slot: String(data.get("slot") ?? "") || undefined,
          value: String(data.get("value") ?? "") || undefined,
        });
      }
      redraw();
    };
    void run();
  });
}

function bindRuleEditor(): void {
  const form = document.querySelector<HTMLFormElement>("form.rule-editor");
  if (!form) return;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    const ruleForm: RuleForm = {
      id: String(data.get("id") ?? ""),
      salience: Number(data.get("salience") ?? 0),
      doc: "added from the design console",
      conditions: JSON.parse(String(data.get("conditionsJson") ?? "[]")),
      actions: JSON.parse(String(data.get("actionsJson") ?? "[]")),
      linkedUnits: data.getAll("linkedUnits").map(String),
    };
    const run = async () => {
      try {
        const result = await submitRule(
          api,
          ruleForm,
          consoleCtl.state.sessionId ?? undefined,
        );
        if (result.outcome) {
          consoleCtl.state.status = result.outcome.status;
          consoleCtl.state.scheme = result.outcome.scheme;
          consoleCtl.state.stalledRequirement = null;
          await consoleCtl.refreshValidation();
        }
      } catch (error) {
        if (error instanceof ApiError) {
          const fieldError = fieldErrorFor(error);
          el("wizard").innerHTML =
            renderMissingRulePrompt(consoleCtl.state.stalledRequirement ?? "?") +
            renderRuleEditor(unitIds, fieldError);
          bindRuleEditor();
          return;
        }
        throw error;
      }
      redraw();
    };
    void run();
  });
}

async function boot(): Promise<void> {
  await consoleCtl.start();
  try {
    unitIds = (await api.catalogUnits()).units.map((u) => u.id);
  } catch {
    unitIds = [];
  }
  el("download").addEventListener("click", () => {
    const run = async () => {
      const bytes = await consoleCtl.downloadScaffold();
      if (bytes) {
        const blob = new Blob([bytes.buffer as ArrayBuffer], { type: "application/zip" });
        const link = document.createElement("a");
        link.href = URL.createObjectURL(blob);
        link.download = "mbms-scaffold.zip";
        link.click();
      } else {
        redraw();
      }
    };
    void run();
  });
  redraw();
}

void boot();
