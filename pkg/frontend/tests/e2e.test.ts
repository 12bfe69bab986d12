// End to end against the real service: golden scenario through the wizard
// to a halted session, scheme view node count, scaffold download, and the
// missing-rule prompt plus rule-editor recovery.
//
// Spawns the Python service from the repository root; set SKIP_E2E=1 to
// skip in environments without it.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, copyFileSync, writeFileSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import * as path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { DesignApi } from "../src/api.js";
import { DesignConsole } from "../src/console.js";
import { renderMissingRulePrompt, renderScheme, renderWizard } from "../src/render.js";
import { submitRule, type RuleForm } from "../src/ruleEditor.js";
import { buildStatement, type WizardForm } from "../src/statements.js";

const REPO_ROOT = path.resolve(__dirname, "..", "..");
const DATA_DIR = path.join(REPO_ROOT, "src", "mbmsdesign", "data");

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("no port"));
      }
    });
  });
}

async function waitForService(base: string, proc: ChildProcess): Promise<void> {
  const deadline = Date.now() + 30000;
  let lastError: unknown;
  while (Date.now() < deadline) {
    if (proc.exitCode !== null) {
      throw new Error(`service exited early with code ${proc.exitCode}`);
    }
    try {
      const response = await fetch(`${base}/catalog/units`);
      if (response.ok) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error(`service did not come up: ${lastError}`);
}

/** Entry names from a zip's central directory (enough for the assertions). */
function zipEntryNames(bytes: Uint8Array): string[] {
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  let eocd = -1;
  for (let i = bytes.length - 22; i >= 0; i--) {
    if (view.getUint32(i, true) === 0x06054b50) {
      eocd = i;
      break;
    }
  }
  if (eocd < 0) throw new Error("no end-of-central-directory record");
  const count = view.getUint16(eocd + 10, true);
  let offset = view.getUint32(eocd + 16, true);
  const names: string[] = [];
  for (let i = 0; i < count; i++) {
    if (view.getUint32(offset, true) !== 0x02014b50) {
      throw new Error("bad central directory entry");
    }
    const nameLength = view.getUint16(offset + 28, true);
    const extraLength = view.getUint16(offset + 30, true);
    const commentLength = view.getUint16(offset + 32, true);
    const name = new TextDecoder().decode(
      bytes.subarray(offset + 46, offset + 46 + nameLength),
    );
    names.push(name);
    offset += 46 + nameLength + extraLength + commentLength;
  }
  return names;
}

const GOLDEN_FORMS: WizardForm[] = [
  { kind: "goal", name: "lp_dss" },
  { kind: "require model", category: "operational", name: "production_plan" },
  { kind: "require method", name: "simplex" },
  { kind: "require solver", name: "linear_programming" },
  { kind: "integrate external", externalKind: "solver", product: "LINDO API" },
  { kind: "done" },
];

const GA_RULE: RuleForm = {
  id: "select_ga_solver",
  salience: 40,
  doc: "added from the design console",
  conditions: [
    { entity: "?r", attribute: "kind", value: "method_requirement", negated: false },
    { entity: "?r", attribute: "method", value: "genetic_algorithm", negated: false },
    { entity: "?mr", attribute: "instance_of", value: "unit_model_runtime", negated: false },
  ],
  actions: [
    { op: "instantiate", unit: "unit_genetic_solver", as: "?s" },
    { op: "connect", from: "?mr", fromPort: "solver_port", to: "?s", toPort: "solve_api" },
    { op: "assert", entity: "?r", attribute: "status", value: "consumed" },
  ],
  linkedUnits: ["unit_genetic_solver"],
};

describe.skipIf(process.env.SKIP_E2E === "1")("console end to end", () => {
  let proc: ChildProcess;
  let base: string;
  let api: DesignApi;

  beforeAll(async () => {
    const workDir = mkdtempSync(path.join(tmpdir(), "console-e2e-"));
    copyFileSync(path.join(DATA_DIR, "starter.mbkb"), path.join(workDir, "kb.mbkb"));
    copyFileSync(
      path.join(DATA_DIR, "external_products.mbcat"),
      path.join(workDir, "catalog.mbcat"),
    );
    const port = await freePort();
    base = `http://127.0.0.1:${port}`;
    const config = {
      bind: `127.0.0.1:${port}`,
      kb: path.join(workDir, "kb.mbkb"),
      catalog: path.join(workDir, "catalog.mbcat"),
      session_timeout: 600,
      max_sessions: 16,
    };
    const configPath = path.join(workDir, "config.json");
    writeFileSync(configPath, JSON.stringify(config));
    proc = spawn("python3", ["-m", "mbmsdesign.cli", "serve", "--config", configPath], {
      cwd: REPO_ROOT,
      stdio: ["ignore", "pipe", "pipe"],
    });
    await waitForService(base, proc);
    api = new DesignApi(base);
  }, 60000);

  afterAll(() => {
    proc?.kill();
  });

  it("drives the golden scenario through the wizard to a halted session", async () => {
    const consoleCtl = new DesignConsole(api);
    await consoleCtl.start();
    expect(consoleCtl.state.sessionId).toBeTruthy();

    for (const form of GOLDEN_FORMS) {
      expect(consoleCtl.awaiting).toBe(true);
      await consoleCtl.submitWizard(form);
      const row = consoleCtl.state.log.at(-1)!;
      expect(row.error).toBeUndefined();
      expect(row.statement).toBe(buildStatement(form));
    }

    expect(consoleCtl.halted).toBe(true);
    expect(renderWizard("goal", !consoleCtl.awaiting)).toContain("disabled");

    const svg = renderScheme(
      consoleCtl.state.scheme,
      consoleCtl.state.validation ?? undefined,
    );
    const nodes = svg.match(/<g class="node/g) ?? [];
    expect(nodes).toHaveLength(9);
    const edges = svg.match(/<g class="edge"/g) ?? [];
    expect(edges).toHaveLength(consoleCtl.state.scheme.connections.length);
    expect(consoleCtl.state.validation?.passed).toBe(true);

    const zip = await consoleCtl.downloadScaffold();
    expect(zip).not.toBeNull();
    const names = zipEntryNames(zip!);
    expect(names).toContain("mbms.manifest");
    expect(names).toContain("DESIGN.md");
    expect(names).toContain("wiring.conf");
    expect(names.filter((n) => n.startsWith("units/"))).toHaveLength(9);
  }, 60000);

  it("recovers from a missing rule through the rule editor", async () => {
    const consoleCtl = new DesignConsole(api);
    await consoleCtl.start();
    await consoleCtl.submitWizard({ kind: "goal", name: "lp_dss" });
    await consoleCtl.submitWizard({ kind: "require method", name: "genetic_algorithm" });

    expect(consoleCtl.stalled).toBe(true);
    expect(consoleCtl.state.stalledRequirement).toBe("r2");
    expect(renderMissingRulePrompt(consoleCtl.state.stalledRequirement!)).toContain("r2");

    const result = await submitRule(api, GA_RULE, consoleCtl.state.sessionId!);
    expect(result.outcome?.status.status).toBe("awaiting_requirement");
    const solverNodes = result.outcome!.scheme.instances.filter(
      (i) => i.unit === "unit_genetic_solver",
    );
    expect(solverNodes).toHaveLength(1);
  }, 60000);

  it("reports duplicate rule ids as a field error on the editor", async () => {
    const consoleCtl = new DesignConsole(api);
    await consoleCtl.start();
    await consoleCtl.submitWizard({ kind: "goal", name: "lp_dss" });
    await consoleCtl.submitWizard({ kind: "require method", name: "tabu_search" });
    expect(consoleCtl.stalled).toBe(true);

    const { ApiError } = await import("../src/api.js");
    const { fieldErrorFor } = await import("../src/ruleEditor.js");
    try {
      // The GA rule already exists after the previous test.
      await submitRule(api, GA_RULE, consoleCtl.state.sessionId!);
      expect.unreachable("duplicate rule must be rejected");
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      const mapped = fieldErrorFor(error as InstanceType<typeof ApiError>);
      expect(mapped.field).toBe("id");
    }
  }, 60000);
});
