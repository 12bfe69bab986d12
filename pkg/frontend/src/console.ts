// Session controller: owns the conversation with the service and exposes
// the state the views render from. Every displayed value originates in an
// API response held here.

import {
  ApiError,
  DesignApi,
  type OutcomeDoc,
  type SchemeDoc,
  type StatusDoc,
  type ValidationDoc,
} from "./api.js";
import type { LogRow } from "./render.js";
import { buildStatement, type WizardForm } from "./statements.js";

export interface ConsoleState {
  sessionId: string | null;
  status: StatusDoc;
  log: LogRow[];
  scheme: SchemeDoc;
  validation: ValidationDoc | null;
  banner: string | null;
  stalledRequirement: string | null;
}

export class DesignConsole {
  state: ConsoleState = {
    sessionId: null,
    status: { status: "awaiting_requirement" },
    log: [],
    scheme: { instances: [], connections: [] },
    validation: null,
    banner: null,
    stalledRequirement: null,
  };

  constructor(private api: DesignApi) {}

  get awaiting(): boolean {
    return this.state.status.status === "awaiting_requirement";
  }

  get halted(): boolean {
    return this.state.status.status === "halted";
  }

  get stalled(): boolean {
    return this.state.status.status === "missing_rule";
  }

  async start(): Promise<void> {
    try {
      const created = await this.api.createSession();
      this.state.sessionId = created.session;
      this.state.status = created.status;
      this.state.banner = null;
    } catch (error) {
      this.state.banner = describeError(error);
    }
  }

  private absorb(outcome: OutcomeDoc): void {
    this.state.status = outcome.status;
    this.state.scheme = outcome.scheme;
    this.state.stalledRequirement =
      outcome.status.status === "missing_rule"
        ? (outcome.status.requirement ?? null)
        : null;
  }

  async submitStatementText(statement: string): Promise<void> {
    if (!this.state.sessionId) throw new Error("no session");
    try {
      const outcome = await this.api.submitStatement(this.state.sessionId, statement);
      this.absorb(outcome);
      this.state.log.push({
        statement,
        status: outcome.status,
        firings: outcome.firings.map((f) => f.rule),
      });
      await this.refreshValidation();
    } catch (error) {
      this.state.log.push({
        statement,
        status: { status: "rejected" },
        firings: [],
        error: describeError(error),
      });
    }
  }

  async submitWizard(form: WizardForm): Promise<void> {
    await this.submitStatementText(buildStatement(form));
  }

  async retry(): Promise<OutcomeDoc | null> {
    if (!this.state.sessionId) throw new Error("no session");
    try {
      const outcome = await this.api.retry(this.state.sessionId);
      this.absorb(outcome);
      this.state.log.push({
        statement: "(retry)",
        status: outcome.status,
        firings: outcome.firings.map((f) => f.rule),
      });
      await this.refreshValidation();
      return outcome;
    } catch (error) {
      this.state.banner = describeError(error);
      return null;
    }
  }

  async refreshValidation(): Promise<void> {
    if (!this.state.sessionId) return;
    try {
      this.state.validation = await this.api.validation(this.state.sessionId);
    } catch (error) {
      this.state.validation = null;
      this.state.banner = describeError(error);
    }
  }

  async downloadScaffold(force = false): Promise<Uint8Array | null> {
    if (!this.state.sessionId) throw new Error("no session");
    try {
      return await this.api.downloadScaffold(this.state.sessionId, force);
    } catch (error) {
      this.state.banner = describeError(error);
      return null;
    }
  }
}

export function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    return `${error.code}: ${error.detail}`;
  }
  if (error instanceof Error) {
    return error.message || "the design service is unreachable";
  }
  return "the design service is unreachable";
}
