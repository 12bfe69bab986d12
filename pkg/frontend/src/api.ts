// Typed client for the design service. Every view in the console renders
// from the documents these calls return; nothing is computed client-side.

export interface StatusDoc {
  status: string;
  requirement?: string;
  error?: Record<string, unknown>;
}

export interface FiringDoc {
  seq: number;
  rule: string;
  bindings: Record<string, unknown>;
  actions: Record<string, unknown>[];
}

export interface InstanceDoc {
  id: string;
  unit: string;
  kind: string;
  params: Record<string, unknown>;
}

export interface ConnectionDoc {
  from: string;
  from_port: string;
  to: string;
  to_port: string;
}

export interface SchemeDoc {
  instances: InstanceDoc[];
  connections: ConnectionDoc[];
}

export interface OutcomeDoc {
  status: StatusDoc;
  requirement: string | null;
  firings: FiringDoc[];
  scheme: SchemeDoc;
}

export interface MistakeDoc {
  code: string;
  subject: string;
  source_frame: string;
  message: string;
}

export interface RecommendationDoc {
  source_frame: string;
  message: string;
  subjects: string[];
}

export interface ValidationDoc {
  passed: boolean;
  mistakes: MistakeDoc[];
  recommendations: RecommendationDoc[];
  checked_against: string[];
}

export interface UnitDoc {
  id: string;
  kind: string;
  capabilities: string[];
  ports: { name: string; direction: string; interface: string }[];
  origin: "builtin" | { external: string };
}

export interface CatalogDoc {
  interfaces: string[];
  units: UnitDoc[];
}

export interface RuleDoc {
  id: string;
  salience: number;
  conditions: unknown[];
  actions: unknown[];
  linked_units: string[];
  doc: string;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: Record<string, unknown>,
  ) {
    super(`api error ${status}: ${body["error"] ?? "unknown"}`);
  }

  get code(): string {
    return String(this.body["error"] ?? "unknown");
  }

  get detail(): string {
    return String(this.body["detail"] ?? this.message);
  }
}

async function parseBody(response: Response): Promise<Record<string, unknown>> {
  const text = await response.text();
  try {
    return JSON.parse(text) as Record<string, unknown>;
  } catch {
    return { error: "bad_response", detail: text.slice(0, 200) };
  }
}

export class DesignApi {
  constructor(private baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      method,
      headers: body === undefined ? {} : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await parseBody(response));
    }
    return (await response.json()) as T;
  }

  createSession(): Promise<{ session: string; status: StatusDoc }> {
    return this.request("POST", "/sessions");
  }

  submitStatement(sessionId: string, statement: string): Promise<OutcomeDoc> {
    return this.request("POST", `/sessions/${sessionId}/requirements`, { statement });
  }

  retry(sessionId: string): Promise<OutcomeDoc> {
    return this.request("POST", `/sessions/${sessionId}/retry`);
  }

  scheme(sessionId: string): Promise<SchemeDoc> {
    return this.request("GET", `/sessions/${sessionId}/scheme`);
  }

  validation(sessionId: string): Promise<ValidationDoc> {
    return this.request("GET", `/sessions/${sessionId}/validation`);
  }

  catalogUnits(): Promise<CatalogDoc> {
    return this.request("GET", "/catalog/units");
  }

  kbRules(): Promise<{ version: number; rules: RuleDoc[] }> {
    return this.request("GET", "/kb/rules");
  }

  addRule(rule: RuleDoc): Promise<{ version: number }> {
    return this.request("POST", "/kb/rules", rule);
  }

  linkRule(ruleId: string, units: string[]): Promise<{ version: number }> {
    return this.request("POST", `/kb/rules/${ruleId}/links`, { units });
  }

  async downloadScaffold(sessionId: string, force = false): Promise<Uint8Array> {
    const response = await fetch(`${this.baseUrl}/sessions/${sessionId}/generate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(force ? { force: true } : {}),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await parseBody(response));
    }
    return new Uint8Array(await response.arrayBuffer());
  }
}
