// View-model layer for the two what-if modes. All state here is derived
// from API responses plus the user's evidence selections; posteriors are
// never computed or guessed client-side, only copied from propagate
// responses. The exploratory store offers selectors solely for the
// target's Markov blanket, so an out-of-blanket request cannot even be
// constructed.

import {
  ApiClient,
  ApiError,
  Distribution,
  NetworkDescription,
  PropagationResponse,
  SessionState,
} from "./api.js";

export interface VariableRow {
  id: string;
  states: string[];
  /** extracted project value ("MANUAL" when not derivable), null without a dataset */
  projectValue: string | null;
  /** evidence the server session currently holds for this variable */
  evidence: string | null;
  /** posterior from the last propagate response, if any */
  posterior: Distribution | null;
}

export interface BarDatum {
  state: string;
  probability: number;
  /** two-decimal display label; bars render width = probability */
  label: string;
}

export interface UiError {
  code: string;
  message: string;
  /** rows implicated by the error (evidence rows for inconsistent evidence) */
  rows: string[];
}

export function bars(distribution: Distribution): BarDatum[] {
  return Object.entries(distribution).map(([state, probability]) => ({
    state,
    probability,
    label: probability.toFixed(2),
  }));
}

export function predictionBadge(prediction: string | null): string {
  if (prediction === null) return "";
  return prediction === "yes" ? "REVISE" : "STABLE";
}

function projectValueOf(session: SessionState, variable: string): string | null {
  const values = session.project_values;
  if (!values || !(variable in values)) return null;
  return values[variable]!.state;
}

abstract class BaseStore {
  readonly client: ApiClient;
  readonly network: NetworkDescription;
  session: SessionState | null = null;
  rows: VariableRow[] = [];
  revision: Distribution | null = null;
  prediction: string | null = null;
  lastError: UiError | null = null;

  constructor(client: ApiClient, network: NetworkDescription) {
    this.client = client;
    this.network = network;
  }

  get sessionId(): string | null {
    return this.session ? this.session.id : null;
  }

  protected statesOf(variable: string): string[] {
    const found = this.network.variables.find((v) => v.id === variable);
    return found ? found.states : [];
  }

  protected syncEvidence(session: SessionState): void {
    this.session = session;
    for (const row of this.rows) {
      row.evidence = session.evidence[row.id] ?? null;
      row.projectValue = projectValueOf(session, row.id);
    }
  }

  /** Set (state) or clear (null) evidence for one offered variable. */
  async setEvidence(variable: string, state: string | null): Promise<void> {
    if (!this.session) throw new Error("no session attached");
    if (!this.rows.some((row) => row.id === variable)) {
      throw new Error(`${variable} is not offered by this view`);
    }
    this.lastError = null;
    try {
      const session = await this.client.patchEvidence(this.session.id, {
        [variable]: state,
      });
      this.syncEvidence(session);
    } catch (error) {
      this.captureError(error, [variable]);
    }
  }

  async clearAllEvidence(): Promise<void> {
    if (!this.session) throw new Error("no session attached");
    const updates: Record<string, string | null> = {};
    for (const row of this.rows) {
      if (row.evidence !== null) updates[row.id] = null;
    }
    if (Object.keys(updates).length === 0) return;
    this.lastError = null;
    try {
      const session = await this.client.patchEvidence(this.session.id, updates);
      this.syncEvidence(session);
    } catch (error) {
      this.captureError(error, Object.keys(updates));
    }
  }

  async propagate(): Promise<void> {
    if (!this.session) throw new Error("no session attached");
    this.lastError = null;
    try {
      const response = await this.client.propagate(this.session.id);
      this.applyPropagation(response);
    } catch (error) {
      const evidenceRows = this.rows
        .filter((row) => row.evidence !== null)
        .map((row) => row.id);
      this.captureError(error, evidenceRows);
    }
  }

  protected applyPropagation(response: PropagationResponse): void {
    for (const row of this.rows) {
      row.posterior = response.posteriors[row.id] ?? row.posterior;
    }
    this.revision = response.revision;
    this.prediction = response.prediction;
  }

  protected captureError(error: unknown, rows: string[]): void {
    if (error instanceof ApiError) {
      this.lastError = {
        code: error.code,
        message: error.message,
        rows: error.code === "inconsistent_evidence" ? rows : [],
      };
      return;
    }
    throw error;
  }
}

/** Free evidence over every variable; all posteriors rendered after propagate. */
export class AnalyticStore extends BaseStore {
  /** Create a new session, or reattach to an existing one (page reload). */
  async init(existingSessionId?: string): Promise<void> {
    let session: SessionState | null = null;
    if (existingSessionId) {
      try {
        session = await this.client.getSession(existingSessionId);
      } catch (error) {
        if (!(error instanceof ApiError) || error.status !== 404) throw error;
      }
    }
    if (!session || session.mode !== "analytic") {
      session = await this.client.createSession("analytic");
    }
    this.rows = this.network.variables.map((v) => ({
      id: v.id,
      states: [...v.states],
      projectValue: null,
      evidence: null,
      posterior: null,
    }));
    this.revision = null;
    this.prediction = null;
    this.syncEvidence(session);
  }
}

/** Evidence restricted to the Markov blanket of a chosen target variable. */
export class ExploratoryStore extends BaseStore {
  target: string | null = null;

  /** Choose a target: fetches its blanket, opens a fresh session, drops
   *  any stale selections and posteriors from the previous target. */
  async setTarget(target: string): Promise<void> {
    const blanket = await this.client.markovBlanket(target);
    const session = await this.client.createSession("exploratory", target);
    this.target = target;
    this.rows = blanket.blanket.map((id) => ({
      id,
      states: this.statesOf(id),
      projectValue: blanket.project_values[id] ?? null,
      evidence: null,
      posterior: null,
    }));
    this.revision = null;
    this.prediction = null;
    this.lastError = null;
    this.targetPosterior = null;
    this.syncEvidence(session);
  }

  targetPosterior: Distribution | null = null;

  protected override applyPropagation(response: PropagationResponse): void {
    super.applyPropagation(response);
    if (this.target) {
      this.targetPosterior = response.posteriors[this.target] ?? null;
    }
  }
}
