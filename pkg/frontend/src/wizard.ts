import { ApiError } from "./api.js";
import { describeError, escapeHtml, withUnit } from "./format.js";
import { renderGraphSvg } from "./graph.js";
import type {
  GraphDoc,
  PendingChoice,
  ProcessClassInfo,
  Report,
  SessionState,
  SolveResponse,
} from "./types.js";

/** The slice of the HTTP client the wizard needs; ApiClient satisfies it. */
export interface SolverApi {
  processClasses(): Promise<{ process_classes: ProcessClassInfo[] }>;
  createSession(processClass: string): Promise<SessionState>;
  session(sessionId: string): Promise<SessionState>;
  deleteSession(sessionId: string): Promise<{ deleted: string }>;
  setAttribute(
    sessionId: string,
    instance: string,
    attribute: string,
    value: string,
  ): Promise<SessionState>;
  setValue(sessionId: string, name: string, value: number): Promise<SessionState>;
  setTargets(sessionId: string, targets: string[]): Promise<SessionState>;
  solve(sessionId: string, graph?: "json" | "dot"): Promise<SolveResponse>;
}

/** Where the session id survives a page reload. */
export interface SessionStore {
  load(): string | null;
  save(id: string): void;
  clear(): void;
}

export class MemoryStore implements SessionStore {
  private id: string | null = null;
  load(): string | null {
    return this.id;
  }
  save(id: string): void {
    this.id = id;
  }
  clear(): void {
    this.id = null;
  }
}

export type View =
  | { kind: "intro"; classes: ProcessClassInfo[]; error: string }
  | { kind: "choice"; state: SessionState; choice: PendingChoice; error: string }
  | { kind: "define"; state: SessionState; error: string; errorField: string }
  | { kind: "report"; state: SessionState; report: Report; graph: GraphDoc | null; error: string };

/**
 * Dialogue controller. Holds no thermodynamic knowledge: every screen is a
 * pure function of the most recent service response, so a reload that
 * re-fetches the session lands on the same screen.
 */
export class App {
  private classes: ProcessClassInfo[] = [];
  private state: SessionState | null = null;
  private report: Report | null = null;
  private graph: GraphDoc | null = null;
  private error = "";
  private errorField = "";

  constructor(
    private readonly api: SolverApi,
    private readonly storage: SessionStore,
  ) {}

  view(): View {
    if (!this.state) {
      return { kind: "intro", classes: this.classes, error: this.error };
    }
    if (this.report) {
      return {
        kind: "report",
        state: this.state,
        report: this.report,
        graph: this.graph,
        error: this.error,
      };
    }
    const choice = this.state.pending_choices[0];
    if (choice) {
      return { kind: "choice", state: this.state, choice, error: this.error };
    }
    return {
      kind: "define",
      state: this.state,
      error: this.error,
      errorField: this.errorField,
    };
  }

  /** Restore a stored session if one exists, else fetch the class list. */
  async boot(): Promise<void> {
    const stored = this.storage.load();
    if (stored) {
      try {
        this.state = await this.api.session(stored);
        return;
      } catch (err) {
        if (!(err instanceof ApiError)) throw err;
        this.storage.clear();
      }
    }
    const listing = await this.api.processClasses();
    this.classes = listing.process_classes;
  }

  async chooseClass(name: string): Promise<void> {
    await this.action(async () => {
      this.state = await this.api.createSession(name);
      this.storage.save(this.state.session_id);
    });
  }

  /** Answer the currently displayed pending choice. */
  async answer(option: string): Promise<void> {
    const state = this.state;
    const choice = state?.pending_choices[0];
    if (!state || !choice) return;
    await this.action(async () => {
      this.state = await this.api.setAttribute(
        state.session_id,
        choice.instance,
        choice.attribute,
        option,
      );
    });
  }

  /** Parse locally, then give the value to the server. */
  async enterValue(name: string, raw: string): Promise<void> {
    const state = this.state;
    if (!state) return;
    const trimmed = raw.trim();
    const parsed = Number(trimmed);
    if (trimmed === "" || !Number.isFinite(parsed)) {
      this.error = "Enter a decimal number.";
      this.errorField = name;
      return;
    }
    await this.action(async () => {
      this.state = await this.api.setValue(state.session_id, name, parsed);
    }, name);
  }

  async toggleTarget(name: string): Promise<void> {
    const state = this.state;
    if (!state) return;
    const next = new Set(state.targets);
    if (next.has(name)) {
      next.delete(name);
    } else {
      next.add(name);
    }
    await this.action(async () => {
      this.state = await this.api.setTargets(state.session_id, [...next].sort());
    }, name);
  }

  async solve(): Promise<void> {
    const state = this.state;
    if (!state) return;
    await this.action(async () => {
      const outcome = await this.api.solve(state.session_id, "json");
      this.report = outcome.report;
      this.graph = typeof outcome.graph === "string" ? null : outcome.graph ?? null;
    });
  }

  /** Back from the report to the editable definition screen. */
  edit(): void {
    this.report = null;
    this.graph = null;
    this.error = "";
    this.errorField = "";
  }

  /** Drop the session on the server and return to the intro screen. */
  async reset(): Promise<void> {
    const state = this.state;
    if (state) {
      try {
        await this.api.deleteSession(state.session_id);
      } catch (err) {
        if (!(err instanceof ApiError)) throw err;
      }
    }
    this.storage.clear();
    this.state = null;
    this.report = null;
    this.graph = null;
    this.error = "";
    this.errorField = "";
    await this.boot();
  }

  private async action(run: () => Promise<void>, field = ""): Promise<void> {
    this.error = "";
    this.errorField = "";
    try {
      await run();
    } catch (err) {
      if (!(err instanceof ApiError)) throw err;
      if (err.code === "UnknownSession" || err.code === "SessionExpired") {
        this.storage.clear();
      }
      this.error = describeError(err);
      this.errorField = field;
    }
  }
}

function errorBanner(error: string): string {
  if (!error) return "";
  return `<p class="error-banner">${escapeHtml(error)}</p>`;
}

function attributeBadges(state: SessionState): string {
  const badges: string[] = [];
  for (const instance of Object.keys(state.attributes).sort()) {
    const attrs = state.attributes[instance] ?? {};
    for (const attr of Object.keys(attrs).sort()) {
      const value = attrs[attr];
      badges.push(
        `<span class="badge" data-instance="${escapeHtml(instance)}" data-attribute="${escapeHtml(attr)}">` +
          `${escapeHtml(instance)}.${escapeHtml(attr)} = ${escapeHtml(String(value))}</span>`,
      );
    }
  }
  if (!badges.length) return "";
  return `<div class="badges">${badges.join("")}</div>`;
}

function renderIntro(view: Extract<View, { kind: "intro" }>): string {
  const items = view.classes
    .map(
      (cls) =>
        `<li><button data-action="pick-class" data-name="${escapeHtml(cls.name)}">` +
        `${escapeHtml(cls.name)}</button> <span class="hint">${escapeHtml(cls.description)}</span></li>`,
    )
    .join("");
  return (
    `<section class="intro">` +
    `<h1>Thermodynamics solver</h1>` +
    errorBanner(view.error) +
    `<p>Pick the process arrangement to describe:</p>` +
    `<ul class="class-list">${items}</ul>` +
    `</section>`
  );
}

function renderChoice(view: Extract<View, { kind: "choice" }>): string {
  const { choice, state } = view;
  const options = choice.options
    .map(
      (option, i) =>
        `<li><button data-action="answer" data-option="${escapeHtml(option)}">` +
        `${i + 1}. ${escapeHtml(option)}</button></li>`,
    )
    .join("");
  const remaining = state.pending_choices.length;
  return (
    `<section class="choice">` +
    `<h1>${escapeHtml(state.process_class)}</h1>` +
    attributeBadges(state) +
    errorBanner(view.error) +
    `<p class="prompt">Choose <code>${escapeHtml(choice.attribute)}</code> for ` +
    `<code>${escapeHtml(choice.instance)}</code>:</p>` +
    `<ul class="options">${options}</ul>` +
    `<p class="hint">${remaining} open question${remaining === 1 ? "" : "s"}</p>` +
    `<button data-action="reset" class="secondary">Start over</button>` +
    `</section>`
  );
}

function variableRows(view: Extract<View, { kind: "define" }>): string {
  const rows: string[] = [];
  for (const row of view.state.variables) {
    const label =
      `<th><code>${escapeHtml(row.name)}</code> ` +
      `<span class="hint">${escapeHtml(row.symbol)}${row.unit && row.unit !== "1" ? " [" + escapeHtml(row.unit) + "]" : ""}</span></th>`;
    let valueCell: string;
    if (row.known && row.value !== null) {
      const provenance = row.provenance ? ` <span class="hint">(${escapeHtml(row.provenance)})</span>` : "";
      valueCell = `<td class="known">${escapeHtml(withUnit(row.value, row.unit))}${provenance}</td>`;
    } else {
      valueCell =
        `<td><input data-field="${escapeHtml(row.name)}" inputmode="decimal" ` +
        `placeholder="${escapeHtml(row.unit)}"> ` +
        `<button data-action="set-value" data-name="${escapeHtml(row.name)}">set</button></td>`;
    }
    const checked = row.target ? " checked" : "";
    const targetCell =
      `<td><label><input type="checkbox" data-action="toggle-target" ` +
      `data-name="${escapeHtml(row.name)}"${checked}> target</label></td>`;
    let errorRow = "";
    if (view.errorField === row.name && view.error) {
      errorRow =
        `<tr class="field-error-row"><td colspan="3">` +
        `<span class="field-error" data-for="${escapeHtml(row.name)}">${escapeHtml(view.error)}</span>` +
        `</td></tr>`;
    }
    rows.push(`<tr>${label}${valueCell}${targetCell}</tr>${errorRow}`);
  }
  return rows.join("");
}

function renderDefine(view: Extract<View, { kind: "define" }>): string {
  const { state } = view;
  const material = state.material ? `<p>Material: <code>${escapeHtml(state.material)}</code></p>` : "";
  const banner = view.errorField ? "" : errorBanner(view.error);
  const targets = state.targets.length
    ? `<p>Targets: ${state.targets.map((t) => `<code>${escapeHtml(t)}</code>`).join(", ")}</p>`
    : `<p class="hint">No targets picked yet; solving will report every reachable variable.</p>`;
  return (
    `<section class="define">` +
    `<h1>${escapeHtml(state.process_class)}</h1>` +
    attributeBadges(state) +
    material +
    banner +
    `<table class="variables"><thead><tr><th>variable</th><th>value</th><th></th></tr></thead>` +
    `<tbody>${variableRows(view)}</tbody></table>` +
    targets +
    `<button data-action="solve">Solve</button> ` +
    `<button data-action="reset" class="secondary">Start over</button>` +
    `</section>`
  );
}

function renderSteps(report: Report): string {
  if (!report.steps.length) return "<p>No derivation steps were needed.</p>";
  const items = report.steps
    .map((step) => {
      const guards = step.guards.length
        ? ` <span class="hint">[${step.guards.map(escapeHtml).join(", ")}]</span>`
        : "";
      return (
        `<li><code>${escapeHtml(step.equation)}</code>: ` +
        `<code>${escapeHtml(step.rendered)}</code>${guards}` +
        ` &rarr; <code>${escapeHtml(step.variable)}</code> = ` +
        `<strong>${escapeHtml(withUnit(step.value, step.unit))}</strong></li>`
      );
    })
    .join("");
  return `<ol class="steps">${items}</ol>`;
}

function renderResults(report: Report): string {
  const rows: string[] = [];
  for (const target of report.targets) {
    const value = report.results[target];
    const unit = report.units[target] ?? "";
    const cell =
      value === undefined
        ? `<td class="unreached">not reachable</td>`
        : `<td><strong>${escapeHtml(withUnit(value, unit))}</strong></td>`;
    rows.push(`<tr><th><code>${escapeHtml(target)}</code></th>${cell}</tr>`);
  }
  return `<table class="results"><tbody>${rows.join("")}</tbody></table>`;
}

function renderAudit(report: Report): string {
  if (!report.audit.length) return "";
  const rows = report.audit
    .map(
      (row) =>
        `<tr><td><code>${escapeHtml(row.equation)}</code></td>` +
        `<td><code>${escapeHtml(row.rendered)}</code></td>` +
        `<td class="num">${escapeHtml(row.residual.toExponential(3))}</td></tr>`,
    )
    .join("");
  return (
    `<details class="audit"><summary>Residual audit (${report.audit.length} equations)</summary>` +
    `<table><thead><tr><th>equation</th><th>instantiated form</th><th>residual</th></tr></thead>` +
    `<tbody>${rows}</tbody></table></details>`
  );
}

function renderReport(view: Extract<View, { kind: "report" }>): string {
  const { report } = view;
  const undetermined = report.undetermined.length
    ? `<p>Left symbolic: ${report.undetermined.map((n) => `<code>${escapeHtml(n)}</code>`).join(", ")}</p>`
    : "";
  const warnings = report.warnings.length
    ? `<ul class="warnings">${report.warnings.map((w) => `<li>${escapeHtml(w)}</li>`).join("")}</ul>`
    : "";
  const graph = view.graph
    ? `<details class="graph" open><summary>Reasoning graph</summary>${renderGraphSvg(view.graph)}</details>`
    : "";
  return (
    `<section class="report">` +
    `<h1>Solution</h1>` +
    errorBanner(view.error) +
    renderResults(report) +
    undetermined +
    warnings +
    `<h2>Steps</h2>` +
    renderSteps(report) +
    renderAudit(report) +
    graph +
    `<button data-action="edit">Back to inputs</button> ` +
    `<button data-action="reset" class="secondary">Start over</button>` +
    `</section>`
  );
}

/** Pure view renderer: same view value, same markup. */
export function renderView(view: View): string {
  switch (view.kind) {
    case "intro":
      return renderIntro(view);
    case "choice":
      return renderChoice(view);
    case "define":
      return renderDefine(view);
    case "report":
      return renderReport(view);
  }
}
