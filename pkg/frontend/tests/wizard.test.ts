import { describe, expect, it } from "vitest";
import { ApiError } from "../src/api.js";
import { App, MemoryStore, renderView } from "../src/wizard.js";
import type { SolverApi } from "../src/wizard.js";
import type {
  ProcessClassInfo,
  Report,
  SessionState,
  SolveResponse,
  VariableRow,
} from "../src/types.js";

function makeState(over: Partial<SessionState> = {}): SessionState {
  return {
    session_id: "s1",
    process_class: "single_change_of_state",
    status: "defining",
    material: null,
    pending_choices: [],
    attributes: {},
    variables: [],
    knowns: {},
    targets: [],
    targets_explicit: false,
    ...over,
  };
}

function makeVar(name: string, unit: string, over: Partial<VariableRow> = {}): VariableRow {
  return {
    name,
    base: name,
    instance: "state_1",
    symbol: name,
    unit,
    known: false,
    value: null,
    provenance: null,
    target: false,
    ...over,
  };
}

const CLASSES: ProcessClassInfo[] = [
  {
    name: "single_change_of_state",
    description: "one change between two states",
    state_count: 2,
    change_count: 1,
  },
];

/** Scripted stand-in for the HTTP client; every call is recorded. */
class FakeApi implements SolverApi {
  calls: Array<{ method: string; args: unknown[] }> = [];
  classes = CLASSES;
  nextState: SessionState = makeState();
  sessionState: SessionState | null = null;
  solveResponse: SolveResponse = { session_id: "s1", report: {} as Report };
  failure: ApiError | null = null;

  private record(method: string, args: unknown[]): void {
    this.calls.push({ method, args });
  }

  private takeFailure(): void {
    if (this.failure) {
      const f = this.failure;
      this.failure = null;
      throw f;
    }
  }

  async processClasses(): Promise<{ process_classes: ProcessClassInfo[] }> {
    this.record("processClasses", []);
    return { process_classes: this.classes };
  }

  async createSession(processClass: string): Promise<SessionState> {
    this.record("createSession", [processClass]);
    this.takeFailure();
    return this.nextState;
  }

  async session(sessionId: string): Promise<SessionState> {
    this.record("session", [sessionId]);
    if (!this.sessionState) {
      throw new ApiError("UnknownSession", `no session ${sessionId}`, {}, 404);
    }
    return this.sessionState;
  }

  async deleteSession(sessionId: string): Promise<{ deleted: string }> {
    this.record("deleteSession", [sessionId]);
    return { deleted: sessionId };
  }

  async setAttribute(
    sessionId: string,
    instance: string,
    attribute: string,
    value: string,
  ): Promise<SessionState> {
    this.record("setAttribute", [sessionId, instance, attribute, value]);
    this.takeFailure();
    return this.nextState;
  }

  async setValue(sessionId: string, name: string, value: number): Promise<SessionState> {
    this.record("setValue", [sessionId, name, value]);
    this.takeFailure();
    return this.nextState;
  }

  async setTargets(sessionId: string, targets: string[]): Promise<SessionState> {
    this.record("setTargets", [sessionId, targets]);
    this.takeFailure();
    return this.nextState;
  }

  async solve(sessionId: string, graph?: "json" | "dot"): Promise<SolveResponse> {
    this.record("solve", [sessionId, graph]);
    this.takeFailure();
    return this.solveResponse;
  }
}

const CHOICE_STATE = makeState({
  pending_choices: [
    { instance: "change", kind: "attribute", attribute: "isothermal", options: ["true", "false"] },
    { instance: "change", kind: "attribute", attribute: "reversible", options: ["true", "false"] },
  ],
  attributes: { change: { adiabatic: "false" } },
});

const DEFINE_STATE = makeState({
  material: "air",
  variables: [
    makeVar("m", "kg", { instance: "system" }),
    makeVar("T_1", "K", { known: true, value: 300, provenance: "given" }),
    makeVar("V_1", "m^3"),
    makeVar("W_12", "J", { instance: "change", target: true }),
  ],
  knowns: { T_1: 300 },
  targets: ["W_12"],
  targets_explicit: true,
});

describe("App dialogue flow", () => {
  it("boots to the intro screen when nothing is stored", async () => {
    const api = new FakeApi();
    const app = new App(api, new MemoryStore());
    await app.boot();
    const view = app.view();
    expect(view.kind).toBe("intro");
    const html = renderView(view);
    expect(html).toContain("single_change_of_state");
    expect(html).toContain("one change between two states");
    expect(api.calls.map((c) => c.method)).toEqual(["processClasses"]);
  });

  it("creates a session and stores its id", async () => {
    const api = new FakeApi();
    api.nextState = CHOICE_STATE;
    const store = new MemoryStore();
    const app = new App(api, store);
    await app.boot();
    await app.chooseClass("single_change_of_state");
    expect(store.load()).toBe("s1");
    expect(app.view().kind).toBe("choice");
    expect(api.calls.at(-1)).toEqual({
      method: "createSession",
      args: ["single_change_of_state"],
    });
  });

  it("shows exactly the first pending choice", () => {
    const api = new FakeApi();
    const store = new MemoryStore();
    store.save("s1");
    const app = new App(api, store);
    api.sessionState = CHOICE_STATE;
    return app.boot().then(() => {
      const view = app.view();
      expect(view.kind).toBe("choice");
      const html = renderView(view);
      expect(html).toContain("isothermal");
      expect(html).not.toContain("Choose <code>reversible");
      expect(html).toContain("2 open questions");
    });
  });

  it("answers a choice with one API call carrying instance and attribute", async () => {
    const api = new FakeApi();
    api.sessionState = CHOICE_STATE;
    api.nextState = DEFINE_STATE;
    const store = new MemoryStore();
    store.save("s1");
    const app = new App(api, store);
    await app.boot();
    const before = api.calls.length;
    await app.answer("true");
    expect(api.calls.length).toBe(before + 1);
    expect(api.calls.at(-1)).toEqual({
      method: "setAttribute",
      args: ["s1", "change", "isothermal", "true"],
    });
    expect(app.view().kind).toBe("define");
  });

  it("renders attribute badges straight from the response, derived ones included", () => {
    const state = makeState({
      pending_choices: [
        { instance: "material", kind: "attribute", attribute: "substance", options: ["air"] },
      ],
      attributes: {
        change: { adiabatic: "true", reversible: "true", isentropic: "true" },
      },
    });
    const api = new FakeApi();
    api.sessionState = state;
    const store = new MemoryStore();
    store.save("s1");
    const app = new App(api, store);
    return app.boot().then(() => {
      const html = renderView(app.view());
      // isentropic was never asked; it appears because the server derived it
      expect(html).toContain("change.isentropic = true");
    });
  });

  it("renders the definition screen with inputs, knowns, and targets", async () => {
    const api = new FakeApi();
    api.sessionState = DEFINE_STATE;
    const store = new MemoryStore();
    store.save("s1");
    const app = new App(api, store);
    await app.boot();
    const html = renderView(app.view());
    expect(html).toContain('data-field="m"');
    expect(html).toContain("300 K");
    expect(html).toContain("(given)");
    expect(html).toContain('data-name="W_12" checked');
    expect(html).toContain("[m^3]");
    expect(html).toContain("Material: <code>air</code>");
  });

  it("rejects unparseable numbers locally without an API call", async () => {
    const api = new FakeApi();
    api.sessionState = DEFINE_STATE;
    const store = new MemoryStore();
    store.save("s1");
    const app = new App(api, store);
    await app.boot();
    const before = api.calls.length;
    await app.enterValue("m", "banana");
    expect(api.calls.length).toBe(before);
    const html = renderView(app.view());
    expect(html).toContain('data-for="m"');
    expect(html).toContain("Enter a decimal number.");
  });

  it("shows a server rejection inline next to the offending field", async () => {
    const api = new FakeApi();
    api.sessionState = DEFINE_STATE;
    const store = new MemoryStore();
    store.save("s1");
    const app = new App(api, store);
    await app.boot();
    api.failure = new ApiError("NonPositiveValue", "V_1 must be positive", {}, 400);
    await app.enterValue("V_1", "-2");
    const html = renderView(app.view());
    expect(html).toContain('data-for="V_1"');
    expect(html).toContain("greater than zero");
    expect(html).toContain("V_1 must be positive");
  });

  it("toggles targets by posting the full next list", async () => {
    const api = new FakeApi();
    api.sessionState = DEFINE_STATE;
    api.nextState = DEFINE_STATE;
    const store = new MemoryStore();
    store.save("s1");
    const app = new App(api, store);
    await app.boot();
    await app.toggleTarget("Q_12");
    expect(api.calls.at(-1)).toEqual({
      method: "setTargets",
      args: ["s1", ["Q_12", "W_12"]],
    });
    // the fake returned DEFINE_STATE again, so W_12 is still the only target
    await app.toggleTarget("W_12");
    expect(api.calls.at(-1)).toEqual({
      method: "setTargets",
      args: ["s1", []],
    });
  });

  it("recovers to the intro when the stored session is gone", async () => {
    const api = new FakeApi();
    const store = new MemoryStore();
    store.save("stale");
    const app = new App(api, store);
    await app.boot();
    expect(app.view().kind).toBe("intro");
    expect(store.load()).toBeNull();
    expect(api.calls.map((c) => c.method)).toEqual(["session", "processClasses"]);
  });

  it("restores the identical screen from storage alone", async () => {
    const api = new FakeApi();
    api.sessionState = CHOICE_STATE;
    const store = new MemoryStore();
    store.save("s1");
    const first = new App(api, store);
    await first.boot();
    const second = new App(api, store);
    await second.boot();
    expect(renderView(second.view())).toBe(renderView(first.view()));
  });
});

const REPORT: Report = {
  process_class: "single_change_of_state",
  material: "air",
  attributes: { change: { isothermal: "true", reversible: "true" } },
  knowns: { m: 1, T_1: 300, V_1: 1, V_2: 0.5 },
  provenance: { W_12: "isothermal_work@change" },
  targets: ["W_12", "Q_12", "n_poly"],
  results: { W_12: 59688.290012378005, Q_12: -59688.290012378005 },
  undetermined: ["n_poly"],
  units: { W_12: "J", Q_12: "J", n_poly: "1" },
  steps: [
    {
      index: 1,
      equation: "isothermal_work@change",
      rendered: "W_12 = -(m * R * T_1 * log(V_2 / V_1))",
      guards: ["isothermal@change", "reversible@change"],
      variable: "W_12",
      value: 59688.290012378005,
      unit: "J",
      residual: 0,
    },
  ],
  audit: [
    { equation: "thermal_eos@state_1", rendered: "p_1 * V_1 = m * R * T_1", residual: 1.2e-16 },
  ],
  warnings: ["example warning"],
};

describe("report rendering", () => {
  async function appWithReport(): Promise<App> {
    const api = new FakeApi();
    api.sessionState = DEFINE_STATE;
    api.solveResponse = {
      session_id: "s1",
      report: REPORT,
      graph: {
        nodes: [
          { id: "W_12", kind: "Variable", known: false, determined: true, target: true },
          { id: "isothermal_work@change", kind: "Equation", fired: true },
        ],
        edges: [{ from: "isothermal_work@change", to: "W_12", label: "solves" }],
      },
    };
    const store = new MemoryStore();
    store.save("s1");
    const app = new App(api, store);
    await app.boot();
    await app.solve();
    return app;
  }

  it("shows six-significant-digit values with units", async () => {
    const app = await appWithReport();
    const view = app.view();
    expect(view.kind).toBe("report");
    const html = renderView(view);
    expect(html).toContain("59688.3 J");
    expect(html).toContain("-59688.3 J");
    expect(html).toContain("isothermal_work@change");
    expect(html).toContain("isothermal@change");
    expect(html).toContain("not reachable");
    expect(html).toContain("example warning");
    expect(html).toContain("Residual audit (1 equations)");
    expect(html).toContain("reasoning-graph");
  });

  it("is a pure function of the latest responses", async () => {
    const app = await appWithReport();
    expect(renderView(app.view())).toBe(renderView(app.view()));
  });

  it("returns to the editable definition screen", async () => {
    const app = await appWithReport();
    app.edit();
    expect(app.view().kind).toBe("define");
  });
});
