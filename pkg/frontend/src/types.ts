// Shapes mirrored from the HTTP service JSON. The client never invents
// fields: everything rendered comes from one of these payloads.

export interface ProcessClassInfo {
  name: string;
  description: string;
  state_count: number;
  change_count: number;
}

export interface MaterialInfo {
  name: string;
  molar_mass: number;
  specific_gas_constant: number;
  cv: number;
  cp: number;
  kappa: number;
  is_ideal_gas: boolean;
}

export interface PendingChoice {
  instance: string;
  kind: string;
  attribute: string;
  options: string[];
}

export interface VariableRow {
  name: string;
  base: string;
  instance: string;
  symbol: string;
  unit: string;
  known: boolean;
  value: number | null;
  provenance: string | null;
  target: boolean;
}

export interface SessionState {
  session_id: string;
  process_class: string;
  status: string;
  material: string | null;
  pending_choices: PendingChoice[];
  attributes: Record<string, Record<string, string>>;
  variables: VariableRow[];
  knowns: Record<string, number>;
  targets: string[];
  targets_explicit: boolean;
}

export interface ReportStep {
  index: number;
  equation: string;
  rendered: string;
  guards: string[];
  variable: string;
  value: number;
  unit: string;
  residual: number;
}

export interface AuditRow {
  equation: string;
  rendered: string;
  residual: number;
}

export interface Report {
  process_class: string;
  material: string | null;
  attributes: Record<string, Record<string, string>>;
  knowns: Record<string, number>;
  provenance: Record<string, string>;
  targets: string[];
  results: Record<string, number>;
  undetermined: string[];
  units: Record<string, string>;
  steps: ReportStep[];
  audit: AuditRow[];
  warnings: string[];
}

export interface GraphNode {
  id: string;
  kind: "Equation" | "Variable";
  fired?: boolean;
  known?: boolean;
  determined?: boolean;
  target?: boolean;
}

export interface GraphEdge {
  from: string;
  to: string;
  label: string;
}

export interface GraphDoc {
  nodes: GraphNode[];
  edges: GraphEdge[];
}

export interface SolveResponse {
  session_id: string;
  report: Report;
  graph?: GraphDoc | string;
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  details: Record<string, unknown>;
}
