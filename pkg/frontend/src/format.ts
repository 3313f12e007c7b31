import { ApiError } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function trimZeros(text: string): string {
  if (!text.includes(".")) return text;
  return text.replace(/0+$/, "").replace(/\.$/, "");
}

/**
 * Six significant digits, matching the report renderer on the server:
 * fixed notation for magnitudes in [1e-4, 1e6), exponent form outside,
 * trailing zeros trimmed.
 */
export function formatValue(value: number): string {
  if (!Number.isFinite(value)) return String(value);
  if (value === 0) return "0";
  const rounded = Number(value.toPrecision(6));
  if (rounded === 0) return "0";
  const exp = Math.floor(Math.log10(Math.abs(rounded)));
  if (exp < -4 || exp >= 6) {
    const mantissa = trimZeros((rounded / 10 ** exp).toPrecision(6));
    const sign = exp < 0 ? "-" : "+";
    const magnitude = String(Math.abs(exp)).padStart(2, "0");
    return `${mantissa}e${sign}${magnitude}`;
  }
  return trimZeros(rounded.toPrecision(6));
}

export function withUnit(value: number, unit: string): string {
  const text = formatValue(value);
  if (!unit || unit === "1") return text;
  return `${text} ${unit}`;
}

const ERROR_TEXT: Record<string, string> = {
  NonPositiveValue: "This quantity must be greater than zero.",
  NotANumber: "Enter a decimal number.",
  InvalidValue: "That value is not allowed here.",
  UnknownVariable: "This problem has no variable with that name.",
  UnknownAttribute: "This instance has no attribute with that name.",
  UnknownElement: "No ontology element with that name.",
  MissingValue: "A required value is missing.",
  TargetIsKnown: "That variable already has a given value.",
  IncompleteDefinition: "The problem definition is not complete yet.",
  NotSolvable: "No solution path reaches the requested targets.",
  InconsistentInput: "The given values contradict one of the equations.",
  DomainError: "A computation left the physically valid domain.",
  UnknownMaterial: "No material with that name in the catalog.",
  UnknownProcessClass: "No process class with that name.",
  UnknownSession: "This session no longer exists on the server.",
  SessionExpired: "This session expired after being idle too long.",
  SessionBusy: "Another request is still working on this session.",
  AlreadyFinalized: "The problem is already finalized.",
  BadRequest: "The request was malformed.",
  NetworkError: "The solver service could not be reached.",
};

/** Human sentence for an API failure; keeps the server detail in parens. */
export function describeError(err: ApiError): string {
  const text = ERROR_TEXT[err.code];
  if (!text) return err.message || err.code;
  if (!err.message) return text;
  return `${text} (${err.message})`;
}
