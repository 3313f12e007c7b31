"""Equation templates over concept-qualified slots, and single-unknown solving.

An equation template pairs two expression trees (lhs, rhs) whose leaves are
slots like ``p@State``.  Binding each slot to a concrete variable instance
(``p@State -> p_1``) yields an equation instance that can be evaluated against
a valuation, checked for residual error, and solved for one unknown.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping

from .errors import (
    DomainError,
    InvalidValue,
    MissingValue,
    MultipleOccurrenceUnsolved,
    NoSolution,
    UnboundSlot,
    UnknownAttribute,
    UnknownRule,
    UnknownVariable,
)
from .expressions import (
    Add,
    Constant,
    Div,
    Expr,
    Ln,
    Mul,
    Neg,
    Pow,
    Slot,
    Sub,
    count_occurrences,
    evaluate,
    parse_expression,
    render,
    slots_of,
)

if TYPE_CHECKING:
    from .ontology import RuleDef

Valuation = dict[str, float]


@dataclass(frozen=True)
class EquationTemplate:
    """A named equation lhs = rhs over concept-qualified slots."""

    name: str
    lhs: Expr
    rhs: Expr
    lhs_text: str
    rhs_text: str
    guards: tuple[str, ...] = ()
    slots: tuple[Slot, ...] = field(default=())

    def __post_init__(self):
        found = []
        seen = set()
        for slot in slots_of(self.lhs) + slots_of(self.rhs):
            if slot.key not in seen:
                seen.add(slot.key)
                found.append(slot)
        object.__setattr__(self, "slots", tuple(found))

    @property
    def always_applicable(self) -> bool:
        return not self.guards

    @property
    def slot_keys(self) -> tuple[str, ...]:
        return tuple(slot.key for slot in self.slots)

    def render(self) -> str:
        return f"{render(self.lhs)} = {render(self.rhs)}"


def template_from_text(name: str, lhs: str, rhs: str,
                       guards: tuple[str, ...] = ()) -> EquationTemplate:
    return EquationTemplate(name=name, lhs=parse_expression(lhs),
                            rhs=parse_expression(rhs), lhs_text=lhs,
                            rhs_text=rhs, guards=tuple(guards))


@dataclass(frozen=True)
class EquationInstance:
    """A template with every slot bound to a concrete variable instance."""

    template: EquationTemplate
    name: str
    binding: Mapping[str, str]
    residual_tolerance: float = 1e-9
    positive_slots: frozenset[str] = frozenset()

    def __post_init__(self):
        for key in self.template.slot_keys:
            if key not in self.binding:
                raise UnboundSlot(
                    f"slot {key} of equation {self.template.name} is unbound",
                    slot=key, equation=self.template.name)
        bound = [self.binding[key] for key in self.template.slot_keys]
        if len(set(bound)) != len(bound):
            raise InvalidValue(
                f"equation instance {self.name} binds two slots to the "
                f"same variable", equation=self.name)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(self.binding[key] for key in self.template.slot_keys)

    def render(self) -> str:
        lhs = render(self.template.lhs, self.binding)
        rhs = render(self.template.rhs, self.binding)
        return f"{lhs} = {rhs}"


def residual(inst: EquationInstance, valuation: Valuation) -> float:
    """Relative lhs/rhs mismatch with absolute fallback near magnitude 1."""
    lhs = evaluate(inst.template.lhs, inst.binding, valuation)
    rhs = evaluate(inst.template.rhs, inst.binding, valuation)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)


def guards_satisfied(template: EquationTemplate,
                     attribute_state: Mapping[str, object],
                     rules: Mapping[str, "RuleDef"]) -> bool:
    """True iff every guard rule's condition holds under attribute_state.

    Condition values are compared by equality, except when the state entry
    is a set (concept-membership style), where containment is required.
    """
    for guard in template.guards:
        if guard not in rules:
            raise UnknownRule(f"unknown rule {guard!r} guarding equation "
                              f"{template.name}", rule=guard)
        for attr_key, required in rules[guard].condition:
            if attr_key not in attribute_state:
                raise UnknownAttribute(
                    f"attribute {attr_key!r} required by rule {guard!r} "
                    f"is not part of the attribute state", attribute=attr_key)
            actual = attribute_state[attr_key]
            if isinstance(actual, (set, frozenset)):
                if required not in actual:
                    return False
            elif actual != required:
                return False
    return True


def solve_for(inst: EquationInstance, unknown: str, valuation: Valuation,
              *, warnings: list[str] | None = None,
              strategy: str = "auto") -> float:
    """Solve the instance for one unknown variable.

    Single-occurrence unknowns are isolated symbolically by inverting the
    operation path from the root to the slot; anything else falls back to
    deterministic bracketed root-finding on lhs - rhs.  The returned value
    satisfies residual(inst, valuation + {unknown: v}) <= residual_tolerance.
    """
    keys = [key for key in inst.template.slot_keys
            if inst.binding[key] == unknown]
    if not keys:
        raise UnknownVariable(
            f"variable {unknown!r} does not occur in equation {inst.name}",
            variable=unknown, equation=inst.name)
    slot_key = keys[0]
    occurrences = (count_occurrences(inst.template.lhs, slot_key)
                   + count_occurrences(inst.template.rhs, slot_key))
    positive = slot_key in inst.positive_slots

    if strategy == "isolate" or (strategy == "auto" and occurrences == 1):
        value = _isolate(inst, slot_key, valuation)
    elif strategy in ("numeric", "auto"):
        value = _numeric_root(inst, unknown, valuation, positive,
                              warnings=warnings)
    else:
        raise InvalidValue(f"unknown solve strategy {strategy!r}")

    if positive and value <= 0.0:
        raise NoSolution(
            f"the only candidate for {unknown} from {inst.name} is "
            f"{value}, outside its positive domain",
            variable=unknown, equation=inst.name)
    check = dict(valuation)
    check[unknown] = value
    err = residual(inst, check)
    if err > inst.residual_tolerance:
        value = _newton_polish(inst, unknown, valuation, value)
        check[unknown] = value
        err = residual(inst, check)
    if err > inst.residual_tolerance:
        raise MultipleOccurrenceUnsolved(
            f"solving {inst.name} for {unknown} did not reach the residual "
            f"tolerance (residual {err:.3e})",
            equation=inst.name, variable=unknown, residual=err)
    return value


def _isolate(inst: EquationInstance, slot_key: str,
             valuation: Valuation) -> float:
    if count_occurrences(inst.template.lhs, slot_key) == 1:
        expr, other = inst.template.lhs, inst.template.rhs
    else:
        expr, other = inst.template.rhs, inst.template.lhs
    target = evaluate(other, inst.binding, valuation)

    def known(node: Expr) -> float:
        return evaluate(node, inst.binding, valuation)

    def contains(node: Expr) -> bool:
        return count_occurrences(node, slot_key) > 0

    def fail_ambiguous(node: Expr) -> NoSolution:
        return NoSolution(
            f"isolating {slot_key} in {inst.name} hit a degenerate "
            f"operation at {render(node, inst.binding)}",
            equation=inst.name)

    while True:
        if isinstance(expr, Slot):
            break
        if isinstance(expr, Neg):
            target, expr = -target, expr.argument
        elif isinstance(expr, Ln):
            if target > math.log(1e308):
                raise NoSolution(
                    f"inverting ln while isolating {slot_key} in "
                    f"{inst.name} overflows", equation=inst.name)
            target, expr = math.exp(target), expr.argument
        elif isinstance(expr, Add):
            if contains(expr.left):
                target, expr = target - known(expr.right), expr.left
            else:
                target, expr = target - known(expr.left), expr.right
        elif isinstance(expr, Sub):
            if contains(expr.left):
                target, expr = target + known(expr.right), expr.left
            else:
                target, expr = known(expr.left) - target, expr.right
        elif isinstance(expr, Mul):
            if contains(expr.left):
                factor, child = known(expr.right), expr.left
            else:
                factor, child = known(expr.left), expr.right
            if factor == 0.0:
                raise fail_ambiguous(expr)
            target, expr = target / factor, child
        elif isinstance(expr, Div):
            if contains(expr.left):
                divisor = known(expr.right)
                if divisor == 0.0:
                    raise DomainError("division by zero",
                                      subexpression=render(expr, inst.binding))
                target, expr = target * divisor, expr.left
            else:
                numerator = known(expr.left)
                if target == 0.0:
                    raise fail_ambiguous(expr)
                target, expr = numerator / target, expr.right
        elif isinstance(expr, Pow):
            if contains(expr.base):
                target, expr = _invert_power_base(
                    target, known(expr.exponent), inst, slot_key), expr.base
            else:
                target, expr = _invert_power_exponent(
                    target, known(expr.base), inst, slot_key), expr.exponent
        else:
            raise fail_ambiguous(expr)
    if not math.isfinite(target):
        raise NoSolution(
            f"isolating {slot_key} in {inst.name} produced a non-finite "
            f"value", equation=inst.name)
    return target


def _invert_power_base(target: float, exponent: float,
                       inst: EquationInstance, slot_key: str) -> float:
    if exponent == 0.0:
        raise NoSolution(
            f"isolating {slot_key} in {inst.name}: a power with zero "
            f"exponent cannot be inverted for its base", equation=inst.name)
    if target > 0.0:
        try:
            return target ** (1.0 / exponent)
        except OverflowError:
            return math.inf
    if target == 0.0:
        if exponent < 0.0:
            raise NoSolution(
                f"isolating {slot_key} in {inst.name}: no base gives 0 "
                f"under a negative exponent", equation=inst.name)
        return 0.0
    if exponent == int(exponent) and int(exponent) % 2 == 1:
        return -((-target) ** (1.0 / exponent))
    raise NoSolution(
        f"isolating {slot_key} in {inst.name}: no real base yields the "
        f"negative value {target}", equation=inst.name)


def _invert_power_exponent(target: float, base: float,
                           inst: EquationInstance, slot_key: str) -> float:
    if base <= 0.0 or base == 1.0 or target <= 0.0:
        raise NoSolution(
            f"isolating {slot_key} in {inst.name}: a power with base "
            f"{base} cannot reach {target} for any real exponent",
            equation=inst.name)
    return math.log(target) / math.log(base)


# Candidate grid for bracketing: powers of ten spanning the admissible
# domain, with negative mirror and zero for unrestricted variables.
_GRID_EXPONENTS = range(-12, 17)


def _numeric_root(inst: EquationInstance, unknown: str, valuation: Valuation,
                  positive: bool, *,
                  warnings: list[str] | None = None) -> float:
    def f(v: float) -> float | None:
        trial = dict(valuation)
        trial[unknown] = v
        try:
            lhs = evaluate(inst.template.lhs, inst.binding, trial)
            rhs = evaluate(inst.template.rhs, inst.binding, trial)
        except DomainError:
            return None
        out = lhs - rhs
        return out if not math.isnan(out) else None

    if positive:
        grid = [10.0 ** k for k in _GRID_EXPONENTS]
    else:
        grid = [-(10.0 ** k) for k in reversed(_GRID_EXPONENTS)]
        grid += [0.0] + [10.0 ** k for k in _GRID_EXPONENTS]

    points = [(v, f(v)) for v in grid]
    brackets = []
    previous = None
    for v, fv in points:
        if fv is None:
            previous = None
            continue
        if fv == 0.0:
            brackets.append((v, v))
        elif previous is not None and previous[1] * fv < 0.0:
            brackets.append((previous[0], v))
        previous = (v, fv)
    if not brackets:
        raise NoSolution(
            f"no sign change of {inst.name} found for {unknown} over the "
            f"admissible domain", equation=inst.name, variable=unknown)
    if len(brackets) > 1 and warnings is not None:
        warnings.append(
            f"{inst.name}: multiple candidate roots for {unknown}; "
            f"keeping the first found by the deterministic scan")

    lo, hi = brackets[0]
    if lo == hi:
        return lo
    flo = f(lo)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fmid = f(mid)
        if fmid is None:
            break
        if fmid == 0.0:
            lo = hi = mid
            break
        if flo * fmid < 0.0:
            hi = mid
        else:
            lo, flo = mid, fmid
        if abs(hi - lo) <= 1e-12 * max(abs(lo), abs(hi)):
            break
    root = 0.5 * (lo + hi)
    return _newton_polish(inst, unknown, valuation, root)


def _newton_polish(inst: EquationInstance, unknown: str,
                   valuation: Valuation, start: float) -> float:
    def f(v: float) -> float | None:
        trial = dict(valuation)
        trial[unknown] = v
        try:
            lhs = evaluate(inst.template.lhs, inst.binding, trial)
            rhs = evaluate(inst.template.rhs, inst.binding, trial)
        except DomainError:
            return None
        out = lhs - rhs
        return out if not math.isnan(out) else None

    best = start
    fbest = f(start)
    if fbest is None:
        return start
    current = start
    for _ in range(8):
        fc = f(current)
        if fc is None:
            break
        if abs(fc) < abs(fbest):
            best, fbest = current, fc
        if fc == 0.0:
            break
        step = 1e-7 * max(abs(current), 1e-7)
        f_hi, f_lo = f(current + step), f(current - step)
        if f_hi is None or f_lo is None:
            break
        derivative = (f_hi - f_lo) / (2.0 * step)
        if derivative == 0.0 or not math.isfinite(derivative):
            break
        current = current - fc / derivative
        if not math.isfinite(current):
            break
    return best
