"""Backward division, digit expansion, and the number-system decision procedure.

The map V sends g to (g - q*p - a)/X where a is the unique digit congruent
to g(0) modulo p(0) and q = (g(0) - a)/p(0).  Iterating V collects digits
a_0, a_1, ...; the pair (p, N) is a number system exactly when every orbit
reaches 0.  The verifier enumerates the invariant attractor region derived
from the exact recurrence on root-derivative values and walks each orbit
with cycle detection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .polycore import IntPoly, ModulusContext, Residue, parse_poly, reduce


class NotANumberSystemError(ValueError):
    """Digit-set invariants violated, or verification returned verdict no."""


class ExpansionCycleError(RuntimeError):
    """The V-orbit revisited a state: (p, N) is not a number system."""

    def __init__(self, message: str, cycle: list[tuple[int, ...]]):
        super().__init__(message)
        self.cycle = cycle


class ExpansionBudgetError(RuntimeError):
    """Step cap exceeded before reaching 0 (cap too small, or no finite expansion)."""


class VerificationBudgetError(RuntimeError):
    """Candidate enumeration exceeded the configured state budget."""


class NumberSystem:
    """A modulus p together with a digit set N forming a complete residue
    system mod p(0) and containing 0.

    Structural invariants are checked at construction.  Full orbit
    verification runs by default; pass verify=False to bypass explicitly
    (expansion is then attempted on an unverified system at the caller's
    risk, which is exactly what the verifier itself does internally).
    """

    def __init__(
        self,
        p: ModulusContext | IntPoly | str | Sequence[int],
        digits: Iterable[int],
        verify: bool = True,
        search_slack: float = 0.05,
        state_budget: int = 200_000,
    ):
        self.ctx = p if isinstance(p, ModulusContext) else ModulusContext(p)
        self.digits: tuple[int, ...] = tuple(int(a) for a in digits)
        if len(set(self.digits)) != len(self.digits):
            raise NotANumberSystemError("digits must be distinct")
        if 0 not in self.digits:
            raise NotANumberSystemError("digit set must contain 0")
        m = self.ctx.abs_p0
        if m < 1:
            raise NotANumberSystemError("p(0) must be nonzero")
        if len(self.digits) != m:
            raise NotANumberSystemError(
                f"need exactly |p(0)| = {m} digits, got {len(self.digits)}"
            )
        self.digit_by_class: dict[int, int] = {a % m: a for a in self.digits}
        if len(self.digit_by_class) != m:
            raise NotANumberSystemError("digits must form a complete residue system mod p(0)")
        self.max_digit_abs: int = max(abs(a) for a in self.digits)
        self.verified: bool = False
        self.verify_report: Optional[VerifyReport] = None
        if verify:
            report = verify_number_system(
                self.ctx, self.digits, search_slack=search_slack, state_budget=state_budget
            )
            self.verify_report = report
            if report.verdict != "yes":
                raise NotANumberSystemError(
                    f"({self.ctx.p}, {list(self.digits)}) is not a number system: "
                    f"{report.failed_condition or 'nonzero cycle ' + str(report.witness_cycle)}"
                )
            self.verified = True

    def __repr__(self) -> str:
        return f"NumberSystem({self.ctx.p}, {list(self.digits)})"

    def residue(self, g) -> Residue:
        return self.ctx.residue(g)


@dataclass(frozen=True)
class Expansion:
    """Finite digit string a_0..a_ell; empty for 0; a_ell != 0 otherwise."""

    digits: tuple[int, ...]

    @property
    def length(self) -> int:
        # index ell of the leading digit; -1 for the empty expansion of 0
        return len(self.digits) - 1

    def __iter__(self):
        return iter(self.digits)

    def __len__(self) -> int:
        return len(self.digits)


def _v_step(state: tuple[int, ...], ns: NumberSystem) -> tuple[int, tuple[int, ...]]:
    """One backward-division step on a length-n coefficient vector."""
    ctx = ns.ctx
    p = ctx.p.coeffs
    p0 = p[0]
    g0 = state[0]
    a = ns.digit_by_class[g0 % ctx.abs_p0]
    q = (g0 - a) // p0
    n = ctx.n
    if q:
        return a, tuple((state[i + 1] if i + 1 < n else 0) - q * p[i + 1] for i in range(n))
    return a, state[1:] + (0,)


def backward_divide(g: Residue | IntPoly | int, ns: NumberSystem) -> tuple[int, Residue]:
    """Digit a and successor V(g), with g = a + q*p + X*V(g) exact in Z[X]."""
    r = ns.ctx.residue(g) if not isinstance(g, Residue) else g
    a, nxt = _v_step(r.coeff_vector(), ns)
    return a, ns.ctx.residue(nxt)


def default_step_cap(g: Residue, ns: NumberSystem) -> int:
    # generous linear headroom over the length predictor M(g)
    from .spectra import house_and_length

    mg = 0.0
    if not g.is_zero:
        _, mg = house_and_length(g)
    return math.ceil(64 * (ns.ctx.n + max(mg, 0.0) + 16))


def expand(g, ns: NumberSystem, step_cap: Optional[int] = None) -> Expansion:
    """Iterate backward division until 0, collecting digits a_0, a_1, ...

    Raises ExpansionCycleError on a revisited state (proving (p, N) is not
    a number system) and ExpansionBudgetError past step_cap.
    """
    r = ns.ctx.residue(g) if not isinstance(g, Residue) else g
    if step_cap is None:
        step_cap = default_step_cap(r, ns)
    state = r.coeff_vector()
    zero = (0,) * ns.ctx.n
    out: list[int] = []
    seen: dict[tuple[int, ...], int] = {}
    while state != zero:
        if state in seen:
            cycle = _extract_cycle(r, ns, state)
            raise ExpansionCycleError(
                f"V-orbit of {r.rep} cycles through {cycle}; not a number system", cycle
            )
        seen[state] = len(out)
        if len(out) >= step_cap:
            raise ExpansionBudgetError(
                f"no finite expansion of {r.rep} within {step_cap} steps"
            )
        a, state = _v_step(state, ns)
        out.append(a)
    assert not out or out[-1] != 0, "leading digit must be nonzero"
    return Expansion(tuple(out))


def _extract_cycle(g: Residue, ns: NumberSystem, entry: tuple[int, ...]) -> list[tuple[int, ...]]:
    cycle = [entry]
    _, state = _v_step(entry, ns)
    while state != entry:
        cycle.append(state)
        _, state = _v_step(state, ns)
    return cycle


def evaluate(e: Expansion | Sequence[int], ns: NumberSystem) -> Residue:
    """reduce(sum a_h X^h); exact inverse of expand on its image."""
    digits = tuple(e.digits if isinstance(e, Expansion) else e)
    allowed = set(ns.digits)
    for a in digits:
        if a not in allowed:
            raise ValueError(f"digit {a} outside the digit set {sorted(allowed)}")
    ctx = ns.ctx
    acc = ctx.zero
    for a in reversed(digits):
        acc = reduce(acc.rep.shift(1), ctx) + a
    return acc


@dataclass
class VerifyReport:
    """Outcome of the number-system decision procedure."""

    verdict: str  # "yes" | "no" | "inconclusive"
    failed_condition: Optional[str] = None
    witness_cycle: list[tuple[int, ...]] = field(default_factory=list)
    states_explored: int = 0
    necessary_conditions: dict[str, bool] = field(default_factory=dict)
    radii: dict[tuple[int, int], float] = field(default_factory=dict)
    near_slack_boundary: list[tuple[int, ...]] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "failed_condition": self.failed_condition,
            "witness_cycle": [list(v) for v in self.witness_cycle],
            "states_explored": self.states_explored,
        }


def verify_number_system(
    p: ModulusContext | IntPoly | str | Sequence[int],
    digits: Iterable[int],
    search_slack: float = 0.05,
    state_budget: int = 200_000,
) -> VerifyReport:
    """Decide whether (p, N) is a number system.

    Checks the necessary conditions (0 in N, complete residue system mod
    p(0), all |beta| > 1), then enumerates every residue inside the
    (1+search_slack)-enlarged attractor radii R_jk = Nbar*(j-1)!/(|beta_k|-1)^j
    and iterates V on each with cycle detection.  Verdict yes iff every
    orbit reaches 0; any nonzero cycle is returned as a witness.
    """
    ctx = p if isinstance(p, ModulusContext) else ModulusContext(p)
    digits = tuple(int(a) for a in digits)
    report = VerifyReport(verdict="no")
    cond = report.necessary_conditions

    cond["zero_digit"] = 0 in digits and len(set(digits)) == len(digits)
    m = ctx.abs_p0
    cond["digit_count"] = m >= 1 and len(digits) == m
    cond["complete_residues"] = (
        cond["digit_count"] and len({a % m for a in digits}) == m if m >= 1 else False
    )
    eps = 1e-9
    moduli = [abs(b) for b, _ in ctx.roots]
    cond["roots_outside_unit"] = all(r > 1.0 + eps for r in moduli)
    for name in ("zero_digit", "digit_count", "complete_residues", "roots_outside_unit"):
        if not cond[name]:
            report.failed_condition = name
            return report
    for b, _ in ctx.roots:
        if abs(abs(b) - 1.0) <= 10 * eps:
            report.near_slack_boundary.append((0,) * ctx.n)

    ns = NumberSystem(ctx, digits, verify=False)
    nbar = ns.max_digit_abs
    bounds: dict[tuple[int, int], float] = {}
    for j, k in ctx.row_keys:
        beta_abs = abs(ctx.root(k))
        r_jk = nbar * math.factorial(j - 1) / (beta_abs - 1.0) ** j
        report.radii[(j, k)] = r_jk
        bounds[(j, k)] = (1.0 + search_slack) * r_jk

    from .spectra import RegionBudgetError, enumerate_bounded

    zero = (0,) * ctx.n
    terminating: set[tuple[int, ...]] = {zero}
    explored = 0
    try:
        for vec, _band in enumerate_bounded(ctx, bounds, budget=state_budget):
            state = tuple(vec)
            path: list[tuple[int, ...]] = []
            index: dict[tuple[int, ...], int] = {}
            while state not in terminating:
                if state in index:
                    cyc = path[index[state]:]
                    report.witness_cycle = cyc
                    report.states_explored = explored
                    report.verdict = "no"
                    return report
                index[state] = len(path)
                path.append(state)
                explored += 1
                if explored > state_budget:
                    raise VerificationBudgetError(
                        f"inconclusive: budget ({explored} states explored)"
                    )
                _, state = _v_step(state, ns)
            terminating.update(path)
    except RegionBudgetError as exc:
        raise VerificationBudgetError(f"inconclusive: budget ({exc})") from exc
    report.verdict = "yes"
    report.states_explored = explored
    return report


def make_number_system(
    p: Union[str, Sequence[int], IntPoly],
    digits: Iterable[int],
    verify: bool = True,
) -> NumberSystem:
    """Convenience constructor accepting polynomial text or coefficients."""
    poly = parse_poly(p) if isinstance(p, str) else p
    return NumberSystem(poly, digits, verify=verify)
