"""Backward division, digit expansions, and the number-system verifier."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polynum import (
    ExpansionBudgetError,
    ExpansionCycleError,
    NotANumberSystemError,
    NumberSystem,
    VerificationBudgetError,
    backward_divide,
    evaluate,
    expand,
    make_number_system,
    verify_number_system,
)

# verdicts for the standard battery; the two "no" systems have short
# nonzero V-cycles that the report must expose as witnesses
SUITE = [
    ("2,1", (0, 1), "yes"),
    ("3,1", (0, 1, 2), "yes"),
    ("4,1", (0, 1, 2, 3), "yes"),
    ("5,1", (0, 1, 2, 3, 4), "yes"),
    ("6,1", (0, 1, 2, 3, 4, 5), "yes"),
    ("-2,1", (0, 1), "no"),
    ("2,2,1", (0, 1), "yes"),
    ("2,-2,1", (0, 1), "no"),
    ("5,4,1", (0, 1, 2, 3, 4), "yes"),
]


# ---------------------------------------------------------------- V-map


def test_backward_divide_zero(twin):
    a, v = backward_divide(0, twin)
    assert a == 0
    assert v.coeff_vector() == (0, 0)


def test_backward_divide_minus_one(twin):
    # -1 = 1 + (-1)(X^2+2X+2) + X*(X+2)
    a, v = backward_divide(-1, twin)
    assert a == 1
    assert v.coeff_vector() == (2, 1)


def test_backward_divide_seven_base_minus_two(b2):
    # 7 = 1 + 3(X+2) + X*(-3)
    a, v = backward_divide(7, b2)
    assert a == 1
    assert v.coeff_vector() == (-3,)


@given(st.lists(st.integers(-30, 30), min_size=2, max_size=2))
def test_backward_divide_identity(twin, coeffs):
    g = twin.ctx.residue(coeffs)
    a, v = backward_divide(g, twin)
    assert a in twin.digits
    assert twin.ctx.residue(a) + twin.ctx.x * v == g


# ---------------------------------------------------------------- expansion


def test_expand_minus_one(twin):
    e = expand(-1, twin)
    assert e.digits == (1, 0, 1, 1, 1)
    assert e.length == 4  # index of the leading nonzero digit


def test_expand_six_base_minus_two(b2):
    assert expand(6, b2).digits == (0, 1, 0, 1, 1)


def test_expand_length_example(b2):
    e = expand(64, b2)
    assert e.digits == (0, 0, 0, 0, 0, 0, 1)
    assert e.length == 6


def test_expand_zero_is_empty(twin):
    assert expand(0, twin).digits == ()
    assert expand(0, twin).length == -1


def test_evaluate_inverts_expand(twin, b2):
    for ns in (twin, b2):
        for k in range(-25, 26):
            g = ns.ctx.residue(k)
            assert evaluate(expand(g, ns).digits, ns) == g


def test_expansions_are_injective_on_a_box(twin):
    seen = {}
    for a, b in itertools.product(range(-12, 13), repeat=2):
        digits = expand(twin.ctx.residue([a, b]), twin).digits
        assert digits not in seen, (seen[digits], (a, b))
        seen[digits] = (a, b)


def test_last_digit_is_nonzero(twin):
    for a, b in itertools.product(range(-8, 9), repeat=2):
        digits = expand(twin.ctx.residue([a, b]), twin).digits
        if digits:
            assert digits[-1] != 0


def test_expand_step_cap(twin):
    with pytest.raises(ExpansionBudgetError):
        expand(-1, twin, step_cap=2)


def test_expand_detects_cycles():
    ns = make_number_system("-2,1", [0, 1], verify=False)
    with pytest.raises(ExpansionCycleError) as exc:
        expand(-1, ns)
    assert exc.value.cycle == [(-1,)]


# ---------------------------------------------------------------- verifier


@pytest.mark.parametrize("poly,digits,want", SUITE)
def test_verifier_battery(poly, digits, want):
    rep = verify_number_system(poly, digits)
    assert rep.verdict == want


def test_verifier_witness_cycles():
    assert verify_number_system("-2,1", [0, 1]).witness_cycle == [(-1,)]
    assert verify_number_system("2,-2,1", [0, 1]).witness_cycle == [(-1, 1)]


def test_verifier_report_shape(twin):
    rep = verify_number_system("2,2,1", [0, 1])
    assert rep.verdict == "yes"
    assert rep.failed_condition is None
    assert rep.necessary_conditions == {
        "zero_digit": True,
        "digit_count": True,
        "complete_residues": True,
        "roots_outside_unit": True,
    }
    assert set(rep.radii) == {(1, 1), (1, 2)}
    assert rep.states_explored > 0
    d = rep.to_json_dict()
    assert d["verdict"] == "yes"


def test_verifier_rejects_bad_digit_sets():
    # no zero digit / wrong cardinality / incomplete residues
    assert verify_number_system("2,2,1", [1, 2]).verdict == "no"
    assert verify_number_system("2,2,1", [0]).verdict == "no"
    assert verify_number_system("4,1", [0, 1, 2, 6]).verdict == "no"


def test_verifier_budget_is_inconclusive():
    with pytest.raises(VerificationBudgetError) as exc:
        verify_number_system("5,4,1", [0, 1, 2, 3, 4], state_budget=3)
    assert str(exc.value).startswith("inconclusive: budget")


def test_make_number_system_verifies_by_default():
    with pytest.raises(NotANumberSystemError):
        make_number_system("-2,1", [0, 1])
    ns = make_number_system("2,2,1", [0, 1])
    assert ns.verified
    assert ns.verify_report.verdict == "yes"


def test_expansion_terminates_on_box_for_yes_systems():
    # brute-force termination check on a small box for every "yes" verdict
    for poly, digits, want in SUITE:
        if want != "yes":
            continue
        ns = make_number_system(poly, digits, verify=False)
        n = ns.ctx.n
        for coeffs in itertools.product(range(-6, 7), repeat=n):
            e = expand(ns.ctx.residue(list(coeffs)), ns)
            assert evaluate(e.digits, ns) == ns.ctx.residue(list(coeffs))
