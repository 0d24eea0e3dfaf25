import random

import pytest

from twistdiff.annulus import Endomorphism
from twistdiff.deformation import (
    PlanMismatch,
    basis_change_matrix,
    deform,
    deform_operator,
    deform_order1_closed,
)
from twistdiff.operators import TwistedOperator, op_apply, op_norm
from twistdiff.padic import LogNorm

P = 5
K = 20


def same(a, b):
    n = max(len(a.coeffs), len(b.coeffs))
    return all(a.coeff(k).same_coeffs(b.coeff(k)) for k in range(n))


@pytest.fixture(scope="module")
def tau(F, R):
    return Endomorphism(F(1 + P**3), F(2 * P**2), R)


def test_plan_rows(R, qmul, ident, eta, sigma):
    plan = basis_change_matrix(sigma, sigma, eta, 5)
    assert all(plan.entry(n, m) == (R.one() if m == n else R.zero()) for n in range(6) for m in range(n + 1))
    plan = basis_change_matrix(qmul, ident, eta, 4)
    # ξ^2 = ξ_σ^(2) + (q - 1) x ξ_σ^(1)
    assert plan.entry(2, 2) == R.one()
    assert plan.entry(2, 1) == R.monomial(qmul.q - 1, 1)
    assert plan.entry(1, 1) == R.one() and plan.entry(1, 0).is_zero()


def test_identity_operator_is_unchanged(R, sigma, tau, eta):
    one = TwistedOperator.identity(sigma, eta)
    out = deform(one, tau, K)
    assert same(out, TwistedOperator.identity(tau, eta)) and out.endo is tau


def test_closed_form_over_q_multiplication(R, qmul, ident, eta):
    d = deform_order1_closed(qmul, ident, K, eta)
    u = R.monomial(qmul.q - 1, 1)
    for k in range(1, K + 1):
        assert d.coeff(k) == u ** (k - 1)


def test_closed_form_for_a_shift(R, F, ident, eta):
    shift = Endomorphism(F(1), F(P**2), R)
    d = deform_order1_closed(shift, ident, K, eta)
    for k in range(1, K + 1):
        assert d.coeff(k) == R.const(F(P**2) ** (k - 1))


def test_closed_form_collapses_when_equal(sigma, eta):
    d = deform_order1_closed(sigma, sigma, K, eta)
    assert d.order == 1 and d.tail.is_zero()


@pytest.mark.parametrize("pair", ["qmul", "shift", "both"])
def test_closed_form_matches_triangular_solve(R, F, qmul, ident, sigma, tau, eta, pair):
    src, dst = {
        "qmul": (qmul, ident),
        "shift": (Endomorphism(F(1), F(P**2), R), ident),
        "both": (sigma, tau),
    }[pair]
    solved = deform(TwistedOperator.divided(1, src, eta), dst, K)
    assert same(solved, deform_order1_closed(src, dst, K, eta))


def test_round_trip_and_isometry(R, sigma, tau, eta):
    rng = random.Random(5)
    there = basis_change_matrix(tau, sigma, eta, K)
    back = basis_change_matrix(sigma, tau, eta, K)
    for _ in range(5):
        c = [R.element({rng.randint(-4, 4): rng.randint(1, 40) * P ** rng.randint(0, 2)}) for _ in range(rng.randint(1, 8))]
        phi = TwistedOperator(sigma, eta, c)
        psi = deform_operator(phi, there)
        assert op_norm(psi).log == op_norm(phi).log
        rt = deform_operator(psi, back)
        assert all(rt.coeff(k).same_coeffs(phi.coeff(k)) for k in range(K + 1))
        for n in (-3, 0, 2, 7):
            assert op_apply(phi, R.x(n)).agrees_with(op_apply(psi, R.x(n)))


def test_plan_mismatch(R, sigma, tau, qmul, eta):
    plan = basis_change_matrix(tau, sigma, eta, 4)
    with pytest.raises(PlanMismatch):
        deform_operator(TwistedOperator.divided(1, qmul, eta), plan)
    with pytest.raises(PlanMismatch):
        deform_operator(TwistedOperator.divided(5, sigma, eta), plan)
    with pytest.raises(PlanMismatch):
        basis_change_matrix(tau, sigma, LogNorm(-3), 4)
