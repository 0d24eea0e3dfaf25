import random

import pytest

from twistdiff.annulus import Endomorphism
from twistdiff.operators import (
    TwistedOperator,
    commute_past,
    op_apply,
    op_compose,
    op_norm,
    strong_map,
    strong_predicate,
    weyl_commutation,
    weyl_to_divided,
    xi_action,
)
from twistdiff.annulus import endo_apply
from twistdiff.derivatives import std_apply
from twistdiff.padic import LogNorm, qfact, qint

P = 5


def D(k, endo, eta, coeff=None):
    return TwistedOperator.divided(k, endo, eta, coeff)


def same(a, b):
    n = max(len(a.coeffs), len(b.coeffs))
    return all(a.coeff(k).same_coeffs(b.coeff(k)) for k in range(n))


def test_apply_small_cases(R, qmul, eta):
    z = R.element({3: 2, -1: 1})
    assert op_apply(TwistedOperator.identity(qmul, eta), z) == z
    assert op_apply(D(1, qmul, eta), R.x(2)) == R.monomial(1 + qmul.q, 1)
    assert op_apply(D(1, qmul, eta, R.x()), R.x()) == R.x()


def test_commutation_with_x(R, sigma, qmul):
    c = commute_past(1, R.x(), sigma)
    assert c[0] == R.one() and c[1] == sigma.sigma_k_x(1)
    c = commute_past(2, R.x(), qmul)
    assert c[0].is_zero() and c[1] == R.one() and c[2] == R.monomial(qmul.q**2, 1)
    c = commute_past(3, R.one(), sigma)
    assert [e.is_zero() for e in c] == [True, True, True, False] and c[3] == R.one()


def test_commutation_matches_application(R, sigma, eta):
    z = R.element({-2: 3, 1: 1, 2: P})
    for k in range(4):
        c = commute_past(k, z, sigma)
        lhs = TwistedOperator(sigma, eta, c)
        for n in (-1, 0, 2, 5):
            want = std_apply(k, z * R.x(n), sigma)
            assert op_apply(lhs, R.x(n)).agrees_with(want)


def test_composition_rule(R, qmul, eta):
    d1 = D(1, qmul, eta)
    assert same(op_compose(d1, d1), D(2, qmul, eta, R.const(qint(2, qmul.q))))
    phi = TwistedOperator(qmul, eta, [R.x(), R.const(P)])
    one = TwistedOperator.identity(qmul, eta)
    assert same(op_compose(phi, one), phi) and same(op_compose(one, phi), phi)


def test_composition_acts_as_composition(R, qmul, eta):
    a = D(1, qmul, eta, R.x())
    ab = op_compose(a, a)
    for n in (1, 2, 3, -2):
        assert op_apply(ab, R.x(n)).agrees_with(op_apply(a, op_apply(a, R.x(n))))


def test_associativity_on_random_triples(R, sigma, eta):
    rng = random.Random(3)

    def rand():
        order = rng.randint(0, 4)
        return TwistedOperator(sigma, eta, [R.element({rng.randint(0, 3): rng.randint(1, 30)}) for _ in range(order + 1)])

    for _ in range(8):
        a, b, c = rand(), rand(), rand()
        assert same(op_compose(op_compose(a, b), c), op_compose(a, op_compose(b, c)))
        assert op_norm(op_compose(a, b)) <= op_norm(a) * op_norm(b)


def test_norms(R, sigma, eta):
    assert op_norm(D(3, sigma, eta)) == LogNorm(6)
    assert op_norm(TwistedOperator(sigma, eta, [R.zero()])).is_zero()
    phi = TwistedOperator(sigma, eta, [R.zero(), R.x(), R.const(P)])
    # max(r η^-1, p^-1 η^-2) = max(p^2, p^3)
    assert op_norm(phi) == LogNorm(3)


def test_operator_level_must_be_admissible(sigma):
    with pytest.raises(ValueError):
        D(1, sigma, LogNorm(-3))


def test_xi_action(R, sigma, eta):
    out = xi_action(D(1, sigma, eta))
    assert out.coeff(0) == R.one()
    assert out.coeff(1) == -sigma.x_minus_sigma_k(1)
    ident = Endomorphism.identity(R)
    assert xi_action(TwistedOperator.identity(ident, eta)).coeff(0).is_zero()
    z0, z1 = R.x(2), R.const(7)
    out = xi_action(TwistedOperator(sigma, eta, [z0, z1]))
    assert out.coeff(0) == z1
    assert out.coeff(1) == -(z1 * sigma.x_minus_sigma_k(1))


def test_weyl_images(R, qmul, sigma, eta):
    assert same(weyl_to_divided(0, qmul, eta), TwistedOperator.identity(qmul, eta))
    assert same(weyl_to_divided(1, qmul, eta), D(1, qmul, eta))
    three = weyl_to_divided(3, qmul, eta)
    q = qmul.q
    assert three.coeff(3) == R.const((1 + q) * (1 + q + q * q))
    assert three.coeff(3) == R.const(qfact(3, q))
    w = weyl_commutation(R.x(), sigma, eta)
    assert w.coeff(0) == R.one() and w.coeff(1) == sigma.sigma_k_x(1)
    assert same(weyl_commutation(R.one(), sigma, eta), TwistedOperator(sigma, eta, [R.zero(), R.one()]))
    w = weyl_commutation(R.x(2), qmul, eta)
    assert w.coeff(0) == R.monomial(1 + q, 1) and w.coeff(1) == R.monomial(q * q, 2)


def test_strong_coordinate(R, F, qmul, sigma, eta):
    assert strong_predicate(qmul)
    assert not strong_predicate(Endomorphism.identity(R))
    # (1 - q) x - h ties at the outer radius
    assert not strong_predicate(sigma)
    s = strong_map(qmul, LogNorm(-2))
    for n in (-3, 1, 4):
        assert op_apply(s, R.x(n)).agrees_with(endo_apply(qmul, R.x(n)))
