from fractions import Fraction
from math import comb, factorial

import pytest

from twistdiff.annulus import Endomorphism
from twistdiff.confluence import (
    ConnectionModule,
    LogDivergent,
    NotConvergentAtOrderK,
    confluence_transform,
    connection_power_matrices,
    h_complex_sample_check,
    log_derivative_form,
    padic_log,
    sigma_act,
    sigma_structure_identity_check,
)
from twistdiff.padic import LogNorm

P = 5
K = 30
LEVEL = LogNorm(Fraction(-11, 10))
ETA_PRIME = LogNorm(Fraction(-6, 5))


def module(R, G):
    G = [[G]] if not isinstance(G, list) else G
    return ConnectionModule(G, Endomorphism.identity(R), LEVEL)


def transform(R, sigma, G):
    return confluence_transform(module(R, G), sigma, K, ETA_PRIME)


def test_power_matrices(R):
    assert all(A[0][0].is_zero() for A in connection_power_matrices(module(R, R.zero()), 5)[1:])
    mats = connection_power_matrices(module(R, R.const(7)), 5)
    assert [A[0][0] for A in mats] == [R.const(7**k) for k in range(6)]
    a = 3
    mats = connection_power_matrices(module(R, R.element({-1: a})), 5)
    falling = 1
    for k, A in enumerate(mats):
        assert A[0][0] == R.monomial(falling, -k)
        falling *= a - k


def test_trivial_connection(R, sigma):
    S = transform(R, sigma, R.zero())
    assert S.matrix[0][0] == R.one() and S.tail.is_zero()
    S2 = transform(R, sigma, [[R.zero(), R.zero()], [R.zero(), R.zero()]])
    assert S2.matrix[0][1].is_zero() and S2.matrix[1][1] == R.one()


def test_exponential_multiplier(R, sigma):
    c = P
    S = transform(R, sigma, R.const(c))
    a, b = Fraction((sigma.q - 1).lift()), Fraction(sigma.h.lift())
    want = {}
    for k in range(K + 1):
        for j in range(k + 1):
            want[j] = want.get(j, 0) + Fraction(c) ** k / factorial(k) * comb(k, j) * a**j * b ** (k - j)
    oracle = R.element({n: R.field(v) for n, v in want.items()})
    assert S.matrix[0][0].agrees_with(oracle, S.tail)
    assert S.certificate.ok and S.tail == LogNorm(Fraction(-124, 5))


def test_power_function_multiplier(R, sigma):
    q, h = sigma.q, sigma.h
    S = transform(R, sigma, R.element({-1: 2}))
    # (q + h/x)^2
    assert S.matrix[0][0].agrees_with(R.element({0: q * q, -1: 2 * q * h, -2: h * h}), S.tail)
    S = transform(R, sigma, R.element({-1: -1}))
    inv = S.matrix[0][0] * R.element({0: q, -1: h})
    assert inv.agrees_with(R.one(), S.tail)


def test_structure_identity_and_semilinearity(R, sigma):
    M = module(R, R.element({-1: 3, 0: P}))
    S = confluence_transform(M, sigma, K, ETA_PRIME)
    samples = [(R.x(), [R.one()]), (R.element({0: 1, 2: 1}), [R.x(-1)])]
    rep = sigma_structure_identity_check(M, S, sigma, samples, K)
    assert rep.identity_ok and rep.semilinear_ok and rep.samples == 2


def test_nilpotent_horizontal_section(R, sigma):
    G = [[R.zero(), R.one()], [R.zero(), R.zero()]]
    S = transform(R, sigma, G)
    u = sigma.sigma_k_x(1) - R.x()
    assert S.matrix[0][1] == u and S.matrix[0][0] == R.one() and S.matrix[1][0].is_zero()
    M = module(R, G)
    v = [R.one(), R.zero()]
    img = sigma_act(S, v)
    assert img[0] == R.one() and img[1].is_zero()
    rep = h_complex_sample_check(M, S, [v])
    assert rep.ok and rep.verdict == "pass" and rep.checked == 1


def test_sample_check_is_vacuous_without_horizontal_samples(R, sigma):
    M = module(R, R.const(P))
    S = confluence_transform(M, sigma, K, ETA_PRIME)
    rep = h_complex_sample_check(M, S, [[R.one()], [R.x()]])
    assert rep.ok and rep.verdict == "vacuous"


def test_non_decaying_connection_is_refused(R, sigma):
    with pytest.raises(NotConvergentAtOrderK):
        transform(R, sigma, R.element({-3: 1}))


def test_q_integers_must_not_vanish(R, F):
    root = Endomorphism(F(-1), F(0), R)
    with pytest.raises(NotConvergentAtOrderK):
        confluence_transform(module(R, R.zero()), root, 4, LEVEL)


def test_padic_log(F):
    q = F(1 + P**2)
    lg = padic_log(q)
    assert lg.valuation() == 2
    # log(q^2) = 2 log(q)
    assert (padic_log(q * q) - 2 * lg).is_zero()
    assert padic_log(F(1)).is_exact_zero()
    with pytest.raises(LogDivergent):
        padic_log(F(2))


def test_log_form_agrees_with_confluence(R, qmul):
    for G in (R.element({-1: 2}), R.const(P), R.monomial(P, 1)):
        M = module(R, G)
        A = confluence_transform(M, qmul, K, ETA_PRIME)
        B = log_derivative_form(M, qmul.q, K, ETA_PRIME)
        assert A.matrix[0][0].agrees_with(B.matrix[0][0], max(A.tail, B.tail))


def test_log_form_on_monomials_multiplies_by_q_power(R, qmul):
    # G = a/x has the solution x^a, so σ_M is multiplication by q^a
    for a in (-2, 1, 4):
        B = log_derivative_form(module(R, R.element({-1: a})), qmul.q, K, ETA_PRIME)
        assert B.matrix[0][0].agrees_with(R.const(qmul.q**a), B.tail)
