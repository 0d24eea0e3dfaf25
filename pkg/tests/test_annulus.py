from fractions import Fraction

import pytest

from twistdiff.annulus import (
    AdmissibilityError,
    Annulus,
    Endomorphism,
    NotAUnit,
    contractivity_check,
    endo_apply,
    endo_iterate,
    endo_validate,
    eta_admissible,
    gauss_norm,
    invert,
    x_radius,
)
from twistdiff.padic import LogNorm, padic_norm

P = 5


def test_gauss_norm_reference_values(R):
    assert gauss_norm(R.x()) == LogNorm(0)
    assert gauss_norm(R.monomial(P, -1)) == LogNorm(0)
    assert gauss_norm(R.zero()).is_zero()
    assert gauss_norm(R.x(-3)) == LogNorm(3)


def test_products(R):
    x = R.x()
    assert (x + 1) * (x - 1) == R.element({2: 1, 0: -1})
    assert ((x + 1) * R.zero()).is_zero()
    f = x + R.monomial(P, -1)
    sq = f * f
    assert sq == R.element({2: 1, 0: 2 * P, -2: P**2})
    assert sq.is_exact() and gauss_norm(sq) == LogNorm(0)


def test_norm_is_multiplicative_per_radius(R):
    f = R.element({1: 1, -1: P})
    g = R.element({-2: 3, 0: P, 3: 1})
    for radius in (R.r, R.r1):
        assert (f * g).norm_at(radius) == f.norm_at(radius) * g.norm_at(radius)


def test_gauss_norm_is_only_submultiplicative_on_an_annulus(R):
    # ‖x‖ ‖x^-1‖ = r / r1 = p while ‖x x^-1‖ = 1
    assert gauss_norm(R.x() * R.x(-1)) < gauss_norm(R.x()) * gauss_norm(R.x(-1))


def test_window_overflow_goes_to_the_tail(R):
    f = R.x(30) * R.x(30)
    assert not f.coeffs and not f.tail.is_zero()
    assert f.tail == LogNorm(0)


def test_disk_rejects_negative_exponents(disk):
    assert disk.window[0] == 0
    with pytest.raises(ValueError):
        Annulus(disk.field, LogNorm(-1), LogNorm(0))


def test_invert_monomial_and_unit(R, F):
    assert invert(R.x(), 10) == R.x(-1)
    c = invert(R.const(1 + P), 10)
    assert c.coeff(0) == F(1) / F(1 + P)


def test_invert_linear_geometric_series(R, F):
    q, h, K = F(1 + P**2), F(P**2), 12
    f = R.element({1: q, 0: h})
    inv = invert(f, K)
    oracle = R.element({-k - 1: (-h) ** k * q ** (-k - 1) for k in range(K + 1)})
    assert inv.same_coeffs(oracle)
    # r1^-1 (|h| / r1)^(K+1)
    assert inv.tail == LogNorm(1 - (K + 1))
    assert (inv * f).agrees_with(R.one())


def test_invert_refuses_non_units(R):
    with pytest.raises(NotAUnit):
        invert(R.element({1: 1, 0: 1}), 5)


def test_endomorphism_admissibility(R, F):
    assert endo_validate(F(1), F(0), R).bijective
    assert endo_validate(F(1 + P**2), F(P**2), R).admissible
    rep = endo_validate(F(P), F(0), R)
    assert rep.admissible and not rep.bijective
    with pytest.raises(AdmissibilityError):
        Endomorphism(F(Fraction(1, P)), F(0), R)


def test_substitution(R, sigma):
    q, h = sigma.q, sigma.h
    img = endo_apply(sigma, R.x(2))
    assert img == R.element({2: q * q, 1: 2 * q * h, 0: h * h})
    f = R.element({3: 7, -2: 1})
    assert endo_apply(Endomorphism.identity(R), f) is f


def test_substitution_of_negative_power(R, sigma):
    img = endo_apply(sigma, R.x(-1), 30)
    q, h = sigma.q, sigma.h
    assert img.coeff(-1) == q.inverse()
    assert img.coeff(-2) == -h * q ** -2
    # r1^-1 (|h| / r1)^(K+1) with K = 30
    assert img.tail == LogNorm(-30)


def test_x_radius(R, F, sigma):
    assert x_radius(Endomorphism.identity(R)).is_zero()
    assert x_radius(sigma) == LogNorm(-2)
    assert x_radius(Endomorphism(F(1), F(P**2), R)) == LogNorm(-2)


def test_eta_admissible(R, sigma):
    assert eta_admissible(Endomorphism.identity(R), LogNorm(-9))
    assert eta_admissible(sigma, LogNorm(-2))
    rep = eta_admissible(sigma, LogNorm(-3))
    assert not rep and rep.q_condition is False and rep.h_condition is False


def test_iterates(R, F, sigma):
    it0 = endo_iterate(sigma, 0)
    assert it0.is_identity()
    it2 = endo_iterate(sigma, 2)
    q, h = sigma.q, sigma.h
    assert it2.q == q * q and it2.h == (1 + q) * h
    shift = endo_iterate(Endomorphism(F(1), F(P**2), R), 3)
    assert shift.q == 1 and shift.h == 3 * P**2


def test_contractivity(R, F, sigma, disk):
    assert contractivity_check(Endomorphism.identity(R))
    rep = contractivity_check(sigma)
    assert rep and rep.checked == 41
    assert contractivity_check(Endomorphism(F(1), F(1), disk))
