"""Divided derivatives for σ(x) = q x + h on 1/p <= |x| <= 1, and what K terms say about radii."""

from fractions import Fraction

from twistdiff import Annulus, Endomorphism, LogNorm, Qp, radius_estimate, std_apply, taylor_expand
from twistdiff.annulus import gauss_norm

p = 5
F = Qp(p, 40)
R = Annulus(F, LogNorm(0), LogNorm(-1))
sigma = Endomorphism(F(1 + p**2), F(p**2), R)
eta = LogNorm(-2)
print("x-radius of σ:", sigma.x_radius())

z = R.element({-2: 3, 0: 1, 3: F(Fraction(1, 7))})
print("z =", z)

# the recurrence and the substitution x -> x + ξ followed by a change of basis agree
T = taylor_expand(z, sigma, 6, eta)
for k in range(7):
    d = std_apply(k, z, sigma)
    print(k, gauss_norm(d), d.agrees_with(T.derivatives[k]))

# ‖∂^[k] x^-1‖ = p^(1+k) under the identity, so ‖∂^[k]‖^(-1/k) creeps up to r1
ident = Endomorphism.identity(R)
for K in (4, 10, 30):
    cert = radius_estimate(R.x(-1), ident, K)
    print(f"K = {K:2d}: estimate p^({cert.estimate.log}) at k = {cert.witness}, min over all k p^({cert.head.log})")

# polynomials have finitely many nonzero derivatives
print("x^3 + 2x:", radius_estimate(R.element({3: 1, 1: 2}), ident, 30).estimate)
