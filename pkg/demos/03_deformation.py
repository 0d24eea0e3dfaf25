"""Moving an operator between two endomorphisms and back."""

from twistdiff import (
    Annulus,
    Endomorphism,
    LogNorm,
    Qp,
    TwistedOperator,
    basis_change_matrix,
    deform_operator,
    deform_order1_closed,
    op_apply,
    op_norm,
)

p = 5
F = Qp(p, 40)
R = Annulus(F, LogNorm(0), LogNorm(-1))
# a level above both x-radii (p^-2) so that the truncation tail is informative
eta = LogNorm(-1)
sigma = Endomorphism(F(1 + p**2), F(p**2), R)
tau = Endomorphism(F(1 + p**3), F(2 * p**2), R)
ident = Endomorphism.identity(R)
K = 20

# ∂ for σ(x) = q x, written over the identity: coefficients ((q - 1) x)^(k - 1)
qx = Endomorphism(F(1 + p**2), F(0), R)
d = deform_order1_closed(qx, ident, 6, eta)
for k in range(1, 7):
    print(k, d.coeff(k))

# an operator over σ, its image over τ, and the way back
phi = TwistedOperator(sigma, eta, [R.x(-1), R.const(p), R.element({2: 1, 0: 3})])
there = basis_change_matrix(tau, sigma, eta, K)
back = basis_change_matrix(sigma, tau, eta, K)
psi = deform_operator(phi, there)
print("norms over σ and τ:", op_norm(phi), op_norm(psi))
print("order over τ:", psi.order, "tail:", psi.tail)

rt = deform_operator(psi, back)
print("round trip restores coefficients:", all(rt.coeff(k).same_coeffs(phi.coeff(k)) for k in range(K + 1)))

# both act the same way on functions
for n in (-3, 0, 1, 4):
    print(f"x^{n}:", op_apply(phi, R.x(n)).agrees_with(op_apply(psi, R.x(n))))
