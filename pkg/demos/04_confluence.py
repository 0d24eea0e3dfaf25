"""From a connection ∂ + G to the q-difference system with the same solutions."""

from fractions import Fraction

from twistdiff import (
    Annulus,
    ConnectionModule,
    Endomorphism,
    LogNorm,
    NotConvergentAtOrderK,
    Qp,
    confluence_transform,
    log_derivative_form,
    sigma_structure_identity_check,
)

p = 5
F = Qp(p, 40)
R = Annulus(F, LogNorm(0), LogNorm(-1))
sigma = Endomorphism(F(1 + p**2), F(p**2), R)
# a level strictly between the x-radius p^-2 and 1 makes the tail bound shrink with K
level, eta_prime = LogNorm(Fraction(-11, 10)), LogNorm(Fraction(-6, 5))
ident = Endomorphism.identity(R)


def connection(G):
    return ConnectionModule([[G]], ident, level)


# G = a/x has the solution x^a; the multiplier is (q + h/x)^a
S = confluence_transform(connection(R.element({-1: 2})), sigma, 30, eta_prime)
print("a = 2:", [str(S.matrix[0][0].coeff(-j)) for j in range(3)], "tail", S.tail)
# for a = -1 the multiplier is an infinite series; times q + h/x it gives 1
S = confluence_transform(connection(R.element({-1: -1})), sigma, 30, eta_prime)
prod = S.matrix[0][0] * R.element({0: sigma.q, -1: sigma.h})
print("a = -1:", prod.agrees_with(R.one(), S.tail), "tail", S.tail)

# G = p has the solution exp(p x); the multiplier is exp(p((q - 1) x + h))
M = connection(R.const(p))
S = confluence_transform(M, sigma, 30, eta_prime)
print("decay terms (log_p):", [str(t.log) for t in S.certificate.terms[:8]], "...")
rep = sigma_structure_identity_check(M, S, sigma, [(R.x(), [R.one()])], 30)
print("S - 1 = (σ(x) - x) D:", rep.identity_ok, " semilinear:", rep.semilinear_ok)

# h = 0: the logarithmic route q^(x∂) gives the same multiplier
qx = Endomorphism(F(1 + p**2), F(0), R)
M = connection(R.element({-1: 3}))
A = confluence_transform(M, qx, 30, eta_prime)
B = log_derivative_form(M, qx.q, 30, eta_prime)
print("q^3 both ways:", A.matrix[0][0].agrees_with(B.matrix[0][0], max(A.tail, B.tail)))

# G = x^-3 grows too fast at the inner radius; the certificate refuses it
try:
    confluence_transform(connection(R.x(-3)), sigma, 30, eta_prime)
except NotConvergentAtOrderK as exc:
    print("refused:", exc)
