"""Polynomials in ξ over the annulus algebra, in the monomial or divided basis.

The divided basis is ξ^(n) = Π_{i<n} (ξ + x - σ^i(x)).  Writing d_i = x - σ^i(x),
the two bases are linked by the bidiagonal rules

    ξ · ξ^(k) = ξ^(k+1) - d_k ξ^(k)        ξ^(k+1) = ξ^(k) · (ξ + d_k)

which both conversions below apply in Horner form.
"""

from __future__ import annotations

from dataclasses import dataclass

from .annulus import Endomorphism, LaurentElement, eta_admissible, gauss_norm
from .padic import LogNorm, lmax

__all__ = ["XiPolynomial", "xi_expand", "xi_to_divided", "xi_to_monomial", "xi_mul"]

MONOMIAL = "monomial"
DIVIDED = "divided"


@dataclass(frozen=True, eq=False)
class XiPolynomial:
    coeffs: tuple
    basis: str
    endo: Endomorphism
    level: LogNorm

    def __post_init__(self):
        if self.basis not in (MONOMIAL, DIVIDED):
            raise ValueError(f"unknown basis {self.basis!r}")
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if self.basis == DIVIDED and not eta_admissible(self.endo, self.level):
            raise ValueError("level is below the x-radius of the endomorphism")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eta_norm(self) -> LogNorm:
        best = LogNorm.zero()
        for n, c in enumerate(self.coeffs):
            best = lmax(best, gauss_norm(c) * self.level ** n)
        return best

    def is_exact(self) -> bool:
        return all(c.is_exact() for c in self.coeffs)

    def agrees_with(self, other: "XiPolynomial") -> bool:
        if self.basis != other.basis:
            raise ValueError("compare polynomials in the same basis")
        ring = self.endo.ring
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [ring.zero()] * (n - len(self.coeffs))
        b = list(other.coeffs) + [ring.zero()] * (n - len(other.coeffs))
        return all(u.agrees_with(v) for u, v in zip(a, b))


def _d(sigma: Endomorphism, k: int) -> LaurentElement:
    return sigma.x_minus_sigma_k(k)


def xi_to_divided(P: XiPolynomial, sigma: Endomorphism | None = None) -> XiPolynomial:
    sigma = sigma or P.endo
    if P.basis == DIVIDED:
        return P
    ring = sigma.ring
    c = P.coeffs
    if not c:
        return XiPolynomial((), DIVIDED, sigma, P.level)
    acc = [c[-1]]
    for n in range(len(c) - 2, -1, -1):
        # acc <- ξ * acc + c[n]
        new = [ring.zero()] * (len(acc) + 1)
        for k, b in enumerate(acc):
            new[k + 1] = new[k + 1] + b
            new[k] = new[k] - _d(sigma, k) * b
        new[0] = new[0] + c[n]
        acc = new
    return XiPolynomial(tuple(acc), DIVIDED, sigma, P.level)


def xi_to_monomial(P: XiPolynomial, sigma: Endomorphism | None = None) -> XiPolynomial:
    sigma = sigma or P.endo
    if P.basis == MONOMIAL:
        return P
    ring = sigma.ring
    c = P.coeffs
    if not c:
        return XiPolynomial((), MONOMIAL, sigma, P.level)
    acc = [c[-1]]
    for k in range(len(c) - 2, -1, -1):
        # acc <- acc * (ξ + d_k) + c[k]
        dk = _d(sigma, k)
        new = [ring.zero()] * (len(acc) + 1)
        for j, b in enumerate(acc):
            new[j + 1] = new[j + 1] + b
            new[j] = new[j] + dk * b
        new[0] = new[0] + c[k]
        acc = new
    return XiPolynomial(tuple(acc), MONOMIAL, sigma, P.level)


def xi_expand(n: int, sigma: Endomorphism, level: LogNorm | None = None) -> XiPolynomial:
    """ξ^(n) written in the monomial basis."""
    ring = sigma.ring
    level = level if level is not None else sigma.x_radius()
    coeffs = [ring.one()]
    for i in range(n):
        di = _d(sigma, i)
        new = [ring.zero()] * (len(coeffs) + 1)
        for j, b in enumerate(coeffs):
            new[j + 1] = new[j + 1] + b
            new[j] = new[j] + di * b
        coeffs = new
    return XiPolynomial(tuple(coeffs), MONOMIAL, sigma, level)


def xi_mul(P: XiPolynomial, Q: XiPolynomial, degree: int | None = None) -> XiPolynomial:
    """Product in the monomial basis, truncated to ``degree`` with the dropped part ignored."""
    if P.basis != MONOMIAL or Q.basis != MONOMIAL:
        raise ValueError("multiply in the monomial basis")
    ring = P.endo.ring
    top = len(P.coeffs) + len(Q.coeffs) - 2
    if degree is not None:
        top = min(top, degree)
    out = [ring.zero() for _ in range(top + 1)]
    for i, a in enumerate(P.coeffs):
        for j, b in enumerate(Q.coeffs):
            if i + j <= top:
                out[i + j] = out[i + j] + a * b
    return XiPolynomial(tuple(out), MONOMIAL, P.endo, P.level)
