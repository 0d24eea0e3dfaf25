"""Divided-power twisted derivatives ∂^[k] on the annulus and what they certify."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .annulus import Endomorphism, LaurentElement, _div_linear, eta_admissible, gauss_norm
from .padic import INF, LogNorm, lmax, padic_norm
from .xi import MONOMIAL, XiPolynomial, xi_to_divided

__all__ = [
    "TaylorExpansion",
    "RadiusCertificate",
    "ConvergenceReport",
    "deriv_monomial",
    "std_apply",
    "taylor_expand",
    "radius_estimate",
    "eta_convergent_check",
    "default_level",
]


def _gbinom(n: int, j: int) -> int:
    """Binomial coefficient for any integer n (falling factorial / j!)."""
    if n >= 0:
        return comb(n, j)
    # (-1)^j C(j - n - 1, j)
    return (-1) ** j * comb(j - n - 1, j)


def deriv_monomial(sigma: Endomorphism, k: int, n: int) -> LaurentElement:
    """∂^[k](x^n) from ∂^[k](x^(n+1)) = σ^k(x) ∂^[k](x^n) + ∂^[k-1](x^n)."""
    table = sigma._cache.setdefault("D", {})
    key = (k, n)
    hit = table.get(key)
    if hit is not None:
        return hit
    ring = sigma.ring
    if k == 0:
        val = ring.x(n)
    elif n >= 0:
        if k > n:
            val = ring.zero()
        else:
            val = sigma.sigma_k_x(k) * deriv_monomial(sigma, k, n - 1) + deriv_monomial(sigma, k - 1, n - 1)
    else:
        qk, hk = sigma.iterate_params(k)
        rhs = deriv_monomial(sigma, k, n + 1) - deriv_monomial(sigma, k - 1, n)
        val = _div_linear(rhs, qk, hk)
    table[key] = val
    return val


def std_apply(k: int, z: LaurentElement, sigma: Endomorphism) -> LaurentElement:
    """∂^[k](z) through the monomial recurrence."""
    ring = z.ring
    if k == 0:
        return z
    out = ring.zero()
    for n, a in z.coeffs.items():
        d = deriv_monomial(sigma, k, n)
        if d.coeffs or not d.tail.is_zero():
            out = out + d.scale(a)
    if not z.tail.is_zero():
        out = out + ring.element({}, z.tail * ring.inner ** (-k))
    return out


def default_level(sigma: Endomorphism) -> LogNorm:
    """The x-radius, or inner/p when the x-radius vanishes."""
    rho = sigma.x_radius()
    fallback = LogNorm(sigma.ring.inner.log - 1)
    return rho if not rho.is_zero() else fallback


@dataclass(frozen=True, eq=False)
class TaylorExpansion:
    base: LaurentElement
    endo: Endomorphism
    order: int
    level: LogNorm
    derivatives: tuple


def taylor_expand(
    z: LaurentElement, sigma: Endomorphism, K: int, level: LogNorm | None = None, depth: int | None = None
) -> TaylorExpansion:
    """Substitute x -> x + ξ, expand in ξ up to ``depth`` and change to the divided basis.

    Negative powers give infinite ξ-series; the dropped part has level-η norm
    at most max |a_n| r1^n (η/r1)^(depth+1), which bounds each derivative by
    that quantity over η^k.
    """
    ring = z.ring
    level = level if level is not None else default_level(sigma)
    if not eta_admissible(sigma, level):
        raise ValueError("level is below the x-radius")
    depth = depth if depth is not None else 2 * K + 2
    F = ring.field
    coeffs = [dict() for _ in range(depth + 1)]
    omitted = LogNorm.zero()
    for n, a in z.coeffs.items():
        top = n if n >= 0 else depth
        for j in range(min(top, depth) + 1):
            b = _gbinom(n, j)
            if b:
                c = coeffs[j]
                term = a * F(b)
                c[n - j] = c[n - j] + term if (n - j) in c else term
        if n < 0:
            ratio = level / ring.inner
            omitted = lmax(omitted, padic_norm(a) * ring.mono_norm(n) * ratio ** (depth + 1))
        elif n > depth:
            ratio = level / ring.r
            omitted = lmax(omitted, padic_norm(a) * ring.mono_norm(n) * ratio ** (depth + 1))
    elems = tuple(ring.element(c) for c in coeffs)
    while len(elems) > 1 and not elems[-1].coeffs and elems[-1].tail.is_zero():
        elems = elems[:-1]
    P = XiPolynomial(elems, MONOMIAL, sigma, level)
    D = xi_to_divided(P, sigma).coeffs
    out = []
    for k in range(K + 1):
        dk = D[k] if k < len(D) else ring.zero()
        extra = omitted
        if not z.tail.is_zero():
            extra = lmax(extra, z.tail)
        if not extra.is_zero():
            dk = dk + ring.element({}, extra / level ** k)
        out.append(dk)
    return TaylorExpansion(z, sigma, K, level, tuple(out))


@dataclass(frozen=True)
class RadiusCertificate:
    """Order-K evidence for liminf ‖∂^[k] z‖^(-1/k).

    ``estimate`` is the minimum of ‖∂^[k] z‖^(-1/k) over the upper half
    ceil(K/2) <= k <= K, a finite stand-in for the liminf, and ``witness``
    the k attaining it (None when every derivative there vanishes, giving
    +infinity).  ``head`` is the minimum over all 1 <= k <= K and ``last``
    the value at the largest k with a nonzero derivative.
    """

    estimate: LogNorm
    witness: int | None
    last: LogNorm
    order: int
    norms: tuple
    head: LogNorm = LogNorm.infinite()

    def __bool__(self):
        return True


def radius_estimate(z: LaurentElement, sigma: Endomorphism, K: int) -> RadiusCertificate:
    norms = []
    best, witness, last, head = LogNorm.infinite(), None, LogNorm.infinite(), LogNorm.infinite()
    start = max(1, -(-K // 2))
    for k in range(1, K + 1):
        d = std_apply(k, z, sigma)
        nk = gauss_norm(d)
        norms.append(nk)
        if nk.is_zero():
            continue
        val = LogNorm(Fraction(-nk.log) / k, nk.bound)
        last = val
        head = min(head, val)
        if k >= start and val < best:
            best, witness = val, k
    return RadiusCertificate(best, witness, last, K, tuple(norms), head)


@dataclass(frozen=True)
class ConvergenceReport:
    """Terms ‖∂^[k] z‖ η^k for k <= K and the verdict at order K."""

    ok: bool
    decays: bool
    decay_from: int | None
    bound_ok: bool
    terms: tuple
    level: LogNorm
    order: int

    def __bool__(self):
        return self.ok


def eta_convergent_check(z: LaurentElement, sigma: Endomorphism, eta: LogNorm, K: int) -> ConvergenceReport:
    if not eta_admissible(sigma, eta):
        raise ValueError("level is below the x-radius")
    ring = z.ring
    zn = gauss_norm(z)
    terms = []
    bound_ok = True
    for k in range(K + 1):
        d = std_apply(k, z, sigma)
        dn = gauss_norm(d)
        if not dn <= zn * ring.inner ** (-k):
            bound_ok = False
        terms.append(dn * eta ** k if not dn.is_zero() else dn)
    # first index after which the terms never increase
    start = K
    while start > 0 and terms[start - 1] >= terms[start]:
        start -= 1
    decays = terms[K].is_zero() or terms[K] < terms[start] or all(t.is_zero() for t in terms[1:])
    return ConvergenceReport(decays and bound_ok, decays, start, bound_ok, tuple(terms), eta, K)
