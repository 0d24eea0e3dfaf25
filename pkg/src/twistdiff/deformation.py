"""Moving operators between endomorphisms that share a level η.

Both ∂_σ^[•] and ∂_τ^[•] are dual bases of the same disk algebra A{ξ/η}; an
operator is a continuous linear form on it, so changing endomorphism only
means re-expressing that form in the other dual basis.
"""

from __future__ import annotations

from dataclasses import dataclass

from .annulus import Endomorphism, eta_admissible, gauss_norm, linear_combination
from .operators import TwistedOperator, op_norm
from .padic import LogNorm, lmax

__all__ = [
    "PlanMismatch",
    "DeformationPlan",
    "basis_change_matrix",
    "deform_operator",
    "deform",
    "deform_order1_closed",
]


class PlanMismatch(ValueError):
    """The plan was built for another endomorphism or level."""


@dataclass(frozen=True, eq=False)
class DeformationPlan:
    """rows[n][m]: coefficient of ξ_target^(m) in ξ_source^(n), for m <= n <= order."""

    source: Endomorphism
    target: Endomorphism
    level: LogNorm
    order: int
    rows: tuple

    def entry(self, n: int, m: int):
        row = self.rows[n]
        return row[m] if m < len(row) else self.source.ring.zero()


def basis_change_matrix(sigma: Endomorphism, tau: Endomorphism, eta: LogNorm, K: int) -> DeformationPlan:
    """Express ξ_τ^(n) in the ξ_σ^(m) basis for n <= K.

    From ξ_τ^(n+1) = ξ_τ^(n) (ξ + x - τ^n(x)) and ξ ξ_σ^(m) = ξ_σ^(m+1) - (x - σ^m(x)) ξ_σ^(m):
        row_{n+1}[m] = row_n[m-1] + (σ^m(x) - τ^n(x)) row_n[m].
    """
    if not sigma.ring == tau.ring:
        raise PlanMismatch("endomorphisms live on different annuli")
    for e in (sigma, tau):
        if not eta_admissible(e, eta):
            raise PlanMismatch("level is below an x-radius")
    ring = sigma.ring
    rows = [[ring.one()]]
    same = sigma.same_as(tau)
    for n in range(K):
        prev = rows[-1]
        row = [ring.zero()] * (n + 2)
        for m in range(n + 1):
            row[m + 1] = row[m + 1] + prev[m]
            if not same:
                diff = sigma.sigma_k_x(m) - tau.sigma_k_x(n)
                row[m] = row[m] + diff * prev[m]
        rows.append(row)
    return DeformationPlan(tau, sigma, eta, K, tuple(tuple(r) for r in rows))


def deform_operator(phi: TwistedOperator, plan: DeformationPlan) -> TwistedOperator:
    """Rewrite an operator over ``plan.source`` as one over ``plan.target``.

    With C = plan rows, the coefficients satisfy z_n = Σ_m C[n][m] w_m, a
    unit-triangular system solved by forward substitution up to the plan order.
    """
    if not phi.endo.same_as(plan.source):
        raise PlanMismatch("operator endomorphism differs from the plan source")
    if phi.level != plan.level:
        raise PlanMismatch("operator level differs from the plan level")
    K = plan.order
    if phi.order > K:
        raise PlanMismatch("operator order exceeds the plan order")
    ring = plan.target.ring
    w = []
    for n in range(K + 1):
        row = plan.rows[n]
        w.append(linear_combination(ring, [(-row[m], w[m]) for m in range(n)], phi.coeff(n)))
    # beyond K: |w_n| <= ‖φ‖ η^d ρ'^(n-d) with ρ' the larger x-radius
    eta = plan.level
    rho = lmax(plan.source.x_radius(), plan.target.x_radius())
    exact = TwistedOperator(phi.endo, eta, phi.coeffs)
    nphi = op_norm(exact)
    tail = phi.tail
    if not nphi.is_zero() and not plan.source.same_as(plan.target):
        ratio = rho / eta
        tail = lmax(tail, nphi * ratio ** (K + 1 - phi.order))
    while len(w) > 1 and not w[-1].coeffs and w[-1].tail.is_zero():
        w.pop()
    return TwistedOperator(plan.target, eta, w, tail)


def deform(phi: TwistedOperator, target: Endomorphism, K: int) -> TwistedOperator:
    return deform_operator(phi, basis_change_matrix(target, phi.endo, phi.level, K))


def deform_order1_closed(sigma: Endomorphism, tau: Endomorphism, K: int, level: LogNorm | None = None) -> TwistedOperator:
    """∂_σ written over τ: Σ_{k>=1} Π_{i=1}^{k-1} (σ(x) - τ^i(x)) ∂_τ^[k], truncated at K."""
    ring = tau.ring
    rho = lmax(sigma.x_radius(), tau.x_radius())
    eta = level if level is not None else rho
    for e in (sigma, tau):
        if not eta_admissible(e, eta):
            raise PlanMismatch("level is below an x-radius")
    coeffs = [ring.zero(), ring.one()]
    prod = ring.one()
    sx = sigma.sigma_k_x(1)
    for k in range(2, K + 1):
        if prod.coeffs or not prod.tail.is_zero():
            prod = prod * (sx - tau.sigma_k_x(k - 1))
        coeffs.append(prod)
    while len(coeffs) > 2 and not coeffs[-1].coeffs and coeffs[-1].tail.is_zero():
        coeffs.pop()
    tail = LogNorm.zero()
    if not sigma.same_as(tau) and not rho.is_zero():
        # ‖Π‖ / η^k <= ρ'^(k-1) / η^k for k > K
        tail = rho ** K / eta ** (K + 1)
    return TwistedOperator(tau, eta, coeffs, tail)
