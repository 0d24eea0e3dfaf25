"""Twisted differential operators Σ z_k ∂^[k] of level η."""

from __future__ import annotations

from dataclasses import dataclass, field

from .annulus import (
    Endomorphism,
    LaurentElement,
    NotAUnit,
    _div_linear,
    _dominant,
    endo_apply,
    eta_admissible,
    gauss_norm,
    linear_combination,
)
from .derivatives import default_level, std_apply
from .padic import LogNorm, lmax, padic_norm, qbinom_table, qfact

__all__ = [
    "TwistedOperator",
    "op_apply",
    "op_compose",
    "op_norm",
    "commute_past",
    "xi_action",
    "weyl_to_divided",
    "weyl_commutation",
    "strong_predicate",
    "strong_map",
    "qbinom_cached",
]


@dataclass(frozen=True, eq=False)
class TwistedOperator:
    """Σ_k coeffs[k] ∂^[k], plus omitted terms of level-η norm at most ``tail``."""

    endo: Endomorphism
    level: LogNorm
    coeffs: tuple
    tail: LogNorm = field(default_factory=LogNorm.zero)
    notes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        if not eta_admissible(self.endo, self.level):
            raise ValueError("operator level is below the x-radius of its endomorphism")

    @classmethod
    def divided(cls, k: int, endo: Endomorphism, level: LogNorm | None = None, coeff=None) -> "TwistedOperator":
        ring = endo.ring
        level = level if level is not None else default_level(endo)
        c = [ring.zero()] * k + [ring.one() if coeff is None else coeff]
        return cls(endo, level, c)

    @classmethod
    def identity(cls, endo: Endomorphism, level: LogNorm | None = None) -> "TwistedOperator":
        return cls.divided(0, endo, level)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> LaurentElement:
        return self.coeffs[k] if k < len(self.coeffs) else self.endo.ring.zero()

    def is_exact(self) -> bool:
        return self.tail.is_zero() and all(c.is_exact() for c in self.coeffs)

    def norm(self, eta: LogNorm | None = None) -> LogNorm:
        return op_norm(self, eta)

    def trimmed(self) -> "TwistedOperator":
        c = list(self.coeffs)
        while len(c) > 1 and not c[-1].coeffs and c[-1].tail.is_zero():
            c.pop()
        return TwistedOperator(self.endo, self.level, c, self.tail, self.notes)

    def __add__(self, other: "TwistedOperator") -> "TwistedOperator":
        _check_same(self, other)
        n = max(len(self.coeffs), len(other.coeffs))
        c = [self.coeff(k) + other.coeff(k) for k in range(n)]
        return TwistedOperator(self.endo, self.level, c, lmax(self.tail, other.tail))

    def __neg__(self):
        return TwistedOperator(self.endo, self.level, [-c for c in self.coeffs], self.tail)

    def __sub__(self, other):
        return self + (-other)

    def agrees_with(self, other: "TwistedOperator", slack: LogNorm | None = None) -> bool:
        """Coefficientwise agreement within the tails, measured in the level-η norm."""
        _check_same(self, other)
        allow = lmax(self.tail, other.tail)
        if slack is not None:
            allow = lmax(allow, slack)
        n = max(len(self.coeffs), len(other.coeffs))
        for k in range(n):
            d = self.coeff(k) - other.coeff(k)
            if not d.agrees_with(d.ring.zero(), allow * self.level ** k if not allow.is_zero() else None):
                return False
        return True

    def __str__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.coeffs or not c.tail.is_zero():
                parts.append(f"[{c}]*d^[{k}]")
        if not self.tail.is_zero():
            parts.append(f"O_eta[{self.tail}]")
        return " + ".join(parts) or "0"


def _check_same(a: TwistedOperator, b: TwistedOperator):
    if not a.endo.same_as(b.endo) or a.level != b.level:
        raise ValueError("operators over different endomorphisms or levels")


def op_norm(phi: TwistedOperator, eta: LogNorm | None = None) -> LogNorm:
    """sup_k ‖z_k‖ / η^k, combined with the truncation tail."""
    eta = phi.level if eta is None else eta
    best = phi.tail
    for k, c in enumerate(phi.coeffs):
        n = gauss_norm(c)
        if not n.is_zero():
            best = lmax(best, n / eta ** k)
    return best


def _tail_factor(phi: TwistedOperator) -> LogNorm:
    """sup over k > order of (η / inner)^k."""
    ratio = phi.level / phi.endo.ring.inner
    if ratio >= LogNorm.one():
        return LogNorm.infinite()
    return ratio ** (phi.order + 1)


def op_apply(phi: TwistedOperator, z: LaurentElement) -> LaurentElement:
    ring = z.ring
    pairs = [(c, std_apply(k, z, phi.endo)) for k, c in enumerate(phi.coeffs) if c.coeffs or not c.tail.is_zero()]
    out = linear_combination(ring, pairs)
    if not phi.tail.is_zero():
        zn = gauss_norm(z)
        if not zn.is_zero():
            out = out + ring.element({}, phi.tail * zn * _tail_factor(phi))
    return out


# --------------------------------------------------------------------------
# commutation ∂^[k] ∘ z
# --------------------------------------------------------------------------


def _commute_monomial(sigma: Endomorphism, k: int, n: int) -> list:
    """Coefficients c_j with ∂^[k] ∘ x^n = Σ c_j ∂^[j]."""
    table = sigma._cache.setdefault("C", {})
    hit = table.get((k, n))
    if hit is not None:
        return hit
    ring = sigma.ring
    if n == 0:
        val = [ring.zero()] * k + [ring.one()]
    elif n > 0:
        # (Σ c_j ∂^[j]) ∘ x = Σ (c_j σ^j(x) + c_{j+1}) ∂^[j]
        c = _commute_monomial(sigma, k, n - 1)
        val = []
        for j in range(len(c)):
            v = c[j] * sigma.sigma_k_x(j)
            if j + 1 < len(c):
                v = v + c[j + 1]
            val.append(v)
    else:
        # L ∘ x^-1 = Σ e_j ∂^[j] with c_j = e_j σ^j(x) + e_{j+1}; solve from the top
        c = _commute_monomial(sigma, k, n + 1)
        val = [None] * len(c)
        nxt = ring.zero()
        for j in range(len(c) - 1, -1, -1):
            qj, hj = sigma.iterate_params(j)
            nxt = _div_linear(c[j] - nxt, qj, hj)
            val[j] = nxt
    table[(k, n)] = val
    return val


def commute_past(k: int, z: LaurentElement, sigma: Endomorphism, K: int | None = None) -> list:
    """Coefficients c_j (j <= k) with ∂^[k] ∘ z = Σ_j c_j ∂^[j].

    ``K`` caps the returned length; the coefficients vanish beyond k anyway.
    """
    ring = z.ring
    out = [ring.zero() for _ in range(k + 1)]
    for n, a in z.coeffs.items():
        for j, c in enumerate(_commute_monomial(sigma, k, n)):
            if c.coeffs or not c.tail.is_zero():
                out[j] = out[j] + c.scale(a)
    if not z.tail.is_zero():
        for j in range(k + 1):
            out[j] = out[j] + ring.element({}, z.tail * ring.inner ** (j - k))
    if K is not None:
        out = out[: K + 1]
    return out


def qbinom_cached(sigma: Endomorphism, n: int, k: int):
    rows = sigma._cache.get("qbinom")
    if rows is None or len(rows) <= n:
        rows = sigma._cache["qbinom"] = qbinom_table(max(n, 2 * len(rows or []), 16), sigma.q)
    return rows[n][k]


def op_compose(phi: TwistedOperator, psi: TwistedOperator, K: int | None = None) -> TwistedOperator:
    """φ ∘ ψ via ∂^[k] ∘ w = Σ c_j ∂^[j] and ∂^[j] ∘ ∂^[l] = C(j+l, l)_q ∂^[j+l]."""
    _check_same(phi, psi)
    sigma = phi.endo
    ring = sigma.ring
    top = phi.order + psi.order
    out = [ring.zero() for _ in range(top + 1)]
    for l, w in enumerate(psi.coeffs):
        if not w.coeffs and w.tail.is_zero():
            continue
        for k, z in enumerate(phi.coeffs):
            if not z.coeffs and z.tail.is_zero():
                continue
            for j, c in enumerate(commute_past(k, w, sigma)):
                if not c.coeffs and c.tail.is_zero():
                    continue
                term = (z * c).scale(qbinom_cached(sigma, j + l, l))
                out[j + l] = out[j + l] + term
    tail = LogNorm.zero()
    if not phi.tail.is_zero() or not psi.tail.is_zero():
        a = TwistedOperator(phi.endo, phi.level, phi.coeffs)
        b = TwistedOperator(psi.endo, psi.level, psi.coeffs)
        na, nb = op_norm(a), op_norm(b)
        tail = lmax(phi.tail * nb, na * psi.tail, phi.tail * psi.tail)
    if K is not None and len(out) > K + 1:
        dropped = LogNorm.zero()
        for k in range(K + 1, len(out)):
            dropped = lmax(dropped, gauss_norm(out[k]) / phi.level ** k)
        out = out[: K + 1]
        tail = lmax(tail, dropped)
    return TwistedOperator(phi.endo, phi.level, out, tail)


def xi_action(phi: TwistedOperator) -> TwistedOperator:
    """ξ · Σ z_k ∂^[k] = Σ (z_{k+1} - z_k (x - σ^k(x))) ∂^[k]."""
    sigma = phi.endo
    c = phi.coeffs
    out = []
    for k in range(len(c)):
        v = -(c[k] * sigma.x_minus_sigma_k(k))
        if k + 1 < len(c):
            v = v + c[k + 1]
        out.append(v)
    tail = phi.tail * phi.level if not phi.tail.is_zero() else phi.tail
    return TwistedOperator(sigma, phi.level, out, tail)


def weyl_to_divided(k: int, sigma: Endomorphism, level: LogNorm | None = None) -> TwistedOperator:
    """The image (k)_q! ∂^[k] of the k-th power of the twisted derivation."""
    f = qfact(k, sigma.q)
    op = TwistedOperator.divided(k, sigma, level, sigma.ring.const(f))
    if not f.is_unit():
        op = TwistedOperator(op.endo, op.level, op.coeffs, op.tail, (f"(k)_q! has valuation {f.valuation()}",))
    return op


def weyl_commutation(z: LaurentElement, sigma: Endomorphism, level: LogNorm | None = None) -> TwistedOperator:
    """∂ ∘ z = ∂(z) + σ(z) ∂."""
    level = level if level is not None else default_level(sigma)
    return TwistedOperator(sigma, level, [std_apply(1, z, sigma), endo_apply(sigma, z)])


def strong_predicate(sigma: Endomorphism) -> bool:
    """Whether x - σ(x) passes the dominant-monomial unit test."""
    d = sigma.x_minus_sigma_k(1)
    if d.is_zero():
        return False
    try:
        _dominant(d)
    except NotAUnit:
        return False
    return True


def strong_map(sigma: Endomorphism, level: LogNorm | None = None) -> TwistedOperator:
    """1 - (x - σ(x)) ∂^[1], which acts on functions as σ."""
    level = level if level is not None else default_level(sigma)
    ring = sigma.ring
    return TwistedOperator(sigma, level, [ring.one(), -sigma.x_minus_sigma_k(1)])
