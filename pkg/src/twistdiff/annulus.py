"""The annulus algebra K{x/r, r1/x}, its Gauss norm, and endomorphisms x -> qx + h."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .padic import INF, LogNorm, PadicScalar, Qp, convolve, convolve_sum, lmax, padic_norm, qint

__all__ = [
    "Annulus",
    "LaurentElement",
    "NotAUnit",
    "Endomorphism",
    "EndoReport",
    "EtaReport",
    "ContractivityReport",
    "gauss_norm",
    "ring_add",
    "ring_mul",
    "invert",
    "endo_validate",
    "endo_apply",
    "endo_iterate",
    "x_radius",
    "eta_admissible",
    "contractivity_check",
]


class NotAUnit(ArithmeticError):
    """The element has no strictly dominant monomial, so no inverse is certified."""


class AdmissibilityError(ValueError):
    pass


class Annulus:
    """Closed annulus r1 <= |x| <= r, or the disk |x| <= r when ``r1`` is None.

    Elements are stored on the exponent window ``[n_min, n_max]``; anything
    that would land outside is absorbed into the element's tail bound.
    """

    __slots__ = ("field", "r", "r1", "n_min", "n_max", "_mono")

    def __init__(self, field: Qp, r: LogNorm, r1: LogNorm | None, window=(-40, 40)):
        if not r.is_finite() or (r1 is not None and not r1.is_finite()):
            raise ValueError("radii must be finite nonzero magnitudes")
        if r1 is not None and r1 > r:
            raise ValueError("inner radius exceeds outer radius")
        n_min, n_max = window
        if r1 is None:
            n_min = max(n_min, 0)
        if n_min > 0 or n_max < 0:
            raise ValueError("window must contain the exponent 0")
        self.field = field
        self.r = LogNorm(r.log)
        self.r1 = None if r1 is None else LogNorm(r1.log)
        self.n_min = n_min
        self.n_max = n_max
        self._mono: dict[int, LogNorm] = {}

    @property
    def is_disk(self) -> bool:
        return self.r1 is None

    @property
    def inner(self) -> LogNorm:
        """Radius governing negative exponents; r itself on a disk."""
        return self.r if self.r1 is None else self.r1

    @property
    def window(self) -> tuple[int, int]:
        return (self.n_min, self.n_max)

    def key(self):
        return (self.field, self.r.log, None if self.r1 is None else self.r1.log, self.n_min, self.n_max)

    def __eq__(self, other):
        return isinstance(other, Annulus) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        inner = "disk" if self.r1 is None else f"r1=p^{self.r1.log}"
        return f"Annulus(p={self.field.p}, r=p^{self.r.log}, {inner}, window={self.window})"

    def mono_norm(self, n: int) -> LogNorm:
        """Gauss norm of x**n."""
        m = self._mono.get(n)
        if m is None:
            if n < 0 and self.r1 is None:
                raise ValueError("negative exponents do not exist on a disk")
            base = self.r if n >= 0 else self.r1
            m = self._mono[n] = LogNorm(base.log * n)
        return m

    def in_window(self, n: int) -> bool:
        return self.n_min <= n <= self.n_max

    # constructors
    def element(self, coeffs: Mapping[int, object] | None = None, tail: LogNorm | None = None) -> "LaurentElement":
        F = self.field
        c = {}
        extra = LogNorm.zero()
        for n, a in (coeffs or {}).items():
            a = F(a)
            if a.is_exact_zero():
                continue
            if not self.in_window(n):
                if n < 0 and self.r1 is None:
                    raise ValueError("negative exponents do not exist on a disk")
                extra = lmax(extra, padic_norm(a) * self.mono_norm(n))
                continue
            c[n] = a
        t = tail if tail is not None else LogNorm.zero()
        return LaurentElement(self, c, lmax(t, extra) if not extra.is_zero() else t)

    def zero(self) -> "LaurentElement":
        return LaurentElement(self, {}, LogNorm.zero())

    def one(self) -> "LaurentElement":
        return LaurentElement(self, {0: self.field.one}, LogNorm.zero())

    def const(self, a) -> "LaurentElement":
        return self.element({0: a})

    def x(self, n: int = 1) -> "LaurentElement":
        return self.element({n: 1})

    def monomial(self, a, n: int) -> "LaurentElement":
        return self.element({n: a})


class LaurentElement:
    """Σ a_n x^n on the window of ``ring``, plus an omitted part of norm <= ``tail``."""

    __slots__ = ("ring", "coeffs", "tail")

    def __init__(self, ring: Annulus, coeffs: dict, tail: LogNorm):
        self.ring = ring
        self.coeffs = coeffs
        self.tail = tail

    # inspection
    def is_exact(self) -> bool:
        """Exactly represented: nothing was truncated away."""
        return self.tail.is_zero()

    def is_zero(self) -> bool:
        """Nothing distinguishes this element from zero at working precision."""
        return self.tail.is_zero() and all(a.is_zero() for a in self.coeffs.values())

    def coeff(self, n: int) -> PadicScalar:
        return self.coeffs.get(n, self.ring.field.zero)

    def support(self) -> list[int]:
        return sorted(n for n, a in self.coeffs.items() if not a.is_zero())

    def stored_norm(self) -> LogNorm:
        best = LogNorm.zero()
        R = self.ring
        for n, a in self.coeffs.items():
            best = lmax(best, padic_norm(a) * R.mono_norm(n))
        return best

    def norm(self) -> LogNorm:
        return gauss_norm(self)

    def norm_at(self, radius: LogNorm) -> LogNorm:
        """max |a_n| radius^n over stored terms, combined with the tail."""
        best = self.tail
        for n, a in self.coeffs.items():
            best = lmax(best, padic_norm(a) * LogNorm(radius.log * n))
        return best

    def _same(self, other: "LaurentElement"):
        if self.ring is not other.ring and self.ring != other.ring:
            raise ValueError("elements live on different annuli")

    def _lift(self, other) -> "LaurentElement":
        if isinstance(other, LaurentElement):
            self._same(other)
            return other
        if isinstance(other, (int, Fraction, PadicScalar)):
            return self.ring.const(other)
        return NotImplemented

    # arithmetic
    def __add__(self, other):
        g = self._lift(other)
        if g is NotImplemented:
            return NotImplemented
        c = dict(self.coeffs)
        for n, b in g.coeffs.items():
            a = c.get(n)
            s = b if a is None else a + b
            if s.is_exact_zero():
                c.pop(n, None)
            else:
                c[n] = s
        return LaurentElement(self.ring, c, lmax(self.tail, g.tail))

    __radd__ = __add__

    def __neg__(self):
        return LaurentElement(self.ring, {n: -a for n, a in self.coeffs.items()}, self.tail)

    def __sub__(self, other):
        g = self._lift(other)
        if g is NotImplemented:
            return NotImplemented
        return self + (-g)

    def __rsub__(self, other):
        g = self._lift(other)
        if g is NotImplemented:
            return NotImplemented
        return g + (-self)

    def scale(self, a: PadicScalar) -> "LaurentElement":
        a = self.ring.field(a)
        if a.is_exact_zero():
            return self.ring.zero()
        c = {}
        for n, b in self.coeffs.items():
            s = a * b
            if not s.is_exact_zero():
                c[n] = s
        tail = self.tail if self.tail.is_zero() else padic_norm(a) * self.tail
        return LaurentElement(self.ring, c, tail)

    def shift(self, m: int) -> "LaurentElement":
        """Multiply by x**m."""
        return self * self.ring.x(m) if m else self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, PadicScalar)):
            return self.scale(other)
        if not isinstance(other, LaurentElement):
            return NotImplemented
        self._same(other)
        R = self.ring
        lo, hi = R.n_min, R.n_max
        acc = convolve(R.field, self.coeffs, other.coeffs)
        overflow = LogNorm.zero()
        for k in [k for k in acc if not lo <= k <= hi]:
            overflow = lmax(overflow, padic_norm(acc.pop(k)) * R.mono_norm(k))
        # an overflow cancelling exactly would only make the bound looser
        c = acc
        tail = overflow
        if not self.tail.is_zero() or not other.tail.is_zero():
            fs, gs = self.stored_norm(), other.stored_norm()
            tail = lmax(tail, fs * other.tail, self.tail * gs, self.tail * other.tail)
        return LaurentElement(R, c, tail)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("use invert() for negative powers")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # comparison
    def agrees_with(self, other, slack: LogNorm | None = None) -> bool:
        """True when the difference is within the combined tail (and ``slack``).

        Coefficients of the difference that vanish at working precision count
        as agreement.
        """
        d = self - other
        allow = d.tail if slack is None else lmax(d.tail, slack)
        R = self.ring
        for n, a in d.coeffs.items():
            if a.is_zero():
                continue
            if padic_norm(a) * R.mono_norm(n) > allow:
                return False
        return True

    def same_coeffs(self, other) -> bool:
        """Stored coefficients agree at working precision; tails are ignored."""
        d = self - other
        return all(a.is_zero() for a in d.coeffs.values())

    def __eq__(self, other):
        g = self._lift(other)
        if g is NotImplemented:
            return NotImplemented
        if self.tail != g.tail:
            return False
        d = self - g
        return all(a.is_zero() for a in d.coeffs.values())

    __hash__ = None

    def __str__(self):
        if not self.coeffs and self.tail.is_zero():
            return "0"
        parts = []
        for n in sorted(self.coeffs):
            a = self.coeffs[n]
            if n == 0:
                parts.append(f"({a})")
            elif n == 1:
                parts.append(f"({a})*x")
            else:
                parts.append(f"({a})*x^{n}")
        if not self.tail.is_zero():
            parts.append(f"O[{self.tail}]")
        return " + ".join(parts)

    def __repr__(self):
        return f"LaurentElement({self})"


def linear_combination(ring: Annulus, pairs, base: LaurentElement | None = None) -> LaurentElement:
    """base + Σ f_i g_i, accumulated in a single pass."""
    pairs = [(f, g) for f, g in pairs if (f.coeffs or not f.tail.is_zero()) and (g.coeffs or not g.tail.is_zero())]
    if base is not None:
        pairs.append((base, ring.one()))
    if not pairs:
        return ring.zero()
    acc = convolve_sum(ring.field, [(f.coeffs, g.coeffs) for f, g in pairs])
    tail = LogNorm.zero()
    lo, hi = ring.n_min, ring.n_max
    for k in [k for k in acc if not lo <= k <= hi]:
        tail = lmax(tail, padic_norm(acc.pop(k)) * ring.mono_norm(k))
    for f, g in pairs:
        if not f.tail.is_zero() or not g.tail.is_zero():
            fs, gs = f.stored_norm(), g.stored_norm()
            tail = lmax(tail, fs * g.tail, f.tail * gs, f.tail * g.tail)
    return LaurentElement(ring, acc, tail)


def gauss_norm(f: LaurentElement) -> LogNorm:
    """max(|a_n| r^n for n >= 0, |a_n| r1^n for n < 0, tail).

    Flagged as a bound when the tail is nonzero or a coefficient is only
    known to be below precision.
    """
    stored = f.stored_norm()
    bound = not f.tail.is_zero() or any(a.is_zero() for a in f.coeffs.values())
    best = lmax(stored, f.tail)
    return LogNorm(best.log, bound) if bound != best.bound else best


def ring_add(f: LaurentElement, g: LaurentElement) -> LaurentElement:
    return f + g


def ring_mul(f: LaurentElement, g: LaurentElement) -> LaurentElement:
    return f * g


def _dominant(f: LaurentElement) -> int:
    """Index of the strictly dominant monomial at both radii, else NotAUnit."""
    R = f.ring
    radii = [R.r] if R.r1 is None else [R.r, R.r1]
    winner = None
    for rad in radii:
        best_n, best, second = None, LogNorm.zero(), f.tail
        for n, a in f.coeffs.items():
            v = padic_norm(a) * LogNorm(rad.log * n)
            if a.is_zero():
                second = lmax(second, v)
            elif best_n is None or v > best:
                if best_n is not None:
                    second = lmax(second, best)
                best_n, best = n, v
            else:
                second = lmax(second, v)
        if best_n is None or not best > second:
            raise NotAUnit("no strictly dominant monomial")
        if winner is None:
            winner = best_n
        elif winner != best_n:
            raise NotAUnit("dominant monomial differs between the two radii")
    if R.r1 is None and winner != 0:
        raise NotAUnit("on a disk only a dominant constant term gives a unit")
    return winner


def invert(f: LaurentElement, K: int) -> LaurentElement:
    """Geometric-series inverse with K correction terms and a certified tail."""
    R = f.ring
    n0 = _dominant(f)
    a = f.coeffs[n0]
    ainv = a.inverse()
    lead_inv = R.monomial(ainv, -n0)
    u_coeffs = {n - n0: ainv * b for n, b in f.coeffs.items() if n != n0}
    u_tail = f.tail * padic_norm(ainv) * R.mono_norm(-n0) if not f.tail.is_zero() else f.tail
    u = R.element(u_coeffs, u_tail)
    ratio = gauss_norm(u)
    if len(u.coeffs) == 0 and u.tail.is_zero():
        return lead_inv
    s = R.one()
    for _ in range(K):
        s = R.one() - u * s
    omitted = lmax(ratio ** (K + 1), u.tail) if not ratio.is_zero() else u.tail
    res = lead_inv * s
    trunc = padic_norm(ainv) * R.mono_norm(-n0) * omitted
    return LaurentElement(R, res.coeffs, lmax(res.tail, trunc))


def _div_linear(rhs: LaurentElement, a: PadicScalar, b: PadicScalar) -> LaurentElement:
    """Solve (a x + b) D = rhs for D by one-sided back substitution."""
    R = rhs.ring
    na, nb = padic_norm(a), padic_norm(b)
    if R.r1 is not None and not a.is_zero() and na * R.r1 > nb:
        # x dominates: sweep downward
        inv_a = a.inverse()
        lin_inv = padic_norm(inv_a) * LogNorm(-R.r1.log)
        d: dict[int, PadicScalar] = {}
        if not rhs.coeffs:
            return LaurentElement(R, {}, rhs.tail * lin_inv if not rhs.tail.is_zero() else rhs.tail)
        top = max(rhs.coeffs)
        low = min(rhs.coeffs)
        carry = R.field.zero  # b * d_n from the level above
        rem = LogNorm.zero()
        n = top
        while True:
            cur = rhs.coeffs.get(n, R.field.zero) - carry
            if n - 1 < R.n_min:
                rem = padic_norm(cur) * R.mono_norm(n) if not cur.is_exact_zero() else rem
                break
            if n <= low and cur.is_zero():
                if not cur.is_exact_zero():
                    rem = padic_norm(cur) * R.mono_norm(n)
                break
            dn = cur * inv_a
            d[n - 1] = dn
            carry = b * dn
            n -= 1
        tail = lmax(rhs.tail, rem)
        tail = tail * lin_inv if not tail.is_zero() else tail
        return LaurentElement(R, {k: v for k, v in d.items() if not v.is_exact_zero()}, tail)
    if not b.is_zero() and nb > na * R.r:
        inv_b = b.inverse()
        lin_inv = padic_norm(inv_b)
        d = {}
        if not rhs.coeffs:
            return LaurentElement(R, {}, rhs.tail * lin_inv if not rhs.tail.is_zero() else rhs.tail)
        low = min(rhs.coeffs)
        top = max(rhs.coeffs)
        carry = R.field.zero  # a * d_{n-1}
        rem = LogNorm.zero()
        n = low
        while True:
            cur = rhs.coeffs.get(n, R.field.zero) - carry
            if n >= top and cur.is_zero():
                if not cur.is_exact_zero():
                    rem = padic_norm(cur) * R.mono_norm(n)
                break
            if n > R.n_max:
                rem = padic_norm(cur) * R.mono_norm(n) if not cur.is_exact_zero() else rem
                break
            dn = cur * inv_b
            d[n] = dn
            carry = a * dn
            n += 1
        tail = lmax(rhs.tail, rem)
        tail = tail * lin_inv if not tail.is_zero() else tail
        return LaurentElement(R, {k: v for k, v in d.items() if not v.is_exact_zero()}, tail)
    raise NotAUnit("a*x + b has no strictly dominant term")


# --------------------------------------------------------------------------
# endomorphisms
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EndoReport:
    admissible: bool
    bijective: bool
    violations: tuple[str, ...]

    def __bool__(self):
        return self.admissible


def endo_validate(q: PadicScalar, h: PadicScalar, ring: Annulus) -> EndoReport:
    nq, nh = padic_norm(q), padic_norm(h)
    bad = []
    if not nq <= LogNorm.one():
        bad.append("|q| <= 1 fails")
    if not nh <= ring.r:
        bad.append("|h| <= r fails")
    if ring.r1 is not None and not (nq >= ring.r1 / ring.r or nh >= ring.r1):
        bad.append("|q| >= r1/r or |h| >= r1 fails")
    bijective = not q.is_zero() and nq == LogNorm.one()
    return EndoReport(not bad, bijective and not bad, tuple(bad))


@dataclass(frozen=True, eq=False)
class Endomorphism:
    """x -> q x + h on ``ring``; construction refuses inadmissible pairs."""

    q: PadicScalar
    h: PadicScalar
    ring: Annulus
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        F = self.ring.field
        object.__setattr__(self, "q", F(self.q))
        object.__setattr__(self, "h", F(self.h))
        rep = endo_validate(self.q, self.h, self.ring)
        if not rep.admissible:
            raise AdmissibilityError("; ".join(rep.violations))

    @classmethod
    def identity(cls, ring: Annulus) -> "Endomorphism":
        return cls(ring.field.one, ring.field.zero, ring)

    @property
    def field(self) -> Qp:
        return self.ring.field

    def is_identity(self) -> bool:
        return (self.q - 1).is_zero() and self.h.is_zero()

    def same_as(self, other: "Endomorphism") -> bool:
        return self.ring == other.ring and self.q == other.q and self.h == other.h

    def x_radius(self) -> LogNorm:
        rho = self._cache.get("rho")
        if rho is None:
            rho = self._cache["rho"] = lmax(padic_norm(1 - self.q) * self.ring.r, padic_norm(self.h))
        return rho

    def iterate_params(self, k: int) -> tuple[PadicScalar, PadicScalar]:
        """(q^k, (k)_q h), so that sigma^k(x) = q^k x + (k)_q h."""
        table = self._cache.setdefault("iter", [(self.field.one, self.field.zero)])
        while len(table) <= k:
            qk, hk = table[-1]
            table.append((qk * self.q, qk * self.h + hk))
        return table[k]

    def sigma_k_x(self, k: int) -> LaurentElement:
        table = self._cache.setdefault("skx", {})
        e = table.get(k)
        if e is None:
            qk, hk = self.iterate_params(k)
            e = table[k] = self.ring.element({1: qk, 0: hk})
        return e

    def x_minus_sigma_k(self, k: int) -> LaurentElement:
        table = self._cache.setdefault("dk", {})
        e = table.get(k)
        if e is None:
            e = table[k] = self.ring.x() - self.sigma_k_x(k)
        return e

    def sigma_x_power(self, n: int, K: int) -> LaurentElement:
        """sigma(x)**n, with negative n through invert(sigma(x), K)."""
        if n >= 0:
            pos = self._cache.setdefault("pos", [self.ring.one()])
            while len(pos) <= n:
                pos.append(pos[-1] * self.sigma_k_x(1))
            return pos[n]
        negs = self._cache.setdefault(("neg", K), [self.ring.one()])
        if len(negs) == 1:
            negs.append(invert(self.sigma_k_x(1), K))
        while len(negs) <= -n:
            negs.append(negs[-1] * negs[1])
        return negs[-n]

    def __repr__(self):
        return f"Endomorphism(q={self.q}, h={self.h})"


def x_radius(sigma: Endomorphism) -> LogNorm:
    return sigma.x_radius()


def endo_iterate(sigma: Endomorphism, n: int) -> Endomorphism:
    qn, hn = sigma.iterate_params(n)
    it = Endomorphism(qn, hn, sigma.ring)
    it.x_radius()
    return it


def endo_apply(sigma: Endomorphism, f: LaurentElement, K: int = 30) -> LaurentElement:
    """Substitute q x + h for x; sigma is contractive so the tail carries over."""
    R = f.ring
    if sigma.is_identity():
        return f
    out = R.element({}, f.tail)
    for n, a in sorted(f.coeffs.items()):
        out = out + sigma.sigma_x_power(n, K).scale(a)
    return out


@dataclass(frozen=True)
class EtaReport:
    ok: bool
    q_condition: bool
    h_condition: bool
    rho: LogNorm
    eta: LogNorm

    def __bool__(self):
        return self.ok


def eta_admissible(sigma: Endomorphism, eta: LogNorm) -> EtaReport:
    rho = sigma.x_radius()
    cq = padic_norm(1 - sigma.q) <= eta / sigma.ring.r
    ch = padic_norm(sigma.h) <= eta
    return EtaReport(eta >= rho, cq, ch, rho, eta)


@dataclass(frozen=True)
class ContractivityReport:
    ok: bool
    checked: int
    witness: object = None

    def __bool__(self):
        return self.ok


def contractivity_check(
    sigma: Endomorphism, samples: Iterable[LaurentElement] = (), span: int = 20, K: int = 30
) -> ContractivityReport:
    R = sigma.ring
    lo = 0 if R.is_disk else max(-span, R.n_min)
    hi = min(span, R.n_max)
    tests = [R.x(n) for n in range(lo, hi + 1)] + list(samples)
    for f in tests:
        img = endo_apply(sigma, f, K)
        if not img.stored_norm() <= gauss_norm(f):
            return ContractivityReport(False, len(tests), f)
    return ContractivityReport(True, len(tests))
