"""p-adic scalars at fixed working precision, log-scale magnitudes and q-combinatorics.

A :class:`PadicScalar` is either *exact* (an integer held verbatim, so that
cancellation yields a true zero) or *finite*: a value known modulo
``p**prec``.  Finite values keep their valuation exactly; when all known
digits cancel the result is "indistinguishable from zero" and only an upper
bound on its magnitude survives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Union

__all__ = [
    "Qp",
    "PadicScalar",
    "LogNorm",
    "lmax",
    "padic_norm",
    "qint",
    "qfact",
    "qbinom",
    "qbinom_table",
    "qbinom_norm_bound",
    "qints_invertible_upto",
    "QIntReport",
    "PrecisionError",
]

INF = math.inf


class PrecisionError(ArithmeticError):
    """Raised when an operation needs digits the working precision does not hold."""


_POWERS: dict[int, list[int]] = {}


def _pw(p: int, k: int) -> int:
    table = _POWERS.get(p)
    if table is None:
        table = _POWERS[p] = [1]
    while len(table) <= k:
        table.append(table[-1] * p)
    return table[k]


def _split(n: int, p: int) -> tuple[int, int]:
    """Return (v, u) with n = u * p**v and p not dividing u (n != 0)."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def _num(x):
    # keep integral Fractions as ints: int arithmetic is much faster
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


# --------------------------------------------------------------------------
# magnitudes
# --------------------------------------------------------------------------


@total_ordering
@dataclass(frozen=True)
class LogNorm:
    """An ultrametric magnitude ``p**log``.

    ``log`` is an exact rational; ``-inf`` encodes the zero magnitude and
    ``+inf`` an infinite one (used for radii of entire functions).  ``bound``
    marks magnitudes that are only known to be upper bounds.
    """

    log: Union[int, Fraction, float]
    bound: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "log", _num(self.log))

    @classmethod
    def zero(cls) -> "LogNorm":
        return cls(-INF)

    @classmethod
    def one(cls) -> "LogNorm":
        return cls(0)

    @classmethod
    def infinite(cls) -> "LogNorm":
        return cls(INF)

    @classmethod
    def of(cls, log, bound: bool = False) -> "LogNorm":
        if isinstance(log, str):
            log = Fraction(log)
        return cls(log, bound)

    def is_zero(self) -> bool:
        return self.log == -INF

    def is_finite(self) -> bool:
        return -INF < self.log < INF

    def __lt__(self, other):
        if not isinstance(other, LogNorm):
            return NotImplemented
        return self.log < other.log

    def __mul__(self, other):
        if not isinstance(other, LogNorm):
            return NotImplemented
        if {self.log, other.log} == {-INF, INF}:
            raise ValueError("product of zero and infinite magnitudes")
        return LogNorm(self.log + other.log, self.bound or other.bound)

    def __truediv__(self, other):
        if not isinstance(other, LogNorm):
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by the zero magnitude")
        if self.log == other.log and not self.is_finite():
            raise ValueError("ratio of two infinite magnitudes")
        return LogNorm(self.log - other.log, self.bound or other.bound)

    def __pow__(self, k):
        k = Fraction(k)
        if k == 0:
            return LogNorm(0)
        if not self.is_finite():
            if k < 0:
                return LogNorm(-self.log, self.bound)
            return self
        return LogNorm(self.log * k, self.bound)

    def __str__(self):
        if self.log == -INF:
            return "0"
        if self.log == INF:
            return "+infinity"
        mark = "<=" if self.bound else ""
        return f"{mark}p^({self.log})"


def lmax(*norms: LogNorm) -> LogNorm:
    """Maximum of magnitudes; an exact value wins ties against a bound."""
    best = None
    for n in norms:
        if best is None or n.log > best.log or (n.log == best.log and best.bound and not n.bound):
            best = n
    return best if best is not None else LogNorm.zero()


# --------------------------------------------------------------------------
# scalars
# --------------------------------------------------------------------------


class Qp:
    """The field Q_p at working precision N (values known modulo p**N)."""

    __slots__ = ("p", "N", "cap")

    def __init__(self, p: int, N: int):
        if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"{p} is not prime")
        if N < 1:
            raise ValueError("precision must be positive")
        self.p = p
        self.N = N
        # exact integers longer than this are kept to relative precision N
        self.cap = _pw(p, 2 * N).bit_length()

    def __eq__(self, other):
        return isinstance(other, Qp) and (self.p, self.N) == (other.p, other.N)

    def __hash__(self):
        return hash((self.p, self.N))

    def __repr__(self):
        return f"Qp({self.p}, {self.N})"

    def __call__(self, value) -> "PadicScalar":
        if isinstance(value, PadicScalar):
            if value.field != self:
                raise ValueError("scalar belongs to another field")
            return value
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            return self._from_int(value)
        if isinstance(value, Fraction):
            return self._from_fraction(value)
        if isinstance(value, str):
            return self.parse(value)
        raise TypeError(f"cannot build a {self.p}-adic scalar from {type(value).__name__}")

    @property
    def zero(self) -> "PadicScalar":
        return PadicScalar(self, None, 0, None)

    @property
    def one(self) -> "PadicScalar":
        return PadicScalar(self, 0, 1, None)

    def _from_int(self, n: int) -> "PadicScalar":
        if n == 0:
            return self.zero
        v, u = _split(n, self.p)
        return self._exact(v, u)

    def _exact(self, v: int, u: int) -> "PadicScalar":
        if u.bit_length() > self.cap:
            return PadicScalar(self, v, u % _pw(self.p, self.N), v + self.N)
        return PadicScalar(self, v, u, None)

    def _from_fraction(self, x: Fraction) -> "PadicScalar":
        if x.denominator == 1:
            return self._from_int(x.numerator)
        v, u = _split(x.numerator, self.p)
        w, d = _split(x.denominator, self.p)
        if d == 1:
            return self._exact(v - w, u)
        mod = _pw(self.p, self.N)
        unit = u * pow(d, -1, mod) % mod
        return PadicScalar(self, v - w, unit, v - w + self.N)

    def parse(self, text: str) -> "PadicScalar":
        """Parse ``"17"``, ``"-3/4"`` or the canonical ``"u*p^v+O(p^P)"`` form."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty scalar text")
        if s.startswith("O(p^") and s.endswith(")"):
            prec = int(s[4:-1])
            return PadicScalar(self, prec, 0, prec)
        if "+O(p^" in s:
            body, _, rest = s.partition("+O(p^")
            if not rest.endswith(")"):
                raise ValueError(f"malformed scalar {text!r}")
            prec = int(rest[:-1])
            unit_txt, _, v_txt = body.partition("*p^")
            unit, v = int(unit_txt), int(v_txt or 0)
            if unit <= 0 or unit % self.p == 0 or prec <= v or unit >= _pw(self.p, prec - v):
                raise ValueError(f"non-canonical scalar {text!r}")
            return PadicScalar(self, v, unit, prec)
        if "*p^" in s:
            unit_txt, _, v_txt = s.partition("*p^")
            unit, v = int(unit_txt), int(v_txt)
            if unit == 0 or unit % self.p == 0:
                raise ValueError(f"non-canonical scalar {text!r}")
            return PadicScalar(self, v, unit, None)
        try:
            if "/" in s:
                num, den = s.split("/")
                return self._from_fraction(Fraction(int(num), int(den)))
            return self._from_int(int(s))
        except ValueError as exc:
            raise ValueError(f"cannot parse scalar {text!r}: {exc}") from None


class PadicScalar:
    """An element of Q_p.

    ``prec is None`` marks an exact integer multiple of a power of p; otherwise
    the value is known modulo ``p**prec``.  ``unit == 0`` means zero: exactly
    zero when ``prec is None``, indistinguishable from zero otherwise (then
    ``val == prec``).
    """

    __slots__ = ("field", "val", "unit", "prec")

    def __init__(self, field: Qp, val, unit: int, prec):
        self.field = field
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- predicates ---------------------------------------------------------
    @property
    def p(self) -> int:
        return self.field.p

    def is_exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        """True for exact zeros and for values below working precision."""
        return self.unit == 0

    def is_exact_zero(self) -> bool:
        return self.unit == 0 and self.prec is None

    def is_below_precision(self) -> bool:
        return self.unit == 0 and self.prec is not None

    def valuation(self):
        """Exact valuation; for a value below precision, a lower bound."""
        if self.unit == 0 and self.prec is None:
            return INF
        return self.val

    def is_unit(self) -> bool:
        return self.unit != 0 and self.val == 0

    def norm(self) -> LogNorm:
        return padic_norm(self)

    @property
    def rel(self):
        return INF if self.prec is None else self.prec - self.val

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "PadicScalar":
        if isinstance(other, PadicScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        a = self
        F = a.field
        if a.unit == 0 and a.prec is None:
            return b
        if b.unit == 0 and b.prec is None:
            return a
        p = F.p
        m = a.val if a.val < b.val else b.val
        if a.prec is None and b.prec is None:
            s = a.unit * _pw(p, a.val - m) + b.unit * _pw(p, b.val - m)
            if s == 0:
                return F.zero
            k, s = _split(s, p)
            return F._exact(m + k, s)
        if a.prec is None:
            prec = b.prec
        elif b.prec is None:
            prec = a.prec
        else:
            prec = a.prec if a.prec < b.prec else b.prec
        if m >= prec:
            return PadicScalar(F, prec, 0, prec)
        rel = prec - m
        s = 0
        if a.unit and a.val - m < rel:
            s = a.unit * _pw(p, a.val - m)
        if b.unit and b.val - m < rel:
            s += b.unit * _pw(p, b.val - m)
        s %= _pw(p, rel)
        if s == 0:
            return PadicScalar(F, prec, 0, prec)
        k = 0
        while s % p == 0:
            s //= p
            k += 1
        return PadicScalar(F, m + k, s, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.unit == 0:
            return self
        if self.prec is None:
            return PadicScalar(self.field, self.val, -self.unit, None)
        return PadicScalar(self.field, self.val, (-self.unit) % _pw(self.field.p, self.prec - self.val), self.prec)

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self + (-b)

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return b + (-self)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        a = self
        F = a.field
        if (a.unit == 0 and a.prec is None) or (b.unit == 0 and b.prec is None):
            return F.zero
        val = a.val + b.val
        if a.prec is None:
            if b.prec is None:
                return F._exact(val, a.unit * b.unit)
            prec = b.prec + a.val
        elif b.prec is None:
            prec = a.prec + b.val
        else:
            prec = min(a.prec + b.val, b.prec + a.val)
        if a.unit == 0 or b.unit == 0:
            return PadicScalar(F, prec, 0, prec)
        return PadicScalar(F, val, a.unit * b.unit % _pw(F.p, prec - val), prec)

    __rmul__ = __mul__

    def inverse(self) -> "PadicScalar":
        if self.unit == 0:
            raise ZeroDivisionError("inverse of a scalar that is zero at working precision")
        F = self.field
        if self.prec is None:
            if self.unit in (1, -1):
                return PadicScalar(F, -self.val, self.unit, None)
            mod = _pw(F.p, F.N)
            return PadicScalar(F, -self.val, pow(self.unit, -1, mod), F.N - self.val)
        rel = self.prec - self.val
        return PadicScalar(F, -self.val, pow(self.unit, -1, _pw(F.p, rel)), rel - self.val)

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return self * b.inverse()

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return b * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison & display ----------------------------------------------
    def __eq__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return NotImplemented
        return (self - b).unit == 0

    __hash__ = None

    def signed_unit(self) -> int:
        if self.prec is None or self.unit == 0:
            return self.unit
        mod = _pw(self.field.p, self.prec - self.val)
        return self.unit - mod if 2 * self.unit > mod else self.unit

    def lift(self) -> Fraction:
        """A rational representative (balanced unit digits)."""
        if self.unit == 0:
            return Fraction(0)
        return Fraction(self.signed_unit()) * Fraction(self.field.p) ** self.val

    def canonical(self) -> str:
        """Lossless text form, read back by :meth:`Qp.parse`."""
        if self.unit == 0:
            return "0" if self.prec is None else f"O(p^{self.prec})"
        if self.prec is None:
            return str(self.unit) if self.val == 0 else f"{self.unit}*p^{self.val}"
        head = str(self.unit) if self.val == 0 else f"{self.unit}*p^{self.val}"
        return f"{head}+O(p^{self.prec})"

    def __str__(self):
        if self.unit == 0:
            return "0" if self.prec is None else f"O({self.field.p}^{self.prec})"
        value = self.lift()
        text = str(value)
        if self.prec is not None:
            text += f" + O({self.field.p}^{self.prec})"
        return text

    def __repr__(self):
        return f"PadicScalar({self.field.p}, {self.canonical()})"


def _flatten(D: dict, p: int):
    shift = 0
    for a in D.values():
        if a.val is not None and -a.val > shift:
            shift = -a.val
    flat = []
    for n, a in D.items():
        if a.unit == 0 and a.prec is None:
            continue
        flat.append((n, a.unit * _pw(p, a.val + shift) if a.unit else 0, a.val, a.prec))
    return shift, flat


def _settle(F: Qp, v: int, shift: int, prec) -> PadicScalar | None:
    """The scalar v / p**shift known modulo p**prec (exact when prec is None)."""
    p = F.p
    if prec is None:
        if v == 0:
            return None
        k, u = _split(v, p)
        return F._exact(k - shift, u)
    if prec + shift <= 0:
        return PadicScalar(F, prec, 0, prec)
    v %= _pw(p, prec + shift)
    if v == 0:
        return PadicScalar(F, prec, 0, prec)
    k = 0
    while v % p == 0:
        v //= p
        k += 1
    return PadicScalar(F, k - shift, v, prec)


def convolve(F: Qp, A: dict, B: dict) -> dict:
    """Cauchy product of two exponent -> scalar mappings, summing in integers."""
    return convolve_sum(F, [(A, B)])


def convolve_sum(F: Qp, pairs) -> dict:
    """Σ A_i * B_i over (A_i, B_i) pairs of exponent -> scalar mappings."""
    p = F.p
    flats = []
    top = 0
    for A, B in pairs:
        sa, fa = _flatten(A, p)
        sb, fb = _flatten(B, p)
        if fa and fb:
            flats.append((sa + sb, fa, fb))
            top = max(top, sa + sb)
    sums: dict[int, int] = {}
    precs: dict[int, int] = {}
    for shift, fa, fb in flats:
        up = _pw(p, top - shift)
        for n, ia, va, pa in fa:
            if up != 1:
                ia *= up
            for m, ib, vb, pb in fb:
                k = n + m
                sums[k] = sums.get(k, 0) + ia * ib
                if pa is None:
                    if pb is None:
                        continue
                    pr = pb + va
                elif pb is None:
                    pr = pa + vb
                else:
                    pr = pa + vb if pa + vb < pb + va else pb + va
                old = precs.get(k)
                if old is None or pr < old:
                    precs[k] = pr
    out = {}
    for k, v in sums.items():
        z = _settle(F, v, top, precs.get(k))
        if z is not None:
            out[k] = z
    return out


def padic_norm(z: PadicScalar) -> LogNorm:
    """``|z| = p**(-v(z))``; below-precision values give the bound ``p**(-prec)``."""
    if z.unit == 0:
        if z.prec is None:
            return LogNorm.zero()
        return LogNorm(-z.prec, bound=True)
    return LogNorm(-z.val)


# --------------------------------------------------------------------------
# quantum integers, factorials and binomials
# --------------------------------------------------------------------------


def qint(n: int, q: PadicScalar) -> PadicScalar:
    """(n)_q = 1 + q + ... + q**(n-1)."""
    total = q.field.zero
    power = q.field.one
    for _ in range(n):
        total = total + power
        power = power * q
    return total


def qfact(n: int, q: PadicScalar) -> PadicScalar:
    result = q.field.one
    for i in range(1, n + 1):
        result = result * qint(i, q)
    return result


def qbinom_table(nmax: int, q: PadicScalar) -> list[list[PadicScalar]]:
    """Rows 0..nmax of q-binomials, row n holding k = 0..n, via quantum Pascal."""
    F = q.field
    qpow = [F.one]
    for _ in range(nmax):
        qpow.append(qpow[-1] * q)
    rows = [[F.one]]
    for n in range(1, nmax + 1):
        prev = rows[-1]
        row = [F.one]
        for k in range(1, n + 1):
            left = prev[k - 1]
            right = prev[k] if k < n else F.zero
            row.append(left + qpow[k] * right)
        rows.append(row)
    return rows


def qbinom(n: int, k: int, q: PadicScalar) -> PadicScalar:
    if k < 0 or n < 0:
        raise ValueError("q-binomials need nonnegative arguments")
    if k == 0:
        return q.field.one
    if k > n:
        return q.field.zero
    return qbinom_table(n, q)[n][k]


def qbinom_norm_bound(n: int, k: int, qnorm: LogNorm) -> LogNorm:
    """Certified bound ``max(1, |q|**(k(n-1)))`` on the size of a q-binomial."""
    if k == 0 or qnorm.is_zero():
        return LogNorm.one()
    return lmax(LogNorm.one(), qnorm ** (k * (n - 1)))


@dataclass(frozen=True)
class QIntReport:
    """Outcome of scanning (n)_q for 1 <= n <= bound.

    ``ok`` asks for p-adic units; ``all_invertible`` only for nonzero values,
    which is what inverting in the field needs.
    """

    bound: int
    ok: bool
    first_failure: int | None
    all_invertible: bool
    first_zero: int | None
    valuations: tuple

    def __bool__(self):
        return self.ok


def qints_invertible_upto(q: PadicScalar, bound: int) -> QIntReport:
    total = q.field.zero
    power = q.field.one
    first_fail = first_zero = None
    vals = []
    for n in range(1, bound + 1):
        total = total + power
        power = power * q
        vals.append(total.valuation())
        if first_fail is None and not total.is_unit():
            first_fail = n
        if first_zero is None and total.is_zero():
            first_zero = n
    return QIntReport(bound, first_fail is None, first_fail, first_zero is None, first_zero, tuple(vals))
