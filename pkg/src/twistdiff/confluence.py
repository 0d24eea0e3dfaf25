"""From connections to σ-modules: S = Σ_k (σ(x) - x)^k / k! · A_k.

Matrices act on coordinate columns: ∂(e_j) = Σ_i G[i][j] e_i, so the
coordinates of ∂_M^k(e_j) form column j of A_k with A_{k+1} = ∂(A_k) + G A_k.
A σ-module with multiplier S sends the coordinate vector v to S σ(v).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .annulus import Annulus, Endomorphism, LaurentElement, endo_apply, gauss_norm, linear_combination
from .deformation import deform_order1_closed
from .derivatives import std_apply
from .padic import LogNorm, PadicScalar, lmax, padic_norm, qints_invertible_upto

__all__ = [
    "NotConvergentAtOrderK",
    "PrecisionExhausted",
    "LogDivergent",
    "ConnectionModule",
    "SigmaModule",
    "DecayCertificate",
    "StructureReport",
    "SampleReport",
    "connection_power_matrices",
    "confluence_transform",
    "sigma_act",
    "sigma_structure_identity_check",
    "h_complex_sample_check",
    "log_derivative_form",
    "padic_log",
    "mat_identity",
    "mat_mul",
    "mat_vec",
    "mat_agrees",
]


class NotConvergentAtOrderK(ArithmeticError):
    pass


class PrecisionExhausted(ArithmeticError):
    pass


class LogDivergent(ArithmeticError):
    pass


# small matrix helpers over the annulus -------------------------------------


def mat_identity(ring: Annulus, m: int) -> list:
    return [[ring.one() if i == j else ring.zero() for j in range(m)] for i in range(m)]


def mat_mul(A: list, B: list) -> list:
    ring = A[0][0].ring
    m, n, p = len(A), len(B), len(B[0])
    return [[linear_combination(ring, [(A[i][k], B[k][j]) for k in range(n)]) for j in range(p)] for i in range(m)]


def mat_vec(A: list, v: list) -> list:
    ring = A[0][0].ring
    return [linear_combination(ring, [(A[i][k], v[k]) for k in range(len(v))]) for i in range(len(A))]


def mat_agrees(A: list, B: list, slack: LogNorm | None = None) -> bool:
    return all(a.agrees_with(b, slack) for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def _mat_norm(A: list) -> LogNorm:
    return lmax(*(gauss_norm(a) for row in A for a in row))


# modules --------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConnectionModule:
    """Basis e_1..e_m with ∂(e_j) = Σ_i G[i][j] e_i."""

    matrix: tuple
    endo: Endomorphism
    level: LogNorm
    order: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in self.matrix))
        m = len(self.matrix)
        if m == 0 or any(len(r) != m for r in self.matrix):
            raise ValueError("connection matrix must be square and nonempty")

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def ring(self) -> Annulus:
        return self.endo.ring

    def derivative(self, v: list) -> list:
        """Coordinates of ∂_M(v) = ∂v + G v."""
        Gv = mat_vec([list(r) for r in self.matrix], v)
        return [std_apply(1, vi, self.endo) + g for vi, g in zip(v, Gv)]


@dataclass(frozen=True, eq=False)
class SigmaModule:
    """σ_M(v) = S σ(v); ``tail`` bounds the omitted part of every entry of S."""

    matrix: tuple
    endo: Endomorphism
    tail: LogNorm = field(default_factory=LogNorm.zero)
    certificate: object = None
    order: int | None = None
    eta_prime: LogNorm | None = None

    def __post_init__(self):
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in self.matrix))
        if self.certificate is not None:
            if self.order is None:
                object.__setattr__(self, "order", self.certificate.order)
            if self.eta_prime is None:
                object.__setattr__(self, "eta_prime", self.certificate.eta_prime)

    @property
    def rank(self) -> int:
        return len(self.matrix)


def sigma_act(S: SigmaModule, v: list, K: int = 30) -> list:
    sv = [endo_apply(S.endo, vi, K) for vi in v]
    return mat_vec([list(r) for r in S.matrix], sv)


@dataclass(frozen=True)
class DecayCertificate:
    """t_k = ‖A_k / k!‖ η'^k for k <= K, and the tail C (ρ/η')^(K+1) it implies."""

    ok: bool
    eta_prime: LogNorm
    order: int
    terms: tuple
    bound: LogNorm
    tail: LogNorm

    def __bool__(self):
        return self.ok


def connection_power_matrices(M: ConnectionModule, K: int) -> list:
    """A_0 = Id, A_{k+1} = ∂(A_k) + G A_k, so ∂_M^k(e_j) has coordinates A_k[., j]."""
    if not M.endo.is_identity():
        raise ValueError("power matrices are defined for usual connections")
    ring = M.ring
    G = [list(r) for r in M.matrix]
    A = mat_identity(ring, M.rank)
    out = [A]
    for _ in range(K):
        GA = mat_mul(G, A)
        A = [[std_apply(1, A[i][j], M.endo) + GA[i][j] for j in range(M.rank)] for i in range(M.rank)]
        out.append(A)
    return out


def _scaled_powers(mats: list, F, K: int) -> list:
    """A_k / k!, refusing when k! eats the working precision."""
    out = []
    for k, A in enumerate(mats[: K + 1]):
        f = F(factorial(k))
        if f.valuation() >= F.N:
            raise PrecisionExhausted(f"v({k}!) = {f.valuation()} reaches the precision {F.N}")
        inv = f.inverse()
        out.append([[a.scale(inv) for a in row] for row in A])
    return out


def _decay(scaled: list, eta_prime: LogNorm, rho: LogNorm, K: int) -> DecayCertificate:
    terms = []
    for k, A in enumerate(scaled):
        n = _mat_norm(A)
        terms.append(n * eta_prime ** k if not n.is_zero() else n)
    C = lmax(*terms)
    half = K // 2
    head = lmax(*terms[: half + 1])
    rest = lmax(*terms[half + 1 :]) if K > half else LogNorm.zero()
    ok = rest.is_zero() or rest < head
    last = scaled[-1]
    # A_K = 0 forces every later A_k to vanish
    if rho.is_zero() or all(not a.coeffs and a.tail.is_zero() for row in last for a in row):
        tail = LogNorm.zero()
    else:
        tail = C * (rho / eta_prime) ** (K + 1)
    return DecayCertificate(ok, eta_prime, K, tuple(terms), C, tail)


def _default_eta_prime(level: LogNorm, rho: LogNorm) -> LogNorm:
    if rho.is_zero() or not level > rho:
        return level
    return LogNorm((level.log + rho.log) / 2)


def confluence_transform(
    M: ConnectionModule, sigma: Endomorphism, K: int, eta_prime: LogNorm | None = None
) -> SigmaModule:
    if not sigma.ring == M.ring:
        raise ValueError("endomorphism lives on another annulus")
    F = M.ring.field
    rep = qints_invertible_upto(sigma.q, K)
    if not rep.all_invertible:
        raise NotConvergentAtOrderK(f"(n)_q vanishes at n = {rep.first_zero}")
    rho = sigma.x_radius()
    eta_prime = eta_prime if eta_prime is not None else _default_eta_prime(M.level, rho)
    if not eta_prime <= M.level:
        raise ValueError("eta' must not exceed the module level")
    scaled = _scaled_powers(connection_power_matrices(M, K), F, K)
    cert = _decay(scaled, eta_prime, rho, K)
    if not cert.ok:
        raise NotConvergentAtOrderK(f"‖A_k/k!‖ η'^k does not decay up to order {K}")
    u = sigma.sigma_k_x(1) - M.ring.x()
    upow = [M.ring.one()]
    for _ in range(K):
        upow.append(upow[-1] * u)
    m = M.rank
    S = [
        [linear_combination(M.ring, [(upow[k], scaled[k][i][j]) for k in range(K + 1)]) for j in range(m)]
        for i in range(m)
    ]
    if not cert.tail.is_zero():
        S = [[e + M.ring.element({}, cert.tail) for e in row] for row in S]
    return SigmaModule(S, sigma, cert.tail, cert)


@dataclass(frozen=True)
class StructureReport:
    ok: bool
    identity_ok: bool
    semilinear_ok: bool
    samples: int
    tail: LogNorm

    def __bool__(self):
        return self.ok


def sigma_structure_identity_check(
    M: ConnectionModule, S: SigmaModule, sigma: Endomorphism, samples=(), K: int | None = None
) -> StructureReport:
    """S - Id = (σ(x) - x) D with D = Σ_{k>=1} w_k A_k / k!, w from the deformed ∂_σ.

    Also checks σ_M(z v) = σ(z) σ_M(v) on (z, v) samples.
    """
    K = K if K is not None else (S.order if S.order is not None else 30)
    ring = M.ring
    ident = mat_identity(ring, M.rank)
    rho = sigma.x_radius()
    level = lmax(rho, M.level)
    w = deform_order1_closed(sigma, Endomorphism.identity(ring), K, level).coeffs
    scaled = _scaled_powers(connection_power_matrices(M, K), ring.field, K)
    m = M.rank
    D = [
        [
            linear_combination(ring, [(w[k], scaled[k][i][j]) for k in range(1, min(K, len(w) - 1) + 1)])
            for j in range(m)
        ]
        for i in range(m)
    ]
    u = sigma.sigma_k_x(1) - ring.x()
    lhs = [[S.matrix[i][j] - ident[i][j] for j in range(m)] for i in range(m)]
    rhs = [[u * D[i][j] for j in range(m)] for i in range(m)]
    identity_ok = mat_agrees(lhs, rhs, S.tail if not S.tail.is_zero() else None)
    semi_ok = True
    count = 0
    for z, v in samples:
        count += 1
        left = sigma_act(S, [z * vi for vi in v])
        sz = endo_apply(sigma, z)
        right = [sz * c for c in sigma_act(S, v)]
        if not all(a.agrees_with(b) for a, b in zip(left, right)):
            semi_ok = False
    return StructureReport(identity_ok and semi_ok, identity_ok, semi_ok, count, S.tail)


@dataclass(frozen=True)
class SampleReport:
    ok: bool
    verdict: str
    checked: int
    failures: tuple = ()

    def __bool__(self):
        return self.ok


def h_complex_sample_check(
    M: ConnectionModule,
    S: SigmaModule,
    samples=(),
    fixed_samples=(),
    tolerance: LogNorm | None = None,
) -> SampleReport:
    """H^0 at sample level: horizontal vectors are σ_M-fixed (and back, for strong σ).

    A sample counts as horizontal when ∂_M v has norm at most ``tolerance``;
    its image must then satisfy σ_M(v) = v within the certified tail.
    """
    from .operators import strong_predicate

    tol = tolerance if tolerance is not None else LogNorm(-M.ring.field.N)
    checked, failures = 0, []
    for v in samples:
        dv = M.derivative(v)
        if not all(gauss_norm(c) <= tol or c.is_zero() for c in dv):
            continue
        checked += 1
        img = sigma_act(S, v)
        slack = lmax(tol, S.tail)
        if not all(a.agrees_with(b, slack) for a, b in zip(img, v)):
            failures.append(("horizontal", v))
    if strong_predicate(S.endo):
        for v in fixed_samples:
            img = sigma_act(S, v)
            if not all(a.agrees_with(b, tol) for a, b in zip(img, v)):
                continue
            checked += 1
            dv = M.derivative(v)
            if not all(gauss_norm(c) <= lmax(tol, S.tail) or c.is_zero() for c in dv):
                failures.append(("fixed", v))
    if checked == 0:
        return SampleReport(True, "vacuous", 0)
    return SampleReport(not failures, "pass" if not failures else "fail", checked, tuple(failures))


def padic_log(q: PadicScalar) -> PadicScalar:
    """log q = Σ (-1)^(n+1) (q-1)^n / n for |q - 1| < 1, summed to working precision."""
    F = q.field
    t = q - 1
    if t.is_zero():
        return F.zero
    v = t.valuation()
    if v <= 0:
        raise LogDivergent("|q - 1| must be below 1")
    total = F.zero
    power = F.one
    n = 0
    # terms have valuation >= n v - log_p(n); stop once that passes the precision
    while n * v - _logp(n, F.p) < F.N + v:
        n += 1
        power = power * t
        term = power / F(n)
        total = total + (term if n % 2 else -term)
    return total


def _logp(n: int, p: int) -> int:
    k = 0
    while n >= p:
        n //= p
        k += 1
    return k


def log_derivative_form(M: ConnectionModule, q: PadicScalar, K: int, eta_prime: LogNorm | None = None) -> SigmaModule:
    """σ_M = Σ_k log(q)^k / k! (x ∂_M)^k for σ(x) = q x."""
    ring = M.ring
    F = ring.field
    p = F.p
    t = padic_norm(q - 1)
    if not t < LogNorm(-Fraction(1, p - 1)):
        raise LogDivergent("|q - 1| must be below p^(-1/(p-1))")
    sigma = Endomorphism(q, F.zero, ring)
    rep = qints_invertible_upto(q, K)
    if not rep.all_invertible:
        raise NotConvergentAtOrderK(f"(n)_q vanishes at n = {rep.first_zero}")
    lg = padic_log(q)
    x = ring.x()
    G = [list(r) for r in M.matrix]
    m = M.rank
    B = mat_identity(ring, m)
    mats = [B]
    for _ in range(K):
        GB = mat_mul(G, B)
        B = [[x * (std_apply(1, B[i][j], M.endo) + GB[i][j]) for j in range(m)] for i in range(m)]
        mats.append(B)
    scaled = _scaled_powers(mats, F, K)
    # |x| <= r turns the ∂-level certificate into one for x∂ at η'/r
    rho = sigma.x_radius()
    eta_prime = eta_prime if eta_prime is not None else _default_eta_prime(M.level, rho)
    lam = eta_prime / ring.r
    cert = _decay(scaled, lam, padic_norm(lg), K)
    if not cert.ok:
        raise NotConvergentAtOrderK("log-form terms do not decay up to the requested order")
    lpow = [F.one]
    for _ in range(K):
        lpow.append(lpow[-1] * lg)
    S = [
        [linear_combination(ring, [(ring.const(lpow[k]), scaled[k][i][j]) for k in range(K + 1)]) for j in range(m)]
        for i in range(m)
    ]
    if not cert.tail.is_zero():
        S = [[e + ring.element({}, cert.tail) for e in row] for row in S]
    return SigmaModule(S, sigma, cert.tail, cert)
