"""Seeded verification suites, one per acceptance criterion.

Each check compares the library against an oracle computed another way
(integer polynomial algebra, rational arithmetic, substitution, or a second
algorithm) and returns a :class:`CheckResult`.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from .annulus import Annulus, Endomorphism, LaurentElement, endo_iterate, eta_admissible, gauss_norm
from .confluence import (
    ConnectionModule,
    NotConvergentAtOrderK,
    confluence_transform,
    connection_power_matrices,
    log_derivative_form,
    sigma_structure_identity_check,
)
from .config import Config
from .deformation import basis_change_matrix, deform_operator, deform_order1_closed
from .derivatives import std_apply, taylor_expand
from .operators import TwistedOperator, op_apply, op_compose, op_norm
from .padic import LogNorm, Qp, lmax, padic_norm, qbinom, qbinom_norm_bound, qbinom_table
from .serialize import (
    dump_connection,
    dump_operator,
    dump_series,
    dump_sigma,
    dump_xi,
    load_connection,
    load_operator,
    load_series,
    load_sigma,
    load_xi,
    to_json,
)
from .xi import DIVIDED, MONOMIAL, XiPolynomial, xi_to_divided, xi_to_monomial

__all__ = ["CheckResult", "Setting", "SUITES", "CRITERIA", "run_suite", "summary_json"]


@dataclass
class CheckResult:
    number: int
    name: str
    ok: bool
    cases: int
    detail: str = ""
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.ok else "FAIL"
        return f"[{mark}] criterion {self.number:2d} {self.name}: {self.cases} cases{'; ' + self.detail if self.detail else ''}"


class Setting:
    """Objects shared by the checks: field, annulus, reference σ and level."""

    def __init__(self, cfg: Config | None = None):
        self.cfg = cfg or Config()
        self.F: Qp = self.cfg.field
        self.p = self.F.p
        self.R: Annulus = self.cfg.annulus(self.F)
        self.K = self.cfg.K
        self.eta = self.cfg.eta
        self.sigma = self.cfg.default_endo(self.R)
        self.q = self.sigma.q
        self.h = self.sigma.h
        # confluence needs a level strictly above the x-radius so that the
        # tail factor (ρ/η')^(K+1) actually shrinks
        self.conf_level = LogNorm(Fraction(-11, 10))
        self.conf_eta_prime = self.cfg.eta_prime or LogNorm(Fraction(-6, 5))

    def rng(self, salt: int) -> random.Random:
        return random.Random(self.cfg.seed * 1000 + salt)

    def unit(self, rng) -> int:
        while True:
            u = rng.randint(-(self.p**3), self.p**3)
            if u % self.p:
                return u

    def element(self, rng, lo: int, hi: int, terms: int, vmax: int = 3) -> LaurentElement:
        c = {}
        for _ in range(terms):
            c[rng.randint(lo, hi)] = self.unit(rng) * self.p ** rng.randint(0, vmax)
        return self.R.element(c)


# --------------------------------------------------------------------------
# independent oracles
# --------------------------------------------------------------------------


def _pmul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _pdiv_exact(a: list, b: list) -> list:
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c, r = divmod(a[i + len(b) - 1], b[-1])
        assert r == 0
        out[i] = c
        for j, y in enumerate(b):
            a[i + j] -= c * y
    assert not any(a)
    return out


def gaussian_polynomial(n: int, k: int) -> list:
    """Integer coefficients of the Gaussian binomial as a polynomial in t (product formula)."""
    if k < 0 or k > n:
        return [0]
    num, den = [1], [1]
    for i in range(k):
        num = _pmul(num, [1] + [0] * (n - i - 1) + [-1])
        den = _pmul(den, [1] + [0] * i + [-1])
    return _pdiv_exact(num, den)


def _horner(coeffs: list, q):
    acc = q.field.zero
    for c in reversed(coeffs):
        acc = acc * q + c
    return acc


def _frac_element(R: Annulus, coeffs: dict) -> LaurentElement:
    return R.element({n: R.field(Fraction(c)) for n, c in coeffs.items() if c})


# --------------------------------------------------------------------------
# criteria
# --------------------------------------------------------------------------


def check_pascal(S: Setting) -> CheckResult:
    rng = S.rng(1)
    F, p = S.F, S.p
    qs = [F(1)]
    while len(qs) < 21:
        v = rng.choice([-1, 0, 0, 1, 2])
        q = F(S.unit(rng)) * F(p) ** v
        qs.append(q)
    polys = {(n, k): gaussian_polynomial(n, k) for n in range(13) for k in range(n + 1)}
    fails, cases = [], 0
    for q in qs:
        rows = qbinom_table(12, q)
        qn = padic_norm(q)
        for n in range(13):
            for k in range(n + 1):
                cases += 1
                val = rows[n][k]
                if not val == _horner(polys[(n, k)], q):
                    fails.append(("oracle", q, n, k))
                if n and k and not val == rows[n - 1][k - 1] + q**k * (rows[n - 1][k] if k < n else F.zero):
                    fails.append(("pascal", q, n, k))
                if (q - 1).is_exact_zero() and not val == comb(n, k):
                    fails.append(("q=1", n, k))
                if not padic_norm(val) <= qbinom_norm_bound(n, k, qn):
                    fails.append(("bound", q, n, k))
        if not qbinom(0, 3, q).is_exact_zero() or not qbinom(5, 0, q) == 1:
            fails.append(("initial", q))
    return CheckResult(1, "quantum Pascal", not fails, cases, f"{len(qs)} values of q", fails[:5])


def check_divided_oracle(S: Setting) -> CheckResult:
    R, F = S.R, S.F
    sigma = Endomorphism(S.q, F.zero, R)
    rows = qbinom_table(12, S.q)
    fails, cases = [], 0
    for n in range(13):
        T = taylor_expand(R.x(n), sigma, 12, S.eta)
        for k in range(13):
            cases += 1
            got = std_apply(k, R.x(n), sigma)
            want = R.monomial(rows[n][k], n - k) if k <= n else R.zero()
            if not (got.is_exact() and got.same_coeffs(want) and got.same_coeffs(T.derivatives[k])):
                fails.append((n, k))
    return CheckResult(2, "divided-power oracle", not fails, cases, "σ(x) = q x, n <= 12", fails[:5])


def check_isometry(S: Setting) -> CheckResult:
    rng = S.rng(3)
    fails, cases = [], 0
    for i in range(100):
        deg = rng.randint(0, 20)
        coeffs = tuple(S.element(rng, -10, 10, rng.randint(0, 3)) for _ in range(deg + 1))
        basis = MONOMIAL if i % 2 == 0 else DIVIDED
        P = XiPolynomial(coeffs, basis, S.sigma, S.eta)
        if basis == MONOMIAL:
            Q = xi_to_divided(P)
            back = xi_to_monomial(Q)
        else:
            Q = xi_to_monomial(P)
            back = xi_to_divided(Q)
        cases += 1
        same = len(back.coeffs) == len(P.coeffs) and all(
            a.is_exact() and a.same_coeffs(b) for a, b in zip(back.coeffs, P.coeffs)
        )
        np_, nq = P.eta_norm(), Q.eta_norm()
        if not same or np_.log != nq.log or nq.bound:
            fails.append(i)
    return CheckResult(3, "Schauder isometry", not fails, cases, "degree <= 20", fails[:5])


def check_annulus_bound(S: Setting) -> CheckResult:
    rng = S.rng(4)
    R = S.R
    fails, cases = [], 0
    lo, hi = R.window
    for i in range(100):
        z = S.element(rng, lo, hi, rng.randint(1, 4))
        zn = gauss_norm(z)
        for k in range(S.K + 1):
            cases += 1
            d = std_apply(k, z, S.sigma)
            if not gauss_norm(d) <= zn * R.inner ** (-k):
                fails.append((i, k))
    return CheckResult(4, "annulus derivative bound", not fails, cases, f"k <= {S.K}", fails[:5])


def _random_operator(S: Setting, rng, endo: Endomorphism, order: int, lo=-5, hi=5) -> TwistedOperator:
    coeffs = []
    for _ in range(order + 1):
        coeffs.append(S.element(rng, lo, hi, rng.randint(0, 2)) if rng.random() < 0.7 else S.R.zero())
    if not coeffs[-1].coeffs:
        coeffs[-1] = S.R.one()
    return TwistedOperator(endo, S.eta, coeffs)


def check_deformation(S: Setting) -> CheckResult:
    R, F, p, K = S.R, S.F, S.p, S.K
    ident = Endomorphism.identity(R)
    tau2 = Endomorphism(F(1 + p**3), F(2 * p**2), R)
    pairs = [
        (Endomorphism(S.q, F.zero, R), ident),
        (Endomorphism(F.one, F(p**2), R), ident),
        (S.sigma, tau2),
    ]
    fails, cases = [], 0
    for sigma, tau in pairs:
        cases += 1
        plan = basis_change_matrix(tau, sigma, S.eta, K)
        a = deform_operator(TwistedOperator.divided(1, sigma, S.eta), plan)
        b = deform_order1_closed(sigma, tau, K, S.eta)
        n = max(len(a.coeffs), len(b.coeffs))
        if not all(a.coeff(k).same_coeffs(b.coeff(k)) for k in range(n)):
            fails.append(("order1", sigma, tau))
    rng = S.rng(5)
    there = basis_change_matrix(tau2, S.sigma, S.eta, K)
    back = basis_change_matrix(S.sigma, tau2, S.eta, K)
    monomials = [R.x(n) for n in range(-10, 11)]
    for i in range(50):
        phi = _random_operator(S, rng, S.sigma, rng.randint(0, 15))
        psi = deform_operator(phi, there)
        rt = deform_operator(psi, back)
        cases += 1
        if not all(rt.coeff(k).same_coeffs(phi.coeff(k)) for k in range(K + 1)):
            fails.append(("round trip", i))
        if not rt.agrees_with(phi):
            fails.append(("round trip tail", i))
        for z in monomials:
            cases += 1
            if not op_apply(phi, z).agrees_with(op_apply(psi, z)):
                fails.append(("action", i, z))
    return CheckResult(5, "deformation", not fails, cases, "3 closed forms, 50 round trips", fails[:5])


def _confluence_pair(S: Setting, G) -> tuple:
    M = ConnectionModule([[G]] if isinstance(G, LaurentElement) else G, Endomorphism.identity(S.R), S.conf_level)
    return M, confluence_transform(M, S.sigma, S.K, S.conf_eta_prime)


def check_confluence_exp(S: Setting) -> CheckResult:
    R, F, p, K = S.R, S.F, S.p, S.K
    c = p
    M, Sm = _confluence_pair(S, R.const(c))
    # oracle: Σ_k c^k ((q-1)x + h)^k / k! in rational arithmetic
    a, b = Fraction((S.q - 1).lift()), Fraction(S.h.lift())
    want: dict = {}
    term_val_ok = True
    for k in range(K + 1):
        coef = Fraction(c) ** k / factorial(k)
        term = {}
        for j in range(k + 1):
            term[j] = coef * comb(k, j) * a**j * b ** (k - j)
            want[j] = want.get(j, 0) + term[j]
        v = min(_vp_frac(t, p) for t in term.values() if t)
        if v < 2 * k - Fraction(k, p - 1):
            term_val_ok = False
    oracle = _frac_element(R, want)
    got = Sm.matrix[0][0]
    match = got.agrees_with(oracle, Sm.tail)
    # the library's own k-th terms, at the tracked precision
    mats = connection_power_matrices(M, K)
    u = S.sigma.sigma_k_x(1) - R.x()
    lib_ok = True
    for k in range(K + 1):
        t = (u**k * mats[k][0][0]).scale(F(factorial(k)).inverse())
        for a_ in t.coeffs.values():
            if a_.valuation() < 2 * k - Fraction(k, p - 1):
                lib_ok = False
    ok = match and term_val_ok and lib_ok
    return CheckResult(6, "confluence exponential", ok, K + 1, f"tail {Sm.tail}", [] if ok else [(match, term_val_ok, lib_ok)])


def _vp_frac(x: Fraction, p: int) -> int:
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _power_oracle(S: Setting, a: int) -> LaurentElement:
    """q^a Σ_j binom(a, j) (h/(q x))^j, summed over the window."""
    q, h = Fraction(S.q.lift()), Fraction(S.h.lift())
    lo = S.R.n_min
    c = {}
    binom = Fraction(1)
    for j in range(0, -lo + 1):
        if j:
            binom = binom * (a - j + 1) / j
        if binom == 0:
            break
        c[-j] = q**a * binom * (h / q) ** j
    return _frac_element(S.R, c)


def check_confluence_power(S: Setting) -> CheckResult:
    fails = []
    for a in range(-3, 6):
        _, Sm = _confluence_pair(S, S.R.element({-1: a}))
        if not Sm.matrix[0][0].agrees_with(_power_oracle(S, a), Sm.tail):
            fails.append(a)
    return CheckResult(7, "confluence power function", not fails, 9, "a in -3..5", fails)


def _random_connections(S: Setting, count: int) -> list:
    rng = S.rng(8)
    out = []
    attempts = 0
    while len(out) < count and attempts < 20 * count:
        attempts += 1
        G = [[S.element(rng, 0, 1, rng.randint(0, 2), 2) for _ in range(2)] for _ in range(2)]
        G = [[g.scale(S.F(S.p)) for g in row] for row in G]
        try:
            out.append(_confluence_pair(S, G))
        except NotConvergentAtOrderK:
            continue
    return out


def check_structure(S: Setting) -> CheckResult:
    R = S.R
    modules = [_confluence_pair(S, R.const(S.p))]
    modules += [_confluence_pair(S, R.element({-1: a})) for a in range(-3, 6)]
    modules += _random_connections(S, 10)
    samples = [(R.x(), [R.one(), R.x()]), (R.element({0: 1, 2: 1}), [R.x(2), R.const(S.p)])]
    fails = []
    for i, (M, Sm) in enumerate(modules):
        vecs = [(z, v[: M.rank] + [R.zero()] * (M.rank - len(v))) for z, v in samples]
        rep = sigma_structure_identity_check(M, Sm, S.sigma, vecs, S.K)
        if not rep.ok:
            fails.append((i, rep.identity_ok, rep.semilinear_ok))
    ok = not fails and len(modules) == 20
    return CheckResult(8, "structure identity", ok, len(modules), "10 of them random rank 2", fails)


def check_operator_algebra(S: Setting) -> CheckResult:
    rng = S.rng(9)
    sigma = S.sigma
    fails, cases = [], 0
    monomials = [S.R.x(n) for n in (-2, 0, 1, 3, 5)]
    for i in range(50):
        a, b, c = (_random_operator(S, rng, sigma, rng.randint(0, 6), 0, 4) for _ in range(3))
        ab, bc = op_compose(a, b), op_compose(b, c)
        left, right = op_compose(ab, c), op_compose(a, bc)
        cases += 1
        n = max(len(left.coeffs), len(right.coeffs))
        if not (left.is_exact() and all(left.coeff(k).same_coeffs(right.coeff(k)) for k in range(n))):
            fails.append(("assoc", i))
        if not op_norm(ab) <= op_norm(a) * op_norm(b):
            fails.append(("norm", i))
        if i < 10:
            for z in monomials:
                cases += 1
                if not op_apply(ab, z).agrees_with(op_apply(a, op_apply(b, z))):
                    fails.append(("apply", i, z))
    rows = qbinom_table(12, S.q)
    for k in range(13):
        for l in range(13 - k):
            cases += 1
            prod = op_compose(TwistedOperator.divided(k, sigma, S.eta), TwistedOperator.divided(l, sigma, S.eta))
            want = TwistedOperator.divided(k + l, sigma, S.eta, S.R.const(rows[k + l][l]))
            if not all(prod.coeff(j).same_coeffs(want.coeff(j)) for j in range(k + l + 1)):
                fails.append(("rule", k, l))
    return CheckResult(9, "operator algebra", not fails, cases, "50 triples", fails[:5])


def check_radius(S: Setting) -> CheckResult:
    F, p, R = S.F, S.p, S.R
    fails, cases = [], 0
    params = [(1 + p**2, p**2), (1, p**2), (1 + p, 0), (2, p), (1 + p**3, p), (1 - p**2, 3 * p**3)]
    for qv, hv in params:
        sigma = Endomorphism(F(qv), F(hv), R)
        rho = sigma.x_radius()
        for n in range(11):
            cases += 1
            if not endo_iterate(sigma, n).x_radius() <= rho:
                fails.append(("monotone", qv, hv, n))
    etas = [LogNorm(Fraction(e)) for e in ("0", "-1/2", "-1", "-3/2", "-2", "-5/2", "-3")]
    for qv in (1, 1 + p, 1 + p**2, 1 + p**3, 1 - p**2, 2, p):
        for hv in (0, p, p**2, p**3, 3 * p**2):
            sigma = Endomorphism(F(qv), F(hv), R)
            vq = (F(qv) - 1).valuation()
            vh = F(hv).valuation()
            for eta in etas:
                cases += 1
                rep = eta_admissible(sigma, eta)
                # η >= ρ  <=>  |1-q| <= η/r  and  |h| <= η, evaluated on valuations
                e = Fraction(eta.log)
                rlog = Fraction(R.r.log)
                cq = -vq <= e - rlog
                ch = -vh <= e
                if rep.ok != (cq and ch) or rep.q_condition != cq or rep.h_condition != ch:
                    fails.append(("grid", qv, hv, eta.log))
    return CheckResult(10, "radius monotonicity and admissibility", not fails, cases, "", fails[:5])


def check_log_form(S: Setting) -> CheckResult:
    R, F, p = S.R, S.F, S.p
    fails = []
    Gs = [R.element({-1: a}) for a in range(-3, 6)] + [R.const(p), R.const(p**2), R.monomial(p, 1)]
    sigma0 = Endomorphism(S.q, F.zero, R)
    for i, G in enumerate(Gs):
        M = ConnectionModule([[G]], Endomorphism.identity(R), S.conf_level)
        A = confluence_transform(M, sigma0, S.K, S.conf_eta_prime)
        B = log_derivative_form(M, S.q, S.K, S.conf_eta_prime)
        if not A.matrix[0][0].agrees_with(B.matrix[0][0], lmax(A.tail, B.tail)):
            fails.append(i)
    return CheckResult(11, "log-derivative agreement", not fails, len(Gs), "h = 0", fails)


def check_serialization(S: Setting) -> CheckResult:
    rng = S.rng(12)
    R, F = S.R, S.F
    ctx = S.cfg.context()
    fails, cases = [], 0

    def same_doc(doc, load, dump):
        text = to_json(doc)
        back = dump(load(json.loads(text), ctx))
        return to_json(back) == text

    scalars = [F(0), F(7), F(-250), F(Fraction(3, 7)), F(S.p).inverse(), F(Fraction(2, 3)) * F(S.p**3)]
    scalars.append(scalars[3] - scalars[3])
    for a in scalars:
        cases += 1
        b = F.parse(a.canonical())
        if b.canonical() != a.canonical() or (b.prec, b.val, b.unit) != (a.prec, a.val, a.unit):
            fails.append(("scalar", a.canonical()))
    series = [S.element(rng, -40, 40, 5) for _ in range(5)]
    series.append(R.element({-3: Fraction(1, 3), 2: 5}, LogNorm(Fraction(-7, 3))))
    for f in series:
        cases += 1
        if not same_doc(dump_series(f), load_series, dump_series):
            fails.append(("series", str(f)))
    ops = [_random_operator(S, rng, S.sigma, 4) for _ in range(3)]
    ops.append(deform_order1_closed(S.sigma, Endomorphism.identity(R), 6, S.eta))
    for phi in ops:
        cases += 1
        if not same_doc(dump_operator(phi), load_operator, dump_operator):
            fails.append(("operator", str(phi)))
    P = XiPolynomial(tuple(S.element(rng, -3, 3, 2) for _ in range(4)), MONOMIAL, S.sigma, S.eta)
    for Q in (P, xi_to_divided(P)):
        cases += 1
        if not same_doc(dump_xi(Q), load_xi, dump_xi):
            fails.append(("xi", Q.basis))
    M, Sm = _confluence_pair(S, R.element({-1: 2}))
    M = ConnectionModule(M.matrix, M.endo, M.level, S.K)
    cases += 2
    if not same_doc(dump_connection(M), load_connection, dump_connection):
        fails.append(("connection",))
    if not same_doc(dump_sigma(Sm), load_sigma, dump_sigma):
        fails.append(("sigma",))
    return CheckResult(12, "serialization round trip", not fails, cases, "", fails)


CRITERIA = {
    1: check_pascal,
    2: check_divided_oracle,
    3: check_isometry,
    4: check_annulus_bound,
    5: check_deformation,
    6: check_confluence_exp,
    7: check_confluence_power,
    8: check_structure,
    9: check_operator_algebra,
    10: check_radius,
    11: check_log_form,
    12: check_serialization,
}

SUITES = {
    "pascal": [1],
    "oracle": [2],
    "isometry": [3],
    "bounds": [4],
    "deformation": [5],
    "confluence": [6, 7, 8],
    "operators": [9],
    "radius": [10],
    "logform": [11],
    "serialization": [12],
    "all": list(CRITERIA),
}


def run_suite(name: str, cfg: Config | None = None) -> list:
    if name not in SUITES:
        raise KeyError(name)
    S = Setting(cfg)
    out = []
    for n in SUITES[name]:
        t = time.perf_counter()
        res = CRITERIA[n](S)
        res.seconds = time.perf_counter() - t
        out.append(res)
    return out


def summary_json(name: str, results: list) -> str:
    doc = {
        "suite": name,
        "passed": sum(r.ok for r in results),
        "failed": sum(not r.ok for r in results),
        "checks": [{"criterion": r.number, "name": r.name, "ok": r.ok, "cases": r.cases} for r in results],
    }
    return json.dumps(doc, indent=2, sort_keys=True)
