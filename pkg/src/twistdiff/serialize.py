"""JSON documents for scalars, series, operators, ξ-polynomials and modules.

Rationals are written as "a/b" text and scalars in the lossless form read by
``Qp.parse``, so ``load(save(v))`` reproduces ``v`` bit for bit.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .annulus import Annulus, Endomorphism, LaurentElement
from .confluence import ConnectionModule, SigmaModule
from .operators import TwistedOperator
from .padic import INF, LogNorm, PadicScalar, Qp
from .xi import XiPolynomial

__all__ = [
    "DocumentError",
    "Context",
    "log_to_text",
    "log_from_text",
    "dump_series",
    "load_series",
    "dump_endo",
    "load_endo",
    "dump_operator",
    "load_operator",
    "dump_xi",
    "load_xi",
    "dump_connection",
    "load_connection",
    "dump_sigma",
    "load_sigma",
    "to_json",
]


class DocumentError(ValueError):
    """A document does not have the expected shape or content."""


def log_to_text(n: LogNorm | None):
    if n is None or n.is_zero():
        return None
    if n.log == INF:
        return "inf"
    return str(Fraction(n.log))


def log_from_text(text) -> LogNorm:
    if text is None:
        return LogNorm.zero()
    if text == "inf":
        return LogNorm.infinite()
    if isinstance(text, float):
        raise DocumentError("magnitudes must be rational text, not floating point")
    try:
        return LogNorm(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad rational {text!r}") from exc


def _need(doc: dict, key: str):
    if not isinstance(doc, dict) or key not in doc:
        raise DocumentError(f"missing field {key!r}")
    return doc[key]


class Context:
    """The field and exponent window that documents are read into."""

    def __init__(self, field: Qp, window=(-40, 40)):
        self.field = field
        self.window = tuple(window)
        self._rings: dict = {}

    def ring(self, r_log, r1_log) -> Annulus:
        key = (log_from_text(r_log).log, None if r1_log is None else log_from_text(r1_log).log)
        R = self._rings.get(key)
        if R is None:
            r = log_from_text(r_log)
            r1 = None if r1_log is None else log_from_text(r1_log)
            R = self._rings[key] = Annulus(self.field, r, r1, self.window)
        return R

    def scalar(self, text) -> PadicScalar:
        if isinstance(text, bool) or not isinstance(text, (str, int)):
            raise DocumentError(f"scalar must be text, got {text!r}")
        try:
            return self.field.parse(str(text))
        except ValueError as exc:
            raise DocumentError(str(exc)) from None


# series ---------------------------------------------------------------------


def _params(R: Annulus) -> dict:
    return {"r_log": log_to_text(R.r), "r1_log": None if R.r1 is None else log_to_text(R.r1)}


def dump_series(f: LaurentElement) -> dict:
    return {
        "params": _params(f.ring),
        "coeffs": {str(n): f.coeffs[n].canonical() for n in sorted(f.coeffs)},
        "tail_log": log_to_text(f.tail),
    }


def load_series(doc: dict, ctx: Context, ring: Annulus | None = None) -> LaurentElement:
    params = _need(doc, "params")
    R = ctx.ring(_need(params, "r_log"), params.get("r1_log"))
    if ring is not None and R != ring:
        raise DocumentError("series lives on a different annulus")
    coeffs = {}
    for key, text in _need(doc, "coeffs").items():
        try:
            n = int(key)
        except ValueError:
            raise DocumentError(f"exponent key {key!r} is not an integer") from None
        if not R.in_window(n):
            raise DocumentError(f"exponent {n} lies outside the window {R.window}")
        a = ctx.scalar(text)
        if not a.is_exact_zero():
            coeffs[n] = a
    return LaurentElement(R, coeffs, log_from_text(doc.get("tail_log")))


# endomorphisms and operators -------------------------------------------------


def dump_endo(e: Endomorphism) -> dict:
    return {"q": e.q.canonical(), "h": e.h.canonical()}


def load_endo(doc: dict, ctx: Context, ring: Annulus) -> Endomorphism:
    try:
        return Endomorphism(ctx.scalar(_need(doc, "q")), ctx.scalar(_need(doc, "h")), ring)
    except DocumentError:
        raise
    except ValueError as exc:
        raise DocumentError(f"endomorphism rejected: {exc}") from None


def _ring_of(doc: dict, ctx: Context) -> Annulus:
    params = doc.get("params")
    if params is None:
        items = doc.get("coeffs") or []
        if isinstance(items, list) and items and isinstance(items[0], dict):
            params = items[0].get("params")
        elif "matrix" in doc and doc["matrix"]:
            params = doc["matrix"][0][0].get("params")
    if params is None:
        raise DocumentError("cannot determine the annulus of the document")
    return ctx.ring(_need(params, "r_log"), params.get("r1_log"))


def dump_operator(phi: TwistedOperator) -> dict:
    return {
        "params": _params(phi.endo.ring),
        "endo": dump_endo(phi.endo),
        "eta_log": log_to_text(phi.level),
        "coeffs": [dump_series(c) for c in phi.coeffs],
        "tail_log": log_to_text(phi.tail),
    }


def load_operator(doc: dict, ctx: Context) -> TwistedOperator:
    R = _ring_of(doc, ctx)
    endo = load_endo(_need(doc, "endo"), ctx, R)
    coeffs = [load_series(c, ctx, R) for c in _need(doc, "coeffs")]
    if not coeffs:
        raise DocumentError("operator needs at least one coefficient")
    try:
        return TwistedOperator(endo, log_from_text(_need(doc, "eta_log")), coeffs, log_from_text(doc.get("tail_log")))
    except ValueError as exc:
        raise DocumentError(str(exc)) from None


def dump_xi(P: XiPolynomial) -> dict:
    d = {
        "params": _params(P.endo.ring),
        "endo": dump_endo(P.endo),
        "eta_log": log_to_text(P.level),
        "basis": P.basis,
        "coeffs": [dump_series(c) for c in P.coeffs],
        "tail_log": None,
    }
    return d


def load_xi(doc: dict, ctx: Context) -> XiPolynomial:
    R = _ring_of(doc, ctx)
    endo = load_endo(_need(doc, "endo"), ctx, R)
    coeffs = [load_series(c, ctx, R) for c in _need(doc, "coeffs")]
    try:
        return XiPolynomial(tuple(coeffs), _need(doc, "basis"), endo, log_from_text(_need(doc, "eta_log")))
    except ValueError as exc:
        raise DocumentError(str(exc)) from None


# modules ---------------------------------------------------------------------


def _dump_matrix(rows) -> list:
    return [[dump_series(a) for a in row] for row in rows]


def _load_matrix(doc: dict, ctx: Context, R: Annulus) -> list:
    rank = _need(doc, "rank")
    rows = _need(doc, "matrix")
    if not isinstance(rank, int) or len(rows) != rank or any(len(r) != rank for r in rows):
        raise DocumentError("matrix shape does not match the rank")
    return [[load_series(a, ctx, R) for a in row] for row in rows]


def dump_connection(M: ConnectionModule) -> dict:
    return {
        "kind": "connection",
        "params": _params(M.ring),
        "rank": M.rank,
        "matrix": _dump_matrix(M.matrix),
        "endo": dump_endo(M.endo),
        "eta_log": log_to_text(M.level),
        "order_K": M.order,
        "tail_log": None,
    }


def load_connection(doc: dict, ctx: Context) -> ConnectionModule:
    R = _ring_of(doc, ctx)
    endo = load_endo(_need(doc, "endo"), ctx, R)
    order = doc.get("order_K")
    if order is not None and not isinstance(order, int):
        raise DocumentError("order_K must be an integer")
    return ConnectionModule(_load_matrix(doc, ctx, R), endo, log_from_text(_need(doc, "eta_log")), order)


def dump_sigma(S: SigmaModule) -> dict:
    return {
        "kind": "sigma",
        "params": _params(S.endo.ring),
        "rank": S.rank,
        "matrix": _dump_matrix(S.matrix),
        "endo": dump_endo(S.endo),
        "eta_log": None if S.eta_prime is None else log_to_text(S.eta_prime),
        "order_K": S.order,
        "tail_log": log_to_text(S.tail),
    }


def load_sigma(doc: dict, ctx: Context) -> SigmaModule:
    R = _ring_of(doc, ctx)
    endo = load_endo(_need(doc, "endo"), ctx, R)
    eta = doc.get("eta_log")
    order = doc.get("order_K")
    if order is not None and not isinstance(order, int):
        raise DocumentError("order_K must be an integer")
    return SigmaModule(
        _load_matrix(doc, ctx, R),
        endo,
        log_from_text(doc.get("tail_log")),
        order=order,
        eta_prime=None if eta is None else log_from_text(eta),
    )


def to_json(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)
