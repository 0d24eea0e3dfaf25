"""Command-line front end.

Series arguments are either a JSON series document or inline text
``"n:c,n:c,..."`` (``"-1:1"`` is x^-1, ``"0:3,2:1/2"`` is 3 + x^2/2).
Operator arguments are a JSON operator document or ``d^[k]``, the k-th
divided derivative for the configured endomorphism.  Connection arguments
are a JSON connection document or inline series text for a rank-1 matrix.

Exit status: 0 success, 1 computation or certificate failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import re
import sys

from .annulus import AdmissibilityError, Endomorphism, LaurentElement, NotAUnit, gauss_norm
from .config import Config, ConfigError, load_config
from .confluence import (
    ConnectionModule,
    LogDivergent,
    NotConvergentAtOrderK,
    PrecisionExhausted,
    confluence_transform,
    sigma_structure_identity_check,
)
from .deformation import PlanMismatch, basis_change_matrix, deform_operator
from .derivatives import eta_convergent_check, radius_estimate
from .operators import TwistedOperator, op_apply, op_compose, op_norm
from .padic import LogNorm, PrecisionError, padic_norm, qbinom
from .serialize import (
    DocumentError,
    dump_connection,
    dump_operator,
    dump_series,
    dump_sigma,
    load_connection,
    load_operator,
    load_series,
    log_from_text,
    log_to_text,
    to_json,
)
from .verification import SUITES, run_suite

log = logging.getLogger("twistdiff")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COMPUTATION_ERRORS = (
    NotConvergentAtOrderK,
    PrecisionExhausted,
    LogDivergent,
    PlanMismatch,
    AdmissibilityError,
    NotAUnit,
    PrecisionError,
)


class UsageError(ValueError):
    pass


# --------------------------------------------------------------------------
# input helpers
# --------------------------------------------------------------------------


def _read_doc(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not JSON ({exc.msg})") from None


def _is_file(arg: str) -> bool:
    return arg.endswith(".json") or os.path.isfile(arg)


def parse_series(arg: str, cfg: Config, ring) -> LaurentElement:
    if _is_file(arg):
        return load_series(_read_doc(arg), cfg.context(), ring)
    coeffs = {}
    for part in filter(None, (s.strip() for s in arg.split(","))):
        exp, sep, value = part.partition(":")
        if not sep:
            raise UsageError(f"series term {part!r} is not of the form n:c")
        try:
            n = int(exp)
        except ValueError:
            raise UsageError(f"exponent {exp!r} is not an integer") from None
        if not ring.in_window(n):
            raise UsageError(f"exponent {n} lies outside the window {ring.window}")
        a = ring.field.parse(value.strip())
        coeffs[n] = coeffs[n] + a if n in coeffs else a
    return ring.element(coeffs)


def _endo(cfg: Config, ring, q: str | None, h: str | None) -> Endomorphism:
    base = cfg.default_endo(ring)
    F = ring.field
    return Endomorphism(F.parse(q) if q else base.q, F.parse(h) if h else base.h, ring)


_DIVIDED = re.compile(r"^d(?:\^\[(\d+)\])?$")
_NEG_TERM = re.compile(r"^-\d+:")


def parse_operator(arg: str, cfg: Config, sigma: Endomorphism) -> TwistedOperator:
    m = _DIVIDED.match(arg.strip())
    if m:
        return TwistedOperator.divided(int(m.group(1) or 1), sigma, cfg.eta)
    if _is_file(arg):
        return load_operator(_read_doc(arg), cfg.context())
    raise UsageError(f"operator {arg!r}: expected a JSON file or d^[k]")


def parse_connection(arg: str, cfg: Config, ring) -> ConnectionModule:
    if _is_file(arg):
        return load_connection(_read_doc(arg), cfg.context())
    G = parse_series(arg, cfg, ring)
    return ConnectionModule([[G]], Endomorphism.identity(ring), cfg.eta, cfg.K)


# --------------------------------------------------------------------------
# commands; each returns (exit code, report dict, document or None)
# --------------------------------------------------------------------------


def cmd_qbinom(args, cfg: Config):
    F = cfg.field
    q = F.parse(args.q) if args.q else cfg.default_endo(cfg.annulus(F)).q
    if args.n < 0:
        raise UsageError("n must be nonnegative")
    v = qbinom(args.n, args.k, q)
    return EXIT_OK, {"n": args.n, "k": args.k, "q": q.canonical(), "value": v.canonical(), "norm_log": log_to_text(padic_norm(v))}, None


def cmd_radius(args, cfg: Config):
    ring = cfg.annulus()
    sigma = _endo(cfg, ring, args.q, args.h)
    z = parse_series(args.series, cfg, ring)
    K = args.K if args.K is not None else cfg.K
    cert = radius_estimate(z, sigma, K)
    conv = eta_convergent_check(z, sigma, cfg.eta, K)
    report = {
        "endo": {"q": sigma.q.canonical(), "h": sigma.h.canonical()},
        "order_K": K,
        "radius_log": "+infinity" if cert.witness is None else log_to_text(cert.estimate),
        "witness_k": cert.witness,
        "head_log": "+infinity" if cert.head.log == float("inf") else log_to_text(cert.head),
        "last_log": "+infinity" if cert.last.log == float("inf") else log_to_text(cert.last),
        "eta_log": log_to_text(cfg.eta),
        "table": [{"k": k, "norm_eta_log": log_to_text(t)} for k, t in enumerate(conv.terms)],
        "derivative_bound_ok": conv.bound_ok,
        "decays_from": conv.decay_from,
    }
    return EXIT_OK if conv.bound_ok else EXIT_FAIL, report, None


def cmd_apply(args, cfg: Config):
    ring = cfg.annulus()
    sigma = _endo(cfg, ring, args.q, args.h)
    phi = parse_operator(args.operator, cfg, sigma)
    z = parse_series(args.series, cfg, phi.endo.ring)
    out = op_apply(phi, z)
    return EXIT_OK, {"norm_log": log_to_text(gauss_norm(out)), "exact": out.is_exact()}, dump_series(out)


def cmd_compose(args, cfg: Config):
    ring = cfg.annulus()
    sigma = _endo(cfg, ring, args.q, args.h)
    a = parse_operator(args.left, cfg, sigma)
    b = parse_operator(args.right, cfg, a.endo if not _DIVIDED.match(args.right) else sigma)
    ab = op_compose(a, b, args.K)
    report = {
        "order": ab.order,
        "norm_log": log_to_text(op_norm(ab)),
        "left_norm_log": log_to_text(op_norm(a)),
        "right_norm_log": log_to_text(op_norm(b)),
        "submultiplicative": op_norm(ab) <= op_norm(a) * op_norm(b),
    }
    return EXIT_OK, report, dump_operator(ab)


def cmd_deform(args, cfg: Config):
    ring = cfg.annulus()
    sigma = _endo(cfg, ring, args.q, args.h)
    phi = parse_operator(args.operator, cfg, sigma)
    F = phi.endo.field
    target = Endomorphism(F.parse(args.target_q), F.parse(args.target_h), phi.endo.ring)
    K = args.K if args.K is not None else cfg.K
    plan = basis_change_matrix(target, phi.endo, phi.level, K)
    psi = deform_operator(phi, plan)
    n_in, n_out = op_norm(phi), op_norm(psi)
    report = {
        "source": {"q": phi.endo.q.canonical(), "h": phi.endo.h.canonical()},
        "target": {"q": target.q.canonical(), "h": target.h.canonical()},
        "order_K": K,
        "norm_in_log": log_to_text(n_in),
        "norm_out_log": log_to_text(n_out),
        "tail_log": log_to_text(psi.tail),
        "isometric": n_in.log == n_out.log,
    }
    return EXIT_OK, report, dump_operator(psi)


def cmd_confluence(args, cfg: Config):
    ring = cfg.annulus()
    sigma = _endo(cfg, ring, args.q, args.h)
    M = parse_connection(args.connection, cfg, ring)
    K = args.K if args.K is not None else (M.order if M.order is not None else cfg.K)
    eta_prime = log_from_text(args.eta_prime) if args.eta_prime else cfg.eta_prime
    S = confluence_transform(M, sigma, K, eta_prime)
    samples = [(ring.x(), [ring.one()] * M.rank), (ring.element({0: 1, 1: 1}), [ring.x()] * M.rank)]
    rep = sigma_structure_identity_check(M, S, sigma, samples, K)
    report = {
        "order_K": K,
        "eta_prime_log": log_to_text(S.eta_prime),
        "tail_log": log_to_text(S.tail),
        "decay_bound_log": log_to_text(S.certificate.bound),
        "identity_check": rep.identity_ok,
        "semilinearity_check": rep.semilinear_ok,
        "samples": rep.samples,
    }
    return EXIT_OK if rep.ok else EXIT_FAIL, report, dump_sigma(S)


def cmd_verify(args, cfg: Config):
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    results = run_suite(args.suite, cfg)
    report = {
        "suite": args.suite,
        "seed": cfg.seed,
        "passed": sum(r.ok for r in results),
        "failed": sum(not r.ok for r in results),
        "checks": [
            {"criterion": r.number, "name": r.name, "ok": r.ok, "cases": r.cases, "detail": r.detail}
            for r in results
        ],
    }
    return EXIT_OK if report["failed"] == 0 else EXIT_FAIL, report, None


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------


def _text_report(command: str, code: int, report: dict) -> str:
    lines = []
    if command == "verify":
        for c in report["checks"]:
            mark = "PASS" if c["ok"] else "FAIL"
            lines.append(f"[{mark}] criterion {c['criterion']:2d} {c['name']}: {c['cases']} cases")
        lines.append(f"{report['passed']} passed, {report['failed']} failed")
    elif command == "radius":
        lines.append(f"radius estimate (log_p): {report['radius_log']}  witness k = {report['witness_k']}")
        lines.append(f"min over all k (log_p): {report['head_log']}  last nonzero order (log_p): {report['last_log']}")
        lines.append(f"k   log_p ‖∂^[k] z‖ η^k   (η = p^{report['eta_log']})")
        for row in report["table"]:
            v = row["norm_eta_log"]
            lines.append(f"{row['k']:<3} {'zero' if v is None else v}")
    else:
        for key in sorted(report):
            lines.append(f"{key}: {report[key]}")
    lines.append("summary: " + json.dumps({"command": command, "exit": code, **_flat(report)}, sort_keys=True))
    return "\n".join(lines)


def _flat(report: dict) -> dict:
    return {k: v for k, v in report.items() if not isinstance(v, (list, dict))}


def _global_flags(p: argparse.ArgumentParser, default):
    p.add_argument("--config", default=None if default else argparse.SUPPRESS, help="JSON configuration file")
    p.add_argument("--seed", type=int, default=None if default else argparse.SUPPRESS, help="override the configured seed")
    p.add_argument("--output", default=None if default else argparse.SUPPRESS, help="write the resulting document to this file")
    p.add_argument("--format", choices=("json", "text"), default="text" if default else argparse.SUPPRESS)
    p.add_argument("-v", "--verbose", action="store_true", default=False if default else argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twistdiff", description="Twisted differential operators over p-adic annuli.")
    _global_flags(ap, True)
    # the same flags are accepted after the subcommand name
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, False)
    sub = ap.add_subparsers(dest="command", required=True)

    def command(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    def endo_flags(p):
        p.add_argument("--q", help="q of σ(x) = q x + h (scalar text)")
        p.add_argument("--h", help="h of σ(x) = q x + h (scalar text)")

    p = command("qbinom", help="quantum binomial coefficient")
    p.add_argument("n", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--q")
    p.set_defaults(func=cmd_qbinom)

    p = command("radius", help="order-K radius certificate of a series")
    p.add_argument("series")
    p.add_argument("--K", type=int)
    endo_flags(p)
    p.set_defaults(func=cmd_radius)

    p = command("apply", help="apply an operator to a series")
    p.add_argument("operator")
    p.add_argument("series")
    endo_flags(p)
    p.set_defaults(func=cmd_apply)

    p = command("compose", help="compose two operators")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--K", type=int)
    endo_flags(p)
    p.set_defaults(func=cmd_compose)

    p = command("deform", help="rewrite an operator for another endomorphism")
    p.add_argument("operator")
    p.add_argument("--target-q", required=True)
    p.add_argument("--target-h", required=True)
    p.add_argument("--K", type=int)
    endo_flags(p)
    p.set_defaults(func=cmd_deform)

    p = command("confluence", help="σ-module of a connection")
    p.add_argument("connection")
    p.add_argument("--K", type=int)
    p.add_argument("--eta-prime", help="log_p of η' as rational text")
    endo_flags(p)
    p.set_defaults(func=cmd_confluence)

    p = command("verify", help="seeded verification suite")
    p.add_argument("suite", help=f"one of: {', '.join(SUITES)}")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    # inline series such as "-1:1" would otherwise be read as options
    argv = [" " + a if _NEG_TERM.match(a) else a for a in argv]
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        code, report, doc = args.func(args, cfg)
    except (UsageError, ConfigError, DocumentError) as exc:
        print(f"twistdiff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except COMPUTATION_ERRORS as exc:
        print(f"twistdiff: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"twistdiff: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    if doc is not None and args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(to_json(doc) + "\n")
        report["output"] = args.output
    if args.format == "json":
        out = {"command": args.command, "exit": code, "report": report}
        if doc is not None and not args.output:
            out["document"] = doc
        print(to_json(out))
    else:
        print(_text_report(args.command, code, report))
        if doc is not None and not args.output:
            print(to_json(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
