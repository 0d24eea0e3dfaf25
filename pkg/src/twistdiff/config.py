"""Run configuration: the base field, the annulus, truncation and levels."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .annulus import Annulus, Endomorphism
from .padic import LogNorm, Qp
from .serialize import Context

log = logging.getLogger(__name__)

__all__ = ["Config", "ConfigError", "load_config"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Config:
    """Defaults give the reference setting p = 5, N = 40 on 1/p <= |x| <= 1."""

    p: int = 5
    N: int = 40
    r_log: str = "0"
    r1_log: str | None = "-1"
    window: tuple = (-40, 40)
    K: int = 30
    eta_log: str = "-2"
    eta_prime_log: str | None = None
    seed: int = 20240611
    q: str | None = None
    h: str | None = None

    def __post_init__(self):
        p = self.p
        if not isinstance(p, int) or p < 2 or p > 97 or any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
            raise ConfigError(f"p must be a prime <= 97, got {p!r}")
        if not isinstance(self.N, int) or self.N < 8:
            raise ConfigError("N must be an integer >= 8")
        if not isinstance(self.K, int) or self.K < 0:
            raise ConfigError("K must be a nonnegative integer")
        lo, hi = self.window
        object.__setattr__(self, "window", (int(lo), int(hi)))
        for name in ("r_log", "r1_log", "eta_log", "eta_prime_log"):
            v = getattr(self, name)
            if v is None:
                continue
            if isinstance(v, float):
                raise ConfigError(f"{name} must be rational text such as '-3/2'")
            try:
                object.__setattr__(self, name, str(Fraction(str(v))))
            except ValueError:
                raise ConfigError(f"{name}: cannot read {v!r} as a rational") from None
        if self.r1_log is not None and Fraction(self.r1_log) > Fraction(self.r_log):
            raise ConfigError("inner radius exceeds outer radius")
        if lo > -self.K and self.r1_log is not None or hi < self.K:
            log.warning("window %s does not contain [-K, K] for K = %d", self.window, self.K)

    # derived objects
    @property
    def field(self) -> Qp:
        return Qp(self.p, self.N)

    @property
    def eta(self) -> LogNorm:
        return LogNorm(Fraction(self.eta_log))

    @property
    def eta_prime(self) -> LogNorm | None:
        return None if self.eta_prime_log is None else LogNorm(Fraction(self.eta_prime_log))

    def annulus(self, field: Qp | None = None) -> Annulus:
        r1 = None if self.r1_log is None else LogNorm(Fraction(self.r1_log))
        return Annulus(field or self.field, LogNorm(Fraction(self.r_log)), r1, self.window)

    def context(self) -> Context:
        return Context(self.field, self.window)

    def default_endo(self, ring: Annulus) -> Endomorphism:
        """q = 1 + p^2, h = p^2 unless the configuration names other values."""
        F = ring.field
        q = F.parse(self.q) if self.q is not None else F(1 + self.p**2)
        h = F.parse(self.h) if self.h is not None else F(self.p**2)
        return Endomorphism(q, h, ring)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def load_config(path: str | None) -> Config:
    if path is None:
        return Config()
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    known = set(Config.__dataclass_fields__)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    if "window" in raw:
        raw["window"] = tuple(raw["window"])
    return Config(**raw)
