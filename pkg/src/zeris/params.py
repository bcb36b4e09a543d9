"""System parameters of the wireless-powered zeRIS link and their derived constants.

Everything in here is in SI units (watts, metres, seconds). dBm values are
converted only at the edges (config files and the command line) through
:func:`dbm_to_watt` / :func:`watt_to_dbm`.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

__all__ = [
    "SystemParams",
    "DerivedConstants",
    "path_loss",
    "derive_constants",
    "dbm_to_watt",
    "watt_to_dbm",
    "load_config",
    "parse_config",
    "DISTANCE_FIELDS",
]

DISTANCE_FIELDS = ("d_pu", "d_pj", "d_pr", "d_ur", "d_jr", "d_ra", "d_re")
_POWER_FIELDS = ("Ps", "Pe", "Pc", "sigma2")
_INT_FIELDS = ("N", "N1", "N2", "L")


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1e3


def watt_to_dbm(watt: float) -> float:
    if watt <= 0:
        raise ValueError(f"power must be positive to express in dBm, got {watt}")
    return 10.0 * math.log10(watt * 1e3)


def path_loss(d: float, a0: float) -> float:
    """Large-scale gain ``d**(-a0)`` of a link of length `d` metres."""
    if not d > 0:
        raise ValueError(f"distance must be positive, got {d}")
    return d ** (-a0)


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of one operating point.

    Defaults are the baseline scenario: every distance 10 m, a0 = 2.7,
    T = 1 s, tau = 0.4, eta = 0.8, R = 1.5 bit/channel use, N = 30 split
    evenly, Pe = 2 uW, Pc = 50 mW, sigma2 = -45 dBm and L = 1500 quadrature
    points. ``Ps`` defaults to 1 W (30 dBm).

    When ``N1``/``N2`` are left as ``None`` the surface is split in half
    (``N1 = N // 2``).
    """

    Ps: float = 1.0
    tau: float = 0.4
    T: float = 1.0
    eta: float = 0.8
    N: int = 30
    N1: int | None = None
    N2: int | None = None
    Pe: float = 2e-6
    Pc: float = 50e-3
    sigma2: float = field(default_factory=lambda: dbm_to_watt(-45.0))
    R: float = 1.5
    a0: float = 2.7
    d_pu: float = 10.0
    d_pj: float = 10.0
    d_pr: float = 10.0
    d_ur: float = 10.0
    d_jr: float = 10.0
    d_ra: float = 10.0
    d_re: float = 10.0
    L: int = 1500

    def __post_init__(self):
        if self.N1 is None and self.N2 is None:
            object.__setattr__(self, "N1", self.N // 2)
            object.__setattr__(self, "N2", self.N - self.N // 2)
        elif self.N1 is None:
            object.__setattr__(self, "N1", self.N - self.N2)
        elif self.N2 is None:
            object.__setattr__(self, "N2", self.N - self.N1)
        self.validate()

    def validate(self) -> None:
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        if self.N1 < 0 or self.N2 < 0:
            raise ValueError(f"N1, N2 must be non-negative, got ({self.N1}, {self.N2})")
        if self.N1 + self.N2 != self.N:
            raise ValueError(f"N1 + N2 must equal N: {self.N1} + {self.N2} != {self.N}")
        if int(self.L) != self.L or self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L}")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        for name in ("Ps", "sigma2", "T", "R") + DISTANCE_FIELDS:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive, got {getattr(self, name)}")
        for name in ("Pe", "Pc"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")

    @property
    def Ps_dbm(self) -> float:
        return watt_to_dbm(self.Ps)

    def evolve(self, **changes: Any) -> "SystemParams":
        """Copy with `changes` applied.

        Changing ``N`` without giving a split re-splits the surface in half.
        ``Ps_dbm`` / ``sigma2_dbm`` / ``Pe_dbm`` / ``Pc_dbm`` are accepted as
        conveniences.
        """
        changes = _normalise_units(changes)
        if "N" in changes and "N1" not in changes and "N2" not in changes:
            changes["N1"] = None
            changes["N2"] = None
        elif "N1" in changes and "N2" not in changes:
            changes["N2"] = changes.get("N", self.N) - changes["N1"]
        elif "N2" in changes and "N1" not in changes:
            changes["N1"] = changes.get("N", self.N) - changes["N2"]
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class DerivedConstants:
    Pt: float
    rho_t: float
    beta_pu: float
    beta_pj: float
    beta_pr: float
    beta_ura: float
    beta_ure: float
    beta_jre: float
    epsilon: float
    varsigma: float
    Q: float
    energy_threshold: float
    """(N*Pe + Pc) / Pt: the level ``beta_pr * |sum h_pr|^2`` has to reach."""


def derive_constants(params: SystemParams) -> DerivedConstants:
    p = params
    p.validate()
    a0 = p.a0
    Pt = p.tau / (1.0 - p.tau) * p.Ps * p.eta
    beta_pu = path_loss(p.d_pu, a0)
    beta_ura = path_loss(p.d_ur * p.d_ra, a0)
    try:
        epsilon = 2.0 ** (p.R / (1.0 - p.tau)) - 1.0
    except OverflowError:  # tau within a hair of 1: no decoding is possible in the remaining slot
        epsilon = math.inf
    demand = p.N * p.Pe + p.Pc
    return DerivedConstants(
        Pt=Pt,
        rho_t=Pt / p.sigma2,
        beta_pu=beta_pu,
        beta_pj=path_loss(p.d_pj, a0),
        beta_pr=path_loss(p.d_pr, a0),
        beta_ura=beta_ura,
        beta_ure=path_loss(p.d_ur * p.d_re, a0),
        beta_jre=path_loss(p.d_jr * p.d_re, a0),
        epsilon=epsilon,
        varsigma=epsilon / (beta_pu * beta_ura),
        Q=(1.0 - p.tau) * p.T * demand,
        energy_threshold=demand / Pt,
    )


# -- config files -------------------------------------------------------------

_FIELD_TYPES = {f.name: f for f in dataclasses.fields(SystemParams)}


def _normalise_units(values: Mapping[str, Any]) -> dict[str, Any]:
    out = {}
    for key, value in values.items():
        if key.endswith("_dbm") and key[:-4] in _POWER_FIELDS:
            out[key[:-4]] = dbm_to_watt(float(value))
        else:
            out[key] = value
    return out


def parse_config(text: str) -> dict[str, Any]:
    """Parse flat ``key = value`` text into SystemParams keyword arguments.

    Blank lines and ``#`` comments are ignored; ``key: value`` also works.
    Power fields may be given in dBm with a ``_dbm`` suffix (``Ps_dbm = 40``).
    Unknown keys raise ``KeyError``.
    """
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            if sep in line:
                key, value = (s.strip() for s in line.split(sep, 1))
                break
        else:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        raw[key] = value

    out: dict[str, Any] = {}
    for key, value in raw.items():
        base = key[:-4] if key.endswith("_dbm") else key
        if base not in _FIELD_TYPES or (key.endswith("_dbm") and base not in _POWER_FIELDS):
            raise KeyError(f"unknown config key {key!r}")
        if base in _INT_FIELDS:
            out[key] = int(value)
        else:
            out[key] = float(value)
    return _normalise_units(out)


def load_config(path: str | Path) -> dict[str, Any]:
    return parse_config(Path(path).read_text())
