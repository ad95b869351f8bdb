"""Run configuration, physical constants and derived quantities.

Everything is SI internally. The config file carries unit suffixes in the key
names (``_nm``, ``_um``, ``_ms``, ``_a0``) and values are converted once, at
load time.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InvalidValue, MissingKey, ParseError
from .loss import LossCoefficients, overlap_integrals

HBAR = 1.054571817e-34  # J s
A0 = 5.29177210903e-11  # m
M_NA23 = 3.81754e-26  # kg

NM = 1e-9
UM = 1e-6
MS = 1e-3

_REQUIRED = object()

# config key -> (field name, scale to SI, default); default is in file units
_SCHEMA = {
    "n0": ("N0", None, _REQUIRED),
    "mass_kg": ("mass", 1.0, M_NA23),
    "a11_nm": ("a11", NM, _REQUIRED),
    "a22_nm": ("a22", NM, _REQUIRED),
    "a12_nm": ("a12_re", NM, _REQUIRED),
    "a12_im_a0": ("a12_im", A0, -1e-3),
    "d_tf_um": ("d_TF", UM, _REQUIRED),
    "k1_1": ("K1_1", 1.0, 2.9e-2),
    "k1_2": ("K1_2", 1.0, 2.9e-2),
    "k2_11": ("K2_11", 1.0, 0.0),
    "k2_22": ("K2_22", 1.0, 0.0),
    "k3_111": ("K3_111", 1.0, 1.57e-42),
    "k3_222": ("K3_222", 1.0, 1.53e-41),
    "k3_112": ("K3_112", 1.0, None),
    "k3_122": ("K3_122", 1.0, None),
    "mu_in": ("mu_in", 1.0, _REQUIRED),
    "eta_write": ("eta_write", 1.0, 1.0),
    "zeta_spatial": ("zeta_spatial", 1.0, 1.0),
    "eta_read": ("eta_read", 1.0, 1.0),
    "phi0_rad": ("phi0", 1.0, 0.0),
    "t_max_ms": ("t_max", MS, 150.0),
    "dt_ms": ("dt", MS, 0.1),
    "seed": ("seed", None, 42),
    "loss_enabled": ("loss_enabled", None, True),
    "output_stride": ("output_stride", None, 5),
    "coeff_cutoff_log": ("coeff_cutoff_log", 1.0, 60.0),
    "density_convention": ("density_convention", None, "mean"),
}


@dataclass(frozen=True)
class SimConfig:
    """Validated physical and numerical inputs, SI units."""

    N0: int
    a11: float
    a22: float
    a12_re: float
    d_TF: float
    mu_in: float
    mass: float = M_NA23
    a12_im: float = -1e-3 * A0
    K1_1: float = 2.9e-2
    K1_2: float = 2.9e-2
    K2_11: float = 0.0
    K2_22: float = 0.0
    K3_111: float = 1.57e-42
    K3_222: float = 1.53e-41
    K3_112: float | None = None  # None -> geometric mean of the pure channels
    K3_122: float | None = None
    eta_write: float = 1.0
    zeta_spatial: float = 1.0
    eta_read: float = 1.0
    phi0: float = 0.0
    t_max: float = 0.150
    dt: float = 1e-4
    seed: int = 42
    loss_enabled: bool = True
    output_stride: int = 5
    coeff_cutoff_log: float = 60.0
    density_convention: str = "mean"

    def __post_init__(self):
        if isinstance(self.N0, bool) or int(self.N0) != self.N0:
            raise InvalidValue("n0", "atom number must be an integer")
        object.__setattr__(self, "N0", int(self.N0))
        if self.N0 < 2:
            raise InvalidValue("n0", "need at least 2 atoms")
        for name in ("eta_write", "zeta_spatial", "eta_read"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidValue(name, f"{v} outside [0, 1]")
        if not self.dt > 0:
            raise InvalidValue("dt_ms", "must be positive")
        if not self.t_max >= self.dt:
            raise InvalidValue("t_max_ms", "must be at least dt")
        if self.a12_im > 0:
            raise InvalidValue("a12_im_a0", "imaginary scattering length must be <= 0")
        for name in ("K1_1", "K1_2", "K2_11", "K2_22", "K3_111", "K3_222", "K3_112", "K3_122"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise InvalidValue(name.lower(), "loss coefficients must be >= 0")
        if not self.mu_in >= 0:
            raise InvalidValue("mu_in", "must be >= 0")
        if not (self.d_TF > 0 and self.mass > 0):
            raise InvalidValue("d_tf_um", "cloud size and mass must be positive")
        if int(self.output_stride) != self.output_stride or self.output_stride < 1:
            raise InvalidValue("output_stride", "must be a positive integer")
        if not self.coeff_cutoff_log > 0:
            raise InvalidValue("coeff_cutoff_log", "must be positive")
        if self.density_convention not in ("mean", "peak"):
            raise InvalidValue("density_convention", "expected 'mean' or 'peak'")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidValue("seed", "must fit in an unsigned 64-bit integer")

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def baseline_config(**overrides) -> SimConfig:
    """The 23Na working point: N0=1e5, d_TF=10 um, mu_in=1e3, all losses on."""
    base = dict(N0=100_000, a11=2.8 * NM, a22=3.4 * NM, a12_re=3.4 * NM,
                d_TF=10.0 * UM, mu_in=1000.0)
    base.update(overrides)
    return SimConfig(**base)


def _parse_value(raw: str, lineno: int):
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in "\"'":
        return raw[1:-1]
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ParseError(lineno, raw) from None


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into a dict of raw (file-unit) values."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, raw = line.partition("=")
        key, raw = key.strip().lower(), raw.strip()
        if not sep or not key or not raw or not key.replace("_", "").isalnum():
            raise ParseError(lineno, line)
        if key in values:
            raise ParseError(lineno, f"duplicate key {key}")
        values[key] = _parse_value(raw, lineno)
    return values


def config_from_mapping(values: dict) -> SimConfig:
    unknown = sorted(set(values) - set(_SCHEMA))
    if unknown:
        raise InvalidValue(unknown[0], "unknown key")
    kwargs = {}
    for key, (name, scale, default) in _SCHEMA.items():
        if key in values:
            v = values[key]
        elif default is _REQUIRED:
            raise MissingKey(key)
        else:
            v = default
        if v is None:
            kwargs[name] = None
            continue
        if name == "loss_enabled":
            if not isinstance(v, bool):
                raise InvalidValue(key, "expected true/false")
        elif name == "density_convention":
            if not isinstance(v, str):
                raise InvalidValue(key, "expected a quoted string")
        elif name in ("seed", "output_stride", "N0"):
            if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
                raise InvalidValue(key, "expected an integer")
            v = int(v)
        else:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InvalidValue(key, "expected a number")
            v = float(v) * scale
        kwargs[name] = v
    return SimConfig(**kwargs)


def load_config(path) -> SimConfig:
    text = Path(path).read_text()
    return config_from_mapping(parse_config_text(text))


def config_to_text(cfg: SimConfig) -> str:
    """Inverse of :func:`load_config` (round-trips up to float formatting)."""
    lines = []
    for key, (name, scale, _default) in _SCHEMA.items():
        v = getattr(cfg, name)
        if v is None:
            continue
        if isinstance(v, bool):
            s = "true" if v else "false"
        elif isinstance(v, str):
            s = f'"{v}"'
        elif isinstance(v, int):
            s = str(v)
        else:
            s = repr(v / scale)
        lines.append(f"{key} = {s}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DerivedParams:
    J: float
    R_TF: float
    g11: float
    g22: float
    g12: float
    I2: float
    I3: float
    U11: float
    U22: float
    U12: float
    chi: float
    mu_stored: float
    theta: float
    K2_12_derived: float
    Omega_lin: float = 0.0
    notes: tuple = field(default=("rotating frame: linear Jz term removed",
                                  "overlap integrals from Thomas-Fermi profile"))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["notes"] = list(self.notes)
        return d


def coupling(a: float, mass: float) -> float:
    """Contact coupling g = 4 pi hbar^2 a / m."""
    return 4.0 * math.pi * HBAR**2 * a / mass


def stored_excitation(mu_in: float, eta_write: float, zeta_spatial: float, N0: float) -> float:
    return min(eta_write * zeta_spatial * mu_in, float(N0))


def tilt_angle(mu_stored: float, N0: float) -> float:
    return 2.0 * math.asin(math.sqrt(mu_stored / N0))


def derive_constants(cfg: SimConfig) -> DerivedParams:
    R = cfg.d_TF / 2.0
    ov = overlap_integrals(R)
    g11, g22, g12 = (coupling(a, cfg.mass) for a in (cfg.a11, cfg.a22, cfg.a12_re))
    U11, U22, U12 = g11 * ov.I2, g22 * ov.I2, g12 * ov.I2
    mu_stored = stored_excitation(cfg.mu_in, cfg.eta_write, cfg.zeta_spatial, cfg.N0)
    return DerivedParams(
        J=cfg.N0 / 2.0,
        R_TF=R,
        g11=g11, g22=g22, g12=g12,
        I2=ov.I2, I3=ov.I3,
        U11=U11, U22=U22, U12=U12,
        chi=(U11 + U22 - 2.0 * U12) / (2.0 * HBAR),
        mu_stored=mu_stored,
        theta=tilt_angle(mu_stored, cfg.N0),
        K2_12_derived=8.0 * math.pi * HBAR / cfg.mass * abs(cfg.a12_im),
    )


def loss_coefficients(cfg: SimConfig, derived: DerivedParams | None = None) -> LossCoefficients:
    """Loss set used by the population ODE; all zero when losses are disabled."""
    if not cfg.loss_enabled:
        return LossCoefficients()
    if derived is None:
        derived = derive_constants(cfg)
    mixed = math.sqrt(cfg.K3_111 * cfg.K3_222)
    return LossCoefficients(
        K1_1=cfg.K1_1, K1_2=cfg.K1_2,
        K2_11=cfg.K2_11, K2_22=cfg.K2_22, K2_12=derived.K2_12_derived,
        K3_111=cfg.K3_111, K3_222=cfg.K3_222,
        K3_112=mixed if cfg.K3_112 is None else cfg.K3_112,
        K3_122=mixed if cfg.K3_122 is None else cfg.K3_122,
    )
