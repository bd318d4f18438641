"""Experiment description: magnet geometry, electron beam, derived cutoffs.

All lengths are in centimetres and momenta in 1/cm (CGS with hbar = 1),
matching the published Tonomura-experiment data this tool re-checks.
Two toroidal-magnet geometries and three accelerating voltages are
built in; every number can be overridden through a config file.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, Mapping, Optional, Tuple

__all__ = [
    "Magnet",
    "Beam",
    "ExperimentConfig",
    "MAGNETS",
    "BEAMS",
    "get_config",
    "parse_config_file",
    "apply_overrides",
]

_SQRT_2000 = math.sqrt(2000.0)
_RATE = 33.0 / 34.0  # decay-rate factor in the width-dependent exponential


@dataclass(frozen=True)
class Magnet:
    """Toroidal magnet: inner/outer hole radii and half-height."""

    name: str
    r1_tilde: float  # inner radius of the ring (hole radius), cm
    r2_tilde: float  # outer radius of the ring, cm
    h_tilde: float   # half the ring thickness along the beam axis, cm

    def __post_init__(self):
        if not (0.0 < self.r1_tilde < self.r2_tilde):
            raise ValueError(
                f"need 0 < r1_tilde < r2_tilde, got {self.r1_tilde!r}, {self.r2_tilde!r}"
            )
        if self.h_tilde <= 0.0:
            raise ValueError(f"h_tilde must be positive, got {self.h_tilde!r}")


@dataclass(frozen=True)
class Beam:
    """Electron beam at a fixed accelerating voltage."""

    name: str
    energy_kev: float
    v: float   # relativistic speed, cm/s
    mv: float  # relativistic momentum, 1/cm

    def __post_init__(self):
        if self.v <= 0.0 or self.mv <= 0.0:
            raise ValueError("beam speed and momentum must be positive")


# Built-in hardware.  k1/k2 are the two magnet sizes used in the
# published runs; e1/e2/e3 the three beam energies.
MAGNETS: Dict[str, Magnet] = {
    "k1": Magnet("k1", r1_tilde=1.5e-4, r2_tilde=2.5e-4, h_tilde=1e-6),
    "k2": Magnet("k2", r1_tilde=1.75e-4, r2_tilde=2.75e-4, h_tilde=1e-6),
}

BEAMS: Dict[str, Beam] = {
    "e1": Beam("e1", energy_kev=150.0, v=2.2971e10, mv=1.9842e10),
    "e2": Beam("e2", energy_kev=100.0, v=1.8755e10, mv=1.6201e10),
    "e3": Beam("e3", energy_kev=80.0, v=1.6775e10, mv=1.4491e10),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete parameter set for one certification run.

    Derived smoothing widths follow the standard selections
    (``eps_tilde`` = 0.5% of the ring's radial extent, ``delta_tilde`` =
    1% of its half-height, ``eps`` = 2% of the hole radius); the
    ``*_scale`` knobs let parameter sweeps stretch them.
    """

    magnet: Magnet
    beam: Beam
    flux: float = math.pi          # enclosed flux (modulo 2*pi), |flux| < 2*pi
    eps_scale: float = 1.0         # multiplies eps (fattening of the ring)
    delta_scale: float = 1.0       # multiplies delta(sigma) (axial cutoff width)
    log_ten: float = field(default_factory=lambda: math.log(10.0))

    def __post_init__(self):
        if not abs(self.flux) < 2.0 * math.pi:
            raise ValueError(f"|flux| must be < 2*pi, got {self.flux!r}")
        if self.eps_scale <= 0.0 or self.delta_scale <= 0.0:
            raise ValueError("eps_scale and delta_scale must be positive")
        if self.log_ten <= 0.0:
            raise ValueError("log_ten must be positive")
        if self.eps >= self.magnet.r1_tilde:
            raise ValueError(
                f"eps={self.eps:g} swallows the hole (r1_tilde="
                f"{self.magnet.r1_tilde:g}); reduce eps_scale"
            )

    # -- fixed smoothing widths -------------------------------------

    @property
    def eps_tilde(self) -> float:
        """Radial smoothing width of the field profile."""
        m = self.magnet
        return (m.r2_tilde - m.r1_tilde) / 200.0

    @property
    def delta_tilde(self) -> float:
        """Axial smoothing width of the field profile."""
        return self.magnet.h_tilde / 100.0

    @property
    def eps(self) -> float:
        """Radial fattening of the magnet used by the space cutoff."""
        return self.eps_scale * self.magnet.r1_tilde / 50.0

    # -- fattened-magnet geometry ------------------------------------

    @property
    def r1(self) -> float:
        """Inner radius of the fattened magnet (effective hole radius)."""
        return self.magnet.r1_tilde - self.eps

    @property
    def r2(self) -> float:
        """Outer radius of the fattened magnet."""
        return self.magnet.r2_tilde + self.eps

    def delta(self, sigma: float) -> float:
        """Axial fattening for a packet of width sigma."""
        return self.delta_scale * max(10.0 * sigma, self.magnet.h_tilde)

    def h(self, sigma: float) -> float:
        """Half-height of the fattened magnet for width sigma."""
        return self.magnet.h_tilde + self.delta(sigma)

    # -- beam-dependent derived quantities ---------------------------

    @property
    def mv(self) -> float:
        return self.beam.mv

    @property
    def sigma0(self) -> float:
        """Width at which the tail-rate cap 2000 starts to bind."""
        return math.sqrt(34.0 / 33.0) * _SQRT_2000 / self.beam.mv

    @property
    def sigma_min(self) -> float:
        """Smallest width covered by the sweep certificates."""
        return 4.5 / self.beam.mv

    @property
    def sigma_max(self) -> float:
        """Largest width covered by the sweep certificates."""
        return self.magnet.r1_tilde / 2.0

    def omega_inv(self, sigma: float) -> float:
        """Capped tail-cut parameter (an inverse width along the axis)."""
        return min(math.sqrt(_RATE) * sigma * self.beam.mv, _SQRT_2000)

    def s1(self, sigma: float) -> float:
        """Geometric crossover scale sigma*mv*sqrt(r1^2 - sigma^2)."""
        r1 = self.r1
        if sigma >= r1:
            raise ValueError(f"sigma={sigma:g} must be below the hole radius {r1:g}")
        return sigma * self.beam.mv * math.sqrt(r1 * r1 - sigma * sigma)

    def rate_exponent(self, sigma: float) -> float:
        """(33/34) * (sigma*mv)^2 / 2, the width-dependent decay rate."""
        smv = sigma * self.beam.mv
        return _RATE * smv * smv / 2.0


def get_config(
    magnet: str = "k2",
    energy: str = "e1",
    overrides: Optional[Mapping[str, str]] = None,
) -> ExperimentConfig:
    """Build a configuration from built-in hardware names plus overrides."""
    try:
        mag = MAGNETS[magnet.lower()]
    except KeyError:
        raise ValueError(f"unknown magnet {magnet!r}; choose from {sorted(MAGNETS)}")
    try:
        beam = BEAMS[energy.lower()]
    except KeyError:
        raise ValueError(f"unknown energy {energy!r}; choose from {sorted(BEAMS)}")
    cfg = ExperimentConfig(magnet=mag, beam=beam)
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg


def parse_config_file(path: str) -> Dict[str, str]:
    """Read ``key = value`` lines; '#' starts a comment, blanks ignored."""
    out: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


_FLOAT_KEYS = {
    "magnet.r1_tilde",
    "magnet.r2_tilde",
    "magnet.h_tilde",
    "beam.energy_kev",
    "beam.v",
    "beam.mv",
    "flux",
    "params.eps_scale",
    "params.delta_scale",
    "partition.log_ten",
}


def apply_overrides(
    cfg: ExperimentConfig, overrides: Mapping[str, str]
) -> ExperimentConfig:
    """Return a new config with the given dotted-key overrides applied."""
    mag_kw: Dict[str, float] = {}
    beam_kw: Dict[str, float] = {}
    top_kw: Dict[str, float] = {}
    for key, raw in overrides.items():
        if key not in _FLOAT_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        try:
            value = float(raw)
        except (TypeError, ValueError):
            raise ValueError(f"config key {key!r}: expected a number, got {raw!r}")
        section, _, leaf = key.partition(".")
        if section == "magnet":
            mag_kw[leaf] = value
        elif section == "beam":
            beam_kw[leaf] = value
        elif section == "params":
            top_kw[leaf] = value
        elif section == "partition":
            top_kw["log_ten"] = value
        else:  # flux
            top_kw["flux"] = value
    mag = replace(cfg.magnet, name=cfg.magnet.name + "*", **mag_kw) if mag_kw else cfg.magnet
    beam = replace(cfg.beam, name=cfg.beam.name + "*", **beam_kw) if beam_kw else cfg.beam
    return replace(cfg, magnet=mag, beam=beam, **top_kw)
