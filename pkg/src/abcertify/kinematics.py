"""Free-flight kinematics of the Gaussian beam packet.

A packet of initial width ``sigma`` moving along the z axis with
momentum ``mv`` spreads as it propagates; everything below is a
function of the inverse transverse width

    rho(sigma, z) = sigma*mv / sqrt(sigma^4 (mv)^2 + z^2),

evaluated at the packet centre's travelled distance z.  The module
provides the spread profile itself, axis-window Gaussian integrals in
the co-moving frame, the distance at which the spread crosses a given
threshold, and the pointwise quantities (density at the ring, miss
probability, 99%-mass radius, opening angle) used by the report tables.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple, Union

import numpy as np

from .config import ExperimentConfig
from .xreal import XReal

__all__ = [
    "rho",
    "theta_inv",
    "gaussian_window",
    "weighted_window",
    "z_crossing",
    "z_crossing_vec",
    "z_crossing_pair",
    "r_pair",
    "z_of_sigma",
    "evolved_density",
    "hole_miss_probability",
    "packet_radius",
    "capture_fraction",
    "opening_angle_deg",
    "tail_exp_bound",
    "tail_sq_bound",
]

_SQRT_PI = math.sqrt(math.pi)

# 99% of a 3-d Gaussian's mass lies within this many widths of centre.
RADIUS_FACTOR = 2.382


def rho(sigma: float, mv: float, z: float) -> float:
    """Inverse transverse width of the spread packet at distance z."""
    return sigma * mv / math.hypot(sigma * sigma * mv, z)


def theta_inv(sigma: float, mv: float, z: float, s: float, zeta: float) -> float:
    """Rescaled co-moving coordinate (zeta - s) * rho(sigma, z)."""
    return (zeta - s) * rho(sigma, mv, z)


def _erf_diff(l: float, u: float) -> float:
    """erf(u) - erf(l) with tail-safe cancellation (l <= u)."""
    if l >= 0.0 and u >= 0.0:
        return math.erfc(l) - math.erfc(u)
    if l <= 0.0 and u <= 0.0:
        return math.erfc(-u) - math.erfc(-l)
    return math.erf(u) - math.erf(l)


def gaussian_window(
    sigma: float, mv: float, z: float, s: float, zeta: float
) -> float:
    """integral of exp(-tau^2) over the packet's axial window.

    The limits are theta_inv(sigma, z, s, -zeta) .. theta_inv(sigma, z,
    z, zeta); closed form via erf.  Bounded by sqrt(pi).
    """
    l = theta_inv(sigma, mv, z, s, -zeta)
    u = theta_inv(sigma, mv, z, z, zeta)
    if u <= l:
        return 0.0
    return 0.5 * _SQRT_PI * _erf_diff(l, u)


def weighted_window(
    sigma: float, mv: float, z: float, s: float, zeta: float
) -> float:
    """Same window as :func:`gaussian_window` with integrand tau^2 exp(-tau^2).

    Closed form: (sqrt(pi)/4)(erf(u)-erf(l)) - (u exp(-u^2) - l exp(-l^2))/2.
    Bounded by sqrt(pi)/2.
    """
    l = theta_inv(sigma, mv, z, s, -zeta)
    u = theta_inv(sigma, mv, z, z, zeta)
    if u <= l:
        return 0.0
    a = 0.25 * _SQRT_PI * _erf_diff(l, u)
    b = 0.5 * (u * math.exp(-u * u) - l * math.exp(-l * l))
    return a - b


# ----------------------------------------------------------------------
# threshold crossings of (z - zeta) * rho(sigma, z)
# ----------------------------------------------------------------------


def _crossing_closed_form(omega_inv, smv, sigma, zeta):
    """Root of (z - zeta) * rho(sigma, z) = omega_inv (works on arrays)."""
    A = smv * smv
    D = A - omega_inv * omega_inv
    return (A * zeta + smv * omega_inv * np.sqrt(sigma * sigma * D + zeta * zeta)) / D


def z_crossing(
    omega_inv: float, sigma: float, mv: float, zeta: float
) -> float:
    """Distance z > zeta at which (z - zeta) * rho(sigma, z) = omega_inv.

    Requires 0 < omega_inv < sigma*mv (the product approaches sigma*mv
    from below as z grows, so larger targets are never reached).  The
    algebraic root is polished with one Newton step; the residual is
    kept below 1e-10 relative to omega_inv.
    """
    smv = sigma * mv
    if not 0.0 < omega_inv < smv:
        raise ValueError(
            f"need 0 < omega_inv < sigma*mv, got omega_inv={omega_inv!r}, "
            f"sigma*mv={smv!r}"
        )
    z0 = _crossing_closed_form(omega_inv, smv, sigma, float(zeta))
    z = _newton_polish(np.asarray([z0]), omega_inv, sigma, mv, zeta)[0]
    return float(z)


def _newton_polish(z, omega_inv, sigma, mv, zeta):
    """One Newton step on F(z) = (z - zeta) rho(z) - omega_inv (arrays ok)."""
    smv = sigma * mv
    s2mv = sigma * sigma * mv
    den2 = s2mv * s2mv + z * z
    r = smv / np.sqrt(den2)
    f0 = (z - zeta) * r - omega_inv
    fp = r * (1.0 - (z - zeta) * z / den2)
    with np.errstate(divide="ignore", invalid="ignore"):
        z1 = np.where(fp > 0.0, z - f0 / fp, z)
    den2b = s2mv * s2mv + z1 * z1
    f1 = (z1 - zeta) * (smv / np.sqrt(den2b)) - omega_inv
    return np.where(np.abs(f1) <= np.abs(f0), z1, z)


def z_crossing_vec(
    omega_inv: np.ndarray, sigma: float, mv: float, zeta: float
) -> np.ndarray:
    """Vectorised :func:`z_crossing` over an array of thresholds."""
    omega_inv = np.asarray(omega_inv, dtype=np.float64)
    smv = sigma * mv
    if omega_inv.size and (omega_inv.min() <= 0.0 or omega_inv.max() >= smv):
        raise ValueError("thresholds must lie strictly inside (0, sigma*mv)")
    z0 = _crossing_closed_form(omega_inv, smv, sigma, float(zeta))
    return _newton_polish(z0, omega_inv, sigma, mv, zeta)


def z_crossing_pair(
    omega_inv: float, sigma_a: float, sigma_b: float, mv: float, zeta: float
) -> float:
    """Larger of the two single-width crossings (covers both widths)."""
    return max(
        z_crossing(omega_inv, sigma_a, mv, zeta),
        z_crossing(omega_inv, sigma_b, mv, zeta),
    )


def r_pair(sigma_a: float, sigma_b: float, r1: float, mv: float) -> float:
    """min over the two widths of sigma*mv*sqrt(r1^2 - sigma^2)."""
    vals = []
    for s in (sigma_a, sigma_b):
        if s >= r1:
            raise ValueError(f"width {s:g} must be below the hole radius {r1:g}")
        vals.append(s * mv * math.sqrt(r1 * r1 - s * s))
    return min(vals)


def z_of_sigma(sigma: float, cfg: ExperimentConfig) -> float:
    """Capped-threshold crossing distance for a packet of width sigma."""
    return z_crossing(cfg.omega_inv(sigma), sigma, cfg.mv, cfg.h(sigma))


# ----------------------------------------------------------------------
# pointwise packet quantities
# ----------------------------------------------------------------------


def evolved_density(
    sigma: float, mv: float, zeta: float, x: Union[Tuple[float, float, float], np.ndarray]
) -> float:
    """|psi|^2 of the freely spread packet, centre at (0, 0, zeta)."""
    r = rho(sigma, mv, zeta)
    x = np.asarray(x, dtype=np.float64)
    d2 = float((x[0]) ** 2 + (x[1]) ** 2 + (x[2] - zeta) ** 2)
    return math.pi ** (-1.5) * r ** 3 * math.exp(-d2 * r * r)


def hole_miss_probability(
    sigma: float, mv: float, zeta: float, r1: float
) -> XReal:
    """Upper bound on the mass outside radius r1 at centre height zeta."""
    a = r1 * rho(sigma, mv, zeta)
    return XReal.exp_neg(a * a)


def packet_radius(sigma: float) -> float:
    """Radius holding ~99% of the packet's initial probability mass."""
    return RADIUS_FACTOR * sigma


def capture_fraction(t: float) -> float:
    """Mass of a unit 3-d Gaussian within t widths: erf(t) - 2t e^{-t^2}/sqrt(pi)."""
    return math.erf(t) - 2.0 * t * math.exp(-t * t) / _SQRT_PI


def opening_angle_deg(sigma: float, mv: float) -> Optional[float]:
    """Full apex angle (degrees) of the 99%-mass cone, None if undefined."""
    arg = RADIUS_FACTOR / (sigma * mv)
    if arg > 1.0:
        return None
    return math.degrees(2.0 * math.asin(arg))


# ----------------------------------------------------------------------
# elementary Gaussian tail bounds (all limits nonpositive, c3 <= c2 <= c1)
# ----------------------------------------------------------------------


def tail_exp_bound(c1: float, c2: float, c3: float) -> float:
    """Bound exp(-c1^2) * sqrt(pi)/2 for the tail integral of exp(-z^2)."""
    if not (c3 <= c2 <= c1 <= 0.0):
        raise ValueError("need c3 <= c2 <= c1 <= 0")
    return math.exp(-c1 * c1) * _SQRT_PI / 2.0


def tail_sq_bound(c1: float, c2: float, c3: float) -> float:
    """Bound exp(-c1^2) * (-c2/2 + sqrt(pi)/4) for the z^2 exp(-z^2) tail."""
    if not (c3 <= c2 <= c1 <= 0.0):
        raise ValueError("need c3 <= c2 <= c1 <= 0")
    return math.exp(-c1 * c1) * (-c2 / 2.0 + _SQRT_PI / 4.0)
