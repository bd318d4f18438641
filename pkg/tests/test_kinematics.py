"""Wave-packet kinematics: windows, crossings, densities, tail bounds."""

import math

import numpy as np
import pytest

from abcertify.kinematics import (
    RADIUS_FACTOR,
    capture_fraction,
    evolved_density,
    gaussian_window,
    hole_miss_probability,
    opening_angle_deg,
    packet_radius,
    r_pair,
    rho,
    tail_exp_bound,
    tail_sq_bound,
    weighted_window,
    z_crossing,
    z_crossing_pair,
    z_crossing_vec,
    z_of_sigma,
)
from oracles import (
    capture_fraction_quad,
    gaussian_window_quad,
    quad_tight,
    rho_ref,
    weighted_window_quad,
)

_SQRT_PI = math.sqrt(math.pi)


def _window_tuples(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        sigma = rng.uniform(0.3, 3.0)
        mv = rng.uniform(2.0, 10.0)
        zeta = rng.uniform(0.0, 0.5)
        z = rng.uniform(0.0, 8.0)
        s = z + rng.uniform(0.0, 6.0)
        out.append((sigma, mv, z, s, zeta))
    return out


# ----------------------------------------------------------------------
# spread profile
# ----------------------------------------------------------------------


def test_rho_matches_reference_and_decays():
    rng = np.random.default_rng(3)
    for _ in range(300):
        sigma = rng.uniform(0.1, 5.0)
        mv = rng.uniform(1.0, 20.0)
        z = rng.uniform(0.0, 50.0)
        assert rho(sigma, mv, z) == pytest.approx(rho_ref(sigma, mv, z), rel=1e-15)
    assert rho(2.0, 5.0, 0.0) == pytest.approx(0.5, rel=1e-15)
    zs = np.linspace(0.0, 30.0, 200)
    vals = [rho(1.0, 4.0, z) for z in zs]
    assert all(b < a for a, b in zip(vals, vals[1:]))


# ----------------------------------------------------------------------
# window integrals against quadrature
# ----------------------------------------------------------------------


def test_gaussian_window_against_quadrature():
    for sigma, mv, z, s, zeta in _window_tuples(200, seed=21):
        got = gaussian_window(sigma, mv, z, s, zeta)
        ref = gaussian_window_quad(sigma, mv, z, s, zeta)
        assert got == pytest.approx(ref, abs=1e-12)
        assert 0.0 <= got <= _SQRT_PI


def test_weighted_window_against_quadrature():
    for sigma, mv, z, s, zeta in _window_tuples(200, seed=22):
        got = weighted_window(sigma, mv, z, s, zeta)
        ref = weighted_window_quad(sigma, mv, z, s, zeta)
        assert got == pytest.approx(ref, abs=1e-12)
        assert 0.0 <= got <= _SQRT_PI / 2.0


def test_window_vanishes_when_limits_meet():
    # the two integration limits coincide at z = s + 2*zeta
    assert gaussian_window(2.0, 5.0, 1.6, 1.0, 0.3) == 0.0
    assert weighted_window(2.0, 5.0, 1.6, 1.0, 0.3) == 0.0


# ----------------------------------------------------------------------
# crossing solver
# ----------------------------------------------------------------------


def _crossing_tuples(n, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        sigma = rng.uniform(0.2, 4.0)
        mv = rng.uniform(1.0, 12.0)
        zeta = rng.uniform(0.0, 1.0)
        omega = rng.uniform(1e-4, 0.999) * sigma * mv
        out.append((omega, sigma, mv, zeta))
    return out


def test_crossing_residual():
    for omega, sigma, mv, zeta in _crossing_tuples(500, seed=31):
        z = z_crossing(omega, sigma, mv, zeta)
        residual = (z - zeta) * rho(sigma, mv, z) - omega
        assert abs(residual) <= 1e-10 * omega
        assert z > zeta


def test_crossing_monotone_in_omega():
    rng = np.random.default_rng(32)
    for _ in range(200):
        sigma = rng.uniform(0.2, 4.0)
        mv = rng.uniform(1.0, 12.0)
        zeta = rng.uniform(0.0, 1.0)
        omegas = np.sort(rng.uniform(1e-4, 0.999, 8)) * sigma * mv
        zs = z_crossing_vec(omegas, sigma, mv, zeta)
        assert all(b > a for a, b in zip(zs, zs[1:]))


def test_crossing_small_omega_limit():
    zeta = 0.3
    z = z_crossing(1e-12, 2.0, 5.0, zeta)
    assert z == pytest.approx(zeta, abs=1e-11)


def test_crossing_vec_matches_scalar():
    omegas = np.array([0.5, 1.5, 2.0, 7.0])
    vec = z_crossing_vec(omegas, 2.0, 5.0, 0.3)
    scal = [z_crossing(w, 2.0, 5.0, 0.3) for w in omegas]
    assert np.array_equal(vec, np.array(scal))


def test_crossing_domain_errors():
    for bad in (0.0, -1.0, 10.0, 15.0):
        with pytest.raises(ValueError):
            z_crossing(bad, 2.0, 5.0, 0.3)


def test_crossing_envelope_in_sigma():
    # the crossing location over [sigma2, sigma1] is bounded by its ends
    rng = np.random.default_rng(33)
    for _ in range(200):
        mv = rng.uniform(1.0, 12.0)
        zeta = rng.uniform(0.0, 1.0)
        lo, mid, hi = np.sort(rng.uniform(0.2, 4.0, 3))
        omega = rng.uniform(1e-3, 0.999) * lo * mv
        z_mid = z_crossing(omega, mid, mv, zeta)
        z_ends = max(
            z_crossing(omega, lo, mv, zeta), z_crossing(omega, hi, mv, zeta)
        )
        assert z_mid <= z_ends * (1.0 + 1e-9)


def test_pair_helpers():
    assert z_crossing_pair(1.5, 2.0, 2.5, 5.0, 0.3) == max(
        z_crossing(1.5, 2.0, 5.0, 0.3), z_crossing(1.5, 2.5, 5.0, 0.3)
    )
    expect = min(
        5.0 * 1.0 * math.sqrt(4.0 - 1.0), 5.0 * 1.5 * math.sqrt(4.0 - 2.25)
    )
    assert r_pair(1.0, 1.5, 2.0, 5.0) == pytest.approx(expect, rel=1e-14)
    with pytest.raises(ValueError):
        r_pair(3.0, 1.0, 2.0, 5.0)


def test_z_of_sigma_solves_config_crossing(cfg):
    for s in (1e-8, 1e-7, 1e-6, 1e-5):
        z = z_of_sigma(s, cfg)
        zeta = cfg.h(s)
        residual = (z - zeta) * rho(s, cfg.mv, z) - cfg.omega_inv(s)
        assert abs(residual) <= 1e-10 * cfg.omega_inv(s)


# ----------------------------------------------------------------------
# densities and derived probabilities
# ----------------------------------------------------------------------


def test_evolved_density_point_value():
    got = evolved_density(2.0, 5.0, 1.0, (0.3, 0.1, 1.2))
    r = rho(2.0, 5.0, 1.0)
    d2 = 0.09 + 0.01 + 0.04
    expect = math.pi ** -1.5 * r**3 * math.exp(-d2 * r * r)
    assert got == pytest.approx(expect, rel=1e-14)


def test_evolved_density_normalises():
    for sigma, zeta in ((1.0, 0.0), (2.0, 3.0), (0.5, 8.0)):
        r = rho(sigma, 5.0, zeta)
        mass = 4.0 * math.pi * quad_tight(
            lambda u: u * u * evolved_density(sigma, 5.0, zeta, (u, 0.0, zeta)),
            0.0,
            14.0 / r,
        )
        assert mass == pytest.approx(1.0, rel=1e-10)


def test_hole_miss_probability(cfg):
    out = hole_miss_probability(1e-6, cfg.mv, 0.01, cfg.r1)
    expect = -((cfg.r1 * rho(1e-6, cfg.mv, 0.01)) ** 2)
    assert out.log_mag == expect


def test_packet_radius_and_capture():
    assert RADIUS_FACTOR == 2.382
    assert packet_radius(3e-6) == pytest.approx(2.382 * 3e-6, rel=1e-15)
    got = capture_fraction(RADIUS_FACTOR)
    assert 0.989 <= got <= 0.991
    assert got == pytest.approx(capture_fraction_quad(RADIUS_FACTOR), rel=1e-12)
    assert capture_fraction(10.0) == pytest.approx(1.0, rel=1e-12)


def test_opening_angle(cfg):
    sigma = 1.6001e-6 * cfg.r1
    angle = opening_angle_deg(sigma, cfg.mv)
    half = math.degrees(math.asin(RADIUS_FACTOR / (sigma * cfg.mv)))
    assert angle == pytest.approx(2.0 * half, rel=1e-12)
    assert opening_angle_deg(1e-10, cfg.mv) is None


# ----------------------------------------------------------------------
# one-sided tail bounds
# ----------------------------------------------------------------------


def test_tail_bounds_dominate_quadrature():
    rng = np.random.default_rng(41)
    for _ in range(300):
        c3, c2, c1 = np.sort(rng.uniform(-6.0, 0.0, 3))
        exp_val = quad_tight(lambda t: math.exp(-t * t), c3, c2)
        sq_val = quad_tight(lambda t: t * t * math.exp(-t * t), c3, c2)
        assert exp_val <= tail_exp_bound(c1, c2, c3) * (1.0 + 1e-12)
        assert sq_val <= tail_sq_bound(c1, c2, c3) * (1.0 + 1e-12)


def test_tail_bounds_reject_bad_ordering():
    with pytest.raises(ValueError):
        tail_exp_bound(-1.0, -0.5, -1.5)
    with pytest.raises(ValueError):
        tail_sq_bound(0.5, -1.0, -1.5)
