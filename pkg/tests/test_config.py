"""Experiment data sets: literals, derived geometry, and overrides."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from abcertify.config import (
    BEAMS,
    MAGNETS,
    Beam,
    ExperimentConfig,
    apply_overrides,
    get_config,
    parse_config_file,
)
from abcertify.kinematics import rho

import published


def test_magnet_literals():
    assert set(MAGNETS) == {"k1", "k2"}
    k1, k2 = MAGNETS["k1"], MAGNETS["k2"]
    assert (k1.r1_tilde, k1.r2_tilde, k1.h_tilde) == (1.5e-4, 2.5e-4, 1e-6)
    assert (k2.r1_tilde, k2.r2_tilde, k2.h_tilde) == (1.75e-4, 2.75e-4, 1e-6)


def test_beam_literals():
    assert set(BEAMS) == {"e1", "e2", "e3"}
    assert (BEAMS["e1"].energy_kev, BEAMS["e1"].v, BEAMS["e1"].mv) == (
        150.0,
        2.2971e10,
        1.9842e10,
    )
    assert (BEAMS["e2"].energy_kev, BEAMS["e2"].v, BEAMS["e2"].mv) == (
        100.0,
        1.8755e10,
        1.6201e10,
    )
    assert (BEAMS["e3"].energy_kev, BEAMS["e3"].v, BEAMS["e3"].mv) == (
        80.0,
        1.6775e10,
        1.4491e10,
    )


def test_derived_geometry(cfg):
    assert cfg.eps_tilde == pytest.approx(5e-7, rel=1e-14)
    assert cfg.delta_tilde == pytest.approx(1e-8, rel=1e-14)
    assert cfg.eps == pytest.approx(3.5e-6, rel=1e-14)
    assert cfg.r1 == pytest.approx(1.715e-4, rel=1e-14)
    assert cfg.r2 == pytest.approx(2.785e-4, rel=1e-14)
    assert cfg.mv == 1.9842e10
    assert cfg.sigma_max == pytest.approx(8.75e-5, rel=1e-14)


def test_width_anchors(cfg):
    assert cfg.sigma_min == pytest.approx(4.5 / cfg.mv, rel=1e-14)
    assert cfg.sigma0 == pytest.approx(published.FROZEN_SIGMA0_K2E1, rel=1e-12)
    # defining equation of sigma0: rate exponent equals 1000
    assert cfg.rate_exponent(cfg.sigma0) == pytest.approx(1000.0, rel=1e-12)


def test_axial_fattening_piecewise(cfg):
    h_tilde = cfg.magnet.h_tilde
    # at or below h_tilde/10 the fattening sits exactly on the floor
    for s in (1e-10, 1e-8, h_tilde / 10.0):
        assert cfg.delta(s) == h_tilde
    for s in (2e-7, 1e-6, 1e-5):
        assert cfg.delta(s) == pytest.approx(10.0 * s, rel=1e-14)
        assert cfg.h(s) == pytest.approx(h_tilde + 10.0 * s, rel=1e-14)


def test_slab_height_monotone_and_above_floor(cfg):
    grid = np.geomspace(cfg.sigma_min, cfg.sigma_max, 2000)
    hs = [cfg.h(s) for s in grid]
    assert all(b >= a for a, b in zip(hs, hs[1:]))
    assert all(h > cfg.magnet.h_tilde for h in hs)


def test_spread_cap(cfg):
    cap = math.sqrt(2000.0)
    assert cfg.omega_inv(1e-5) == cap
    s = 1e-9
    assert cfg.omega_inv(s) == pytest.approx(
        math.sqrt(33.0 / 34.0) * s * cfg.mv, rel=1e-14
    )


def test_crossover_scale_defining_equation(cfg):
    # r1 * rho(sigma, s1(sigma)) == 1 identically; check the float residual
    grid = np.geomspace(cfg.sigma_min, 0.999 * cfg.r1, 10_000)
    worst = max(
        abs(cfg.r1 * rho(s, cfg.mv, cfg.s1(s)) - 1.0) for s in grid
    )
    assert worst < 1e-12


@given(st.floats(min_value=1e-10, max_value=8e-5))
def test_rate_exponent_formula(s):
    cfg = get_config("k2", "e1")
    expect = (33.0 / 34.0) * (s * cfg.mv) ** 2 / 2.0
    assert cfg.rate_exponent(s) == pytest.approx(expect, rel=1e-13)


# ----------------------------------------------------------------------
# lookup, validation, overrides
# ----------------------------------------------------------------------


def test_get_config_case_insensitive():
    a = get_config("K2", "E1")
    b = get_config("k2", "e1")
    assert a == b


def test_get_config_unknown_names():
    with pytest.raises(ValueError):
        get_config("k3", "e1")
    with pytest.raises(ValueError):
        get_config("k1", "e9")


def test_flux_validation(cfg):
    with pytest.raises(ValueError):
        ExperimentConfig(magnet=cfg.magnet, beam=cfg.beam, flux=7.0)
    ok = ExperimentConfig(magnet=cfg.magnet, beam=cfg.beam, flux=-6.28)
    assert ok.flux == -6.28


def test_scale_validation(cfg):
    with pytest.raises(ValueError):
        ExperimentConfig(magnet=cfg.magnet, beam=cfg.beam, eps_scale=0.0)
    with pytest.raises(ValueError):
        ExperimentConfig(magnet=cfg.magnet, beam=cfg.beam, delta_scale=-1.0)
    # scaled smoothing must stay inside the inner radius
    with pytest.raises(ValueError):
        ExperimentConfig(magnet=cfg.magnet, beam=cfg.beam, eps_scale=51.0)


def test_beam_validation():
    with pytest.raises(ValueError):
        Beam(name="bad", energy_kev=100.0, v=1.0e10, mv=-1.0)


def test_parse_config_file(config_file):
    path = config_file(
        """
# comment line
flux = 1.5

beam.mv = 2.0e10   # trailing comment
"""
    )
    parsed = parse_config_file(path)
    assert parsed == {"flux": "1.5", "beam.mv": "2.0e10"}


def test_parse_config_file_bad_line(config_file):
    path = config_file("flux 1.5\n")
    with pytest.raises(ValueError) as exc:
        parse_config_file(path)
    assert "line 1" in str(exc.value) or ":1" in str(exc.value)


def test_apply_overrides(cfg):
    out = apply_overrides(
        cfg, {"beam.mv": "2e10", "magnet.r1_tilde": "1.8e-4", "flux": "1.0"}
    )
    assert out.beam.mv == 2e10
    assert out.beam.name == "e1*"
    assert out.magnet.r1_tilde == 1.8e-4
    assert out.magnet.name == "k2*"
    assert out.flux == 1.0
    # the original is untouched
    assert cfg.beam.mv == 1.9842e10


def test_apply_overrides_log_ten(cfg):
    out = apply_overrides(cfg, {"partition.log_ten": "2.5"})
    assert out.log_ten == 2.5


def test_apply_overrides_unknown_key(cfg):
    with pytest.raises(ValueError):
        apply_overrides(cfg, {"beam.charge": "1"})
