"""Pairwise width-interval certificates and the full certification sweep.

For each consecutive pair (mu1, mu2) of a width grid (plus the set's
anchor width mu3), two inequalities are machine-checked: the coupling
constants at mu1 times certified upper bounds of four spreading
integrals must stay below the published allowance (a miss-the-hole
term, a thousandth/ten-millionth of the calibrated spread term, and a
1e-101 slack).  Passing every pair certifies the bound over the whole
width range.

The spreading integrals are bounded by step-function majorants on a
square-root grid: nodes Z_j = sqrt(delta0 * n) partition the packet's
co-moving window, the matching distances x_j are recovered with the
crossing solver, and each subinterval contributes its sup.  All sums
are folded in the extended-range log domain with upward rounding, so
every reported left-hand side is a certified upper bound.

Two pragmatic reductions keep the sweep fast without giving up rigor
(a step-function majorant is valid for *any* increasing node subset,
including the empty one):

* windows whose single-interval majorant already sits below 1e-500 --
  hundreds of orders below every right-hand side -- skip the grid;
* grids larger than ``node_cap`` are thinned by a uniform stride.

Both reductions only make the certified left-hand side larger.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .bounds import calibrated_coefficients, calibrated_poly, ten_pow
from .config import ExperimentConfig
from .fields import coupling_constants
from .kinematics import rho, z_crossing, z_crossing_vec
from .partition import SET_NAMES, sweep_pairs
from .xreal import XReal, fold_add_logs

__all__ = [
    "PairResult",
    "check_pair",
    "sweep",
    "write_csv",
    "CSV_COLUMNS",
    "grid_majorant",
    "majorant_window",
]

_SQRT_PI = math.sqrt(math.pi)
_PI4 = math.pi ** 0.25
_INF = math.inf

# single-interval majorants below this (log10) skip the fine grid
_FLOOR_LOG10 = -500.0
_FLOOR_LOG = _FLOOR_LOG10 * math.log(10.0)

DEFAULT_NODE_CAP = 30_000


# ----------------------------------------------------------------------
# square-root-grid step majorants
# ----------------------------------------------------------------------


@dataclass
class majorant_window:
    """Precomputed geometry of one majorant window.

    ``sigma`` is the spreading width of the integrand, [s, z_cap] the
    integration interval, ``zeta`` the co-moving offset (the fattened
    half-height), and lo/hi the induced window in the rescaled
    variable.
    """

    sigma: float
    mv: float
    zeta: float
    s: float
    z_cap: float
    lo: float
    hi: float
    nodes: np.ndarray  # rescaled grid values Z_j (may be empty)
    x: np.ndarray      # matching distances, s <= x_1 <= ... <= z_cap


def _build_window(
    sigma: float,
    mv: float,
    zeta: float,
    s: float,
    z_cap: float,
    delta0: float,
    node_cap: int,
) -> Optional[majorant_window]:
    """Node layout for one window; None when the interval is empty."""
    if z_cap <= s:
        return None
    lo = (s - zeta) * rho(sigma, mv, s)
    hi = (z_cap - zeta) * rho(sigma, mv, z_cap)
    if hi <= lo:  # degenerate: single interval, no interior nodes
        nodes = np.empty(0)
        x = np.empty(0)
        return majorant_window(sigma, mv, zeta, s, z_cap, lo, hi, nodes, x)

    n_start = math.ceil(lo * lo / delta0)
    while n_start * delta0 < lo * lo and math.sqrt(n_start * delta0) < lo:
        n_start += 1
    if n_start < 1:
        n_start = 1
    n_end = math.floor(hi * hi / delta0)
    while n_end >= n_start and math.sqrt(n_end * delta0) > hi:
        n_end -= 1

    if n_end < n_start:
        nodes = np.empty(0)
        x = np.empty(0)
    else:
        count = n_end - n_start + 1
        stride = max(1, math.ceil(count / node_cap))
        ns = np.arange(n_start, n_end + 1, stride, dtype=np.float64)
        nodes = np.sqrt(ns * delta0)
        # guard against float noise at the window edges
        nodes = nodes[(nodes >= lo) & (nodes <= hi) & (nodes < sigma * mv)]
        x = z_crossing_vec(nodes, sigma, mv, zeta)
        x = np.clip(x, s, z_cap)
        if nodes.size and np.any(np.diff(x) < 0.0):
            raise RuntimeError("grid distances lost monotonicity")
    return majorant_window(sigma, mv, zeta, s, z_cap, lo, hi, nodes, x)


def _single_interval_log(win: majorant_window, r1: float, kind: str) -> float:
    """Log magnitude of the no-interior-nodes majorant for one kind."""
    gap = win.z_cap - win.s
    if gap <= 0.0:
        return -_INF
    rho_end = rho(win.sigma, win.mv, win.z_cap)
    L = np.nextafter(np.log(gap), _INF)
    if kind == "b5":
        pref = 1.0 / math.sqrt(2.0)
        w = math.sqrt(win.hi + _SQRT_PI / 2.0)
        L = np.nextafter(L + np.nextafter(np.log(w), _INF), _INF)
    else:
        pref = _PI4 / math.sqrt(2.0)
        if kind == "b6":
            L = np.nextafter(L + np.nextafter(np.log(r1 * rho_end), _INF), _INF)
    L = np.nextafter(L - win.lo * win.lo / 2.0, _INF)
    if kind != "b3":
        e2 = (r1 * r1 / 2.0) * rho_end * rho_end
        L = np.nextafter(L - e2, _INF)
    L = np.nextafter(L + np.nextafter(np.log(pref), _INF), _INF)
    return float(L)


def grid_majorant(win: Optional[majorant_window], r1: float, kind: str) -> XReal:
    """Certified upper bound of one spreading integral over a window.

    ``kind``:
      b3  plain window integrand;
      b4  with the miss-the-hole weight exp(-(r1^2/2) rho^2);
      b5  the momentum-weighted window (carries sqrt(Z_j + sqrt(pi)/2));
      b6  b4 with an extra r1*rho factor (requires r1 rho >= 1 on the
          window, i.e. the window must end below the crossover scale).
    """
    if win is None:
        return XReal.zero()
    if win.nodes.size == 0:
        lm = _single_interval_log(win, r1, kind)
        return XReal.zero() if lm == -_INF else XReal.from_log(lm)

    nodes, x = win.nodes, win.x
    sigma, mv, zeta = win.sigma, win.mv, win.zeta
    gaps = np.empty(nodes.size + 1)
    gaps[0] = x[0] - win.s
    gaps[1:-1] = np.diff(x)
    gaps[-1] = win.z_cap - x[-1]
    # decay exponents: window edge for the first cell, then the nodes
    exp1 = np.empty(nodes.size + 1)
    exp1[0] = win.lo * win.lo / 2.0
    exp1[1:] = nodes * nodes / 2.0
    # right endpoints of the cells carry the sup of the rho-weights
    x_right = np.empty(nodes.size + 1)
    x_right[:-1] = x
    x_right[-1] = win.z_cap
    rho_right = sigma * mv / np.hypot(sigma * sigma * mv, x_right)

    with np.errstate(divide="ignore"):
        L = np.nextafter(np.log(gaps), _INF)
        if kind == "b5":
            pref = 1.0 / math.sqrt(2.0)
            w = np.empty(nodes.size + 1)
            w[:-1] = nodes
            w[-1] = win.hi
            wlog = np.nextafter(np.log(np.sqrt(w + _SQRT_PI / 2.0)), _INF)
            L = np.nextafter(L + wlog, _INF)
        else:
            pref = _PI4 / math.sqrt(2.0)
            if kind == "b6":
                wlog = np.nextafter(np.log(r1 * rho_right), _INF)
                L = np.nextafter(L + wlog, _INF)
        L = np.nextafter(L - exp1, _INF)
        if kind != "b3":
            e2 = (r1 * r1 / 2.0) * rho_right * rho_right
            L = np.nextafter(L - e2, _INF)
    L[gaps == 0.0] = -_INF

    total = fold_add_logs(np.ascontiguousarray(L))
    if total == -_INF:
        return XReal.zero()
    return XReal.from_log(total).mul(XReal.from_f64(pref))


# ----------------------------------------------------------------------
# down-rounded helpers for the allowance (right-hand) side
# ----------------------------------------------------------------------


def _down_f64(v: float) -> XReal:
    if v <= 0.0:
        return XReal.zero()
    return XReal.from_log(math.nextafter(math.log(v), -_INF))


def _down_mul(a: XReal, b: XReal) -> XReal:
    if a.is_zero or b.is_zero:
        return XReal.zero()
    return XReal.from_log(math.nextafter(a.log_mag + b.log_mag, -_INF))


def _down_add(a: XReal, b: XReal) -> XReal:
    if a.is_zero:
        return b
    if b.is_zero:
        return a
    hi, lo = (a.log_mag, b.log_mag) if a.log_mag >= b.log_mag else (b.log_mag, a.log_mag)
    lm = hi + math.log1p(math.exp(lo - hi))
    return XReal.from_log(math.nextafter(math.nextafter(lm, -_INF), -_INF))


# ----------------------------------------------------------------------
# the per-pair certificate
# ----------------------------------------------------------------------

CSV_COLUMNS = (
    "set",
    "mu1",
    "mu2",
    "mu3",
    "hypothesis_flags",
    "lhs_interacting",
    "rhs_interacting",
    "lhs_outgoing",
    "rhs_outgoing",
    "margin",
    "pass",
)


@dataclass
class PairResult:
    set_name: str
    index: int
    mu1: float
    mu2: float
    mu3: float
    delta0: float
    flags: str
    lhs_interacting: XReal
    rhs_interacting: XReal
    lhs_outgoing: XReal
    rhs_outgoing: XReal
    margin_log10: float
    passed: bool
    note: str = ""

    def csv_row(self) -> List[str]:
        return [
            self.set_name,
            f"{self.mu1:.17g}",
            f"{self.mu2:.17g}",
            f"{self.mu3:.17g}",
            self.flags,
            self.lhs_interacting.to_sci_string(),
            self.rhs_interacting.to_sci_string(),
            self.lhs_outgoing.to_sci_string(),
            self.rhs_outgoing.to_sci_string(),
            f"{self.margin_log10:.6f}",
            "pass" if self.passed else "FAIL",
        ]


def _max_weight(exps: Sequence[float]) -> XReal:
    """max_i exp(-e_i) as an XReal."""
    return XReal.exp_neg(min(exps))


def _max_rho_weight(rhos: Sequence[float], r1: float) -> XReal:
    """max_i r1 rho_i exp(-(r1^2/2) rho_i^2) as an XReal."""
    best = XReal.zero()
    for r in rhos:
        cand = XReal.from_f64(r1 * r).mul(XReal.exp_neg(r1 * r1 * r * r / 2.0))
        if XReal.cmp(cand, best) > 0:
            best = cand
    return best


def check_pair(
    cfg: ExperimentConfig,
    set_name: str,
    index: int,
    mu1: float,
    mu2: float,
    mu3: float,
    delta0: Optional[float] = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> PairResult:
    """Certify one width pair; never raises on a well-formed config."""
    mv = cfg.mv
    r1 = cfg.r1
    sigma0 = cfg.sigma0

    flags: List[str] = []
    below = mu1 <= sigma0 and mu2 <= sigma0 and mu3 <= sigma0
    above = mu1 >= sigma0 and mu2 >= sigma0 and mu3 >= sigma0
    if not (below or above):
        flags.append("!crossover_side")
    if not ((mu1 <= mu3 and mu2 <= mu3) or (mu1 >= mu3 and mu2 >= mu3)):
        flags.append("!anchor_side")
    nu = mu1 if (mu1 <= mu3 and mu2 <= mu3) else mu2

    if delta0 is None:
        delta0 = 1.0 if mu1 * mv > 10.0 else 0.1

    try:
        h2 = cfg.h(mu2)
        omega_inv2 = cfg.omega_inv(mu2)
        if mu1 <= sigma0 and mu2 <= sigma0:
            z_cap = z_crossing(omega_inv2, mu2, mv, h2)
        else:
            z_cap = max(
                z_crossing(omega_inv2, mu1, mv, h2),
                z_crossing(omega_inv2, mu2, mv, h2),
            )
        z2 = max(
            z_crossing(1.0 / math.sqrt(2.0), nu, mv, h2),
            z_crossing(1.0 / math.sqrt(2.0), mu3, mv, h2),
        )
        z23 = max(
            z_crossing(math.sqrt(1.5), nu, mv, h2),
            z_crossing(math.sqrt(1.5), mu3, mv, h2),
        )
    except ValueError as exc:
        return PairResult(
            set_name, index, mu1, mu2, mu3, delta0, "!solver",
            XReal.zero(), XReal.zero(), XReal.zero(), XReal.zero(),
            -math.inf, False, note=str(exc),
        )

    if z_cap < z23:
        flags.append("!window_order")
    for i, m in enumerate((mu1, mu2)):
        if r1 * rho(m, mv, z2) < 1.0:
            flags.append(f"!hole_at_start_mu{i + 1}")
    for i, m in enumerate((mu1, mu2, mu3)):
        if not r1 * rho(m, mv, z_cap) > 1.0:
            flags.append(f"!hole_at_cap_mu{i + 1}")

    # pair scale r_{nu, mu3} = min_i S1(mu_i): where the hole factor
    # stops being a contraction; the momentum-weighted window must end
    # before it.
    r_pair = min(cfg.s1(nu), cfg.s1(mu3))
    b6_end = min(r_pair, z_cap)

    # ---- grid majorants (one pass per width in {nu, mu3}) -----------
    int_b4 = XReal.zero()   # plain-window integrals with hole weight
    int_b5 = XReal.zero()   # momentum-weighted window integrals
    int_b6 = XReal.zero()   # hole-weighted with the extra r1*rho factor
    int_b3_tail = XReal.zero()  # past the pair scale (usually empty)
    for m in (nu, mu3):
        win4 = _build_window(m, mv, h2, z2, z_cap, delta0, node_cap)
        if win4 is not None and _single_interval_log(win4, r1, "b4") <= _FLOOR_LOG:
            win4 = majorant_window(
                m, mv, h2, z2, z_cap, win4.lo, win4.hi, np.empty(0), np.empty(0)
            )
        int_b4 = int_b4.add(grid_majorant(win4, r1, "b4"))

        if b6_end >= z_cap and win4 is not None:
            int_b6 = int_b6.add(grid_majorant(win4, r1, "b6"))
        else:
            win6 = _build_window(m, mv, h2, z2, b6_end, delta0, node_cap)
            if win6 is not None and _single_interval_log(win6, r1, "b6") <= _FLOOR_LOG:
                win6 = majorant_window(
                    m, mv, h2, z2, b6_end, win6.lo, win6.hi, np.empty(0), np.empty(0)
                )
            int_b6 = int_b6.add(grid_majorant(win6, r1, "b6"))
            tail = _build_window(m, mv, h2, min(r_pair, z_cap), z_cap, delta0, node_cap)
            if tail is not None and _single_interval_log(tail, r1, "b3") <= _FLOOR_LOG:
                tail = majorant_window(
                    m, mv, h2, tail.s, z_cap, tail.lo, tail.hi, np.empty(0), np.empty(0)
                )
            int_b3_tail = int_b3_tail.add(grid_majorant(tail, r1, "b3"))

        win5 = _build_window(m, mv, h2, z23, z_cap, delta0, node_cap)
        if win5 is not None and _single_interval_log(win5, r1, "b5") <= _FLOOR_LOG:
            win5 = majorant_window(
                m, mv, h2, z23, z_cap, win5.lo, win5.hi, np.empty(0), np.empty(0)
            )
        int_b5 = int_b5.add(grid_majorant(win5, r1, "b5"))

    # ---- boundary terms ----------------------------------------------
    pi4 = XReal.from_f64(_PI4)
    pi4_rt2 = XReal.from_f64(_PI4 / math.sqrt(2.0))

    def hole_exps(z: float) -> List[float]:
        return [r1 * r1 * rho(m, mv, z) ** 2 / 2.0 for m in (mu1, mu2)]

    w_z2 = _max_weight(hole_exps(z2))
    w_z23 = _max_weight(hole_exps(z23))
    w_cap = _max_weight(hole_exps(z_cap))
    wr_z2 = _max_rho_weight([rho(m, mv, z2) for m in (mu1, mu2)], r1)
    wr_cap = _max_rho_weight([rho(m, mv, z_cap) for m in (mu1, mu2)], r1)

    T1 = pi4.mul(XReal.from_f64(z2)).mul(w_z2)
    T2 = pi4.mul(XReal.from_f64(z_cap)).mul(w_cap)

    # I_pp / I_ps: incoming-packet windows
    i_pp = T1.add(int_b4)
    i_ps = i_pp.add(T2)

    # I_sp / I_ss: spread-packet windows (momentum-weighted pieces)
    t1 = pi4_rt2.mul(XReal.from_f64(z23)).mul(w_z23)
    t3 = pi4.mul(XReal.from_f64(z2)).mul(wr_z2)
    t2 = pi4_rt2.mul(XReal.from_f64(z_cap)).mul(w_cap)
    t4 = pi4.mul(XReal.from_f64(z_cap)).mul(wr_cap)
    tail9 = XReal.exp_neg(0.5).mul(int_b3_tail)
    i_sp = t1.add(t3).add(T1).add(int_b5).add(int_b6).add(tail9).add(int_b4)
    i_ss = i_sp.add(t2).add(t4).add(T2)

    # ---- the two inequalities ----------------------------------------
    c_pp, c_ps, c_sp, c_ss = coupling_constants(cfg, mu1)
    lhs1 = (
        XReal.from_f64(c_pp).mul(i_pp)
        .add(XReal.from_f64(c_ps / 2.0).mul(i_ps))
        .add(XReal.from_f64(c_sp).mul(i_sp))
        .add(XReal.from_f64(c_ss / 2.0).mul(i_ss))
    )
    lhs2 = (
        XReal.from_f64(c_pp + c_ps).mul(i_pp)
        .add(XReal.from_f64(c_sp + c_ss).mul(i_sp))
    )

    coeffs = calibrated_coefficients(cfg)
    size1 = XReal.exp_neg(r1 * r1 / (2.0 * mu1 * mu1))
    rate2 = XReal.exp_neg(cfg.rate_exponent(mu2))
    p0 = max(0.0, calibrated_poly(coeffs["interacting"], mu2))
    p_inf = max(0.0, calibrated_poly(coeffs["outgoing"], mu2))
    slack = ten_pow(-101, "down")
    rhs1 = _down_add(
        _down_add(
            _down_mul(_down_f64(4.0), size1),
            _down_mul(_down_mul(_down_f64(1e-3), rate2), _down_f64(p0)),
        ),
        slack,
    )
    rhs2 = _down_add(
        _down_add(
            _down_mul(_down_f64(4.0), size1),
            _down_mul(_down_mul(_down_f64(1e-7), rate2), _down_f64(p_inf)),
        ),
        slack,
    )

    ok1 = XReal.cmp(lhs1, rhs1) <= 0
    ok2 = XReal.cmp(lhs2, rhs2) <= 0

    def _margin(lhs: XReal, rhs: XReal) -> float:
        if lhs.is_zero:
            return math.inf
        if rhs.is_zero:
            return -math.inf
        return (rhs.log_mag - lhs.log_mag) / math.log(10.0)

    margin = min(_margin(lhs1, rhs1), _margin(lhs2, rhs2))
    passed = ok1 and ok2 and not flags
    return PairResult(
        set_name,
        index,
        mu1,
        mu2,
        mu3,
        delta0,
        "ok" if not flags else "|".join(flags),
        lhs1,
        rhs1,
        lhs2,
        rhs2,
        margin,
        passed,
    )


# ----------------------------------------------------------------------
# the sweep
# ----------------------------------------------------------------------


def _run_job(args) -> Tuple[Tuple[str, int], PairResult]:
    cfg, job, delta0, node_cap = args
    set_name, index, mu1, mu2, mu3 = job
    res = check_pair(cfg, set_name, index, mu1, mu2, mu3, delta0, node_cap)
    return ((set_name, index), res)


def sweep(
    cfg: ExperimentConfig,
    set_names: Optional[Sequence[str]] = None,
    delta0: Optional[float] = None,
    jobs: int = 1,
    node_cap: int = DEFAULT_NODE_CAP,
) -> List[PairResult]:
    """Certify every pair of the requested sets (default: all eleven).

    Results come back in deterministic (set, index) order regardless of
    ``jobs``.
    """
    names = list(set_names) if set_names else list(SET_NAMES)
    job_list = sweep_pairs(cfg, names)
    args = [(cfg, job, delta0, node_cap) for job in job_list]
    results: Dict[Tuple[str, int], PairResult] = {}
    if jobs <= 1:
        for a in args:
            key, res = _run_job(a)
            results[key] = res
    else:
        chunk = max(1, len(args) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for key, res in pool.map(_run_job, args, chunksize=chunk):
                results[key] = res
    order = {name: i for i, name in enumerate(names)}
    return [
        results[k]
        for k in sorted(results, key=lambda k: (order[k[0]], k[1]))
    ]


def write_csv(results: Iterable[PairResult], path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for res in results:
            writer.writerow(res.csv_row())


def discrepancy_map(results: Sequence[PairResult]) -> List[PairResult]:
    """The failing pairs, ordered by how badly they miss."""
    fails = [r for r in results if not r.passed]
    return sorted(fails, key=lambda r: r.margin_log10)


def refine_pair(
    cfg: ExperimentConfig,
    res: PairResult,
    delta0_seq: Sequence[float] = (0.5, 0.2, 0.1, 0.05),
) -> List[PairResult]:
    """Re-check one pair on successively finer grids (refinement demo)."""
    out = []
    for d0 in delta0_seq:
        out.append(
            check_pair(
                cfg, res.set_name, res.index, res.mu1, res.mu2, res.mu3, d0
            )
        )
    return out
