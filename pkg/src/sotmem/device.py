"""Compact model of a 2T1SOT SOT-MRAM bit cell.

Write side: critical switching current density from the macrospin threshold
for field-assisted SOT switching, an SOT-thickness efficiency factor, and a
pulse width inversely proportional to the current overdrive.

Read side: TMR from oxide thickness (calibration table), read latency from
TMR, and read currents through R_P/R_AP in series with the access path.

Retention: thermal stability Delta = E_b / (k_B T) of the free layer and the
time window over which a bit's flip probability stays under a target.

All quantities are SI (m, A, A/m, A/m^2, s, K) except TMR, which is a
percentage.  Default constants live in ``data/tech/sot_device.yaml``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.constants as sc
import yaml


class SubCriticalError(ValueError):
    pass


@dataclass(frozen=True)
class PhysicalConstants:
    e: float = sc.e
    mu0: float = sc.mu_0
    hbar: float = sc.hbar
    k_b: float = sc.k


CONST = PhysicalConstants()


@dataclass(frozen=True)
class SotDeviceParams:
    theta_sh: float
    t_fl: float
    w_sot: float
    t_sot: float
    t_mgo: float
    d_mtj: float
    m_s: float
    h_k_eff: float
    h_x: float
    temperature: float = 300.0

    def __post_init__(self):
        for f in ("theta_sh", "t_fl", "w_sot", "t_sot", "t_mgo", "d_mtj", "m_s", "temperature"):
            if not getattr(self, f) > 0:
                raise ValueError(f"{f} must be positive")

    def with_(self, **kw) -> "SotDeviceParams":
        return replace(self, **kw)

    @property
    def free_layer_volume(self) -> float:
        return math.pi * (self.d_mtj / 2) ** 2 * self.t_fl

    @property
    def mtj_area(self) -> float:
        return math.pi * (self.d_mtj / 2) ** 2


@dataclass(frozen=True)
class CellTimings:
    read_latency: float
    write_pulse: float
    read_current_p: float
    read_current_ap: float
    retention_window: float
    delta: float


@dataclass(frozen=True)
class DeviceTech:
    """Everything the cell model needs beyond the device geometry."""

    cell: SotDeviceParams
    write_current: float             # nominal write drive, A
    k_tau: float                     # pulse-width constant, s*A/m^2
    t_sot_opt: float = 3e-9
    kappa: float = 0.5
    bulk_exponent: float = 2.0
    tau0: float = 1e-9
    p_rf: float = 1e-9
    tmr_table: tuple = ((1e-9, 40.0), (3e-9, 240.0), (4e-9, 280.0))
    read_latency_a: float = 100e-12
    read_latency_b: float = 36000e-12
    ra_product: float = 10e-12       # ohm*m^2
    r_series: float = 0.0            # ohm
    v_read: float = 0.5              # V
    t_ref: float = 300.0
    t_hot: float = 358.15
    t_cold: float = 233.15
    process_frac: float = 0.20
    temp_frac: float = 0.10
    retention_sweep_t_fl: float = 0.5e-9
    thresholds: dict = field(default_factory=dict)


def _load_tech_dict(doc: dict) -> DeviceTech:
    doc = dict(doc)
    doc.pop("version", None)
    cell = SotDeviceParams(**doc.pop("cell"))
    doc["tmr_table"] = tuple((float(t), float(r)) for t, r in doc.pop("tmr_table"))
    names = {f.name for f in fields(DeviceTech)}
    unknown = set(doc) - names
    if unknown:
        raise ValueError(f"unknown device tech keys: {sorted(unknown)}")
    return DeviceTech(cell=cell, **doc)


def load_device_tech(path: str | Path | None = None) -> DeviceTech:
    if path is None:
        path = Path(str(resources.files("sotmem") / "data" / "tech" / "sot_device.yaml"))
    with open(path) as fh:
        return _load_tech_dict(yaml.safe_load(fh))


@lru_cache(maxsize=1)
def default_tech() -> DeviceTech:
    return load_device_tech()


# --------------------------------------------------------------------------
# write path

def _jc_formula(e, mu0, hbar, m_s, t_fl, theta_sh, h_k_eff, h_x):
    # plain arithmetic so unit-tagged quantities pass through unchanged
    return 2 * e * mu0 * m_s * t_fl / (hbar * theta_sh) * (h_k_eff / 2 - h_x / 2**0.5)


def critical_current_density(p: SotDeviceParams, c: PhysicalConstants = CONST) -> float:
    """Critical switching current density j_c in A/m^2."""
    field_term = p.h_k_eff / 2 - p.h_x / math.sqrt(2)
    if field_term <= 0:
        raise SubCriticalError("sub-critical field configuration: H_k,eff/2 <= H_x/sqrt(2)")
    return _jc_formula(c.e, c.mu0, c.hbar, p.m_s, p.t_fl, p.theta_sh, p.h_k_eff, p.h_x)


def sot_thickness_factor(t_sot, t_opt: float = 3e-9, kappa: float = 0.5,
                         bulk_exponent: float = 2.0):
    """Multiplier on j_c from SOT-layer thickness.

    Thinner than ``t_opt`` the layer loses bulk spin-Hall efficiency
    (factor (t_opt/t)**bulk_exponent); thicker, charge is shunted through
    the extra metal (factor 1 + kappa*(t - t_opt)/t_opt).
    """
    t = np.asarray(t_sot, dtype=float)
    out = np.where(t >= t_opt, 1 + kappa * (t - t_opt) / t_opt,
                   (t_opt / np.minimum(t, t_opt)) ** bulk_exponent)
    return float(out) if out.ndim == 0 else out


def effective_critical_current_density(p: SotDeviceParams, c: PhysicalConstants = CONST,
                                       tech: DeviceTech | None = None) -> float:
    tech = tech or default_tech()
    return critical_current_density(p, c) * sot_thickness_factor(
        p.t_sot, tech.t_sot_opt, tech.kappa, tech.bulk_exponent)


def critical_current(p: SotDeviceParams, c: PhysicalConstants = CONST,
                     tech: DeviceTech | None = None) -> float:
    """I_c in A: effective j_c times the SOT channel cross-section."""
    return effective_critical_current_density(p, c, tech) * p.w_sot * p.t_sot


def write_current_density(i_sw: float, p: SotDeviceParams) -> float:
    return i_sw / (p.w_sot * p.t_sot)


def switching_pulse_width(j_sw: float, p: SotDeviceParams, c: PhysicalConstants = CONST,
                          tech: DeviceTech | None = None) -> float:
    """Pulse width k_tau / (j_sw - j_c) in seconds."""
    tech = tech or default_tech()
    jc = effective_critical_current_density(p, c, tech)
    if j_sw <= jc:
        raise SubCriticalError(f"sub-critical write current: j_sw={j_sw:.3e} <= j_c={jc:.3e} A/m^2")
    return tech.k_tau / (j_sw - jc)


def nominal_write_pulse(p: SotDeviceParams | None = None, tech: DeviceTech | None = None,
                        c: PhysicalConstants = CONST) -> float:
    tech = tech or default_tech()
    p = p or tech.cell
    return switching_pulse_width(write_current_density(tech.write_current, p), p, c, tech)


# --------------------------------------------------------------------------
# retention

def thermal_stability(p: SotDeviceParams, c: PhysicalConstants = CONST) -> float:
    e_b = c.mu0 * p.m_s * p.h_k_eff / 2 * p.free_layer_volume
    return e_b / (c.k_b * p.temperature)


def retention_window(delta, p_rf: float = 1e-9, tau0: float = 1e-9):
    """Time over which a bit's flip probability stays below ``p_rf``."""
    if not 0 < p_rf < 1:
        raise ValueError("p_rf must be in (0, 1)")
    if np.any(np.asarray(delta) < 0):
        raise ValueError("delta must be >= 0")
    return -math.log1p(-p_rf) * tau0 * np.exp(delta)


def array_retention_window(t_ret, n_bits: int):
    """Window over which no bit of an ``n_bits`` array flips with the same
    target probability (first-order in p_rf)."""
    return t_ret / n_bits


# --------------------------------------------------------------------------
# read path

def tmr_from_oxide(t_mgo: float, table=None) -> float:
    """TMR (%) by piecewise-linear interpolation of the calibration table.

    Outside the table the nearest end value is returned with a warning.
    """
    table = table if table is not None else default_tech().tmr_table
    xs = np.array([t for t, _ in table])
    ys = np.array([r for _, r in table])
    if t_mgo < xs[0] or t_mgo > xs[-1]:
        warnings.warn(f"t_mgo={t_mgo:.3e} m outside calibrated range "
                      f"[{xs[0]:.1e}, {xs[-1]:.1e}]; clamped", RuntimeWarning, stacklevel=2)
    return float(np.interp(t_mgo, xs, ys))


def read_latency_from_tmr(tmr: float, a: float | None = None, b: float | None = None) -> float:
    if tmr <= 0:
        raise ValueError("tmr must be positive")
    if a is None or b is None:
        tech = default_tech()
        a = tech.read_latency_a if a is None else a
        b = tech.read_latency_b if b is None else b
    return a + b / tmr


def read_currents(p: SotDeviceParams, tmr: float, tech: DeviceTech | None = None):
    """(I_P, I_AP) in A for the configured read voltage and series path."""
    tech = tech or default_tech()
    d = np.asarray(p.d_mtj if isinstance(p, SotDeviceParams) else p, dtype=float)
    r_p = tech.ra_product / (math.pi * (d / 2) ** 2)
    r_ap = r_p * (1 + tmr / 100)
    return tech.v_read / (r_p + tech.r_series), tech.v_read / (r_ap + tech.r_series)


def cell_timings(p: SotDeviceParams | None = None, tech: DeviceTech | None = None,
                 c: PhysicalConstants = CONST) -> CellTimings:
    tech = tech or default_tech()
    p = p or tech.cell
    tmr = tmr_from_oxide(p.t_mgo, tech.tmr_table)
    i_p, i_ap = read_currents(p, tmr, tech)
    delta = thermal_stability(p, c)
    return CellTimings(read_latency=read_latency_from_tmr(tmr, tech.read_latency_a, tech.read_latency_b),
                       write_pulse=nominal_write_pulse(p, tech, c),
                       read_current_p=float(i_p), read_current_ap=float(i_ap),
                       retention_window=float(retention_window(delta, tech.p_rf, tech.tau0)),
                       delta=delta)


# --------------------------------------------------------------------------
# guard band

GUARD_BANDED = ("t_fl", "t_sot", "t_mgo", "w_sot", "d_mtj")


def apply_guard_band(p: SotDeviceParams, process_frac: float = 0.20,
                     temp_frac: float = 0.10) -> SotDeviceParams:
    if process_frac < 0 or temp_frac < 0:
        raise ValueError("guard-band fractions must be >= 0")
    s = 1 + process_frac + temp_frac
    return replace(p, **{k: getattr(p, k) * s for k in GUARD_BANDED})


# --------------------------------------------------------------------------
# Monte Carlo

VARIED = ("d_mtj", "t_fl", "w_sot")
_BLOCK = 1024


@dataclass
class MonteCarloReport:
    n: int
    seed: int
    sigma_frac: dict
    trunc_sigma: float
    thresholds: dict
    write_yield: float
    read_yield: float
    retention_yield: float
    corners: dict
    samples: dict = field(repr=False, default_factory=dict)

    def summary(self) -> dict:
        return {"n": self.n, "seed": self.seed, "sigma_frac": self.sigma_frac,
                "trunc_sigma": self.trunc_sigma, "thresholds": self.thresholds,
                "write_yield": self.write_yield, "read_yield": self.read_yield,
                "retention_yield": self.retention_yield, "corners": self.corners}


def _truncated_normals(rng: np.random.Generator, n: int, trunc: float) -> np.ndarray:
    out = np.empty(0)
    while out.size < n:
        z = rng.standard_normal(max(2 * (n - out.size), 16))
        out = np.concatenate([out, z[np.abs(z) <= trunc]])
    return out[:n]


def _block_samples(seed: int, block: int, n: int, trunc: float) -> np.ndarray:
    # one counter-based stream per block: independent of how blocks are scheduled
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    return np.stack([_truncated_normals(rng, n, trunc) for _ in VARIED], axis=1)


def _standard_samples(n: int, seed: int, trunc: float, workers: int) -> np.ndarray:
    sizes = [min(_BLOCK, n - s) for s in range(0, n, _BLOCK)]
    jobs = [(seed, b, m, trunc) for b, m in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            blocks = list(ex.map(lambda j: _block_samples(*j), jobs))
    else:
        blocks = [_block_samples(*j) for j in jobs]
    return np.concatenate(blocks, axis=0)


def default_thresholds(tech: DeviceTech) -> dict:
    th = {"write_pulse_max": 1e-9, "min_read_current": 10e-6,
          "min_sense_margin": 10e-6, "min_retention": 1e-3}
    th.update(tech.thresholds)
    return th


def _evaluate(d, t_fl, w_sot, temp, p: SotDeviceParams, tech: DeviceTech, c: PhysicalConstants):
    """Vectorized write/read/retention metrics over sample arrays."""
    d, t_fl, w_sot, temp = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (d, t_fl, w_sot, temp)))
    field_term = p.h_k_eff / 2 - p.h_x / math.sqrt(2)
    if field_term <= 0:
        raise SubCriticalError("sub-critical field configuration")
    jc = (_jc_formula(c.e, c.mu0, c.hbar, p.m_s, t_fl, p.theta_sh, p.h_k_eff, p.h_x)
          * sot_thickness_factor(p.t_sot, tech.t_sot_opt, tech.kappa, tech.bulk_exponent))
    i_c = jc * w_sot * p.t_sot
    j_sw = tech.write_current / (w_sot * p.t_sot)
    with np.errstate(divide="ignore"):
        tau = np.where(j_sw > jc, tech.k_tau / (j_sw - jc), np.inf)
    tmr = tmr_from_oxide(p.t_mgo, tech.tmr_table)
    i_p, i_ap = read_currents(d, tmr, tech)
    vol = np.pi * (d / 2) ** 2 * t_fl
    delta = c.mu0 * p.m_s * p.h_k_eff / 2 * vol / (c.k_b * temp)
    t_ret = retention_window(delta, tech.p_rf, tech.tau0)
    return {"i_c": i_c, "tau_p": tau, "i_p": i_p, "i_ap": i_ap, "delta": delta, "t_ret": t_ret}


def _passes(m: dict, th: dict):
    write = np.isfinite(m["tau_p"]) & (m["tau_p"] <= th["write_pulse_max"])
    read = (m["i_ap"] >= th["min_read_current"]) & (m["i_p"] - m["i_ap"] >= th["min_sense_margin"])
    ret = m["t_ret"] >= th["min_retention"]
    return write, read, ret


def monte_carlo(p: SotDeviceParams | None = None, n: int = 5000, sigma_frac=0.05,
                trunc_sigma: float = 4.0, seed: int = 0, tech: DeviceTech | None = None,
                thresholds: dict | None = None, c: PhysicalConstants = CONST,
                workers: int = 1) -> MonteCarloReport:
    """Process/temperature variation of d_mtj, t_fl and w_sot.

    Each varied parameter is an independent Gaussian with sigma equal to
    ``sigma_frac`` of its mean (a float, or a dict per parameter), truncated
    at +-``trunc_sigma`` sigma.  Write metrics are temperature independent;
    retention and read are evaluated at ``tech.t_hot``.  The report carries
    yields against ``thresholds`` and the analytic corners: write-worst at
    +k sigma / T_cold, read- and retention-worst at -k sigma / T_hot.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tech = tech or default_tech()
    p = p or tech.cell
    if isinstance(sigma_frac, dict):
        sig = {k: float(sigma_frac.get(k, 0.0)) for k in VARIED}
    else:
        sig = {k: float(sigma_frac) for k in VARIED}
    if any(not 0 <= s < 1 for s in sig.values()):
        raise ValueError("sigma_frac must be in [0, 1)")
    th = default_thresholds(tech)
    th.update(thresholds or {})

    z = _standard_samples(n, seed, trunc_sigma, workers)
    vals = {k: getattr(p, k) * (1 + sig[k] * z[:, j]) for j, k in enumerate(VARIED)}
    m = _evaluate(vals["d_mtj"], vals["t_fl"], vals["w_sot"], tech.t_hot, p, tech, c)
    w_ok, r_ok, ret_ok = _passes(m, th)

    corners = {}
    for name, sgn, temp in (("write_worst", +1, tech.t_cold), ("read_worst", -1, tech.t_hot)):
        cv = {k: getattr(p, k) * (1 + sgn * trunc_sigma * sig[k]) for k in VARIED}
        cm = _evaluate(cv["d_mtj"], cv["t_fl"], cv["w_sot"], temp, p, tech, c)
        corners[name] = {"temperature": temp, **{k: float(v) for k, v in cv.items()},
                         **{k: float(v) for k, v in cm.items()}}

    return MonteCarloReport(n=n, seed=seed, sigma_frac=sig, trunc_sigma=trunc_sigma,
                            thresholds=th, write_yield=float(w_ok.mean()),
                            read_yield=float(r_ok.mean()), retention_yield=float(ret_ok.mean()),
                            corners=corners, samples={**vals, **m})


# --------------------------------------------------------------------------
# knob sweeps

SWEEP_KNOBS = ("theta_sh", "w_sot", "t_sot", "t_fl", "d_mtj", "t_mgo")


def sweep_knob(knob: str, values, p: SotDeviceParams | None = None,
               tech: DeviceTech | None = None, c: PhysicalConstants = CONST) -> list[dict]:
    """One row per value: j_c, I_c, tau_p, Delta, t_ret, TMR, read latency.

    Points that are sub-critical get NaN write metrics instead of raising.
    """
    if knob not in SWEEP_KNOBS:
        raise ValueError(f"knob must be one of {SWEEP_KNOBS}")
    tech = tech or default_tech()
    base = p or tech.cell
    if knob == "d_mtj" and p is None:
        base = base.with_(t_fl=tech.retention_sweep_t_fl)
    rows = []
    for v in values:
        q = base.with_(**{knob: float(v)})
        row = {"knob": knob, "value": float(v)}
        try:
            row["j_c"] = effective_critical_current_density(q, c, tech)
            row["i_c"] = critical_current(q, c, tech)
        except SubCriticalError:
            row["j_c"] = row["i_c"] = math.nan
        try:
            row["tau_p"] = nominal_write_pulse(q, tech, c)
        except SubCriticalError:
            row["tau_p"] = math.nan
        row["delta"] = thermal_stability(q, c)
        row["t_ret"] = float(retention_window(row["delta"], tech.p_rf, tech.tau0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            row["tmr"] = tmr_from_oxide(q.t_mgo, tech.tmr_table)
        row["read_latency"] = read_latency_from_tmr(row["tmr"], tech.read_latency_a, tech.read_latency_b)
        rows.append(row)
    return rows
