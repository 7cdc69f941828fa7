"""System-level energy, latency and area of a DRAM + GLB memory system.

Array-level numbers for each GLB technology come from tech files that play
the role of an external array estimator's output: one table of per-access
energy/latency and leakage per capacity, interpolated log-log in between.
Per-access energy is the bit-cell dynamic energy for one access width plus a
periphery term; bit-cell energies may differ for a stored 1 or 0.

Compute energy is not modeled; the memory system is evaluated on its own.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
import yaml

from .access import AccessConfig, AccessCounts, access_counts
from .workload import MB, Workload


class MbpaMismatchError(ValueError):
    pass


def _tech_dir() -> Path:
    return Path(str(resources.files("sotmem") / "data" / "tech"))


@dataclass(frozen=True)
class MemoryTechSpec:
    """One technology at one capacity.  Energies in J/access, latencies in
    s/access, leakage in W, area in mm^2, mbpa in MB/access."""

    name: str
    capacity: float
    read_energy: float
    write_energy: float
    read_latency: float
    write_latency: float
    leakage_power: float
    area: float
    mbpa: float
    read_energy_bits: tuple | None = None   # (bit 1, bit 0)
    write_energy_bits: tuple | None = None

    def __post_init__(self):
        for f in ("capacity", "read_energy", "write_energy", "read_latency",
                  "write_latency", "leakage_power", "area", "mbpa"):
            if getattr(self, f) < 0:
                raise ValueError(f"{self.name}: {f} must be >= 0")

    def read_energy_for(self, bit1_fraction: float = 0.5) -> float:
        if self.read_energy_bits is None:
            return self.read_energy
        e1, e0 = self.read_energy_bits
        return bit1_fraction * e1 + (1 - bit1_fraction) * e0

    def write_energy_for(self, bit1_fraction: float = 0.5) -> float:
        if self.write_energy_bits is None:
            return self.write_energy
        e1, e0 = self.write_energy_bits
        return bit1_fraction * e1 + (1 - bit1_fraction) * e0


@dataclass(frozen=True)
class DramSpec:
    read_energy: float
    write_energy: float
    access_latency: float
    mbpa: float
    name: str = "dram"

    def __post_init__(self):
        if min(self.read_energy, self.write_energy, self.access_latency, self.mbpa) <= 0:
            raise ValueError("DRAM parameters must be positive")


@dataclass(frozen=True)
class TechFamily:
    """A GLB technology across capacities (one tech file)."""

    name: str
    mbpa: float
    cell_read_power: tuple      # W while accessing a stored (1, 0)
    cell_write_power: tuple
    cell_read_time: float
    cell_write_time: float
    cell_area_um2: float
    periphery_fraction: float
    periphery_fixed_mm2: float
    capacities: tuple
    read_periphery_energy: tuple
    write_periphery_energy: tuple
    read_latency: tuple
    write_latency: tuple
    leakage_power: tuple
    description: str = ""

    @property
    def bits_per_access(self) -> float:
        return self.mbpa * MB * 8

    def cell_energy(self, op: str) -> tuple[float, float]:
        """Bit-cell dynamic energy of one access, for all-1 and all-0 data."""
        if op == "read":
            p, t = self.cell_read_power, self.cell_read_time
        else:
            p, t = self.cell_write_power, self.cell_write_time
        return p[0] * t * self.bits_per_access, p[1] * t * self.bits_per_access

    def _interp(self, values, capacity: float) -> float:
        caps = np.log(np.asarray(self.capacities, dtype=float))
        vals = np.asarray(values, dtype=float)
        c = math.log(capacity)
        if c < caps[0] - 1e-12 or c > caps[-1] + 1e-12:
            raise ValueError(f"{self.name}: capacity {capacity} MB outside table "
                             f"[{self.capacities[0]}, {self.capacities[-1]}]")
        if np.all(vals > 0):
            return float(np.exp(np.interp(c, caps, np.log(vals))))
        return float(np.interp(c, caps, vals))

    def area(self, capacity: float) -> float:
        return area_at_capacity(self, capacity)

    def at(self, capacity: float) -> MemoryTechSpec:
        if not capacity > 0:
            raise ValueError("capacity must be positive")
        pr = self._interp(self.read_periphery_energy, capacity)
        pw = self._interp(self.write_periphery_energy, capacity)
        r1, r0 = self.cell_energy("read")
        w1, w0 = self.cell_energy("write")
        rb, wb = (r1 + pr, r0 + pr), (w1 + pw, w0 + pw)
        return MemoryTechSpec(
            name=self.name, capacity=capacity,
            read_energy=0.5 * (rb[0] + rb[1]), write_energy=0.5 * (wb[0] + wb[1]),
            read_latency=self._interp(self.read_latency, capacity),
            write_latency=self._interp(self.write_latency, capacity),
            leakage_power=self._interp(self.leakage_power, capacity),
            area=self.area(capacity), mbpa=self.mbpa,
            read_energy_bits=rb, write_energy_bits=wb)


def area_at_capacity(tech: TechFamily, capacity: float) -> float:
    """mm^2: cell array plus periphery (a fraction of the array plus a
    capacity-independent block)."""
    if not capacity > 0:
        raise ValueError("capacity must be positive")
    cells = capacity * MB * 8 * tech.cell_area_um2 * 1e-6
    return cells + tech.periphery_fraction * cells + tech.periphery_fixed_mm2


def tech_family_from_dict(doc: dict) -> TechFamily:
    cell, arr, area = doc["bitcell"], doc["array"], doc["area"]
    caps = tuple(float(c) for c in arr["capacity_mb"])
    cols = {k: tuple(float(v) for v in arr[k]) for k in
            ("read_periphery_energy_j", "write_periphery_energy_j", "read_latency_s",
             "write_latency_s", "leakage_power_w")}
    if any(len(v) != len(caps) for v in cols.values()):
        raise ValueError(f"{doc['name']}: array columns must match capacity_mb")
    if list(caps) != sorted(caps):
        raise ValueError(f"{doc['name']}: capacity_mb must be ascending")
    return TechFamily(
        name=doc["name"], mbpa=doc["mbpa_bytes"] / MB,
        cell_read_power=tuple(cell["read_power_w"]), cell_write_power=tuple(cell["write_power_w"]),
        cell_read_time=cell["read_time_s"], cell_write_time=cell["write_time_s"],
        cell_area_um2=area["cell_area_um2"], periphery_fraction=area["periphery_fraction"],
        periphery_fixed_mm2=area["periphery_fixed_mm2"], capacities=caps,
        read_periphery_energy=cols["read_periphery_energy_j"],
        write_periphery_energy=cols["write_periphery_energy_j"],
        read_latency=cols["read_latency_s"], write_latency=cols["write_latency_s"],
        leakage_power=cols["leakage_power_w"], description=doc.get("description", ""))


def dram_from_dict(doc: dict) -> DramSpec:
    return DramSpec(read_energy=doc["read_energy_j"], write_energy=doc["write_energy_j"],
                    access_latency=doc["access_latency_s"], mbpa=doc["mbpa_bytes"] / MB,
                    name=doc.get("name", "dram"))


TECH_SCHEMA_VERSION = 1


def _read_yaml(name_or_path) -> dict:
    path = Path(name_or_path)
    if not path.suffix:
        path = _tech_dir() / f"{name_or_path}.yaml"
    if not path.exists():
        raise FileNotFoundError(f"tech file not found: {name_or_path}")
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: not a tech file")
    if doc.get("version", TECH_SCHEMA_VERSION) != TECH_SCHEMA_VERSION:
        raise ValueError(f"{path}: unsupported tech schema version {doc['version']}")
    return doc


def load_tech(name_or_path) -> TechFamily:
    return tech_family_from_dict(_read_yaml(name_or_path))


def load_dram(name_or_path="hbm3") -> DramSpec:
    return dram_from_dict(_read_yaml(name_or_path))


DEFAULT_TECHS = ("sram", "sot_mram", "sot_mram_opt")


@lru_cache(maxsize=None)
def default_tech(name: str) -> TechFamily:
    return load_tech(name)


# --------------------------------------------------------------------------
# evaluation

@dataclass
class PpaEntry:
    model: str
    phase: str
    tech: str
    capacity: float
    dram_dynamic: np.ndarray   # J per layer
    glb_dynamic: np.ndarray
    glb_leakage: np.ndarray
    dram_latency: np.ndarray   # s per layer
    glb_latency: np.ndarray
    latency_per_layer: np.ndarray
    area: float

    @property
    def energy_split(self) -> dict:
        return {"dram_dynamic": float(np.sum(self.dram_dynamic)),
                "glb_dynamic": float(np.sum(self.glb_dynamic)),
                "glb_leakage": float(np.sum(self.glb_leakage))}

    @property
    def total_energy(self) -> float:
        return float(np.sum(self.dram_dynamic + self.glb_dynamic + self.glb_leakage))

    @property
    def latency_split(self) -> dict:
        return {"dram": float(np.sum(self.dram_latency)), "glb": float(np.sum(self.glb_latency))}

    @property
    def total_latency(self) -> float:
        return float(np.sum(self.latency_per_layer))


def _check_mbpa(counts: AccessCounts, glb: MemoryTechSpec, dram: DramSpec):
    cfg = counts.config
    if not math.isclose(cfg.mbpa_glb, glb.mbpa, rel_tol=1e-12):
        raise MbpaMismatchError(f"counts use mbpa_glb={cfg.mbpa_glb * MB:g} B but {glb.name} "
                                f"transfers {glb.mbpa * MB:g} B per access")
    if not math.isclose(cfg.mbpa_dram, dram.mbpa, rel_tol=1e-12):
        raise MbpaMismatchError(f"counts use mbpa_dram={cfg.mbpa_dram * MB:g} B but {dram.name} "
                                f"transfers {dram.mbpa * MB:g} B per access")


def evaluate_ppa(counts: AccessCounts, glb: MemoryTechSpec, dram: DramSpec,
                 mode: str = "serial", bit1_fraction: float = 0.5) -> PpaEntry:
    """Energy/latency of one access-count table on one memory system.

    ``serial`` adds DRAM and GLB access time; ``overlapped`` lets the two
    overlap within a layer (layer time = the larger of the two).  Leakage
    is GLB leakage power over the run time.
    """
    _check_mbpa(counts, glb, dram)
    if mode not in ("serial", "overlapped"):
        raise ValueError("mode must be 'serial' or 'overlapped'")
    dram_dyn = counts.rd_dram * dram.read_energy + counts.wr_dram * dram.write_energy
    glb_dyn = (counts.rd_glb * glb.read_energy_for(bit1_fraction)
               + counts.wr_glb * glb.write_energy_for(bit1_fraction))
    t_dram = (counts.rd_dram + counts.wr_dram) * dram.access_latency
    t_glb = counts.rd_glb * glb.read_latency + counts.wr_glb * glb.write_latency
    t = t_dram + t_glb
    if mode == "overlapped":
        t = t - np.minimum(t_dram, t_glb)
    return PpaEntry(counts.model, counts.phase, glb.name, glb.capacity, dram_dyn, glb_dyn,
                    glb.leakage_power * t, t_dram, t_glb, t, glb.area)


def default_access_config(glb_mb: float, tech: TechFamily | MemoryTechSpec, dram: DramSpec,
                          d_w: int = 4) -> AccessConfig:
    return AccessConfig(glb_mb, mbpa_dram=dram.mbpa, mbpa_glb=tech.mbpa, d_w=d_w)


def geomean(xs) -> float:
    xs = np.asarray(list(xs), dtype=float)
    return float(np.exp(np.mean(np.log(xs))))


@dataclass
class ComparisonRow:
    model: str
    phase: str
    tech: str
    energy: float
    latency: float
    energy_ratio: float   # baseline / this tech (> 1 is better)
    latency_ratio: float
    entry: PpaEntry | None = field(default=None, repr=False)


@dataclass
class ComparisonTable:
    baseline: str
    capacity: float
    rows: list

    def summary(self) -> list[ComparisonRow]:
        """Geometric-mean row per (phase, tech)."""
        keys = []
        for r in self.rows:
            if (r.phase, r.tech) not in keys:
                keys.append((r.phase, r.tech))
        out = []
        for ph, t in keys:
            sel = [r for r in self.rows if r.phase == ph and r.tech == t]
            out.append(ComparisonRow("geomean", ph, t, geomean(r.energy for r in sel),
                                     geomean(r.latency for r in sel),
                                     geomean(r.energy_ratio for r in sel),
                                     geomean(r.latency_ratio for r in sel)))
        return out

    def ratio(self, tech: str, phase: str, metric: str = "energy") -> float:
        for r in self.summary():
            if r.tech == tech and r.phase == phase:
                return r.energy_ratio if metric == "energy" else r.latency_ratio
        raise KeyError((tech, phase))


def compare_techs(models, techs, dram: DramSpec, phases=("inference",), capacity: float = 64.0,
                  baseline: str | None = None, mode: str = "serial",
                  bit1_fraction: float = 0.5) -> ComparisonTable:
    """Per-model energy/latency of every tech at one GLB capacity, with
    ratios against the baseline tech (the first one unless named)."""
    techs = list(techs)
    if len(techs) < 1:
        raise ValueError("need at least one technology")
    specs = [t.at(capacity) if isinstance(t, TechFamily) else t for t in techs]
    baseline = baseline or specs[0].name
    if baseline not in [s.name for s in specs]:
        raise ValueError(f"baseline {baseline!r} is not among the compared techs")
    rows = []
    for w in models:
        for ph in phases:
            entries = {}
            cache = {}
            for s in specs:
                cfg = default_access_config(capacity, s, dram)
                key = (cfg.mbpa_glb, cfg.mbpa_dram)
                if key not in cache:
                    cache[key] = access_counts(w, cfg, ph)
                entries[s.name] = evaluate_ppa(cache[key], s, dram, mode, bit1_fraction)
            base = entries[baseline]
            for s in specs:
                e = entries[s.name]
                rows.append(ComparisonRow(w.name, ph, s.name, e.total_energy, e.total_latency,
                                          base.total_energy / e.total_energy,
                                          base.total_latency / e.total_latency, e))
    return ComparisonTable(baseline, capacity, rows)


def area_ratio(tech: TechFamily, baseline: TechFamily, capacity: float) -> float:
    return area_at_capacity(tech, capacity) / area_at_capacity(baseline, capacity)


@dataclass
class CapacityPoint:
    model: str
    phase: str
    tech: str
    capacity: float
    energy: float
    latency: float
    dram_accesses: float
    inverted: bool   # energy rose although the GLB grew


def capacity_scan(w: Workload, tech: TechFamily, dram: DramSpec, capacities,
                  phase: str = "inference", mode: str = "serial") -> list[CapacityPoint]:
    """Energy/latency of one model across GLB sizes.

    DRAM accesses never grow with capacity, but leakage and per-access
    cost do, so total energy can turn back up; such points are flagged.
    """
    caps = sorted(float(c) for c in capacities)
    out = []
    prev = None
    for cap in caps:
        spec = tech.at(cap)
        c = access_counts(w, default_access_config(cap, spec, dram), phase)
        e = evaluate_ppa(c, spec, dram, mode)
        inv = prev is not None and e.total_energy > prev
        out.append(CapacityPoint(w.name, phase, tech.name, cap, e.total_energy, e.total_latency,
                                 c.total_dram, inv))
        prev = e.total_energy
    return out
