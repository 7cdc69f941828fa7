"""DRAM and GLB access counts for inference and training.

Counts are real numbers (MB moved / MB per access).  The layer loop of the
reference procedures is vectorized over layers with numpy; every branch is
evaluated for all layers and the applicable one selected, so the arithmetic
of each branch is kept in exactly the form of the scalar procedure.

Overflow surcharges of the form ``(X - GLB)/mbpa`` are clamped at zero.  The
procedure only takes those branches when a tensor has spilled, but with an
explicit upper-buffer threshold, or a previous ofmap larger than the current
ifmap (pooling in between), the raw difference can go negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .workload import MB, Workload, footprint_arrays


@dataclass(frozen=True)
class AccessConfig:
    """``ub_mb`` is the spill threshold for inter-layer ofmaps; None means
    the GLB capacity itself.  Defaults: 64 B DRAM bursts, one 4 B datum per
    GLB access."""

    glb_capacity: float
    mbpa_dram: float = 64 / MB
    mbpa_glb: float = 4 / MB
    ub_mb: float | None = None
    d_w: int = 4

    def __post_init__(self):
        if not (self.glb_capacity > 0 and self.mbpa_dram > 0 and self.mbpa_glb > 0):
            raise ValueError("glb_capacity and mbpa values must be positive")
        if self.ub_mb is not None and not self.ub_mb > 0:
            raise ValueError("ub_mb must be positive")

    @property
    def ub(self) -> float:
        return self.glb_capacity if self.ub_mb is None else self.ub_mb

    def with_glb(self, glb_capacity: float) -> "AccessConfig":
        return AccessConfig(glb_capacity, self.mbpa_dram, self.mbpa_glb, self.ub_mb, self.d_w)


@dataclass
class AccessCounts:
    phase: str
    rd_dram: np.ndarray
    wr_dram: np.ndarray
    rd_glb: np.ndarray
    wr_glb: np.ndarray
    config: AccessConfig
    model: str = ""
    layer_names: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    @property
    def n_layers(self) -> int:
        return len(self.rd_dram)

    @property
    def total_rd_dram(self) -> float:
        return float(np.sum(self.rd_dram))

    @property
    def total_wr_dram(self) -> float:
        return float(np.sum(self.wr_dram))

    @property
    def total_rd_glb(self) -> float:
        return float(np.sum(self.rd_glb))

    @property
    def total_wr_glb(self) -> float:
        return float(np.sum(self.wr_glb))

    @property
    def total_dram(self) -> float:
        return self.total_rd_dram + self.total_wr_dram

    @property
    def total_glb(self) -> float:
        return self.total_rd_glb + self.total_wr_glb

    def ceiled(self) -> "AccessCounts":
        """Integer counts, rounded up per layer (reporting only)."""
        return AccessCounts(self.phase, np.ceil(self.rd_dram), np.ceil(self.wr_dram),
                            np.ceil(self.rd_glb), np.ceil(self.wr_glb), self.config,
                            self.model, list(self.layer_names), dict(self.detail))

    def rows(self):
        """(layer, rd_dram, wr_dram, rd_glb, wr_glb) per layer."""
        names = self.layer_names or [str(i) for i in range(self.n_layers)]
        for i, n in enumerate(names):
            yield (n, float(self.rd_dram[i]), float(self.wr_dram[i]),
                   float(self.rd_glb[i]), float(self.wr_glb[i]))


def _spill(x, limit):
    # x - limit, never negative; stays finite when limit is inf
    with np.errstate(invalid="ignore"):
        d = np.asarray(x, dtype=float) - limit
    return np.maximum(np.nan_to_num(d, nan=0.0, neginf=0.0), 0.0)


def _prev(o: np.ndarray) -> np.ndarray:
    p = np.empty_like(o)
    p[0] = 0.0
    p[1:] = o[:-1]
    return p


def _as_arrays(I, O, W):
    I, O, W = (np.asarray(a, dtype=float) for a in (I, O, W))
    if I.ndim != 1 or not (I.shape == O.shape == W.shape):
        raise ValueError("I, O, W must be 1-D arrays of equal length")
    if I.size == 0:
        raise ValueError("workload has no layers")
    if min(I.min(), O.min(), W.min()) < 0:
        raise ValueError("footprints must be non-negative")
    return I, O, W


def inference_counts_from_footprints(I, O, W, cfg: AccessConfig, model: str = "") -> AccessCounts:
    I, O, W = _as_arrays(I, O, W)
    G, UB, md, mg = cfg.glb_capacity, cfg.ub, cfg.mbpa_dram, cfg.mbpa_glb
    n = I.size
    first = np.arange(n) == 0
    last = np.arange(n) == n - 1

    rd_glb = I / mg
    wr_glb = np.where(first, (I + O) / mg, O / mg)

    IW = I + W
    rd_first = np.where(IW <= G, IW / md, IW / md + _spill(IW, G) / md)
    rd_w_only = np.where(W <= G, W / md, W / md + _spill(W, G) / md)
    rd_refetch = IW / md + _spill(IW, G) / md
    rd_dram = np.where(first, rd_first, np.where(_prev(O) <= UB, rd_w_only, rd_refetch))

    wr_dram = np.where(last, O / md, np.where(O > G, _spill(O, UB) / md, 0.0))
    return AccessCounts("inference", rd_dram, wr_dram, rd_glb, wr_glb, cfg, model)


def training_counts_from_footprints(I, O, W, cfg: AccessConfig, model: str = "") -> AccessCounts:
    """Training counts.  Gradients GI, GO, GW have the sizes of I, O, W.

    When everything up to a layer fits the GLB, layer 1 reads I+W, later
    layers read only W, and the last layer writes its ofmap.  Otherwise the
    forward reads and ofmap writes follow the inference rules, and a layer
    whose gradients overflow the GLB writes and re-reads them.  Every layer
    writes its updated weights back.
    """
    I, O, W = _as_arrays(I, O, W)
    G, UB, md, mg = cfg.glb_capacity, cfg.ub, cfg.mbpa_dram, cfg.mbpa_glb
    GI, GO, GW = I, O, W
    n = I.size
    first = np.arange(n) == 0
    last = np.arange(n) == n - 1

    layer_f = I + O + W
    layer_b = GI + GO + GW
    cum_layer = np.cumsum(layer_f + layer_b)

    rd_glb = (3 * I + O + 5 * W) / mg
    wr_glb = (2 * I + 2 * O + 3 * W) / mg

    fits = cum_layer <= G
    # fast path
    rd_f_fast = np.where(first, (I + W) / md, W / md)
    wr_f_fast = np.where(last, O / md, 0.0)
    # overflow path
    IW = I + W
    rd_f_ovf = np.where(~first & (_prev(O) <= G), W / md,
                        np.where(IW <= G, IW / md, IW / md + _spill(IW, G) / md))
    grad = GI + GO + GW
    grad_spill = np.where(grad <= G, 0.0, grad / md)
    wr_ofmap = np.where(last, O / md, np.where(O > G, _spill(O, UB) / md, 0.0))
    wr_f_ovf = wr_ofmap + grad_spill

    rd_f = np.where(fits, rd_f_fast, rd_f_ovf)
    rd_b = np.where(fits, 0.0, grad_spill)
    wr_f = np.where(fits, wr_f_fast, wr_f_ovf)
    wr_b = W / md

    detail = {"rd_f": rd_f, "rd_b": rd_b, "wr_f": wr_f, "wr_b": wr_b, "cum_layer": cum_layer}
    return AccessCounts("training", rd_f + rd_b, wr_f + wr_b, rd_glb, wr_glb, cfg, model,
                        detail=detail)


def _with_names(counts: AccessCounts, w: Workload) -> AccessCounts:
    counts.model = w.name
    counts.layer_names = [l.name or str(i) for i, l in enumerate(w.layers)]
    return counts


def inference_access_counts(w: Workload, cfg: AccessConfig) -> AccessCounts:
    I, O, W = footprint_arrays(w, cfg.d_w)
    return _with_names(inference_counts_from_footprints(I, O, W, cfg), w)


def training_access_counts(w: Workload, cfg: AccessConfig) -> AccessCounts:
    I, O, W = footprint_arrays(w, cfg.d_w)
    return _with_names(training_counts_from_footprints(I, O, W, cfg), w)


def access_counts(w: Workload, cfg: AccessConfig, phase: str) -> AccessCounts:
    if phase == "inference":
        return inference_access_counts(w, cfg)
    if phase == "training":
        return training_access_counts(w, cfg)
    raise ValueError(f"phase must be 'inference' or 'training', not {phase!r}")


def algorithmic_minimum(w: Workload, cfg: AccessConfig, phase: str = "inference") -> float:
    """DRAM accesses with an unbounded GLB."""
    return access_counts(w, cfg.with_glb(math.inf), phase).total_dram


# --------------------------------------------------------------------------
# sweeps

BASELINE_GLB_MB = 2.0
BASELINE_BATCH_GLB_MB = 4.0
BASELINE_BATCH = 16


@dataclass
class SweepRow:
    value: float                 # GLB MB or batch size
    counts: AccessCounts
    change_pct: float            # reduction (GLB sweep) or increase (batch sweep)
    total_change_pct: float
    per_sample_dram: float = float("nan")


def _pct(a: float, b: float) -> float:
    return 0.0 if b == 0 else 100.0 * a / b


def sweep_glb(w: Workload, sizes, cfg: AccessConfig, phase: str = "inference",
              baseline_mb: float = BASELINE_GLB_MB, baseline_batch: int = BASELINE_BATCH) -> list[SweepRow]:
    """DRAM access reduction vs the baseline GLB at the baseline batch.

    ``change_pct`` is the share of the baseline's excess over the algorithmic
    minimum that was removed: 100 means only the unavoidable first-layer
    input, weights and final output are moved.  ``total_change_pct`` is the
    plain reduction of total DRAM accesses.
    """
    sizes = list(sizes)
    if not sizes:
        raise ValueError("sizes must be non-empty")
    wb = w.with_batch(baseline_batch)
    base = access_counts(wb, cfg.with_glb(baseline_mb), phase).total_dram
    floor = algorithmic_minimum(wb, cfg, phase)
    rows = []
    for s in sizes:
        c = access_counts(wb, cfg.with_glb(s), phase)
        x = c.total_dram
        rows.append(SweepRow(s, c, _pct(base - x, base - floor), _pct(base - x, base),
                             x / baseline_batch))
    return rows


def sweep_batch(w: Workload, batches, cfg: AccessConfig, phase: str = "inference",
                baseline_batch: int = BASELINE_BATCH,
                baseline_mb: float = BASELINE_BATCH_GLB_MB) -> list[SweepRow]:
    """Total DRAM access increase vs the baseline batch at fixed GLB.

    The baseline GLB defaults to 4 MB; pass ``baseline_mb=None`` to use
    ``cfg.glb_capacity`` for both baseline and sweep.
    """
    batches = list(batches)
    if not batches:
        raise ValueError("batches must be non-empty")
    glb = cfg.glb_capacity if baseline_mb is None else baseline_mb
    c_glb = cfg.with_glb(glb)
    base = access_counts(w.with_batch(baseline_batch), c_glb, phase).total_dram
    rows = []
    for b in batches:
        c = access_counts(w.with_batch(b), c_glb, phase)
        x = c.total_dram
        rows.append(SweepRow(b, c, _pct(x - base, base), _pct(x - base, base), x / b))
    return rows
