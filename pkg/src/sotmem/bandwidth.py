"""GLB bandwidth demand of a PE array running a layer at full utilization.

Convolutions follow a row-stationary mapping: operational intensity is
MACs per byte moved for one input channel's partial ofmap, and the required
read bandwidth is peak throughput divided by that intensity.  GEMMs follow a
weight-stationary systolic mapping with eight closed-form cases depending on
how the operand dims compare with the array.  Softmax is bounded by the SFU
width.

All ``*_bw`` functions return bytes/cycle unless noted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .workload import (AcceleratorConfig, ConvLayerSpec, GemmLayerSpec,
                       SoftmaxLayerSpec, Workload)


@dataclass(frozen=True)
class BandwidthDemand:
    read_bw: float   # bytes/cycle
    write_bw: float  # bytes/cycle
    oi: float        # ops/byte
    peak_ops: float  # ops/sec
    case: str = ""


def peak_performance(acc: AcceleratorConfig) -> float:
    """Peak MAC throughput of the array in ops/sec."""
    return acc.array_height * acc.array_width * acc.clock_hz


def conv_oi(layer: ConvLayerSpec, d_w: int) -> float:
    kk = layer.k_h * layer.k_w
    return kk * layer.of_h * layer.of_w / (d_w * (kk + layer.if_h * layer.if_w))


def _active_pes(layer: ConvLayerSpec, acc: AcceleratorConfig, channel_capped: bool) -> float:
    n = acc.n_pe
    if channel_capped:
        need = layer.n_ich * layer.of_h * layer.of_w * layer.k_h * layer.k_w
        n = min(n, need)
    return float(n)


def conv_read_bw(layer: ConvLayerSpec, acc: AcceleratorConfig, per_cycle: bool = True,
                 channel_capped: bool = False) -> float:
    """Read bandwidth in bytes/cycle (or bytes/sec with ``per_cycle=False``).

    With ``channel_capped`` only as many PEs are assumed busy as the layer can
    fill with its input channels.
    """
    kk = layer.k_h * layer.k_w
    bw = ((kk + layer.if_h * layer.if_w) * acc.datum_width
          / (layer.k_w * layer.k_h * layer.of_h * layer.of_w)
          * _active_pes(layer, acc, channel_capped) * acc.clock_hz)
    return bw / acc.clock_hz if per_cycle else bw


def conv_write_bw(layer: ConvLayerSpec, acc: AcceleratorConfig, per_cycle: bool = True,
                  channel_capped: bool = False) -> float:
    bw = (_active_pes(layer, acc, channel_capped) * acc.clock_hz * acc.datum_width
          / (layer.k_h * layer.k_w))
    return bw / acc.clock_hz if per_cycle else bw


def fc_case(M: int, N: int, K: int, H: int, W: int) -> str:
    """Table label of the weight-stationary case, e.g. ``"IV-b"``.

    Roman numeral from (M vs H, N vs W); ``a`` for K < W, ``b`` for K >= W.
    Ties take the ``>=`` branch.
    """
    roman = {(False, False): "I", (False, True): "II",
             (True, False): "III", (True, True): "IV"}[(M >= H, N >= W)]
    return roman + ("-b" if K >= W else "-a")


def fc_elements_per_cycle(M: int, N: int, K: int, H: int, W: int) -> tuple[float, float]:
    """(read, write) elements/cycle for a K x M by M x N GEMM on an H x W array."""
    case = fc_case(M, N, K, H, W)
    if case == "I-a":
        return (M * N + K * M) / (N + K), K * N / (2 * N + K - 1)
    if case == "I-b":
        return (M * N + W * M) / (N + W), W * N / (2 * N + K - 1)
    if case == "II-a":
        return (M * W + K * M) / (N + K), K * W / (2 * W + K - 1)
    if case == "II-b":
        return (M * W + W * M) / (2 * W), W**2 / (2 * W + K - 1)
    if case == "III-a":
        return (H * N + K * H) / (N + K), K * N / (2 * N + K - 1)
    if case == "III-b":
        return (H * N + W * H) / (W + N), W * N / (2 * N + K - 1)
    if case == "IV-a":
        return (H * W + W * H) / (W + K), W * N / (2 * N + K - 1)
    return (H * W + W * H) / (2 * W), W**2 / (2 * W + K - 1)


def fc_bandwidth(layer: GemmLayerSpec, acc: AcceleratorConfig, d_w: int | None = None) -> BandwidthDemand:
    d_w = acc.datum_width if d_w is None else d_w
    H, W = acc.array_height, acc.array_width
    rd, wr = fc_elements_per_cycle(layer.M, layer.N, layer.K, H, W)
    macs = layer.K * layer.M * layer.N
    moved = (layer.K * layer.M + layer.M * layer.N + layer.K * layer.N) * d_w
    return BandwidthDemand(rd * d_w, wr * d_w, macs / moved, peak_performance(acc),
                           fc_case(layer.M, layer.N, layer.K, H, W))


def softmax_bw(acc: AcceleratorConfig, d_w: int | None = None) -> float:
    d_w = acc.datum_width if d_w is None else d_w
    return float(d_w * acc.sfu_width)


def layer_bandwidth(layer, acc: AcceleratorConfig, channel_capped: bool = False) -> BandwidthDemand:
    if isinstance(layer, ConvLayerSpec):
        return BandwidthDemand(conv_read_bw(layer, acc, True, channel_capped),
                               conv_write_bw(layer, acc, True, channel_capped),
                               conv_oi(layer, acc.datum_width), peak_performance(acc), "conv")
    if isinstance(layer, GemmLayerSpec):
        return fc_bandwidth(layer, acc)
    if isinstance(layer, SoftmaxLayerSpec):
        # read side only: one element per exponential unit per cycle.  The
        # normalized row is written once per row, which is not modeled.
        return BandwidthDemand(softmax_bw(acc), 0.0, 0.0, peak_performance(acc), "softmax")
    raise TypeError(f"not a layer spec: {layer!r}")


@dataclass
class BandwidthProfile:
    model: str
    layers: list
    demands: list

    def _argmax(self, attr):
        vals = np.array([getattr(d, attr) for d in self.demands])
        return int(np.argmax(vals))

    @property
    def max_read_index(self) -> int:
        return self._argmax("read_bw")

    @property
    def max_write_index(self) -> int:
        return self._argmax("write_bw")

    @property
    def max_read(self) -> float:
        return self.demands[self.max_read_index].read_bw

    @property
    def max_write(self) -> float:
        return self.demands[self.max_write_index].write_bw

    @property
    def mean_read(self) -> float:
        return float(np.mean([d.read_bw for d in self.demands]))

    @property
    def mean_write(self) -> float:
        return float(np.mean([d.write_bw for d in self.demands]))

    def describe_layer(self, i: int) -> str:
        l = self.layers[i]
        if isinstance(l, ConvLayerSpec):
            return f"of={l.of_h}x{l.of_w} k={l.k_h}x{l.k_w}"
        if isinstance(l, GemmLayerSpec):
            return f"K={l.K} M={l.M} N={l.N}"
        return f"softmax n_sql={l.n_sql}"


def workload_bw_profile(w: Workload, acc: AcceleratorConfig,
                        channel_capped: bool = False) -> BandwidthProfile:
    demands = [layer_bandwidth(l, acc, channel_capped) for l in w.layers]
    return BandwidthProfile(w.name, list(w.layers), demands)
