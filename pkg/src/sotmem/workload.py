"""DNN workload representation.

A workload is an ordered list of layers (convolution, GEMM, softmax) plus a
batch size.  Every layer knows how to report its tensor footprint -- ifmap,
ofmap and weight sizes in MB, with gradients mirroring the forward tensors.

Sizes use the binary megabyte (1 MB = 2**20 bytes) throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

MB = float(2**20)

VALID_DATUM_WIDTHS = (1, 2, 4, 8)


@dataclass(frozen=True)
class AcceleratorConfig:
    """Systolic PE array plus its special-function unit.

    ``sfu_width`` is the number of exponential units in the SFU; it defaults
    to the array height.
    """

    array_height: int
    array_width: int
    clock_hz: float = 1.0e9
    datum_width: int = 4
    sfu_width: int | None = None

    def __post_init__(self):
        if self.array_height <= 0 or self.array_width <= 0:
            raise ValueError("array dimensions must be positive")
        if self.clock_hz <= 0:
            raise ValueError("clock must be positive")
        if self.datum_width not in VALID_DATUM_WIDTHS:
            raise ValueError(f"datum_width must be one of {VALID_DATUM_WIDTHS}")
        if self.sfu_width is None:
            object.__setattr__(self, "sfu_width", self.array_height)
        elif self.sfu_width <= 0:
            raise ValueError("sfu_width must be positive")

    @property
    def n_pe(self) -> int:
        return self.array_height * self.array_width


@dataclass(frozen=True)
class ConvLayerSpec:
    """One convolution.  ``if_*`` is the unpadded input size; ``of_*`` is
    stored explicitly rather than derived from a padding rule."""

    k_h: int
    k_w: int
    if_h: int
    if_w: int
    of_h: int
    of_w: int
    n_ich: int
    n_och: int
    stride: int = 1
    groups: int = 1
    name: str = ""

    kind = "conv"

    def __post_init__(self):
        dims = (self.k_h, self.k_w, self.if_h, self.if_w, self.of_h, self.of_w,
                self.n_ich, self.n_och, self.stride, self.groups)
        if min(dims) < 1:
            raise ValueError(f"conv layer {self.name!r}: all dims must be >= 1")
        if self.of_h > self.if_h or self.of_w > self.if_w:
            raise ValueError(f"conv layer {self.name!r}: ofmap larger than ifmap")
        if self.n_ich % self.groups or self.n_och % self.groups:
            raise ValueError(f"conv layer {self.name!r}: channels not divisible by groups")


@dataclass(frozen=True)
class GemmLayerSpec:
    """Input K x M times weight M x N gives output K x N.

    ``weight_kind`` says what the M x N operand is:

    * ``"param"``      -- trained parameters (batch invariant)
    * ``"tied"``       -- parameters shared with an earlier layer; moved like
                          parameters but not counted twice
    * ``"activation"`` -- a per-sample activation (e.g. keys in attention),
                          which scales with batch

    ``onehot_input`` marks embedding lookups: the input is K token ids rather
    than a dense K x M matrix.
    """

    K: int
    M: int
    N: int
    weight_kind: str = "param"
    onehot_input: bool = False
    name: str = ""

    kind = "gemm"

    def __post_init__(self):
        if min(self.K, self.M, self.N) < 1:
            raise ValueError(f"gemm layer {self.name!r}: K, M, N must be >= 1")
        if self.weight_kind not in ("param", "tied", "activation"):
            raise ValueError(f"unknown weight_kind {self.weight_kind!r}")


@dataclass(frozen=True)
class SoftmaxLayerSpec:
    """Row softmax over an n_sql x n_sql attention matrix."""

    n_sql: int
    name: str = ""

    kind = "softmax"

    def __post_init__(self):
        if self.n_sql < 1:
            raise ValueError("n_sql must be >= 1")


LayerSpec = Union[ConvLayerSpec, GemmLayerSpec, SoftmaxLayerSpec]


@dataclass(frozen=True)
class TransformerConfig:
    n_enc_layers: int
    n_dec_layers: int
    n_heads: int
    n_em: int
    d_ff: int
    n_sql: int
    n_vocab: int

    def __post_init__(self):
        if self.n_enc_layers < 0 or self.n_dec_layers < 0:
            raise ValueError("layer counts must be >= 0")
        if self.n_enc_layers == 0 and self.n_dec_layers == 0:
            raise ValueError("transformer needs at least one encoder or decoder layer")
        for f in ("n_heads", "n_em", "d_ff", "n_sql", "n_vocab"):
            if getattr(self, f) < 1:
                raise ValueError(f"{f} must be >= 1")
        if self.n_em % self.n_heads:
            raise ValueError("n_em must be divisible by n_heads")

    @property
    def d_head(self) -> int:
        return self.n_em // self.n_heads


@dataclass(frozen=True)
class LayerFootprint:
    """Tensor sizes of one layer in MB.  Gradients have the shape of the
    tensor they differentiate, so GI/GO/GW simply mirror I/O/W."""

    I: float
    O: float
    W: float

    @property
    def GI(self) -> float:
        return self.I

    @property
    def GO(self) -> float:
        return self.O

    @property
    def GW(self) -> float:
        return self.W


@dataclass(frozen=True)
class Workload:
    name: str
    layers: tuple
    batch_size: int = 1
    domain: str = ""

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValueError(f"workload {self.name!r} has no layers")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")

    def with_batch(self, batch_size: int) -> "Workload":
        return Workload(self.name, self.layers, batch_size, self.domain)

    def __len__(self):
        return len(self.layers)


# --------------------------------------------------------------------------
# footprints

def conv_footprint(layer: ConvLayerSpec, batch: int = 1, d_w: int = 4) -> LayerFootprint:
    i = batch * layer.n_ich * layer.if_h * layer.if_w * d_w
    o = batch * layer.n_och * layer.of_h * layer.of_w * d_w
    w = layer.n_och * (layer.n_ich // layer.groups) * layer.k_h * layer.k_w * d_w
    return LayerFootprint(i / MB, o / MB, w / MB)


def gemm_footprint(layer: GemmLayerSpec, d_w: int = 4, batch: int = 1) -> LayerFootprint:
    in_elems = layer.K if layer.onehot_input else layer.K * layer.M
    w = layer.M * layer.N * d_w
    if layer.weight_kind == "activation":
        w *= batch
    return LayerFootprint(batch * in_elems * d_w / MB, batch * layer.K * layer.N * d_w / MB, w / MB)


def softmax_footprint(layer: SoftmaxLayerSpec, d_w: int = 4, batch: int = 1) -> LayerFootprint:
    n = batch * layer.n_sql * layer.n_sql * d_w / MB
    return LayerFootprint(n, n, 0.0)


def layer_footprint(layer: LayerSpec, batch: int = 1, d_w: int = 4) -> LayerFootprint:
    if isinstance(layer, ConvLayerSpec):
        return conv_footprint(layer, batch, d_w)
    if isinstance(layer, GemmLayerSpec):
        return gemm_footprint(layer, d_w, batch)
    if isinstance(layer, SoftmaxLayerSpec):
        return softmax_footprint(layer, d_w, batch)
    raise TypeError(f"not a layer spec: {layer!r}")


def footprint_arrays(w: Workload, d_w: int = 4) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(I, O, W) arrays in MB for every layer at the workload's batch size."""
    fps = [layer_footprint(l, w.batch_size, d_w) for l in w.layers]
    return (np.array([f.I for f in fps]),
            np.array([f.O for f in fps]),
            np.array([f.W for f in fps]))


def parameter_count(layers: Sequence[LayerSpec]) -> int:
    """Trainable weight elements, counting tied weights once and skipping
    activation operands.  Biases and normalization parameters are not modeled."""
    total = 0
    for l in layers:
        if isinstance(l, ConvLayerSpec):
            total += l.n_och * (l.n_ich // l.groups) * l.k_h * l.k_w
        elif isinstance(l, GemmLayerSpec) and l.weight_kind == "param":
            total += l.M * l.N
    return total


# --------------------------------------------------------------------------
# transformer expansion

def _attention(prefix: str, cfg: TransformerConfig, project_kv: bool) -> list:
    L, E, H, dh = cfg.n_sql, cfg.n_em, cfg.n_heads, cfg.d_head
    out = [GemmLayerSpec(L, E, E, name=f"{prefix}.q_proj")]
    if project_kv:
        out.append(GemmLayerSpec(L, E, E, name=f"{prefix}.k_proj"))
        out.append(GemmLayerSpec(L, E, E, name=f"{prefix}.v_proj"))
    for h in range(H):
        out.append(GemmLayerSpec(L, dh, L, weight_kind="activation", name=f"{prefix}.h{h}.score"))
        out.append(SoftmaxLayerSpec(L, name=f"{prefix}.h{h}.softmax"))
        out.append(GemmLayerSpec(L, L, dh, weight_kind="activation", name=f"{prefix}.h{h}.av"))
    out.append(GemmLayerSpec(L, E, E, name=f"{prefix}.out_proj"))
    return out


def _ffn(prefix: str, cfg: TransformerConfig) -> list:
    return [GemmLayerSpec(cfg.n_sql, cfg.n_em, cfg.d_ff, name=f"{prefix}.ffn1"),
            GemmLayerSpec(cfg.n_sql, cfg.d_ff, cfg.n_em, name=f"{prefix}.ffn2")]


def transformer_to_layers(cfg: TransformerConfig, d_w: int = 4,
                          cached_cross_kv: bool = True) -> list:
    """Expand a transformer description into its GEMM/softmax layer sequence.

    Heads are separate GEMMs with inner dimension n_em/n_heads.  With
    ``cached_cross_kv`` the decoder's cross-attention reads keys/values of the
    encoder output that were projected once and cached, so no K/V projection
    GEMMs are emitted for it.  ``d_w`` is accepted for interface symmetry;
    layer shapes do not depend on it.
    """
    if d_w not in VALID_DATUM_WIDTHS:
        raise ValueError(f"datum width must be one of {VALID_DATUM_WIDTHS}")
    L, E, V = cfg.n_sql, cfg.n_em, cfg.n_vocab
    layers: list = [GemmLayerSpec(L, V, E, onehot_input=True, name="embed")]
    for i in range(cfg.n_enc_layers):
        layers += _attention(f"enc{i}.self", cfg, project_kv=True)
        layers += _ffn(f"enc{i}", cfg)
    if cfg.n_dec_layers and cfg.n_enc_layers:
        layers.append(GemmLayerSpec(L, V, E, weight_kind="tied", onehot_input=True, name="dec_embed"))
    for i in range(cfg.n_dec_layers):
        layers += _attention(f"dec{i}.self", cfg, project_kv=True)
        if cfg.n_enc_layers:
            layers += _attention(f"dec{i}.cross", cfg, project_kv=not cached_cross_kv)
        layers += _ffn(f"dec{i}", cfg)
    layers.append(GemmLayerSpec(L, E, V, weight_kind="tied", name="lm_head"))
    return layers
