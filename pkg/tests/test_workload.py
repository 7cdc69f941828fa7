import pytest
from hypothesis import given, settings, strategies as st

from sotmem.workload import (MB, AcceleratorConfig, ConvLayerSpec, GemmLayerSpec,
                             SoftmaxLayerSpec, TransformerConfig, Workload, conv_footprint,
                             footprint_arrays, gemm_footprint, layer_footprint,
                             parameter_count, transformer_to_layers)
from sotmem.zoo import transformer_config


def test_conv_unit_case():
    f = conv_footprint(ConvLayerSpec(1, 1, 1, 1, 1, 1, 1, 1), 1, 1)
    assert (f.I * MB, f.O * MB, f.W * MB) == (1, 1, 1)


def test_conv_element_counts():
    f = conv_footprint(ConvLayerSpec(3, 3, 16, 16, 14, 14, 3, 8), 1, 4)
    assert (f.W * MB, f.I * MB, f.O * MB) == (864, 3072, 6272)


def test_grouped_conv_weights():
    f = conv_footprint(ConvLayerSpec(3, 3, 8, 8, 8, 8, 32, 32, groups=32), 1, 4)
    assert f.W * MB == 32 * 9 * 4


def test_gemm_footprints():
    f = gemm_footprint(GemmLayerSpec(1, 1, 1), 1)
    assert (f.I * MB, f.W * MB, f.O * MB) == (1, 1, 1)
    assert gemm_footprint(GemmLayerSpec(512, 768, 768), 4).W == 2.25
    assert gemm_footprint(GemmLayerSpec(2048, 12288, 12288), 4).W == 576.0


def test_activation_weights_scale_with_batch():
    l = GemmLayerSpec(64, 16, 64, weight_kind="activation")
    assert gemm_footprint(l, 4, 3).W == 3 * gemm_footprint(l, 4, 1).W


def test_softmax_footprint():
    f = layer_footprint(SoftmaxLayerSpec(1024), 1, 4)
    assert f.I == f.O == 4.0 and f.W == 0.0


layer_strategy = st.one_of(
    st.builds(lambda k, i, o, a, b: ConvLayerSpec(k, k, i, i, min(o, i), min(o, i), a, b),
              st.integers(1, 7), st.integers(1, 64), st.integers(1, 64),
              st.integers(1, 64), st.integers(1, 64)),
    st.builds(GemmLayerSpec, st.integers(1, 512), st.integers(1, 512), st.integers(1, 512)),
    st.builds(SoftmaxLayerSpec, st.integers(1, 256)),
)


@settings(max_examples=200, deadline=None)
@given(layer_strategy, st.integers(1, 64))
def test_batch_linearity_and_gradient_symmetry(layer, b):
    one, many = layer_footprint(layer, 1, 4), layer_footprint(layer, b, 4)
    assert many.I == pytest.approx(b * one.I, rel=1e-12)
    assert many.O == pytest.approx(b * one.O, rel=1e-12)
    assert many.W == one.W
    assert (many.GI, many.GO, many.GW) == (many.I, many.O, many.W)


def test_invalid_layers_rejected():
    with pytest.raises(ValueError):
        ConvLayerSpec(0, 1, 1, 1, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        ConvLayerSpec(1, 1, 4, 4, 8, 8, 1, 1)
    with pytest.raises(ValueError):
        GemmLayerSpec(1, 0, 1)
    with pytest.raises(ValueError):
        GemmLayerSpec(1, 1, 1, weight_kind="bias")
    with pytest.raises(ValueError):
        Workload("empty", [])
    with pytest.raises(ValueError):
        AcceleratorConfig(256, 256, datum_width=3)


def test_transformer_needs_layers():
    with pytest.raises(ValueError, match="at least one"):
        TransformerConfig(0, 0, 1, 1, 1, 1, 1)


def test_unit_transformer_is_all_unit_gemms():
    layers = transformer_to_layers(TransformerConfig(1, 0, 1, 1, 1, 1, 1))
    for l in layers:
        if isinstance(l, GemmLayerSpec):
            assert (l.K, l.M, l.N) == (1, 1, 1)


def test_bert_ffn_dims_and_determinism():
    cfg = transformer_config("bert")
    layers = transformer_to_layers(cfg)
    ffn1 = next(l for l in layers if l.name.endswith("ffn1"))
    assert (ffn1.K, ffn1.M, ffn1.N) == (512, 768, 3072)
    assert transformer_to_layers(cfg) == layers


def test_gpt2_softmax_is_sequence_square():
    layers = transformer_to_layers(transformer_config("gpt2"))
    sm = [l for l in layers if isinstance(l, SoftmaxLayerSpec)]
    assert sm and all(l.n_sql == 1024 for l in sm)


def test_bert_parameter_count_near_110m():
    cfg = transformer_config("bert")
    E, F, V = cfg.n_em, cfg.d_ff, cfg.n_vocab
    independent = V * E + cfg.n_enc_layers * (4 * E * E + 2 * E * F)
    got = parameter_count(transformer_to_layers(cfg))
    assert got == independent
    assert got == pytest.approx(110e6, rel=0.05)


def test_cross_attention_kv_modes():
    cfg = TransformerConfig(1, 1, 2, 8, 16, 4, 10)
    cached = transformer_to_layers(cfg, cached_cross_kv=True)
    fresh = transformer_to_layers(cfg, cached_cross_kv=False)
    assert len(fresh) == len(cached) + 2
    assert not any(l.name == "dec0.cross.k_proj" for l in cached)


def test_footprint_arrays_shape():
    w = Workload("x", [GemmLayerSpec(2, 3, 4), SoftmaxLayerSpec(2)], batch_size=2)
    I, O, W = footprint_arrays(w, 4)
    assert I.shape == O.shape == W.shape == (2,)
    assert I[0] * MB == 2 * 2 * 3 * 4
