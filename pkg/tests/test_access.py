import math

import numpy as np
import pytest

from oracles import inference_oracle, training_oracle
from sotmem.access import (AccessConfig, access_counts, algorithmic_minimum,
                           inference_counts_from_footprints, sweep_batch, sweep_glb,
                           training_counts_from_footprints)
from sotmem.workload import MB, ConvLayerSpec, GemmLayerSpec, Workload, footprint_arrays


def _random_net(rng):
    n = int(rng.integers(1, 11))
    # coarse grid so ties with the GLB size happen often
    grid = np.arange(0.0, 8.5, 0.5)
    I, O, W = (rng.choice(grid, n) for _ in range(3))
    batch = int(rng.choice([1, 2, 4, 16, 32]))
    glb = float(rng.choice([0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0, 256.0, math.inf]))
    ub = None if rng.random() < 0.7 else float(rng.choice([0.5, 2.0, 8.0]))
    return I * batch, O * batch, W, glb, ub


@pytest.mark.parametrize("phase", ["inference", "training"])
def test_engine_matches_pseudocode_oracle(phase):
    rng = np.random.default_rng(1234)
    engine = inference_counts_from_footprints if phase == "inference" else training_counts_from_footprints
    oracle = inference_oracle if phase == "inference" else training_oracle
    for _ in range(1500):
        I, O, W, glb, ub = _random_net(rng)
        md, mg = 64 / MB, 4 / MB
        cfg = AccessConfig(glb, md, mg, ub_mb=ub)
        got = engine(I, O, W, cfg)
        want = oracle(list(I), list(O), list(W), glb, md, mg, ub)
        for arr, ref in zip((got.rd_dram, got.wr_dram, got.rd_glb, got.wr_glb), want):
            assert arr.tolist() == ref


def _two_layer(fits=True):
    a = ConvLayerSpec(3, 3, 16, 16, 14, 14, 3, 8, name="a")
    b = ConvLayerSpec(3, 3, 14, 14, 12, 12, 8, 8, name="b")
    return Workload("two", [a, b])


def test_inference_two_layers_fit():
    w = _two_layer()
    I, O, W = footprint_arrays(w, 4)
    cfg = AccessConfig(1.0, 1 / MB, 1 / MB)
    c = access_counts(w, cfg, "inference")
    assert c.total_rd_dram == pytest.approx((I[0] + W[0] + W[1]) * MB, rel=1e-12)
    assert c.wr_dram[0] == 0.0
    assert c.wr_dram[1] == pytest.approx(O[1] * MB, rel=1e-12)
    assert c.rd_glb.tolist() == pytest.approx((I * MB).tolist())
    assert c.wr_glb[0] == pytest.approx((I[0] + O[0]) * MB)


def test_inference_single_layer_double_overflow():
    cfg = AccessConfig(2.0, 1.0, 1.0)
    c = inference_counts_from_footprints([1.5], [0.1], [2.5], cfg)
    assert c.rd_dram[0] == pytest.approx(4.0 + 2.0)


def test_training_single_layer_fast_path():
    cfg = AccessConfig(100.0, 1.0, 1.0)
    c = training_counts_from_footprints([1.0], [2.0], [3.0], cfg)
    assert c.rd_dram[0] == 4.0
    assert c.wr_dram[0] == 5.0


def test_training_glb_coefficients():
    cfg = AccessConfig(1.0, 1.0, 1.0)
    c = training_counts_from_footprints([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], cfg)
    assert c.rd_glb.tolist() == [3.0, 1.0, 5.0]
    assert c.wr_glb.tolist() == [2.0, 2.0, 3.0]


def test_training_floor_behavior():
    rng = np.random.default_rng(5)
    I, O, W = rng.random(6), rng.random(6), rng.random(6)
    c = training_counts_from_footprints(I, O, W, AccessConfig(1e6, 1.0, 1.0))
    assert c.total_rd_dram == pytest.approx(I[0] + W.sum(), rel=1e-12)
    assert c.total_wr_dram == pytest.approx(W.sum() + O[-1], rel=1e-12)


def test_glb_counts_independent_of_capacity(cv_zoo):
    w = cv_zoo[0].with_batch(4)
    for phase in ("inference", "training"):
        a = access_counts(w, AccessConfig(2.0), phase)
        b = access_counts(w, AccessConfig(512.0), phase)
        assert np.array_equal(a.rd_glb, b.rd_glb) and np.array_equal(a.wr_glb, b.wr_glb)


def test_infinite_glb_is_algorithmic_minimum(zoo):
    for w in zoo:
        wb = w.with_batch(16)
        I, O, W = footprint_arrays(wb, 4)
        floor = algorithmic_minimum(wb, AccessConfig(2.0), "inference")
        assert floor == pytest.approx((I[0] + W.sum() + O[-1]) / (64 / MB), rel=1e-9)


def test_empty_and_negative_inputs_rejected():
    with pytest.raises(ValueError):
        inference_counts_from_footprints([], [], [], AccessConfig(1.0))
    with pytest.raises(ValueError):
        training_counts_from_footprints([1.0], [-1.0], [1.0], AccessConfig(1.0))
    with pytest.raises(ValueError):
        AccessConfig(0.0)


def test_ceiled_counts_are_integers():
    c = inference_counts_from_footprints([1.3], [0.2], [0.7], AccessConfig(4.0, 0.5, 0.5)).ceiled()
    assert all(float(x).is_integer() for x in np.concatenate([c.rd_dram, c.wr_dram]))


def test_sweep_glb_baseline_and_monotone(cv_zoo):
    sizes = [2, 4, 8, 16, 32, 64, 128, 256]
    for w in cv_zoo[:6]:
        for phase in ("inference", "training"):
            rows = sweep_glb(w, sizes, AccessConfig(2.0), phase)
            assert rows[0].change_pct == 0.0
            red = [r.change_pct for r in rows]
            assert all(b >= a - 1e-9 for a, b in zip(red, red[1:]))
            totals = [r.counts.total_dram for r in rows]
            assert all(b <= a for a, b in zip(totals, totals[1:]))


def test_sweep_batch_baseline_and_monotone(cv_zoo):
    for w in cv_zoo[:6]:
        rows = sweep_batch(w, [1, 2, 4, 8, 16, 32, 64], AccessConfig(4.0), "inference")
        assert rows[4].change_pct == 0.0
        tot = [r.counts.total_dram for r in rows]
        assert all(b >= a for a, b in zip(tot, tot[1:]))


def test_batch_increase_when_footprint_exceeds_glb(cv_zoo):
    for w in cv_zoo:
        I, O, _ = footprint_arrays(w, 4)
        rows = sweep_batch(w, [16, 32], AccessConfig(4.0), "inference")
        if np.max(O[:-1]) > 4.0:
            assert rows[1].change_pct > 0


def test_sweeps_reject_empty_lists(cv_zoo):
    with pytest.raises(ValueError):
        sweep_glb(cv_zoo[0], [], AccessConfig(2.0))
    with pytest.raises(ValueError):
        sweep_batch(cv_zoo[0], [], AccessConfig(2.0))


def test_gemm_only_network_counts():
    w = Workload("mlp", [GemmLayerSpec(1, 16, 8), GemmLayerSpec(1, 8, 4)])
    c = access_counts(w, AccessConfig(1.0, 4 / MB, 4 / MB), "inference")
    # all tensors fit: read I1 + W1 + W2, write the final output
    assert c.total_rd_dram == pytest.approx((16 + 128 + 32) * 4 / 4)
    assert c.total_wr_dram == pytest.approx(4 * 4 / 4)


def test_unbounded_glb_batch_sweep_only_weights_amortize(cv_zoo):
    w = cv_zoo[0]
    I, O, W = footprint_arrays(w, 4)
    cfg = AccessConfig(math.inf)
    md = cfg.mbpa_dram
    rows = sweep_batch(w, [1, 4, 16, 64], cfg, baseline_mb=None)
    per_sample_act = [r.per_sample_dram - W.sum() / md / r.value for r in rows]
    assert per_sample_act == pytest.approx([(I[0] + O[-1]) / md] * 4, rel=1e-12)
