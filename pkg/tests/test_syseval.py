from dataclasses import replace

import numpy as np
import pytest

from sotmem.access import AccessConfig, access_counts, inference_counts_from_footprints
from sotmem.syseval import (DEFAULT_TECHS, DramSpec, MbpaMismatchError, MemoryTechSpec,
                            TechFamily, area_at_capacity, area_ratio, capacity_scan,
                            compare_techs, default_access_config, default_tech,
                            evaluate_ppa, geomean, load_dram, load_tech,
                            tech_family_from_dict)
from sotmem.workload import MB


@pytest.fixture(scope="module")
def dram():
    return load_dram()


@pytest.fixture(scope="module")
def techs():
    return {n: load_tech(n) for n in DEFAULT_TECHS}


def _scaled(spec: MemoryTechSpec, k: float) -> MemoryTechSpec:
    rb = tuple(k * e for e in spec.read_energy_bits)
    wb = tuple(k * e for e in spec.write_energy_bits)
    return replace(spec, read_energy=k * spec.read_energy, write_energy=k * spec.write_energy,
                   leakage_power=k * spec.leakage_power, read_energy_bits=rb, write_energy_bits=wb)


def test_zero_accesses(techs, dram):
    spec = techs["sram"].at(64)
    cfg = default_access_config(64, spec, dram)
    c = inference_counts_from_footprints([0.0], [0.0], [0.0], cfg)
    e = evaluate_ppa(c, spec, dram)
    assert e.total_energy == 0.0 and e.total_latency == 0.0


def test_table_v_bit_energy(techs):
    fam = techs["sot_mram_opt"]
    e1, e0 = fam.cell_energy("read")
    per_bit = 0.5 * (e1 + e0) / fam.bits_per_access
    assert per_bit == pytest.approx(0.5 * (150e-6 + 368e-6) * 250e-12, rel=1e-9)
    assert per_bit == pytest.approx(6.475e-17, rel=1e-6)


def test_bit_bias_knob(techs):
    spec = techs["sot_mram_opt"].at(64)
    assert spec.read_energy_for(0.5) == pytest.approx(spec.read_energy)
    # bit-cell powers are listed as (1, 0): 150/368 uW read, 325/300 uW write
    assert spec.read_energy_for(1.0) < spec.read_energy_for(0.0)
    assert spec.write_energy_for(1.0) > spec.write_energy_for(0.0)
    gap = spec.read_energy_for(0.0) - spec.read_energy_for(1.0)
    assert gap == pytest.approx((368e-6 - 150e-6) * 250e-12 * 32, rel=1e-9)


def test_splits_sum_to_totals(techs, dram, cv_zoo):
    spec = techs["sram"].at(64)
    w = cv_zoo[0].with_batch(16)
    e = evaluate_ppa(access_counts(w, default_access_config(64, spec, dram), "training"), spec, dram)
    assert sum(e.energy_split.values()) == pytest.approx(e.total_energy, rel=1e-12)
    assert sum(e.latency_split.values()) == pytest.approx(e.total_latency, rel=1e-12)


def test_additive_over_layers(techs, dram):
    spec = techs["sot_mram"].at(64)
    cfg = default_access_config(64, spec, dram)
    rng = np.random.default_rng(0)
    I, O, W = rng.random(8) * 50, rng.random(8) * 50, rng.random(8) * 50
    whole = evaluate_ppa(inference_counts_from_footprints(I, O, W, cfg), spec, dram)
    c = inference_counts_from_footprints(I, O, W, cfg)
    parts = 0.0
    for i in range(8):
        one = replace(c, rd_dram=c.rd_dram[i:i + 1], wr_dram=c.wr_dram[i:i + 1],
                      rd_glb=c.rd_glb[i:i + 1], wr_glb=c.wr_glb[i:i + 1])
        parts += evaluate_ppa(one, spec, dram).total_energy
    assert parts == pytest.approx(whole.total_energy, rel=1e-12)


def test_overlapped_not_slower(techs, dram, cv_zoo):
    spec = techs["sram"].at(64)
    c = access_counts(cv_zoo[0].with_batch(16), default_access_config(64, spec, dram), "inference")
    s = evaluate_ppa(c, spec, dram, "serial").total_latency
    o = evaluate_ppa(c, spec, dram, "overlapped").total_latency
    assert o <= s
    with pytest.raises(ValueError):
        evaluate_ppa(c, spec, dram, "pipelined")


def test_mbpa_mismatch(techs, dram):
    spec = techs["sram"].at(64)
    c = inference_counts_from_footprints([1.0], [1.0], [1.0], AccessConfig(64, 64 / MB, 64 / MB))
    with pytest.raises(MbpaMismatchError):
        evaluate_ppa(c, spec, dram)
    c = inference_counts_from_footprints([1.0], [1.0], [1.0], AccessConfig(64, 32 / MB, 4 / MB))
    with pytest.raises(MbpaMismatchError):
        evaluate_ppa(c, spec, dram)


def test_self_comparison_is_one(techs, dram, cv_zoo):
    t = compare_techs(cv_zoo[:3], [techs["sram"], techs["sram"]], dram, ("inference", "training"))
    assert {r.energy_ratio for r in t.rows} == {1.0}
    assert {r.latency_ratio for r in t.rows} == {1.0}


def test_ratios_scale_invariant(techs, dram, cv_zoo):
    specs = [techs[n].at(64) for n in DEFAULT_TECHS]
    dram_k = DramSpec(3 * dram.read_energy, 3 * dram.write_energy, dram.access_latency, dram.mbpa)
    a = compare_techs(cv_zoo[:4], specs, dram)
    b = compare_techs(cv_zoo[:4], [_scaled(s, 3.0) for s in specs], dram_k, capacity=64)
    for x, y in zip(a.rows, b.rows):
        assert x.energy_ratio == pytest.approx(y.energy_ratio, rel=1e-12)


def test_ratio_antisymmetry(techs, dram, nlp_zoo):
    ab = compare_techs(nlp_zoo[:3], [techs["sram"], techs["sot_mram_opt"]], dram)
    ba = compare_techs(nlp_zoo[:3], [techs["sot_mram_opt"], techs["sram"]], dram)
    for x in ab.rows:
        y = next(r for r in ba.rows if r.model == x.model and r.tech != x.tech)
        if x.tech == "sot_mram_opt":
            assert x.energy_ratio * y.energy_ratio == pytest.approx(1.0, rel=1e-12)
            assert x.latency_ratio * y.latency_ratio == pytest.approx(1.0, rel=1e-12)


def test_baseline_must_be_compared(techs, dram, cv_zoo):
    with pytest.raises(ValueError):
        compare_techs(cv_zoo[:1], [techs["sram"]], dram, baseline="sot_mram")


def test_sram_leakage_dominates_training(techs, dram, cv_zoo):
    spec = techs["sram"].at(256)
    cfg = default_access_config(256, spec, dram)
    for w in cv_zoo[:5]:
        e = evaluate_ppa(access_counts(w.with_batch(16), cfg, "training"), spec, dram)
        assert e.energy_split["glb_leakage"] > 0.5 * e.total_energy
    assert techs["sot_mram_opt"].at(256).leakage_power == 0.0


def test_area_examples(techs):
    sram, opt = techs["sram"], techs["sot_mram_opt"]
    assert area_ratio(opt, sram, 64) == pytest.approx(0.54, rel=0.02)
    assert area_ratio(opt, sram, 256) == pytest.approx(0.52, rel=0.02)
    caps = [2, 4, 8, 16, 32, 64, 128, 256]
    areas = [area_at_capacity(opt, c) for c in caps]
    assert all(b > a for a, b in zip(areas, areas[1:]))
    bare = replace(opt, periphery_fraction=0.0, periphery_fixed_mm2=0.0)
    assert area_at_capacity(bare, 128) == pytest.approx(2 * area_at_capacity(bare, 64), rel=1e-12)
    with pytest.raises(ValueError):
        area_at_capacity(opt, 0)


def test_interpolation_hits_table_and_rejects_outside(techs):
    fam = techs["sram"]
    i = fam.capacities.index(64.0)
    assert fam.at(64).read_latency == pytest.approx(fam.read_latency[i], rel=1e-12)
    lo, hi = fam.at(32).read_latency, fam.at(64).read_latency
    assert lo <= fam.at(48).read_latency <= hi
    with pytest.raises(ValueError):
        fam.at(1024)


def test_tech_schema_version(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("version: 99\nname: x\n")
    with pytest.raises(ValueError, match="version"):
        load_tech(p)


def test_tech_family_from_dict_round_trip():
    import yaml
    from sotmem.syseval import _tech_dir
    doc = yaml.safe_load((_tech_dir() / "sot_mram_opt.yaml").read_text())
    fam = tech_family_from_dict(doc)
    assert isinstance(fam, TechFamily)
    assert fam == default_tech("sot_mram_opt")


def test_negative_spec_rejected():
    with pytest.raises(ValueError):
        MemoryTechSpec("x", 1, -1, 0, 0, 0, 0, 0, 1)
    with pytest.raises(ValueError):
        DramSpec(1, 1, 0, 1)


def test_capacity_scan_dram_non_increasing(techs, dram, cv_zoo):
    pts = capacity_scan(cv_zoo[0].with_batch(16), techs["sram"], dram, [256, 2, 16, 64])
    assert [p.capacity for p in pts] == [2, 16, 64, 256]
    d = [p.dram_accesses for p in pts]
    assert all(b <= a for a, b in zip(d, d[1:]))
    for prev, p in zip(pts, pts[1:]):
        assert p.inverted == (p.energy > prev.energy)


def test_geomean():
    assert geomean([2.0, 8.0]) == pytest.approx(4.0)
