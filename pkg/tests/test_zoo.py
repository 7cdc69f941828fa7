import pytest

from sotmem.zoo import (UnknownModelError, available_models, load_workload, load_zoo,
                        model_domain, resolve_models, workload_from_dict)


def test_zoo_sizes():
    assert len(available_models("nlp")) == 11
    assert len(available_models("cv")) >= 14


def test_every_model_loads(zoo):
    for w in zoo:
        assert len(w) > 0 and w.domain in ("cv", "nlp")


def test_domain_lookup_and_unknown():
    assert model_domain("bert") == "nlp"
    assert model_domain("resnet50") == "cv"
    with pytest.raises(UnknownModelError):
        model_domain("not_a_model")


def test_resolve_selectors():
    assert resolve_models(["all-nlp"]) == available_models("nlp")
    assert resolve_models(["bert", "bert", "resnet50"]) == ["bert", "resnet50"]
    assert len(resolve_models(["all"])) == len(available_models())


def test_load_from_path(tmp_path):
    p = tmp_path / "tiny.yaml"
    p.write_text("name: tiny\nlayers:\n  - {type: gemm, K: 2, M: 3, N: 4}\n"
                 "  - {type: softmax, n_sql: 2}\n")
    w = load_workload(p, batch_size=2)
    assert w.name == "tiny" and w.batch_size == 2 and len(w) == 2


def test_bad_layer_type():
    with pytest.raises(ValueError):
        workload_from_dict({"name": "x", "layers": [{"type": "pool"}]})


def test_load_zoo_batch():
    assert all(w.batch_size == 4 for w in load_zoo("nlp", 4))
