"""Loading workloads from the YAML model zoo.

Each model is one file.  CV models list their layers explicitly::

    name: resnet50
    domain: cv
    layers:
      - {type: conv, name: conv1, k: [7, 7], if: [224, 224], of: [112, 112],
         ich: 3, och: 64, stride: 2, groups: 1}
      - {type: gemm, name: fc, K: 1, M: 2048, N: 1000}

NLP models give a transformer block instead, expanded at load time::

    name: bert
    domain: nlp
    transformer: {n_enc_layers: 12, n_dec_layers: 0, n_heads: 12, n_em: 768,
                  d_ff: 3072, n_sql: 512, n_vocab: 30522}

Layer records may also be ``{type: softmax, n_sql: ...}`` and GEMMs accept
the optional keys ``weight_kind`` and ``onehot_input``.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import yaml

from .workload import (ConvLayerSpec, GemmLayerSpec, SoftmaxLayerSpec,
                       TransformerConfig, Workload, transformer_to_layers)

DOMAINS = ("cv", "nlp")


class UnknownModelError(KeyError):
    pass


def _zoo_dir(domain: str) -> Path:
    return Path(str(resources.files("sotmem") / "data" / "zoo" / domain))


def available_models(domain: str | None = None) -> list[str]:
    domains = DOMAINS if domain is None else (domain,)
    return sorted(p.stem for d in domains for p in _zoo_dir(d).glob("*.yaml"))


def model_domain(name: str) -> str:
    for d in DOMAINS:
        if (_zoo_dir(d) / f"{name}.yaml").exists():
            return d
    raise UnknownModelError(
        f"unknown model {name!r}; available: {', '.join(available_models())}")


def parse_layer(rec: dict):
    kind = rec.get("type")
    if kind == "conv":
        return ConvLayerSpec(k_h=rec["k"][0], k_w=rec["k"][1],
                             if_h=rec["if"][0], if_w=rec["if"][1],
                             of_h=rec["of"][0], of_w=rec["of"][1],
                             n_ich=rec["ich"], n_och=rec["och"],
                             stride=rec.get("stride", 1), groups=rec.get("groups", 1),
                             name=rec.get("name", ""))
    if kind == "gemm":
        return GemmLayerSpec(rec["K"], rec["M"], rec["N"],
                             weight_kind=rec.get("weight_kind", "param"),
                             onehot_input=rec.get("onehot_input", False),
                             name=rec.get("name", ""))
    if kind == "softmax":
        return SoftmaxLayerSpec(rec["n_sql"], name=rec.get("name", ""))
    raise ValueError(f"unknown layer type {kind!r}")


def workload_from_dict(doc: dict, batch_size: int = 1, cached_cross_kv: bool = True) -> Workload:
    name = doc["name"]
    if "transformer" in doc:
        cfg = TransformerConfig(**doc["transformer"])
        layers = transformer_to_layers(cfg, cached_cross_kv=cached_cross_kv)
    else:
        layers = [parse_layer(r) for r in doc["layers"]]
    return Workload(name, layers, batch_size, doc.get("domain", ""))


def load_workload(name_or_path: str | Path, batch_size: int = 1,
                  cached_cross_kv: bool = True) -> Workload:
    """Load a zoo model by name, or any workload file by path."""
    path = Path(name_or_path)
    if not path.suffix:
        path = _zoo_dir(model_domain(str(name_or_path))) / f"{name_or_path}.yaml"
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    return workload_from_dict(doc, batch_size, cached_cross_kv)


def transformer_config(name: str) -> TransformerConfig:
    with open(_zoo_dir("nlp") / f"{name}.yaml") as fh:
        return TransformerConfig(**yaml.safe_load(fh)["transformer"])


def resolve_models(selectors) -> list[str]:
    """Expand ``all``, ``all-cv``, ``all-nlp`` and plain names."""
    out: list[str] = []
    for s in selectors:
        if s == "all":
            names = available_models()
        elif s in ("all-cv", "all-nlp"):
            names = available_models(s[4:])
        else:
            model_domain(s)
            names = [s]
        out += [n for n in names if n not in out]
    return out


def load_zoo(domain: str, batch_size: int = 1) -> list[Workload]:
    return [load_workload(n, batch_size) for n in available_models(domain)]
