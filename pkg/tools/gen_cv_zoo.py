"""Regenerate the CV workload zoo from torchvision architecture definitions.

Runs one forward pass per model with hooks on every Conv2d/Linear and writes
the observed shapes to src/sotmem/data/zoo/cv/<model>.yaml.  Needs torch and
torchvision (the `zoo` extra); the package itself only reads the YAML.

    python tools/gen_cv_zoo.py
"""

from pathlib import Path

import torch
import torchvision.models as tvm
import yaml

OUT = Path(__file__).resolve().parents[1] / "src" / "sotmem" / "data" / "zoo" / "cv"

MODELS = {
    "alexnet": (tvm.alexnet, {}, 224),
    "vgg11": (tvm.vgg11, {}, 224),
    "vgg16": (tvm.vgg16, {}, 224),
    "vgg19": (tvm.vgg19, {}, 224),
    "resnet18": (tvm.resnet18, {}, 224),
    "resnet34": (tvm.resnet34, {}, 224),
    "resnet50": (tvm.resnet50, {}, 224),
    "resnet101": (tvm.resnet101, {}, 224),
    "resnet152": (tvm.resnet152, {}, 224),
    "wide_resnet50_2": (tvm.wide_resnet50_2, {}, 224),
    "resnext50_32x4d": (tvm.resnext50_32x4d, {}, 224),
    "squeezenet1_0": (tvm.squeezenet1_0, {}, 224),
    "squeezenet1_1": (tvm.squeezenet1_1, {}, 224),
    "densenet121": (tvm.densenet121, {}, 224),
    "densenet169": (tvm.densenet169, {}, 224),
    "googlenet": (tvm.googlenet, {"aux_logits": False, "init_weights": False}, 224),
    "inception_v3": (tvm.inception_v3, {"aux_logits": False, "init_weights": False}, 299),
    "mobilenet_v2": (tvm.mobilenet_v2, {}, 224),
}


def trace(ctor, kwargs, size):
    model = ctor(weights=None, **kwargs).eval()
    records = []

    def hook(mod, inp, out):
        x = inp[0]
        name = names[mod]
        if isinstance(mod, torch.nn.Conv2d):
            records.append({
                "type": "conv", "name": name,
                "k": list(mod.kernel_size),
                "if": [int(x.shape[2]), int(x.shape[3])],
                "of": [int(out.shape[2]), int(out.shape[3])],
                "ich": mod.in_channels, "och": mod.out_channels,
                "stride": int(mod.stride[0]), "groups": mod.groups,
            })
        else:
            records.append({"type": "gemm", "name": name, "K": 1,
                            "M": mod.in_features, "N": mod.out_features})

    names = {}
    for n, m in model.named_modules():
        if isinstance(m, (torch.nn.Conv2d, torch.nn.Linear)):
            names[m] = n
            m.register_forward_hook(hook)
    with torch.no_grad():
        model(torch.zeros(1, 3, size, size))
    return records


class _Flow(yaml.SafeDumper):
    pass


def _flow_dict(dumper, data):
    return dumper.represent_mapping("tag:yaml.org,2002:map", data, flow_style=True)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, (ctor, kwargs, size) in MODELS.items():
        layers = trace(ctor, kwargs, size)
        doc = {"name": name, "domain": "cv",
               "source": f"torchvision.models.{ctor.__name__}, input 3x{size}x{size}",
               "layers": layers}
        text = yaml.safe_dump({k: v for k, v in doc.items() if k != "layers"}, sort_keys=False)
        text += "layers:\n"
        for rec in layers:
            text += "  - " + yaml.dump(rec, Dumper=_Flow, sort_keys=False, width=200).strip() + "\n"
        (OUT / f"{name}.yaml").write_text(text)
        print(f"{name}: {len(layers)} layers")


_Flow.add_representer(dict, _flow_dict)

if __name__ == "__main__":
    main()
