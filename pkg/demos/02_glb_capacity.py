"""
DRAM traffic versus GLB capacity and batch size
===============================================

Run the inference and training access-count procedures over a GLB sweep,
then over batch sizes at a fixed 4 MB buffer.
"""

from sotmem.access import AccessConfig, sweep_batch, sweep_glb
from sotmem.zoo import load_workload

sizes = [2, 4, 8, 16, 32, 64, 128, 256]
cfg = AccessConfig(2.0)

###############################################################################
# Reduction is the share of the 2 MB baseline's avoidable traffic that a
# larger buffer removes; 100% means only first input, weights and final
# output cross the DRAM interface.

for name in ("resnet50", "vgg16", "bert"):
    w = load_workload(name)
    for phase in ("inference", "training"):
        rows = sweep_glb(w, sizes, cfg, phase)
        red = "  ".join(f"{r.change_pct:5.1f}" for r in rows)
        print(f"{name:9s} {phase:9s} {red}")

###############################################################################
# Larger batches scale the activations but not the weights, so once the
# ofmaps overflow the buffer DRAM traffic climbs.

for name in ("resnet50", "mobilenet_v2", "gpt2"):
    rows = sweep_batch(load_workload(name), [1, 2, 4, 8, 16, 32, 64], cfg)
    print(name, [round(r.change_pct, 1) for r in rows])
