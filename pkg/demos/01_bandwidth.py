"""
GLB bandwidth demand of CV and NLP models
=========================================

How many bytes per cycle must the global buffer deliver to keep a
systolic array busy?  Convolutions get the roofline treatment, GEMMs the
weight-stationary closed forms, softmax the SFU width.
"""

from sotmem.bandwidth import fc_bandwidth, workload_bw_profile
from sotmem.workload import AcceleratorConfig, GemmLayerSpec
from sotmem.zoo import load_zoo

###############################################################################
# Peak read demand grows with the array.  The raw formula assumes every PE
# is busy; ``channel_capped`` limits it to what a layer can actually fill.

for n in (32, 64, 128, 256):
    acc = AcceleratorConfig(n, n)
    print(f"--- {n}x{n}")
    for w in load_zoo("cv")[:6]:
        raw = workload_bw_profile(w, acc)
        cap = workload_bw_profile(w, acc, channel_capped=True)
        i = raw.max_read_index
        print(f"{w.name:16s} raw {raw.max_read:12.1f}  capped {cap.max_read:10.1f}  "
              f"({raw.describe_layer(i)})")

###############################################################################
# Transformers: with K, M, N all past the array edge the read demand is
# d_w * H regardless of the model, and it equals the softmax demand.

acc = AcceleratorConfig(256, 256)
for w in load_zoo("nlp"):
    p = workload_bw_profile(w, acc)
    print(f"{w.name:12s} read {p.max_read:7.1f}  write {p.max_write:7.2f} B/cycle")

###############################################################################
# Longer sequences (larger K) lower the write demand.

for K in (256, 512, 1024, 2048, 4096):
    d = fc_bandwidth(GemmLayerSpec(K, 1024, 1024), acc)
    print(f"K={K:5d}  case {d.case}  write {d.write_bw:7.2f} B/cycle")
