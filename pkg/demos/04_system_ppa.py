"""
System energy, latency and area of SRAM and SOT-MRAM buffers
=============================================================

Combine access counts with the shipped technology files and compare
against SRAM.  Ratios are SRAM / candidate, so larger is better.
"""

from sotmem.syseval import (DEFAULT_TECHS, area_ratio, capacity_scan, compare_techs,
                            load_dram, load_tech)
from sotmem.zoo import load_zoo

dram = load_dram()
techs = [load_tech(n) for n in DEFAULT_TECHS]

for dom, cap in (("cv", 64), ("cv", 256), ("nlp", 64), ("nlp", 256)):
    tab = compare_techs(load_zoo(dom, 16), techs, dram, ("inference", "training"), cap)
    for r in tab.summary():
        print(f"{dom:3s} {cap:4d} MB {r.phase:9s} {r.tech:13s} "
              f"energy x{r.energy_ratio:5.2f}  latency x{r.latency_ratio:5.2f}")

###############################################################################
# Where does SRAM's energy go?  Mostly leakage once training runs long.

sram = techs[0]
tab = compare_techs(load_zoo("cv", 16)[:3], [sram], dram, ("training",), 256)
for r in tab.rows:
    s = r.entry.energy_split
    print(r.model, {k: f"{v / r.energy:.0%}" for k, v in s.items()})

###############################################################################
# Bigger is not always better: leakage and per-access cost grow with the
# array, so total energy can rise while DRAM traffic keeps falling.

w = load_zoo("cv", 16)[0]
for p in capacity_scan(w, sram, dram, [2, 4, 8, 16, 32, 64, 128, 256]):
    print(f"{p.capacity:5.0f} MB  {p.energy:.3e} J  dram {p.dram_accesses:.3e}"
          + ("  <- energy rose" if p.inverted else ""))

###############################################################################
# Area.

for cap in (64, 256):
    print(cap, "MB", {t.name: round(area_ratio(t, sram, cap), 3) for t in techs})
