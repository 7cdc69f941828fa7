"""Analytical memory-hierarchy modeling for DNN accelerators with SOT-MRAM
global buffers: bandwidth demand, DRAM/GLB access counts, a compact SOT-MRAM
cell model, and system-level PPA comparison."""

__version__ = "0.1.0"
