"""Command-line front end.

    sotmem zoo list [--domain cv|nlp]
    sotmem bandwidth --models all-cv --array 32 64 128 256
    sotmem access --models resnet50 --glb 2 4 8 16 32 64 128 256 --batch 16 --phase training
    sotmem access --models all-cv --sweep batch --glb 4 --batch 1 2 4 8 16 32 64
    sotmem dtco --knob theta_sh
    sotmem dtco --montecarlo --seed 7
    sotmem evaluate --models all-cv --glb 64 --phase inference
    sotmem evaluate --area --glb 64 256

Every output is CSV (``#`` provenance lines, then a header naming units) or
JSON.  Values come from flags, then ``--config`` file values, then shipped
defaults.  Exit codes: 2 configuration error, 3 unknown model or tech.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .access import AccessConfig, sweep_batch, sweep_glb
from .bandwidth import workload_bw_profile
from .device import (SWEEP_KNOBS, apply_guard_band, load_device_tech,
                     default_tech as default_device_tech, monte_carlo, sweep_knob)
from .syseval import (DEFAULT_TECHS, TechFamily, capacity_scan, compare_techs, load_dram,
                      load_tech)
from .workload import AcceleratorConfig
from .zoo import DOMAINS, UnknownModelError, available_models, load_workload, model_domain, resolve_models

EXIT_CONFIG = 2
EXIT_RESOLVE = 3

DEFAULTS = {
    "bandwidth": {"models": ["all"], "array": ["32", "64", "128", "256"], "datum_width": 4,
                  "channel_capped": False},
    "access": {"models": ["all"], "glb": [2, 4, 8, 16, 32, 64, 128, 256], "batch": [16],
               "phase": "inference", "sweep": "glb", "baseline_glb": None, "baseline_batch": 16},
    "dtco": {"knob": "theta_sh", "values": None, "montecarlo": False, "seed": 0, "n": 5000,
             "sigma": 0.05, "trunc": 4.0, "guard_band": False, "workers": 1, "tech": None},
    "evaluate": {"models": ["all-cv"], "glb": [64], "batch": [16], "phase": "inference",
                 "tech": list(DEFAULT_TECHS), "dram": "hbm3", "baseline": None,
                 "mode": "serial", "bit1_fraction": 0.5, "area": False},
    "zoo": {"domain": None},
}

# default sweep ranges per device knob (SI units)
KNOB_RANGES = {
    "theta_sh": np.geomspace(0.1, 100, 13),
    "w_sot": np.linspace(40e-9, 200e-9, 9),
    "t_sot": np.linspace(1e-9, 8e-9, 15),
    "t_fl": np.linspace(0.3e-9, 1.5e-9, 13),
    "d_mtj": np.linspace(30e-9, 120e-9, 10),
    "t_mgo": np.linspace(1e-9, 4e-9, 13),
}
KNOB_UNITS = {"theta_sh": "-", "w_sot": "m", "t_sot": "m", "t_fl": "m", "d_mtj": "m", "t_mgo": "m"}


class ConfigError(Exception):
    pass


class ResolveError(Exception):
    pass


# --------------------------------------------------------------------------
# output

class Table:
    """Columns are (name, unit) pairs; rows are lists of plain values."""

    def __init__(self, columns, rows=None, summary=None):
        self.columns = list(columns)
        self.rows = rows or []
        self.summary = summary or {}

    def header(self):
        return [f"{n}[{u}]" if u else n for n, u in self.columns]


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return repr(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


def render(table: Table, fmt: str, provenance: dict) -> str:
    if fmt == "json":
        doc = {"provenance": provenance,
               "columns": [{"name": n, "unit": u} for n, u in table.columns],
               "rows": [dict(zip([n for n, _ in table.columns], r)) for r in table.rows],
               "summary": table.summary}
        return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    for k, v in provenance.items():
        buf.write(f"# {k}: {json.dumps(_jsonable(v), sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.header())
    for r in table.rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


# --------------------------------------------------------------------------
# config resolution

def _effective(cmd: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[cmd])
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            doc = yaml.safe_load(path.read_text()) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"cannot parse {path}: {e}") from e
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: expected a mapping")
        doc = doc.get(cmd, doc)
        unknown = set(doc) - set(cfg)
        if unknown:
            raise ConfigError(f"{path}: unknown keys for {cmd}: {sorted(unknown)}")
        cfg.update(doc)
    for k in cfg:
        v = getattr(args, k, None)
        if v is not None and v is not False:
            cfg[k] = v
    return cfg


def _listify(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _models(selectors) -> list[str]:
    sel = _listify(selectors)
    if not sel:
        raise ConfigError("no models selected")
    out: list[str] = []
    try:
        for s in map(str, sel):
            names = [s] if Path(s).suffix else resolve_models([s])
            out += [n for n in names if n not in out]
    except UnknownModelError as e:
        raise ResolveError(e.args[0]) from e
    return out


def _load(name, batch):
    try:
        return load_workload(name, batch)
    except UnknownModelError as e:
        raise ResolveError(e.args[0]) from e
    except FileNotFoundError as e:
        raise ResolveError(f"workload file not found: {name}") from e


def _array(spec) -> tuple[int, int]:
    s = str(spec).lower()
    try:
        if "x" in s:
            h, w = (int(x) for x in s.split("x"))
        else:
            h = w = int(s)
    except ValueError as e:
        raise ConfigError(f"bad array size {spec!r}; use N or HxW") from e
    if h <= 0 or w <= 0:
        raise ConfigError(f"bad array size {spec!r}")
    return h, w


def _positive(vals, what, cast=float):
    try:
        out = [cast(v) for v in _listify(vals)]
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad {what}: {vals!r}") from e
    if not out:
        raise ConfigError(f"{what} list is empty")
    if any(not v > 0 for v in out):
        raise ConfigError(f"{what} must be positive")
    return out


def _tech_family(name) -> TechFamily:
    try:
        return load_tech(name)
    except FileNotFoundError as e:
        raise ResolveError(str(e)) from e
    except (KeyError, ValueError, TypeError) as e:
        raise ConfigError(f"bad tech file {name!r}: {e}") from e


# --------------------------------------------------------------------------
# subcommands

def cmd_zoo(cfg) -> Table:
    dom = cfg["domain"]
    if dom is not None and dom not in DOMAINS:
        raise ConfigError(f"domain must be one of {DOMAINS}")
    t = Table([("model", ""), ("domain", ""), ("layers", "count"), ("parameters", "count")])
    from .workload import parameter_count
    for n in available_models(dom):
        w = load_workload(n)
        t.rows.append([n, model_domain(n), len(w.layers), parameter_count(w.layers)])
    return t


def cmd_bandwidth(cfg) -> Table:
    names = _models(cfg["models"])
    arrays = [_array(a) for a in _listify(cfg["array"])]
    if not arrays:
        raise ConfigError("array list is empty")
    t = Table([("model", ""), ("array", "HxW"), ("max_read_bw", "B/cycle"), ("max_read_layer", ""),
               ("max_read_dims", ""), ("max_write_bw", "B/cycle"), ("max_write_layer", ""),
               ("max_write_dims", ""), ("mean_read_bw", "B/cycle"), ("mean_write_bw", "B/cycle")])
    for n in names:
        w = _load(n, 1)
        for h, wd in arrays:
            try:
                acc = AcceleratorConfig(h, wd, datum_width=int(cfg["datum_width"]))
            except ValueError as e:
                raise ConfigError(str(e)) from e
            prof = workload_bw_profile(w, acc, bool(cfg["channel_capped"]))
            ir, iw = prof.max_read_index, prof.max_write_index
            t.rows.append([n, f"{h}x{wd}", prof.max_read, prof.layers[ir].name,
                           prof.describe_layer(ir), prof.max_write, prof.layers[iw].name,
                           prof.describe_layer(iw), prof.mean_read, prof.mean_write])
    return t


def cmd_access(cfg) -> Table:
    names = _models(cfg["models"])
    phase = cfg["phase"]
    if phase not in ("inference", "training"):
        raise ConfigError("phase must be inference or training")
    glbs = _positive(cfg["glb"], "GLB size")
    batches = _positive(cfg["batch"], "batch size", int)
    base_batch = int(cfg["baseline_batch"])
    sweep = cfg["sweep"]
    acc = AccessConfig(glbs[0])
    count_cols = [("rd_dram", "accesses"), ("wr_dram", "accesses"), ("rd_glb", "accesses"),
                  ("wr_glb", "accesses"), ("dram_total", "accesses")]
    if sweep == "glb":
        if len(batches) != 1:
            raise ConfigError("a GLB sweep takes a single --batch")
        base_mb = float(cfg["baseline_glb"] or 2.0)
        t = Table([("model", ""), ("phase", ""), ("batch", "samples"), ("glb", "MB")] + count_cols
                  + [("reduction", "%"), ("total_reduction", "%"), ("dram_per_sample", "accesses")])
        for n in names:
            w = _load(n, 1)
            for r in sweep_glb(w, glbs, acc, phase, base_mb, batches[0]):
                c = r.counts
                t.rows.append([n, phase, batches[0], r.value, c.total_rd_dram, c.total_wr_dram,
                               c.total_rd_glb, c.total_wr_glb, c.total_dram, r.change_pct,
                               r.total_change_pct, r.per_sample_dram])
    elif sweep == "batch":
        if len(glbs) != 1:
            raise ConfigError("a batch sweep takes a single --glb")
        t = Table([("model", ""), ("phase", ""), ("glb", "MB"), ("batch", "samples")] + count_cols
                  + [("increase", "%"), ("dram_per_sample", "accesses")])
        for n in names:
            w = _load(n, 1)
            for r in sweep_batch(w, batches, acc, phase, base_batch, glbs[0]):
                c = r.counts
                t.rows.append([n, phase, glbs[0], int(r.value), c.total_rd_dram, c.total_wr_dram,
                               c.total_rd_glb, c.total_wr_glb, c.total_dram, r.change_pct,
                               r.per_sample_dram])
    else:
        raise ConfigError("sweep must be glb or batch")
    return t


def _device_tech(cfg):
    if cfg["tech"] is None:
        return default_device_tech()
    path = _listify(cfg["tech"])[0]
    if not Path(path).exists():
        raise ResolveError(f"device tech file not found: {path}")
    try:
        return load_device_tech(path)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad device tech file {path}: {e}") from e


def cmd_dtco(cfg) -> Table:
    tech = _device_tech(cfg)
    if cfg["montecarlo"]:
        n = int(cfg["n"])
        if n < 1:
            raise ConfigError("n must be >= 1")
        p = apply_guard_band(tech.cell, tech.process_frac, tech.temp_frac) if cfg["guard_band"] else tech.cell
        try:
            rep = monte_carlo(p, n=n, sigma_frac=float(cfg["sigma"]), trunc_sigma=float(cfg["trunc"]),
                              seed=int(cfg["seed"]), tech=tech, workers=int(cfg["workers"]))
        except ValueError as e:
            raise ConfigError(str(e)) from e
        t = Table([("quantity", ""), ("value", ""), ("unit", "")])
        t.rows += [["write_yield", rep.write_yield, "fraction"],
                   ["read_yield", rep.read_yield, "fraction"],
                   ["retention_yield", rep.retention_yield, "fraction"]]
        units = {"temperature": "K", "d_mtj": "m", "t_fl": "m", "w_sot": "m", "i_c": "A",
                 "tau_p": "s", "i_p": "A", "i_ap": "A", "delta": "-", "t_ret": "s"}
        for corner, vals in rep.corners.items():
            for k, v in vals.items():
                t.rows.append([f"{corner}.{k}", v, units.get(k, "")])
        for k, v in rep.thresholds.items():
            t.rows.append([f"threshold.{k}", v, "s" if k in ("write_pulse_max", "min_retention") else "A"])
        t.summary = rep.summary()
        return t
    knob = cfg["knob"]
    if knob not in SWEEP_KNOBS:
        raise ConfigError(f"knob must be one of {SWEEP_KNOBS}")
    values = KNOB_RANGES[knob] if cfg["values"] is None else _positive(cfg["values"], "knob value")
    t = Table([("knob", ""), ("value", KNOB_UNITS[knob]), ("j_c", "A/m^2"), ("i_c", "A"),
               ("tau_p", "s"), ("delta", "-"), ("t_ret", "s"), ("tmr", "%"), ("read_latency", "s")])
    for r in sweep_knob(knob, values, tech=tech):
        t.rows.append([r["knob"], r["value"], r["j_c"], r["i_c"], r["tau_p"], r["delta"],
                       r["t_ret"], r["tmr"], r["read_latency"]])
    sub = [r[1] for r in t.rows if math.isnan(r[3]) or math.isnan(r[4])]
    t.summary = {"sub_critical_points": sub}
    return t


def cmd_evaluate(cfg) -> Table:
    techs = [_tech_family(n) for n in _listify(cfg["tech"])]
    if not techs:
        raise ConfigError("no technologies given")
    caps = _positive(cfg["glb"], "GLB size")
    names = [t.name for t in techs]
    baseline = cfg["baseline"] or names[0]
    if baseline not in names:
        raise ConfigError(f"baseline {baseline!r} not among {names}")
    base = techs[names.index(baseline)]
    try:
        if cfg["area"]:
            t = Table([("tech", ""), ("glb", "MB"), ("area", "mm^2"), ("area_ratio", "x")])
            for cap in caps:
                for tf in techs:
                    t.rows.append([tf.name, cap, tf.area(cap), tf.area(cap) / base.area(cap)])
            return t
        try:
            dram = load_dram(cfg["dram"])
        except FileNotFoundError as e:
            raise ResolveError(str(e)) from e
        phases = [cfg["phase"]] if isinstance(cfg["phase"], str) else list(cfg["phase"])
        if any(p not in ("inference", "training") for p in phases):
            raise ConfigError("phase must be inference or training")
        if cfg["mode"] not in ("serial", "overlapped"):
            raise ConfigError("mode must be serial or overlapped")
        batches = _positive(cfg["batch"], "batch size", int)
        if len(batches) != 1:
            raise ConfigError("evaluate takes a single --batch")
        models = [_load(n, batches[0]) for n in _models(cfg["models"])]
        t = Table([("model", ""), ("phase", ""), ("glb", "MB"), ("tech", ""), ("energy", "J"),
                   ("dram_dynamic", "J"), ("glb_dynamic", "J"), ("glb_leakage", "J"),
                   ("latency", "s"), ("dram_latency", "s"), ("glb_latency", "s"), ("area", "mm^2"),
                   ("energy_ratio", "x"), ("latency_ratio", "x")])
        summary = {"baseline": baseline, "geomean": [], "energy_order_inversions": []}
        for cap in caps:
            tab = compare_techs(models, techs, dram, phases, cap, baseline, cfg["mode"],
                                float(cfg["bit1_fraction"]))
            for r in tab.rows:
                e = r.entry
                es, ls = e.energy_split, e.latency_split
                t.rows.append([r.model, r.phase, cap, r.tech, r.energy, es["dram_dynamic"],
                               es["glb_dynamic"], es["glb_leakage"], r.latency, ls["dram"],
                               ls["glb"], e.area, r.energy_ratio, r.latency_ratio])
            for r in tab.summary():
                t.rows.append(["geomean", r.phase, cap, r.tech, r.energy, "", "", "", r.latency,
                               "", "", techs[names.index(r.tech)].area(cap), r.energy_ratio,
                               r.latency_ratio])
                summary["geomean"].append({"phase": r.phase, "glb_mb": cap, "tech": r.tech,
                                           "energy_ratio": r.energy_ratio,
                                           "latency_ratio": r.latency_ratio})
        if len(caps) > 1:
            for w in models:
                for tf in techs:
                    for ph in phases:
                        for pt in capacity_scan(w, tf, dram, caps, ph, cfg["mode"]):
                            if pt.inverted:
                                summary["energy_order_inversions"].append(
                                    {"model": w.name, "tech": tf.name, "phase": ph, "glb_mb": pt.capacity})
        t.summary = summary
        return t
    except ValueError as e:
        if isinstance(e, (ConfigError, ResolveError)):
            raise
        raise ConfigError(str(e)) from e


COMMANDS = {"bandwidth": cmd_bandwidth, "access": cmd_access, "dtco": cmd_dtco,
            "evaluate": cmd_evaluate, "zoo": cmd_zoo}


# --------------------------------------------------------------------------
# argument parsing

def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="YAML file of option values (flags override it)")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sotmem", description=__doc__.split("\n\n")[0])
    ap.add_argument("--version", action="version", version=f"sotmem {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bandwidth", help="GLB bandwidth demand per model and array size")
    _common(p)
    p.add_argument("--models", nargs="+", help="names, all, all-cv, all-nlp, or workload files")
    p.add_argument("--array", nargs="+", help="array sizes: N (square) or HxW")
    p.add_argument("--datum-width", dest="datum_width", type=int, help="bytes per element")
    p.add_argument("--channel-capped", dest="channel_capped", action="store_true",
                   help="only count PEs the layer can fill")

    p = sub.add_parser("access", help="DRAM/GLB access counts over GLB or batch sweeps")
    _common(p)
    p.add_argument("--models", nargs="+")
    p.add_argument("--glb", nargs="+", type=float, help="GLB sizes in MB")
    p.add_argument("--batch", nargs="+", type=int, help="batch sizes")
    p.add_argument("--phase", choices=("inference", "training"))
    p.add_argument("--sweep", choices=("glb", "batch"))
    p.add_argument("--baseline-glb", dest="baseline_glb", type=float,
                   help="reference GLB for the reduction column (MB)")
    p.add_argument("--baseline-batch", dest="baseline_batch", type=int)

    p = sub.add_parser("dtco", help="SOT-MRAM device knob sweeps and Monte Carlo yield")
    _common(p)
    p.add_argument("--knob", choices=SWEEP_KNOBS)
    p.add_argument("--values", nargs="+", type=float, help="knob values (SI units)")
    p.add_argument("--montecarlo", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int, help="Monte Carlo samples")
    p.add_argument("--sigma", type=float, help="relative sigma of varied dimensions")
    p.add_argument("--trunc", type=float, help="truncation in sigmas")
    p.add_argument("--apply-guard-band", dest="guard_band", action="store_true",
                   help="inflate a nominal cell by the tech file's guard band first "
                        "(the shipped cell is already guard-banded)")
    p.add_argument("--workers", type=int)
    p.add_argument("--tech", nargs=1, help="device tech YAML file")

    p = sub.add_parser("evaluate", help="system energy/latency/area of GLB technologies")
    _common(p)
    p.add_argument("--models", nargs="+")
    p.add_argument("--glb", nargs="+", type=float, help="GLB capacities in MB")
    p.add_argument("--batch", nargs="+", type=int)
    p.add_argument("--phase", nargs="+", choices=("inference", "training"))
    p.add_argument("--tech", nargs="+", help="tech names or files; first is the baseline")
    p.add_argument("--dram", help="DRAM tech name or file")
    p.add_argument("--baseline", help="baseline tech name")
    p.add_argument("--mode", choices=("serial", "overlapped"))
    p.add_argument("--bit1-fraction", dest="bit1_fraction", type=float)
    p.add_argument("--area", action="store_true", help="area table only")

    p = sub.add_parser("zoo", help="model zoo")
    zsub = p.add_subparsers(dest="zoo_command", required=True)
    zl = zsub.add_parser("list", help="list zoo models")
    _common(zl)
    zl.add_argument("--domain", choices=DOMAINS)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cmd = args.command
    try:
        cfg = _effective(cmd, args)
        table = COMMANDS[cmd](cfg)
    except ConfigError as e:
        print(f"sotmem: error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ResolveError as e:
        print(f"sotmem: error: {e}", file=sys.stderr)
        return EXIT_RESOLVE
    prov = {"tool": f"sotmem {__version__}", "command": cmd, "config": cfg}
    text = render(table, args.format, prov)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
