"""
SOT-MRAM cell: knobs, retention and yield
=========================================

Walk the device knobs one at a time, then check the shipped cell against
process variation.
"""

import numpy as np

from sotmem.device import (cell_timings, default_tech, monte_carlo, sweep_knob)

tech = default_tech()
t = cell_timings()
print(f"nominal cell: read {t.read_latency * 1e12:.0f} ps, write {t.write_pulse * 1e12:.0f} ps, "
      f"I_P/I_AP {t.read_current_p * 1e6:.1f}/{t.read_current_ap * 1e6:.1f} uA, Delta {t.delta:.1f}")

###############################################################################
# Spin-Hall angle and SOT thickness.  The thickness curve bottoms out at
# the optimum; thinner loses efficiency, thicker shunts current.

for knob, vals in (("theta_sh", np.geomspace(0.1, 100, 7)),
                   ("t_sot", np.linspace(1e-9, 6e-9, 11))):
    for r in sweep_knob(knob, vals):
        print(f"{knob:8s} {r['value']:10.3g}  I_c {r['i_c'] * 1e6:9.3f} uA  tau_p {r['tau_p'] * 1e12:8.1f} ps")

###############################################################################
# Retention against MTJ diameter on the thicker free layer of the sweep.

for r in sweep_knob("d_mtj", [40e-9, 55e-9, 70e-9, 88e-9, 100e-9]):
    print(f"d {r['value'] * 1e9:5.0f} nm  Delta {r['delta']:6.1f}  t_ret {r['t_ret']:.3g} s")

###############################################################################
# Monte Carlo: 5 % sigma on d_mtj, t_fl and w_sot, truncated at 4 sigma.

rep = monte_carlo(n=5000, seed=0)
print({k: rep.summary()[k] for k in ("write_yield", "read_yield", "retention_yield")})
print("write-worst corner tau_p:", rep.corners["write_worst"]["tau_p"])
