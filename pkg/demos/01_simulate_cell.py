# coding: utf-8

# # Simulating the reference cell
#
# The cell model has five states: state of charge z, open-circuit voltage x1,
# the two RC branch voltages x2 and x3, and the series resistance x4. Here we
# discharge the reference cell at a constant 0.4 A until z hits the floor.

# In[1]:

import numpy as np

from uas_battery import ConstantCurrent, PulsedResistance, simulate
from uas_battery.reference import CELL_41V, CELL_41V_CAPACITY


# In[2]:

tr = simulate(CELL_41V, CELL_41V_CAPACITY, ConstantCurrent(0.4), 4000.0)
print(f"{len(tr)} samples, stopped early: {tr.stopped_early}, last t = {tr.t[-1]:.1f} s")
print(f"terminal voltage {tr.y[0]:.4f} V -> {tr.y[-1]:.4f} V")


# Every ten minutes, print the terminal voltage next to the open-circuit voltage.
# The gap is the drop across the resistors and RC branches.

# In[3]:

for t in range(0, int(tr.t[-1]), 600):
    k = int(round(t / tr.dt))
    print(f"t={t:5d}s  z={tr.z[k]:.3f}  y={tr.y[k]:.4f}  Eo={tr.x1[k]:.4f}  x2+x3={tr.x2[k] + tr.x3[k]:.4f}")


# A pulsed resistive load draws current only while connected, so the RC
# branches relax during the off periods.

# In[4]:

pulsed = simulate(CELL_41V, CELL_41V_CAPACITY, PulsedResistance(20.0, 60.0, 30.0), 600.0)
on = pulsed.i > 0
print(f"current when on: {pulsed.i[on].min():.4f}..{pulsed.i[on].max():.4f} A, off samples: {np.sum(~on)}")
