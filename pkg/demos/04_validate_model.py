# coding: utf-8

# # Validating the estimated model
#
# Drive the true cell and a candidate parameter set with the same seeded random
# current schedule and look at how far their voltages drift apart. Then read
# state of charge off the open-circuit voltage and compare it with Coulomb
# counting.

# In[1]:

import numpy as np

from uas_battery import compare_models, random_current_table
from uas_battery.analytics import ocv_soc
from uas_battery.reference import CELL_41V, CELL_41V_CAPACITY, CELL_41V_ESTIMATED


# In[2]:

prof = random_current_table(seed=0, t_end=1800.0)
print(f"{len(prof.times)} current steps, first few: {list(zip(prof.times[:3], prof.currents[:3]))}")


# In[3]:

c = compare_models(CELL_41V, CELL_41V_ESTIMATED, CELL_41V_CAPACITY, prof, 1800.0)
print(f"max |y_a - y_b|   = {c.max_abs_diff():.4f} V")
print(f"max |Eo_a - Eo_b| = {c.max_abs_eo_diff():.4f} V")


# Coulomb counting integrates the current; the OCV route inverts Eo(z). For a
# model read through its own OCV curve the two agree to the inversion accuracy.

# In[4]:

z_count = 1.0 - np.concatenate(([0.0], np.cumsum(c.i[:-1]))) * 0.01 / CELL_41V_CAPACITY.cc
idx = np.arange(0, len(c.t), 6000)
z_ocv = ocv_soc(CELL_41V_ESTIMATED, c.eo_b[idx])
for t, a, b in zip(c.t[idx], z_count[idx], z_ocv):
    print(f"t={t:7.1f}s  coulomb {a:.4f}  ocv {b:.4f}")
