# coding: utf-8

# # Statistics of the observer error
#
# Mean, median, mode, standard deviation, histogram and empirical CDF of the
# terminal-voltage error after convergence.

# In[1]:

from uas_battery import ConstantResistance, run_estimation, simulate
from uas_battery.analytics import cdf, error_stats, fraction_within, histogram
from uas_battery.reference import CELL_41V, CELL_41V_CAPACITY, cell_41v_estimator


# In[2]:

tel = simulate(CELL_41V, CELL_41V_CAPACITY, ConstantResistance(10.0), 600.0)
rep = run_estimation(cell_41v_estimator(), tel.samples())
e = rep.column("e_V")[rep.convergence_index:]


# In[3]:

for name, value in error_stats(e, bin_width=1e-5).as_rows():
    print(f"{name:>12} = {value}")


# In[4]:

h = histogram(e, 1e-5)
for centre, n in zip(h.centers(), h.counts):
    print(f"{centre:+.6f} V  {'#' * max(1, int(60 * n / h.counts.max())) if n else ''}")


# In[5]:

x, f = cdf(e)
print(f"{len(x)} distinct values, P(|e| < 1e-4) = {fraction_within(e, 1e-4):.3f}")
