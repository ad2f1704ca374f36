# coding: utf-8

# # Estimating the cell parameters online
#
# We generate 0.4 A constant-current telemetry from the reference cell and run
# the adaptive observer on it. This is the longest demo (about 20 s).

# In[1]:

from uas_battery import ConstantCurrent, run_estimation, simulate
from uas_battery.estimator import ADAPTIVE
from uas_battery.reference import CELL_41V, CELL_41V_CAPACITY, CELL_41V_ESTIMATED, cell_41v_estimator


# In[2]:

tel = simulate(CELL_41V, CELL_41V_CAPACITY, ConstantCurrent(0.4), 4000.0)
rep = run_estimation(cell_41v_estimator(), tel.samples())
print(rep.summary())


# Compare each adaptive parameter with the true value and the published
# estimate. Most land exactly on the adaptation fixed point set by the bounds.

# In[3]:

print(" n        true     estimate    published   err%")
for n in ADAPTIVE:
    true, est = CELL_41V[n], rep.params[n]
    print(f"r{n:<3d} {true:11.5g} {est:11.5g} {CELL_41V_ESTIMATED[n]:11.5g} {100 * abs(est - true) / true:7.2f}")


# r3 and r21 are not adapted. Under a constant current only Eo - i*Rs is
# visible at the terminals, so the pair cannot be separated and r21 collapses
# towards zero while r3 absorbs the difference.

# In[4]:

print(f"r3  = {rep.params.r3:.5f} (true {CELL_41V.r3})")
print(f"r21 = {rep.params.r21:.5g} (true {CELL_41V.r21})")
e = rep.column("e_V")[rep.convergence_index:]
print(f"converged at sample {rep.convergence_index}, max |e| afterwards {abs(e).max():.2e} V")
