# coding: utf-8

# # Mittag-Leffler functions and the Nussbaum gain
#
# The observer's gain is N(k) = E_2.5(-k^2.5). Its running average has to swing
# to both signs without bound, which is what lets the observer work without
# knowing the sign of the control direction.

# In[1]:

import math

import numpy as np

from uas_battery.specfun import NussbaumParams, mittag_leffler, nussbaum, verify_nussbaum_property


# Two closed forms to check against: E_1(x) = exp(x) and E_2(x) = cosh(sqrt(x)).

# In[2]:

for x in (-5.0, -1.0, 0.5, 3.0):
    print(f"E_1({x:+}) = {mittag_leffler(1.0, x):.15g}   exp = {math.exp(x):.15g}")
for x in (0.0, 4.0, 25.0):
    print(f"E_2({x}) = {mittag_leffler(2.0, x):.15g}   cosh(sqrt) = {math.cosh(math.sqrt(x)):.15g}")


# In[3]:

p = NussbaumParams(alpha=2.5, lam=1.0)
for k in np.arange(0.0, 14.1, 2.0):
    print(f"N({k:4.1f}) = {nussbaum(p, k):+.6f}")


# The running average (1/k) * integral of N. On [0, 10] it only reaches about
# -0.73; the excursion past -1 comes a little later.

# In[4]:

for k_max in (10.0, 14.0):
    rep = verify_nussbaum_property(p, 0.0, k_max, grid=2801)
    print(f"[0, {k_max:g}]: sup {rep.sup_avg:+.3f}  inf {rep.inf_avg:+.3f}")
