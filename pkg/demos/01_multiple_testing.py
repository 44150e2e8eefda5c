import numpy as np

from svnkit import TestBattery, binom_tail_at_least, bonferroni, fdr, fwer_at_least_one

# A fair coin tossed 10 times lands heads 8 or more times with probability
# C(10,8)+C(10,9)+C(10,10) over 2^10.  Rare for one coin, not for many.
p8 = binom_tail_at_least(10, 8, 0.5)
print(f"P(heads >= 8 of 10)         = {p8:.4f}")
print(f"P(some coin of 100 does it) = {fwer_at_least_one(p8, 100):.4f}")

# So thresholds must shrink with the number of tests N_t.  Build a battery
# with 950 null tests (uniform p) and 50 real effects (p piled near zero).
rng = np.random.default_rng(7)
p = np.concatenate([rng.random(950), rng.beta(0.2, 60.0, 50)])
truth = np.arange(p.size) >= 950
battery = TestBattery.from_pvalues(p, alpha=0.05)

for name, result in (("bonferroni", bonferroni(battery)), ("fdr", fdr(battery))):
    hits = result.mask(p.size)
    false = np.sum(hits & ~truth)
    print(f"{name:>10}: threshold {result.threshold:.2e}, {hits.sum():3d} rejected, {false} false")

# Bonferroni guards against even one false rejection; FDR lets a small
# share through in exchange for finding many more real effects.
assert bonferroni(battery).rejected <= fdr(battery).rejected
