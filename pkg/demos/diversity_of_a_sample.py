"""How the diversity score behaves on small point sets.

The score is the exponential of the spectral entropy of a normalized
similarity matrix: n copies of the same point count as 1 effective item,
n mutually dissimilar points count as n.
"""

import numpy as np

from vendiguide import KernelSpec, vendi_gradient, vendi_score

rng = np.random.default_rng(7)
spec = KernelSpec(kind="rbf", bandwidth=1.0)

clones = np.zeros((6, 2))
spread = rng.normal(size=(6, 2)) * 50.0

print("six identical points :", round(vendi_score(clones, spec).score, 6))
print("six far-apart points :", round(vendi_score(spread, spec).score, 6))

# duplicating a whole set changes nothing; the score measures effective
# variety, not count
half = rng.normal(size=(4, 2))
both = np.concatenate([half, half])
print("4 points:", round(vendi_score(half, spec).score, 4),
      " same 4 twice:", round(vendi_score(both, spec).score, 4))

# a tight cluster plus one outlier sits between 1 and 2
cluster = rng.normal(size=(5, 2)) * 0.05
with_outlier = np.concatenate([cluster, [[8.0, 0.0]]])
print("cluster + outlier    :", round(vendi_score(with_outlier, spec).score, 4))

# the gradient wrt a candidate point tells the candidate where diversity
# grows: directly away from the bank it resembles most
bank = np.array([[0.0, 0.0], [0.2, 0.0], [4.0, 4.0]])
candidate = np.array([0.4, 0.1])
res = vendi_gradient(candidate, bank, spec)
direction = res.grad / np.linalg.norm(res.grad)
print("candidate near bank[0:2]; ascent direction:", np.round(direction, 3))
print("(points away from the crowded corner, ignores the far member)")
