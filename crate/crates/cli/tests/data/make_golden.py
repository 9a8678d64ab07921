"""Regenerates cubic_coupling.golden.sq.json from cubic_coupling.pes.json.

Oscillator matrix elements come from powers of the dense position operator
in a 40-state basis, independent of the Rust recurrence.
"""
import itertools
import json

import numpy as np

BASIS = 40

with open("cubic_coupling.pes.json") as f:
    pes = json.load(f)

d = pes["modals"]
a = np.diag(np.sqrt(np.arange(1, BASIS)), 1)
q = (a + a.T) / np.sqrt(2.0)


def qpow(k):
    return np.linalg.matrix_power(q, k)[:d, :d]


terms = {}


def add(key, c):
    if abs(c) > 1e-12:
        terms[key] = terms.get(key, 0.0) + c


for l, w in enumerate(pes["omegas_cm1"]):
    for n in range(d):
        add(((l, n, n),), w * (n + 0.5))

for t in pes["terms"]:
    mats = [qpow(k) for k in t["powers"]]
    for idx in itertools.product(itertools.product(range(d), repeat=2), repeat=len(mats)):
        c = t["coeff_cm1"]
        for m, (r, s) in zip(mats, idx):
            c *= m[r, s]
        add(tuple((mode, r, s) for mode, (r, s) in zip(t["modes"], idx)), c)

out = {
    "schema_version": 1,
    "n_modes": pes["n_modes"],
    "modals": d,
    "constant_cm1": 0.0,
    "terms": [
        {"coeff_cm1": c, "factors": [{"mode": m, "raise": r, "lower": s} for m, r, s in key]}
        for key, c in sorted(terms.items())
        if abs(c) > 1e-12
    ],
}
with open("cubic_coupling.golden.sq.json", "w") as f:
    json.dump(out, f, indent=1)
    f.write("\n")
