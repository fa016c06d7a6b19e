"""Build a small siting instance, compile it to a QUBO and check the energy
identity by brute force: energy(x) == Z_total(x) + lambda * (sum(x) - CS)^2.

Run:  python3 demos/01_qubo_identity.py
"""

import itertools

import numpy as np

from evsiting import GridSpec, build_qubo, default_weights, energy, generate_grid_instance, objective_components

inst = generate_grid_instance(GridSpec(width_km=10, height_km=10, n_pois=4, n_existing=2,
                                       n_candidates=8, cs_count=3, seed=1))
w = default_weights(inst.n_candidates, inst)
print(f"gammas = {tuple(round(g, 3) for g in w.gammas)}, lambda = {w.lambda_card:.1f}")

q = build_qubo(inst, w)
print(f"QUBO: {q.n} variables, {len(q.couplings)} couplings, offset {q.offset:.1f}")

worst = 0.0
best = None
for bits in itertools.product((0, 1), repeat=q.n):
    x = np.array(bits)
    z = objective_components(inst, w, x).total
    lhs = energy(q, x)
    rhs = z + w.lambda_card * (x.sum() - inst.cs_count) ** 2
    worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    if best is None or lhs < best[0]:
        best = (lhs, bits)

print(f"max relative deviation over 2^{q.n} assignments: {worst:.2e}")
print(f"QUBO minimizer {best[1]} opens {sum(best[1])} sites (CS = {inst.cs_count})")
