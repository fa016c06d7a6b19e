"""The 20 km x 20 km grid study: 5 POIs, 7 existing chargers, 148 candidates,
open 4.  Compares exhaustive search with both annealers and the baselines.

Run:  python3 demos/02_grid_case_study.py
"""

from evsiting import AnnealSchedule, GridSpec, default_weights, generate_grid_instance, solve, station_metrics

inst = generate_grid_instance(GridSpec(20, 20, 5, 7, 148, 4, seed=2024))
w = default_weights(inst.n_candidates, inst)

results = {}
for name, sched in [
    ("exact", None),
    ("sa-swap", AnnealSchedule(reads=1000, seed=1)),
    ("sa-qubo", AnnealSchedule(reads=200, seed=1)),
    ("greedy", None),
    ("random", AnnealSchedule(reads=1000, seed=1)),
]:
    r = solve(inst, w, name, sched or AnnealSchedule())
    results[name] = r
    print(f"{name:8s} Z_total={r.best_objective.total:12.3f} feasible={r.feasible!s:5s} "
          f"sites={r.selected} {r.wall_time:6.2f}s")

print()
print(station_metrics(inst, results["exact"].best, w).format_table())
